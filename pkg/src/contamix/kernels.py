"""Baseline density families and their translation inner products.

Four families are supported: standard Gaussian, standard Laplace, standard
Cauchy and the skew-Gaussian with asymmetry parameter alpha.  Everything
downstream (mixture geometry, contrast evaluation, certification scans) is
driven by two quantities computed here:

* ``self_inner``  -- the squared L2 norm of the density,
* ``cross_inner`` -- the translation inner product  <phi, phi(. - mu)>.

Gaussian, Laplace and Cauchy admit exact closed forms.  The skew-Gaussian
does not, so its inner products are evaluated by deterministic composite
Simpson quadrature on a window wide enough that the neglected tail mass is
below ``QuadratureSpec.tail_tolerance``; a seeded Monte-Carlo estimate
(``mc_inner``) is kept as an independent cross-check.

Only the Gaussian family is defined for dimension d > 1 (it is the only one
with a d-dimensional closed-form inner product); the other families are
strictly one-dimensional here.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import erfc

__all__ = [
    "FAMILIES",
    "Kernel",
    "QuadratureSpec",
    "default_quadrature",
    "pdf",
    "pdf_many",
    "self_inner",
    "cross_inner",
    "cross_inner_many",
    "mc_inner",
    "sample",
    "sample_with_rng",
]

FAMILIES = ("gaussian", "laplace", "cauchy", "skew_gaussian")

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_2 = math.sqrt(2.0)

# Quadrature half-widths per family, sized so that the neglected tail mass of
# the inner-product integrand stays below 1e-12.  The Cauchy family never
# goes through quadrature (closed form only; polynomial tails would need an
# enormous window).
_HALF_WIDTH = {"gaussian": 12.0, "laplace": 30.0, "skew_gaussian": 12.0}


@dataclass(frozen=True)
class Kernel:
    """A baseline density: family name, skewness (skew-Gaussian only), dimension."""

    family: str
    alpha: float | None = None
    dim: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "skew_gaussian":
            if self.alpha is None or self.alpha == 0.0:
                raise ValueError("skew_gaussian requires a nonzero alpha")
        elif self.alpha is not None:
            raise ValueError(f"alpha is only meaningful for skew_gaussian, got {self.family}")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.dim > 1 and self.family != "gaussian":
            raise ValueError("dim > 1 is only supported for the gaussian family")


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite-Simpson settings for inner products without a closed form."""

    half_width: float
    panels: int = 16384
    tail_tolerance: float = 1e-12

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.panels < 2 or self.panels % 2 != 0:
            raise ValueError("panels must be a positive even integer")


def default_quadrature(kernel: Kernel) -> QuadratureSpec:
    """Family default quadrature window; Cauchy has none (closed form only)."""
    if kernel.family == "cauchy":
        raise ValueError("cauchy inner products use the closed form, not quadrature")
    return QuadratureSpec(half_width=_HALF_WIDTH[kernel.family])


# ----------------------------- density evaluation -----------------------------


def pdf_many(kernel: Kernel, x) -> np.ndarray:
    """Vectorized density evaluation.

    For dim == 1, ``x`` is scalar-like or a 1-d array of points.  For the
    d-dimensional Gaussian, ``x`` has shape (d,) or (m, d) and the isotropic
    product density is returned.
    """
    x = np.asarray(x, dtype=float)
    if kernel.dim > 1:
        if x.ndim == 0 or x.shape[-1] != kernel.dim:
            raise ValueError(f"point shape {x.shape} does not match kernel dim {kernel.dim}")
        sq = np.sum(np.square(x), axis=-1)
        return np.exp(-0.5 * sq) / _SQRT_2PI ** kernel.dim
    if kernel.family == "gaussian":
        return np.exp(-0.5 * np.square(x)) / _SQRT_2PI
    if kernel.family == "laplace":
        return 0.5 * np.exp(-np.abs(x))
    if kernel.family == "cauchy":
        return 1.0 / (math.pi * (1.0 + np.square(x)))
    # skew_gaussian: 2 * psi(x) * Psi(alpha x), with Psi via erfc
    return np.exp(-0.5 * np.square(x)) / _SQRT_2PI * erfc(-kernel.alpha * x / _SQRT_2)


def pdf(kernel: Kernel, x) -> float:
    """Density at a single point (scalar for dim 1, length-d vector otherwise)."""
    x = np.asarray(x, dtype=float)
    if kernel.dim == 1:
        if x.size != 1:
            raise ValueError(f"expected a scalar point for dim 1, got shape {x.shape}")
        return float(pdf_many(kernel, x.reshape(())))
    if x.shape != (kernel.dim,):
        raise ValueError(f"point shape {x.shape} does not match kernel dim {kernel.dim}")
    return float(pdf_many(kernel, x))


# ----------------------------- inner products -----------------------------


def self_inner(kernel: Kernel) -> float:
    """Squared L2 norm of the density, ``<phi, phi>``."""
    if kernel.family == "gaussian":
        return (4.0 * math.pi) ** (-kernel.dim / 2.0)
    if kernel.family == "laplace":
        return 0.25
    if kernel.family == "cauchy":
        return 1.0 / (2.0 * math.pi)
    return cross_inner(kernel, 0.0)


def _skew_cross_quadrature(kernel: Kernel, mu: float, spec: QuadratureSpec) -> float:
    """Composite Simpson for <phi, phi_mu> of the skew-Gaussian.

    The integrand decays like exp(-(x - mu/2)^2), so a window covering
    [min(0, mu) - L, max(0, mu) + L] keeps the truncated tail far below
    ``spec.tail_tolerance``.
    """
    lo = min(0.0, mu) - spec.half_width
    hi = max(0.0, mu) + spec.half_width
    xs = np.linspace(lo, hi, spec.panels + 1)
    vals = pdf_many(kernel, xs) * pdf_many(kernel, xs - mu)
    h = (hi - lo) / spec.panels
    w = np.ones(spec.panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(np.dot(w, vals) * (h / 3.0))


# Memo for skew-Gaussian quadrature results.  Fills are idempotent (pure
# function of the key), so concurrent access under the GIL is safe.
_SKEW_CACHE: dict[tuple, float] = {}


def cross_inner(kernel: Kernel, mu, quadrature: QuadratureSpec | None = None) -> float:
    """Translation inner product ``<phi, phi(. - mu)>``.

    Exact closed form for gaussian / laplace / cauchy; deterministic Simpson
    quadrature for skew_gaussian (``quadrature`` overrides the family default
    there and is ignored for the closed-form families).
    """
    mu = np.asarray(mu, dtype=float)
    if kernel.dim > 1:
        if mu.shape != (kernel.dim,):
            raise ValueError(f"shift shape {mu.shape} does not match kernel dim {kernel.dim}")
        return (4.0 * math.pi) ** (-kernel.dim / 2.0) * math.exp(-float(np.dot(mu, mu)) / 4.0)
    if mu.size != 1:
        raise ValueError(f"expected a scalar shift for dim 1, got shape {mu.shape}")
    m = float(mu.reshape(()))
    if kernel.family == "gaussian":
        return (4.0 * math.pi) ** -0.5 * math.exp(-m * m / 4.0)
    if kernel.family == "laplace":
        return 0.25 * math.exp(-abs(m)) * (1.0 + abs(m))
    if kernel.family == "cauchy":
        return 2.0 / (math.pi * (4.0 + m * m))
    spec = quadrature if quadrature is not None else default_quadrature(kernel)
    key = (kernel.alpha, m, spec.half_width, spec.panels)
    hit = _SKEW_CACHE.get(key)
    if hit is None:
        hit = _skew_cross_quadrature(kernel, m, spec)
        _SKEW_CACHE[key] = hit
    return hit


def cross_inner_many(kernel: Kernel, mus, quadrature: QuadratureSpec | None = None) -> np.ndarray:
    """``cross_inner`` over an array of shifts (shape (m,) for dim 1, (m, d) else)."""
    mus = np.asarray(mus, dtype=float)
    if kernel.dim > 1:
        if mus.ndim != 2 or mus.shape[1] != kernel.dim:
            raise ValueError(f"expected shifts of shape (m, {kernel.dim}), got {mus.shape}")
        sq = np.sum(np.square(mus), axis=1)
        return (4.0 * math.pi) ** (-kernel.dim / 2.0) * np.exp(-sq / 4.0)
    mus = np.atleast_1d(mus)
    if kernel.family == "gaussian":
        return (4.0 * math.pi) ** -0.5 * np.exp(-np.square(mus) / 4.0)
    if kernel.family == "laplace":
        a = np.abs(mus)
        return 0.25 * np.exp(-a) * (1.0 + a)
    if kernel.family == "cauchy":
        return 2.0 / (math.pi * (4.0 + np.square(mus)))
    return np.array([cross_inner(kernel, m, quadrature) for m in mus])


def mc_inner(kernel: Kernel, mu, draws: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of ``<phi, phi_mu>`` as ``E_{X~phi}[phi(X - mu)]``.

    Returns ``(estimate, standard_error)``; the standard error is NaN for a
    single draw.  Deterministic given the seed.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    xs = sample(kernel, draws, seed)
    vals = pdf_many(kernel, xs - np.asarray(mu, dtype=float))
    est = float(np.mean(vals))
    if draws == 1:
        return est, math.nan
    se = float(np.std(vals, ddof=1) / math.sqrt(draws))
    return est, se


# ----------------------------- sampling -----------------------------


def sample_with_rng(kernel: Kernel, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. points from the kernel using an existing generator.

    Laplace and Cauchy go through the inverse CDF; the skew-Gaussian uses the
    representation  X = delta |Z1| + sqrt(1 - delta^2) Z2  with
    delta = alpha / sqrt(1 + alpha^2)  and Z1, Z2 independent standard normals
    (Z1 drawn first).
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if kernel.dim > 1:
        return rng.standard_normal((count, kernel.dim))
    if kernel.family == "gaussian":
        return rng.standard_normal(count)
    if kernel.family == "laplace":
        u = rng.random(count)
        u = np.maximum(u, 2.0 ** -53)  # keep log(2u) finite when u == 0
        return np.where(u < 0.5, np.log(2.0 * u), -np.log(2.0 * (1.0 - u)))
    if kernel.family == "cauchy":
        u = rng.random(count)
        return np.tan(math.pi * (u - 0.5))
    z = rng.standard_normal((count, 2))
    delta = kernel.alpha / math.sqrt(1.0 + kernel.alpha ** 2)
    return delta * np.abs(z[:, 0]) + math.sqrt(1.0 - delta ** 2) * z[:, 1]


def sample(kernel: Kernel, count: int, seed: int) -> np.ndarray:
    """Seeded i.i.d. sample from the kernel; shape (count,) or (count, d)."""
    return sample_with_rng(kernel, count, np.random.default_rng(seed))
