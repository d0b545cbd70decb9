"""Two-component contamination mixtures (1 - lam) phi + lam phi(. - mu).

Evaluation, seeded sampling, and the exact L2 geometry of the family: squared
norms and pairwise squared distances reduce to kernel inner products, so no
integration happens here.
"""

from dataclasses import dataclass

import numpy as np

from .kernels import Kernel, QuadratureSpec, cross_inner, pdf_many, sample_with_rng, self_inner

__all__ = [
    "MixtureParams",
    "mixture_pdf",
    "mixture_pdf_many",
    "mixture_l2_norm_sq",
    "l2_distance_sq",
    "sample_mixture",
]


@dataclass(frozen=True)
class MixtureParams:
    """Contamination proportion and shift.

    ``lam`` in [0, 1]: the estimation theory lives on (0, 1), and the grid
    never emits 0, but the evaluation operations tolerate both endpoints.
    ``mu`` is stored as a length-d vector.
    """

    lam: float
    mu: np.ndarray

    def __init__(self, lam: float, mu):
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        if not (0.0 <= lam <= 1.0):
            raise ValueError(f"lam must lie in [0, 1], got {lam}")
        if not np.all(np.isfinite(mu)):
            raise ValueError("mu must be finite")
        object.__setattr__(self, "lam", float(lam))
        object.__setattr__(self, "mu", mu)
        self.mu.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


def _check_dim(kernel: Kernel, theta: MixtureParams) -> None:
    if theta.dim != kernel.dim:
        raise ValueError(f"shift dimension {theta.dim} != kernel dim {kernel.dim}")


def _mu_arg(theta: MixtureParams):
    # kernels take scalar shifts in dim 1 and vectors otherwise
    return float(theta.mu[0]) if theta.dim == 1 else theta.mu


def mixture_pdf_many(kernel: Kernel, theta: MixtureParams, xs) -> np.ndarray:
    """Vectorized mixture density (1 - lam) phi(x) + lam phi(x - mu)."""
    _check_dim(kernel, theta)
    xs = np.asarray(xs, dtype=float)
    shift = _mu_arg(theta)
    return (1.0 - theta.lam) * pdf_many(kernel, xs) + theta.lam * pdf_many(kernel, xs - shift)


def mixture_pdf(kernel: Kernel, theta: MixtureParams, x) -> float:
    """Mixture density at a single point."""
    _check_dim(kernel, theta)
    x = np.asarray(x, dtype=float)
    if kernel.dim == 1 and x.size == 1:
        x = x.reshape(())
    elif x.shape != (kernel.dim,):
        raise ValueError(f"point shape {x.shape} does not match kernel dim {kernel.dim}")
    return float(mixture_pdf_many(kernel, theta, x))


def mixture_l2_norm_sq(
    kernel: Kernel, theta: MixtureParams, quadrature: QuadratureSpec | None = None
) -> float:
    """Exact squared L2 norm:  [lam^2 + (1-lam)^2] ||phi||^2 + 2 lam (1-lam) <phi, phi_mu>."""
    _check_dim(kernel, theta)
    lam = theta.lam
    s = self_inner(kernel)
    c = cross_inner(kernel, _mu_arg(theta), quadrature)
    return (lam * lam + (1.0 - lam) ** 2) * s + 2.0 * lam * (1.0 - lam) * c


def l2_distance_sq(
    kernel: Kernel,
    theta1: MixtureParams,
    theta2: MixtureParams,
    quadrature: QuadratureSpec | None = None,
) -> float:
    """Exact  ||f_theta1 - f_theta2||_2^2  from kernel inner products.

    The difference expands as (lam2 - lam1) phi + lam1 phi_mu1 - lam2 phi_mu2,
    so three cross inner products suffice.  Arguments are put in a canonical
    order first, making the result bitwise symmetric.  Round-off can push the
    value a hair below zero for near-identical parameters; it is clamped at 0
    so callers can take square roots.
    """
    _check_dim(kernel, theta1)
    _check_dim(kernel, theta2)
    if (theta2.lam, tuple(theta2.mu)) < (theta1.lam, tuple(theta1.mu)):
        theta1, theta2 = theta2, theta1
    l1, l2 = theta1.lam, theta2.lam
    s = self_inner(kernel)
    c1 = cross_inner(kernel, _mu_arg(theta1), quadrature)
    c2 = cross_inner(kernel, _mu_arg(theta2), quadrature)
    d12 = theta1.mu - theta2.mu
    c12 = cross_inner(kernel, float(d12[0]) if theta1.dim == 1 else d12, quadrature)
    a = l2 - l1
    val = (
        (a * a + l1 * l1 + l2 * l2) * s
        + 2.0 * a * l1 * c1
        - 2.0 * a * l2 * c2
        - 2.0 * l1 * l2 * c12
    )
    return max(val, 0.0)


def sample_mixture(kernel: Kernel, theta: MixtureParams, count: int, seed: int) -> np.ndarray:
    """Seeded i.i.d. sample from the mixture.

    A Bernoulli(lam) indicator selects the shifted component, then
    X = Z + mu * indicator with Z ~ phi.  The indicator uniforms are drawn
    before the kernel draws, from a single generator, so the output is a pure
    function of the seed.
    """
    _check_dim(kernel, theta)
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    shifted = rng.random(count) < theta.lam
    z = sample_with_rng(kernel, count, rng)
    if kernel.dim == 1:
        return z + float(theta.mu[0]) * shifted
    return z + theta.mu[None, :] * shifted[:, None]
