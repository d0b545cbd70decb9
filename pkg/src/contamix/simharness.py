"""Replicated Monte-Carlo estimation studies and their CSV emission.

An experiment is a declarative config: a kernel, a true contamination level
lambda_star, and either a list of difficulty exponents nu (phase_transition
mode, fixed n, shift mu_star = sqrt(1 / (lambda_star n^nu))) or a list of
sample sizes (rate_scaling mode, fixed shift via ``mu_star_override``).  Every
(cell, replicate) pair is an independent work item whose RNG seed is derived
from (master_seed, cell_index, rep_index) by a splitmix-style 64-bit mix, so
results are reproducible replicate-by-replicate and independent of worker
count or scheduling order.

Outputs: a summary table of per-cell mean squared errors and the raw
per-replicate estimates, both writable as CSV.  The summary header is
``nu,mu_star,n,replicates,mse_lambda,mse_mu``; the raw header is
``nu,rep,lambda_hat,mu_hat`` in phase_transition mode and
``n,rep,lambda_hat,mu_hat`` in rate_scaling mode (cells are keyed by n there).
Numbers are written in shortest round-trip decimal form.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .estimator import build_grid, estimate
from .kernels import Kernel, mc_inner
from .mixture import MixtureParams, sample_mixture

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SummaryRow",
    "ExperimentResult",
    "replicate_seed",
    "run_replicate",
    "run_experiment",
    "emit_csv",
    "load_config",
]

MODES = ("phase_transition", "rate_scaling")
INNER_METHODS = ("quadrature", "mc")

# T_MC = n^2 capped at 1e8 draws per grid shift for the Monte-Carlo
# inner-product fidelity mode.
MC_DRAWS_CAP = 10 ** 8


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


DEFAULT_NU_LADDER = tuple(a / 24 for a in range(1, 25))


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: Kernel
    n: int
    lambda_star: float
    nu_values: tuple = ()
    M: float = 10.0
    replicates: int = 200
    master_seed: int = 0
    mode: str = "phase_transition"
    n_values: tuple | None = None
    mu_star_override: float | None = None
    inner_method: str = "quadrature"

    def __post_init__(self):
        if self.kernel.dim != 1:
            raise ConfigError("experiments are one-dimensional")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.inner_method not in INNER_METHODS:
            raise ConfigError(f"inner_method must be one of {INNER_METHODS}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not 0.0 < self.lambda_star < 1.0:
            raise ConfigError("lambda_star must lie in (0, 1)")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be nonnegative")
        if self.mode == "phase_transition":
            if not self.nu_values:
                object.__setattr__(self, "nu_values", DEFAULT_NU_LADDER)
            if any(not 0.0 < nu <= 1.0 for nu in self.nu_values):
                raise ConfigError("nu values must lie in (0, 1]")
        else:
            if not self.n_values:
                raise ConfigError("rate_scaling needs a nonempty n_values list")
            if self.mu_star_override is None and len(self.nu_values) != 1:
                raise ConfigError(
                    "rate_scaling needs mu_star_override or a single nu value"
                )
        for _, nu, n in self.cells():
            mu = self.mu_star(nu, n)
            if mu > self.M:
                raise ConfigError(
                    f"mu_star {mu:.4g} exceeds the shift bound M={self.M} (nu={nu}, n={n})"
                )

    def mu_star(self, nu: float, n: int) -> float:
        if self.mu_star_override is not None:
            return float(self.mu_star_override)
        return math.sqrt(1.0 / (self.lambda_star * n ** nu))

    def cells(self):
        """(index, nu, n) triples; cells vary over nu or over n depending on mode."""
        if self.mode == "phase_transition":
            return [(i, float(nu), self.n) for i, nu in enumerate(self.nu_values)]
        nu = float(self.nu_values[0]) if self.nu_values else 0.0
        return [(i, nu, int(n)) for i, n in enumerate(self.n_values)]

    def cell_key(self, nu: float, n: int) -> float:
        """Raw-file cell key: nu in phase_transition mode, n in rate_scaling."""
        return nu if self.mode == "phase_transition" else float(n)


@dataclass(frozen=True)
class SummaryRow:
    nu: float
    mu_star: float
    n: int
    replicates: int
    mse_lambda: float
    mse_mu: float


@dataclass(frozen=True)
class ExperimentResult:
    mode: str
    key_name: str            # "nu" or "n": first column of the raw file
    rows: tuple              # SummaryRow per cell
    raw: tuple               # (cell_key, rep, lambda_hat, mu_hat) per replicate


# ----------------------------- seeding -----------------------------

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(*parts: int) -> int:
    """Fold integers into a 64-bit value with splitmix64 finalization rounds.

    Each part is xor-ed into the accumulator, which is then advanced by the
    golden-ratio increment 0x9E3779B97F4A7C15 and scrambled with the
    splitmix64 constants 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB.  Stable
    across versions by construction; do not change the constants.
    """
    acc = 0
    for part in parts:
        acc = (acc ^ (part & _MASK64)) & _MASK64
        acc = (acc + _GAMMA) & _MASK64
        z = acc
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        acc = z ^ (z >> 31)
    return acc


def replicate_seed(master_seed: int, nu_index: int, rep_index: int) -> int:
    """Counter-based per-replicate seed, independent of scheduling."""
    return _mix64(master_seed, nu_index, rep_index)


# ----------------------------- execution -----------------------------

# Monte-Carlo inner products for a grid, in fidelity mode.  Keyed per
# (kernel, n, M, master_seed); fills are idempotent.
_MC_INNER_CACHE: dict[tuple, np.ndarray] = {}


def _mc_inner_products(config: ExperimentConfig, n: int) -> np.ndarray:
    key = (config.kernel, n, config.M, config.master_seed)
    hit = _MC_INNER_CACHE.get(key)
    if hit is None:
        grid = build_grid(n, config.M, 1)
        draws = min(n * n, MC_DRAWS_CAP)
        base = _mix64(config.master_seed, 0x4D43)  # dedicated stream for inner products
        vals = np.array(
            [
                mc_inner(config.kernel, mu, draws, _mix64(base, j))[0]
                for j, mu in enumerate(grid.mu_levels)
            ]
        )
        vals.setflags(write=False)
        _MC_INNER_CACHE[key] = vals
        hit = vals
    return hit


def run_replicate(config: ExperimentConfig, nu_index: int, rep_index: int):
    """One estimation run; returns (lambda_hat, mu_hat) as floats.

    The replicate seed is ``replicate_seed(master_seed, nu_index, rep_index)``;
    in rate_scaling mode the first index selects the n-value cell.
    """
    cells = config.cells()
    if not 0 <= nu_index < len(cells):
        raise IndexError(f"cell index {nu_index} out of range")
    if not 0 <= rep_index < config.replicates:
        raise IndexError(f"replicate index {rep_index} out of range")
    _, nu, n = cells[nu_index]
    mu_star = config.mu_star(nu, n)
    theta = MixtureParams(config.lambda_star, mu_star)
    seed = replicate_seed(config.master_seed, nu_index, rep_index)
    data = sample_mixture(config.kernel, theta, n, seed)
    if config.inner_method == "mc" and config.kernel.family == "skew_gaussian":
        result = estimate(config.kernel, data, config.M, inner_products=_mc_inner_products(config, n))
    else:
        result = estimate(config.kernel, data, config.M)
    return result.lambda_hat, float(result.mu_hat[0])


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run every (cell, replicate) work item and aggregate per-cell MSEs.

    MSE(lambda) = mean (lambda_hat - lambda_star)^2 and likewise for mu.
    Results are merged in (cell, replicate) index order, so the output is a
    pure function of the config regardless of ``workers``.
    """
    cells = config.cells()
    reps = config.replicates
    tasks = [(ci, ri) for ci in range(len(cells)) for ri in range(reps)]
    estimates: list = [None] * len(tasks)

    def _run(flat: int):
        ci, ri = tasks[flat]
        return run_replicate(config, ci, ri)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for flat, est in zip(range(len(tasks)), pool.map(_run, range(len(tasks)))):
                estimates[flat] = est
    else:
        for flat in range(len(tasks)):
            estimates[flat] = _run(flat)

    rows = []
    raw = []
    for ci, (_, nu, n) in enumerate(cells):
        mu_star = config.mu_star(nu, n)
        lam_hats = np.array([estimates[ci * reps + ri][0] for ri in range(reps)])
        mu_hats = np.array([estimates[ci * reps + ri][1] for ri in range(reps)])
        rows.append(
            SummaryRow(
                nu=nu if config.mu_star_override is None else 0.0,
                mu_star=mu_star,
                n=n,
                replicates=reps,
                mse_lambda=float(np.mean((lam_hats - config.lambda_star) ** 2)),
                mse_mu=float(np.mean((mu_hats - mu_star) ** 2)),
            )
        )
        key = config.cell_key(nu if config.mu_star_override is None else 0.0, n)
        for ri in range(reps):
            raw.append((key, ri, float(lam_hats[ri]), float(mu_hats[ri])))
    key_name = "nu" if config.mode == "phase_transition" else "n"
    return ExperimentResult(mode=config.mode, key_name=key_name, rows=tuple(rows), raw=tuple(raw))


# ----------------------------- CSV emission -----------------------------


def _fmt(value) -> str:
    """Shortest round-trip decimal for floats, plain digits for ints."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(result: ExperimentResult, summary_path, raw_path=None) -> None:
    """Write the summary CSV (and the raw CSV when a path is given)."""
    try:
        with open(summary_path, "w", newline="\n") as fh:
            fh.write("nu,mu_star,n,replicates,mse_lambda,mse_mu\n")
            for r in result.rows:
                fh.write(
                    ",".join(
                        [_fmt(r.nu), _fmt(r.mu_star), _fmt(r.n), _fmt(r.replicates),
                         _fmt(r.mse_lambda), _fmt(r.mse_mu)]
                    )
                    + "\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write summary CSV {summary_path}: {exc}") from exc
    if raw_path is None:
        return
    try:
        with open(raw_path, "w", newline="\n") as fh:
            fh.write(f"{result.key_name},rep,lambda_hat,mu_hat\n")
            for key, rep, lh, mh in result.raw:
                cell = _fmt(int(key)) if result.key_name == "n" else _fmt(key)
                fh.write(f"{cell},{rep},{_fmt(lh)},{_fmt(mh)}\n")
    except OSError as exc:
        raise OSError(f"cannot write raw CSV {raw_path}: {exc}") from exc


# ----------------------------- config files -----------------------------

_REQUIRED_KEYS = ("kernel", "n", "lambda_star", "M", "replicates", "master_seed", "mode")


def _parse_scalar(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def load_config(path) -> ExperimentConfig:
    """Parse a flat ``key = value`` config file (lists are comma-separated).

    Recognized keys: kernel, alpha (skew_gaussian only), n, lambda_star,
    nu_values, M, replicates, master_seed, mode, n_values, mu_star_override,
    inner_method.  Missing or unknown keys raise ConfigError naming the key.
    """
    entries: dict = {}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for ln, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{ln}: expected 'key = value', got {line!r}")
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if "," in value:
            entries[key] = tuple(_parse_scalar(v.strip()) for v in value.split(","))
        else:
            entries[key] = _parse_scalar(value)

    known = set(_REQUIRED_KEYS) | {"alpha", "nu_values", "n_values", "mu_star_override", "inner_method"}
    for key in entries:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    for key in _REQUIRED_KEYS:
        if key not in entries:
            raise ConfigError(f"missing config key {key!r}")

    def as_tuple(key):
        value = entries.get(key)
        if value is None:
            return ()
        return value if isinstance(value, tuple) else (value,)

    try:
        alpha = entries.get("alpha")
        kernel = Kernel(str(entries["kernel"]), alpha=float(alpha) if alpha is not None else None)
        return ExperimentConfig(
            kernel=kernel,
            n=int(entries["n"]),
            lambda_star=float(entries["lambda_star"]),
            nu_values=tuple(float(v) for v in as_tuple("nu_values")),
            M=float(entries["M"]),
            replicates=int(entries["replicates"]),
            master_seed=int(entries["master_seed"]),
            mode=str(entries["mode"]),
            n_values=tuple(int(v) for v in as_tuple("n_values")) or None,
            mu_star_override=(
                float(entries["mu_star_override"]) if "mu_star_override" in entries else None
            ),
            inner_method=str(entries.get("inner_method", "quadrature")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
