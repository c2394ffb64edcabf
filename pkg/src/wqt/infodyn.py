"""Liouville, information and time operators on sampled densities, plus entropy rates of 1-D maps.

Time derivatives use second-order central differences (one-sided second-order
stencils at the two boundary samples).  Map entropies are in nats per
iteration.  Maps with a piecewise-linear exact form (doubling, tent) are
iterated on rationals ``p/q`` with a fixed prime ``q``, which avoids the
collapse of binary floating point orbits onto 0 after ~50 steps.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# 2 is a primitive root mod this prime, so doubling orbits of p/q have period q - 1
ORBIT_PRIME = 1_000_000_000_091
GOLDEN = (math.sqrt(5) - 1) / 2
MIN_SAMPLES = 5


class InfodynError(ValueError):
    pass


class UndersampledError(InfodynError):
    def __init__(self, msg, coverage):
        super().__init__(msg)
        self.coverage = coverage


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if not self.dt > 0:
            raise InfodynError("dt must be positive")
        if self.n < MIN_SAMPLES:
            raise InfodynError(f"grid needs at least {MIN_SAMPLES} samples, got {self.n}")

    @classmethod
    def symmetric(cls, half_width: float, dt: float) -> "TimeGrid":
        """Grid on [-half_width, half_width] that contains t = 0."""
        m = int(round(half_width / dt))
        return cls(-m * dt, dt, 2 * m + 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def refined(self) -> "TimeGrid":
        """Same interval at half the spacing."""
        return TimeGrid(self.t0, self.dt / 2, 2 * self.n - 1)


@dataclass(frozen=True)
class TimeDensity:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise InfodynError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise InfodynError("non-finite sample")
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, grid: TimeGrid, f: Callable) -> "TimeDensity":
        return cls(grid, f(grid.times))

    def with_values(self, v) -> "TimeDensity":
        return TimeDensity(self.grid, v)


@dataclass(frozen=True)
class InfoParams:
    I0: float = 0.0
    K: float = math.log(2)

    def __post_init__(self):
        if self.K < 0:
            raise InfodynError("K must be nonnegative")


def _derivative(values, dt):
    if len(values) < MIN_SAMPLES:
        raise InfodynError("grid too short")
    return np.gradient(values, dt, edge_order=2)


def liouville_apply(rho: TimeDensity) -> TimeDensity:
    """``L ρ = i dρ/dt``."""
    return rho.with_values(1j * _derivative(rho.values, rho.grid.dt))


def time_apply(rho: TimeDensity) -> TimeDensity:
    return rho.with_values(rho.grid.times * rho.values)


def info_apply(rho: TimeDensity, params: InfoParams) -> TimeDensity:
    """``M ρ = (I0 + K t) ρ`` pointwise."""
    return rho.with_values((params.I0 + params.K * rho.grid.times) * rho.values)


def lt_commutator(rho: TimeDensity) -> np.ndarray:
    return liouville_apply(time_apply(rho)).values - rho.grid.times * liouville_apply(rho).values


def lm_commutator(rho: TimeDensity, params: InfoParams) -> np.ndarray:
    """``[L, M] ρ``; the constant part of ``M`` commutes with ``L`` and is dropped, leaving ``K [L, T] ρ``."""
    if params.K == 0:
        return np.zeros_like(rho.values)
    return params.K * lt_commutator(rho)


def lm_commutator_direct(rho: TimeDensity, params: InfoParams) -> np.ndarray:
    """``L(Mρ) - M(Lρ)`` evaluated literally (rounding in the ``I0`` term included)."""
    return liouville_apply(info_apply(rho, params)).values - info_apply(liouville_apply(rho), params).values


@dataclass(frozen=True)
class CommutatorCheck:
    """Interior residuals ``max|[L,X]ρ - i c ρ| / max|ρ|`` at ``dt`` and ``dt/2``."""

    residual: float
    residual_half: float
    ratio: float
    order: float
    dt: float
    scale: complex  # measured c in [L,X]ρ ≈ i c ρ, least-squares over interior points

    def to_dict(self):
        return {"residual": self.residual, "residual_half": self.residual_half, "ratio": self.ratio,
                "order": self.order, "dt": self.dt,
                "scale": [float(self.scale.real), float(self.scale.imag)]}


def _residual(comm, rho, c):
    inner = slice(1, -1)
    denom = np.abs(rho.values).max()
    if denom == 0:
        raise InfodynError("zero density")
    return float(np.abs(comm[inner] - 1j * c * rho.values[inner]).max() / denom)


def _scale(comm, rho):
    v = rho.values[1:-1]
    return complex(np.vdot(1j * v, comm[1:-1]) / np.vdot(v, v))


def _check(make_comm, f, grid, c):
    out = []
    for g in (grid, grid.refined()):
        rho = TimeDensity.sample(g, f)
        comm = make_comm(rho)
        out.append((_residual(comm, rho, c), _scale(comm, rho)))
    (r1, s1), (r2, _) = out
    if r2 > 0:
        ratio = r1 / r2
        order = math.log2(ratio) if ratio > 0 else float("nan")
    else:
        ratio = order = float("inf") if r1 > 0 else float("nan")
    return CommutatorCheck(r1, r2, ratio, order, grid.dt, s1)


def commutator_lm_check(f: Callable, grid: TimeGrid, params: InfoParams) -> CommutatorCheck:
    """Residual of ``[L, M] ρ = i K ρ`` for the density ``ρ = f(t)``."""
    return _check(lambda rho: lm_commutator(rho, params), f, grid, params.K)


def commutator_lt_check(f: Callable, grid: TimeGrid) -> CommutatorCheck:
    """Residual of ``[L, T] ρ = i ρ``."""
    return _check(lt_commutator, f, grid, 1.0)


def gaussian(t, width=1.0):
    return np.exp(-0.5 * (np.asarray(t) / width) ** 2)


# ---------------------------------------------------------------------------
# interval maps


@dataclass(frozen=True)
class MapSystem:
    """Self-map of [0, 1] with its derivative and, optionally, an exact step on numerators of ``p/q``."""

    name: str
    f: Callable[[float], float]
    df: Callable[[float], float]
    kinks: tuple = ()
    exact: Callable[[int, int], int] | None = None
    params: dict = field(default_factory=dict)
    domain: tuple = (0.0, 1.0)
    partition: tuple = (0.5,)

    def in_domain(self, x) -> bool:
        return self.domain[0] <= x <= self.domain[1]


def doubling_map() -> MapSystem:
    return MapSystem("doubling", lambda x: (2 * x) % 1.0, lambda x: 2.0, kinks=(0.5,),
                     exact=lambda p, q: (2 * p) % q, params={"slope": 2})


def tent_map() -> MapSystem:
    return MapSystem("tent", lambda x: 2 * x if x < 0.5 else 2 - 2 * x,
                     lambda x: 2.0 if x < 0.5 else -2.0, kinks=(0.5,),
                     exact=lambda p, q: 2 * p if 2 * p < q else 2 * (q - p), params={"slope": 2})


def logistic_map(r: float = 4.0) -> MapSystem:
    return MapSystem("logistic", lambda x: r * x * (1 - x), lambda x: r * (1 - 2 * x), kinks=(),
                     params={"r": r})


def rotation_map(alpha: float = GOLDEN) -> MapSystem:
    return MapSystem("rotation", lambda x: (x + alpha) % 1.0, lambda x: 1.0, params={"alpha": alpha})


def period2_map() -> MapSystem:
    return MapSystem("period2", lambda x: 1.0 - x, lambda x: -1.0)


FIXTURES = {
    "doubling": doubling_map,
    "tent": tent_map,
    "logistic": logistic_map,
    "rotation": rotation_map,
    "period2": period2_map,
}


def get_map(name: str) -> MapSystem:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise InfodynError(f"unknown map {name!r}; known: {sorted(FIXTURES)}") from None


def orbit(sys: MapSystem, x0: float, n: int, burn_in: int = 0) -> np.ndarray:
    """``n`` orbit points after ``burn_in`` steps as floats (exact rational iteration when available)."""
    if not sys.in_domain(x0):
        raise InfodynError(f"x0 = {x0} outside {sys.domain}")
    out = np.empty(n)
    if sys.exact is not None:
        q = ORBIT_PRIME
        p = int(round(x0 * q)) % q or 1
        step = sys.exact
        for _ in range(burn_in):
            p = step(p, q)
        for k in range(n):
            out[k] = p / q
            p = step(p, q)
        return out
    f = sys.f
    x = float(x0)
    for _ in range(burn_in):
        x = f(x)
    for k in range(n):
        out[k] = x
        x = f(x)
    return out


@dataclass(frozen=True)
class KsEstimate:
    value: float
    method: str
    n_iter: int
    x0: float
    retries: int = 0
    coverage: float | None = None

    def __float__(self):
        return self.value

    def to_dict(self):
        return {"estimate": self.value, "method": self.method, "n_iter": self.n_iter, "x0": self.x0,
                "retries": self.retries, "coverage": self.coverage}


MAX_RETRIES = 8


def _bad_orbit(sys, xs) -> bool:
    if any(np.any(xs == k) for k in sys.kinks):
        return True
    d = np.abs(np.vectorize(sys.df, otypes=[float])(xs))
    return bool(np.any(d == 0) or not np.all(np.isfinite(d)))


def ks_entropy_lyapunov(sys: MapSystem, n_iter: int = 100_000, burn_in: int = 100, x0: float = 0.1234567) -> KsEstimate:
    """Orbit average of ``ln|f'(x_k)|``; equals the entropy rate for these 1-D fixtures.

    If the orbit lands exactly on a kink or a critical point, ``x0`` is nudged
    and the run repeated; the number of retries is reported.
    """
    x = x0
    for retry in range(MAX_RETRIES + 1):
        xs = orbit(sys, x, n_iter, burn_in)
        if not _bad_orbit(sys, xs):
            logs = np.log(np.abs(np.vectorize(sys.df, otypes=[float])(xs)))
            return KsEstimate(float(logs.mean()), "lyapunov", n_iter, x, retry)
        x = (x + 1e-7 * (retry + 1) * math.pi) % 1.0
    raise InfodynError(f"orbit from {x0} keeps hitting a non-differentiable point")


def symbolize(xs: np.ndarray, partition: Sequence[float]) -> np.ndarray:
    """Cell index of each point for the partition given by its interior breakpoints."""
    return np.searchsorted(np.asarray(partition, dtype=float), xs, side="right").astype(np.int64)


def _block_codes(symbols, depth, alphabet, n_windows):
    codes = np.zeros(n_windows, dtype=np.int64)
    for j in range(depth):
        codes = codes * alphabet + symbols[j:j + n_windows]
    return codes


def _block_entropy(codes) -> tuple[float, int]:
    _, counts = np.unique(codes, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum()), len(counts)


MIN_PER_BLOCK = 5


def block_entropies(symbols, depth, alphabet) -> tuple[float, float, float]:
    """``H(depth)``, ``H(depth-1)`` over the same window positions, and the depth-``depth`` coverage."""
    n_windows = len(symbols) - depth + 1
    if n_windows < 1:
        raise InfodynError("orbit shorter than the block depth")
    hi, distinct = _block_entropy(_block_codes(symbols, depth, alphabet, n_windows))
    lo, _ = _block_entropy(_block_codes(symbols, depth - 1, alphabet, n_windows)) if depth > 1 else (0.0, 1)
    coverage = distinct / float(alphabet) ** depth
    if n_windows < MIN_PER_BLOCK * distinct:
        raise UndersampledError(
            f"{n_windows} windows for {distinct} distinct blocks of depth {depth} (coverage {coverage:.3g})",
            coverage)
    return hi, lo, coverage


def ks_entropy_symbolic(sys: MapSystem, partition: Sequence[float] | None = None, depth: int = 10,
                        n_iter: int = 1_000_000, x0: float = 0.1234567, burn_in: int = 100) -> KsEstimate:
    """Block-entropy rate ``H(depth) - H(depth-1)`` of the symbol sequence of one orbit."""
    if depth < 1:
        raise InfodynError("depth must be at least 1")
    partition = sys.partition if partition is None else tuple(partition)
    xs = orbit(sys, x0, n_iter, burn_in)
    hi, lo, coverage = block_entropies(symbolize(xs, partition), depth, len(partition) + 1)
    return KsEstimate(hi - lo, "symbolic", n_iter, x0, 0, coverage)


def logistic_via_tent(n_iter: int = 1_000_000, x0: float = 0.1234567, burn_in: int = 100) -> float:
    """Logistic (r = 4) exponent along the image of an exact tent orbit under ``y -> sin²(πy/2)``."""
    ys = orbit(tent_map(), x0, n_iter, burn_in)
    xs = np.sin(np.pi * ys / 2) ** 2
    return float(np.log(np.abs(4 - 8 * xs)).mean())


# ---------------------------------------------------------------------------
# Fourier uncertainty


@dataclass(frozen=True)
class BandwidthDuration:
    d_omega: float
    d_t: float
    product: float

    def to_dict(self):
        return {"d_omega": self.d_omega, "d_t": self.d_t, "product": self.product}


def _spread(x, w):
    w = w / w.sum()
    mean = (w * x).sum()
    return float(np.sqrt(max((w * (x - mean) ** 2).sum(), 0.0)))


def bandwidth_duration_product(signal: TimeDensity) -> BandwidthDuration:
    """Standard deviations of ``|s(t)|²`` and of its DFT power ``|ŝ(ω)|²`` (angular frequency).

    The signal is assumed baseband: its spectrum must sit well inside the Nyquist band.
    """
    s = signal.values
    power_t = np.abs(s) ** 2
    if power_t.sum() == 0:
        raise InfodynError("zero-energy signal")
    d_t = _spread(signal.grid.times, power_t)
    omega = 2 * np.pi * np.fft.fftfreq(signal.grid.n, signal.grid.dt)
    d_w = _spread(omega, np.abs(np.fft.fft(s)) ** 2)
    return BandwidthDuration(d_w, d_t, d_w * d_t)


def gaussian_pulse(grid: TimeGrid, width=1.0, chirp=0.0):
    t = grid.times
    return TimeDensity(grid, np.exp(-t ** 2 / (4 * width ** 2) + 1j * chirp * t ** 2))


def rectangular_pulse(grid: TimeGrid, half_width=1.0):
    return TimeDensity(grid, (np.abs(grid.times) <= half_width).astype(complex))


# ---------------------------------------------------------------------------
# prediction lattice


# the law checks are cubic in the lattice size; 256 elements keeps a classification under a second
PREDICTION_BUDGET = 256


def realized_words(sys: MapSystem, horizon: int, partition=None, n_iter: int = 100_000,
                   x0: float = 0.1234567) -> list[tuple]:
    partition = sys.partition if partition is None else tuple(partition)
    symbols = symbolize(orbit(sys, x0, n_iter + horizon, 100), partition)
    n = len(symbols) - horizon + 1
    windows = np.stack([symbols[j:j + n] for j in range(horizon)], axis=1)
    return sorted({tuple(int(v) for v in row) for row in np.unique(windows, axis=0)})


def build_prediction_lattice(sys: MapSystem, horizon: int, partition=None, n_iter: int = 100_000,
                             x0: float = 0.1234567, max_elements: int | None = None):
    """Field of sets of realized depth-``horizon`` cylinders generated by "in cell c at step k".

    For a binary partition these propositions separate all realized words, so
    the atoms are single cylinders and the field is their full power set.
    """
    from .core import BudgetExceeded
    from .lattice import MAX_ELEMENTS, FiniteLattice

    max_elements = PREDICTION_BUDGET if max_elements is None else min(max_elements, MAX_ELEMENTS)
    partition = sys.partition if partition is None else tuple(partition)
    if len(partition) != 1:
        raise InfodynError("prediction lattices use a binary partition")
    if not 1 <= horizon <= 6:
        raise InfodynError("horizon must be between 1 and 6")
    words = realized_words(sys, horizon, partition, n_iter, x0)
    generators = [frozenset(w for w in words if w[k] == c) for k in range(horizon) for c in (0, 1)]
    # atoms of the generated field: words grouped by which generators contain them
    classes: dict = {}
    for w in words:
        classes.setdefault(tuple(w in g for g in generators), set()).add(w)
    atoms = [frozenset(c) for c in classes.values()]
    if 2 ** len(atoms) > max_elements:
        raise BudgetExceeded(f"{len(atoms)} atoms give 2^{len(atoms)} sets, budget {max_elements}")
    # element i is the union of the atoms whose bits are set in i
    k = len(atoms)
    idx = np.arange(2 ** k, dtype=np.int64)
    meet = idx[:, None] & idx[None, :]
    join = idx[:, None] | idx[None, :]
    leq = meet == idx[:, None]
    ortho = idx ^ (2 ** k - 1)

    def label(mask):
        ws = sorted(w for bit, a in enumerate(atoms) if mask >> bit & 1 for w in a)
        return "{" + ",".join("".join(map(str, w)) for w in ws) + "}"

    return FiniteLattice([label(int(i)) for i in idx], leq, meet, join, ortho, check=False)
