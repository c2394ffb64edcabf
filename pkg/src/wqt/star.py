"""Finite-dimensional matrix *-algebras, states and the axiom ladder A/S/B/C/Z.

Algebra elements are plain complex numpy arrays; an ``Algebra`` records the
basis of the subalgebra they live in.  States are density matrices, not
necessarily trace-normalised (the zero matrix is the zero state).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TOL = 1e-9
LIMIT_TOL = 1e-6


class StarError(ValueError):
    pass


class ZeroStateError(StarError):
    pass


class ConvergenceError(StarError):
    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


def op_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


NORMS = {"operator": op_norm, "frobenius": frobenius_norm}


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a, b):
    return a @ b - b @ a


def is_self_adjoint(a, tol=TOL) -> bool:
    return bool(np.allclose(a, dagger(a), atol=tol, rtol=0))


def _unit(i, j, n):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1
    return e


@dataclass
class Algebra:
    """Span of ``basis`` inside the n×n matrices."""

    n: int
    basis: list
    name: str = ""
    norm: Callable = op_norm

    def __post_init__(self):
        self.basis = [np.asarray(b, dtype=complex) for b in self.basis]
        for b in self.basis:
            if b.shape != (self.n, self.n):
                raise StarError(f"basis element of shape {b.shape} in a {self.n}x{self.n} algebra")
            if not np.isfinite(b).all():
                raise StarError("non-finite basis entry")
        self._mat = np.array([b.ravel() for b in self.basis]).T  # (n², d)

    @classmethod
    def full(cls, n):
        return cls(n, [_unit(i, j, n) for i in range(n) for j in range(n)], f"M{n}")

    @classmethod
    def upper_triangular(cls, n):
        return cls(n, [_unit(i, j, n) for i in range(n) for j in range(i, n)], f"T{n}")

    @classmethod
    def diagonal(cls, n):
        return cls(n, [_unit(i, i, n) for i in range(n)], f"D{n}")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, x) -> np.ndarray:
        c, *_ = np.linalg.lstsq(self._mat, np.asarray(x, dtype=complex).ravel(), rcond=None)
        return c

    def element(self, coords) -> np.ndarray:
        return (self._mat @ np.asarray(coords, dtype=complex)).reshape(self.n, self.n)

    def residual(self, x) -> float:
        """Distance of ``x`` from the span, relative to its size."""
        x = np.asarray(x, dtype=complex)
        r = np.linalg.norm(self.element(self.coords(x)) - x)
        return float(r / max(1.0, np.linalg.norm(x)))

    def contains(self, x, tol=TOL) -> bool:
        return self.residual(x) <= tol

    def random_element(self, rng) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return self.element(c)


def _close(a, b, tol=TOL) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.abs(a).max(initial=0)), float(np.abs(b).max(initial=0)))
    return bool(np.abs(a - b).max(initial=0) <= tol * scale)


def _close_scalar(a, b, tol=TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# states


@dataclass
class State:
    """Positive linear functional ``A -> tr(density A)``."""

    density: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.density, dtype=complex)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise StarError("density must be a square matrix")
        if not np.isfinite(d).all():
            raise StarError("non-finite density entry")
        self.density = d

    @classmethod
    def pure(cls, vector):
        v = np.asarray(vector, dtype=complex).reshape(-1, 1)
        return cls(v @ v.conj().T)

    @classmethod
    def maximally_mixed(cls, n):
        return cls(np.eye(n, dtype=complex) / n)

    @property
    def n(self):
        return self.density.shape[0]

    def __call__(self, a) -> complex:
        return complex(np.trace(self.density @ a))

    @property
    def is_zero(self) -> bool:
        return bool(np.abs(self.density).max(initial=0) <= TOL)

    def is_positive(self, tol=TOL) -> bool:
        if not is_self_adjoint(self.density, tol):
            return False
        return bool(np.linalg.eigvalsh((self.density + dagger(self.density)) / 2).min() >= -tol)

    def normalized(self) -> "State":
        return State(self.density / np.trace(self.density).real)


def random_state(n, rng, rank=None) -> State:
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ dagger(g)
    return State(rho / np.trace(rho).real)


def random_self_adjoint(n, rng) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + dagger(g)) / 2


def expectation(z: State, a) -> complex:
    if z.is_zero:
        raise ZeroStateError("expectation in the zero state")
    norm = np.trace(z.density)
    return complex(np.trace(z.density @ a) / norm)


def _require_self_adjoint(a, what="observable"):
    if not is_self_adjoint(a):
        raise StarError(f"{what} is not self-adjoint")


def uncertainty(z: State, a) -> float:
    """Standard deviation ``sqrt(E(A²) - E(A)²)``, clamped at zero."""
    _require_self_adjoint(a)
    mean = expectation(z, a).real
    var = expectation(z, a @ a).real - mean * mean
    return float(np.sqrt(max(var, 0.0)))


@dataclass(frozen=True)
class UncertaintyCheck:
    lhs: float
    rhs: float
    holds: bool


def check_uncertainty_relation(z: State, a, b, tol=TOL) -> UncertaintyCheck:
    _require_self_adjoint(a, "A")
    _require_self_adjoint(b, "B")
    lhs = uncertainty(z, a) * uncertainty(z, b)
    rhs = 0.5 * abs(expectation(z, commutator(a, b)))
    return UncertaintyCheck(lhs, rhs, lhs >= rhs - tol)


def act(a, z: State) -> State:
    """State after applying ``a``: ``B -> z(A* B A)``, i.e. density ``A ρ A*``."""
    return State(a @ z.density @ dagger(a))


# ---------------------------------------------------------------------------
# axiom ladder


@dataclass(frozen=True)
class LadderResult:
    axiom: str
    passed: bool
    witness: dict | None = None
    detail: str = ""

    def __post_init__(self):
        if not self.passed and not self.witness:
            raise ValueError(f"failing {self.axiom} without a witness")

    def to_dict(self):
        return {"axiom": self.axiom, "verdict": "pass" if self.passed else "fail",
                "witness": self.witness, "detail": self.detail}


GROUPS = {
    "A": [f"A{i}" for i in range(1, 13)],
    "S": ["S1", "S2", "S3"],
    "B": ["B1", "B2", "B3", "B4", "B5"],
    "C": ["C1"],
    "Z": ["Z1", "Z2"],
}


@dataclass
class LadderReport:
    results: dict = field(default_factory=dict)

    def add(self, r: LadderResult):
        # keep the first failure per axiom
        if r.axiom not in self.results or self.results[r.axiom].passed:
            self.results[r.axiom] = r

    def group_passed(self, group: str) -> bool:
        return all(self.results[a].passed for a in GROUPS[group] if a in self.results)

    def failed_groups(self) -> list[str]:
        return [g for g in GROUPS if not self.group_passed(g)]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_dict(self):
        return {k: self.results[k].to_dict() for g in GROUPS for k in GROUPS[g] if k in self.results}


def matrix_to_list(a) -> list:
    a = np.asarray(a)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def _ladder_predicates(alg: Algebra, tol: float) -> dict:
    """One predicate per axiom over witness elements ``A, B, C``, scalars ``alpha, beta`` and ``density``."""
    norm = alg.norm
    n = alg.n
    I = np.eye(n, dtype=complex)
    O = np.zeros((n, n), dtype=complex)
    inside = alg.contains

    def b1(A, alpha=1):
        nA = norm(A)
        if _close(A, O, tol):
            return nA <= tol
        return nA > tol and _close_scalar(norm(alpha * A), abs(alpha) * nA, tol)

    def z1(A, B, density, alpha=1, beta=1):
        z = State(density)
        lin = _close_scalar(z(alpha * A + beta * B), alpha * z(A) + beta * z(B), tol)
        return lin and _close_scalar(z(dagger(A)), np.conj(z(A)), tol)

    def z2(A, density):
        v = State(density)(dagger(A) @ A)
        return v.real >= -tol * max(1.0, abs(v)) and abs(v.imag) <= tol * max(1.0, abs(v))

    return {
        "A1": lambda A, B, C: _close(A + (B + C), (A + B) + C, tol),
        "A2": lambda A: inside(O, tol) and _close(O + A, A, tol) and _close(A + O, A, tol),
        "A3": lambda A: _close(A + (-A), O, tol) and inside(-A, tol),
        "A4": lambda A, B: _close(A + B, B + A, tol) and inside(A + B, tol),
        "A5": lambda A: _close(1 * A, A, tol),
        "A6": lambda A, alpha, beta: _close(alpha * (beta * A), (alpha * beta) * A, tol),
        "A7": lambda A, alpha, beta: _close((alpha + beta) * A, alpha * A + beta * A, tol),
        "A8": lambda A, B, alpha: _close(alpha * (A + B), alpha * A + alpha * B, tol),
        "A9": lambda A, B, C: _close(A @ (B @ C), (A @ B) @ C, tol) and inside(A @ B, tol),
        "A10": lambda A: inside(I, tol) and _close(I @ A, A, tol) and _close(A @ I, A, tol),
        "A11": lambda A, B, alpha: _close((alpha * A) @ B, A @ (alpha * B), tol)
        and _close((alpha * A) @ B, alpha * (A @ B), tol),
        "A12": lambda A, B, C: _close(A @ (B + C), A @ B + A @ C, tol) and _close((B + C) @ A, B @ A + C @ A, tol),
        "S1": lambda A, B, alpha, beta: inside(dagger(A), tol)
        and _close(dagger(alpha * A + beta * B), np.conj(alpha) * dagger(A) + np.conj(beta) * dagger(B), tol),
        "S2": lambda A, B: _close(dagger(A @ B), dagger(B) @ dagger(A), tol),
        "S3": lambda A: _close(dagger(dagger(A)), A, tol),
        "B1": b1,
        "B2": lambda A, B: norm(A + B) <= (norm(A) + norm(B)) * (1 + tol),
        "B3": lambda A, B: norm(A @ B) <= norm(A) * norm(B) * (1 + tol),
        "B4": lambda A: _close_scalar(norm(dagger(A)), norm(A), tol),
        "B5": lambda A: norm(A) >= 0,
        "C1": lambda A: _close_scalar(norm(dagger(A) @ A), norm(A) ** 2, tol),
        "Z1": z1,
        "Z2": z2,
    }


def _encode(v):
    if isinstance(v, np.ndarray):
        return matrix_to_list(v)
    if isinstance(v, complex):
        return [float(v.real), float(v.imag)]
    return v


def _decode(v):
    a = np.asarray(v, dtype=float)
    if a.ndim == 3:
        return a[..., 0] + 1j * a[..., 1]
    if a.ndim == 1 and a.shape == (2,):
        return complex(a[0], a[1])
    return v


def check_ladder(algebra: Algebra, samples: int = 20, seed: int = 0, states: Sequence[State] | None = None,
                 tol: float = TOL) -> LadderReport:
    """Seeded random-point checks of the algebra, involution, norm and state axioms.

    Closure of the span under sums and products (A-group) and under the
    involution (S-group) is checked on the same samples.  The norm is
    ``algebra.norm``.  Failing axioms keep their first witness.
    """
    rng = np.random.default_rng(seed)
    rep = LadderReport()
    preds = _ladder_predicates(algebra, tol)
    n = algebra.n
    I = np.eye(n, dtype=complex)

    def run(axiom, **w):
        ok = bool(preds[axiom](**w))
        rep.add(LadderResult(axiom, ok, None if ok else {k: _encode(v) for k, v in w.items()}))

    def scalar():
        return complex(*rng.standard_normal(2))

    run("A10", A=algebra.basis[0])
    run("B1", A=np.zeros((n, n), dtype=complex))
    if algebra.contains(I, tol):
        run("B1", A=I, alpha=2 + 0j)
        run("C1", A=I)
    for _ in range(samples):
        A, B, C = (algebra.random_element(rng) for _ in range(3))
        al, be = scalar(), scalar()
        for ax in ("A1", "A9", "A12"):
            run(ax, A=A, B=B, C=C)
        for ax in ("A2", "A3", "A5", "A10", "S3", "B4", "B5", "C1"):
            run(ax, A=A)
        for ax in ("A4", "S2", "B2", "B3"):
            run(ax, A=A, B=B)
        run("A6", A=A, alpha=al, beta=be)
        run("A7", A=A, alpha=al, beta=be)
        run("A8", A=A, B=B, alpha=al)
        run("A11", A=A, B=B, alpha=al)
        run("S1", A=A, B=B, alpha=al, beta=be)
        run("B1", A=A, alpha=al)

    if states is None:
        states = [random_state(n, rng) for _ in range(max(1, samples // 4))]
    for z in states:
        for _ in range(max(1, samples // len(states))):
            A, B = algebra.random_element(rng), algebra.random_element(rng)
            run("Z1", A=A, B=B, density=z.density, alpha=scalar(), beta=scalar())
            run("Z2", A=A, density=z.density)
    return rep


def replay_ladder_witness(algebra: Algebra, result: LadderResult, tol: float = TOL) -> bool:
    """True when the stored witness still violates the axiom."""
    if result.passed:
        return False
    w = {k: _decode(v) for k, v in result.witness.items()}
    return not _ladder_predicates(algebra, tol)[result.axiom](**w)


# ---------------------------------------------------------------------------
# projector calculus


def is_projector(p, tol=TOL) -> bool:
    return _close(p, dagger(p), tol) and _close(p @ p, p, tol)


def as_projector(p, tol=TOL) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if not is_projector(p, tol):
        raise StarError("matrix is not a self-adjoint idempotent")
    return p


def projector_onto(*vectors) -> np.ndarray:
    """Orthogonal projector onto the span of the given vectors."""
    v = np.array(vectors, dtype=complex).T
    q, r = np.linalg.qr(v)
    rank = int((np.abs(np.diag(r)) > TOL).sum())
    q = q[:, :rank]
    return q @ dagger(q)


def round_projector(x) -> np.ndarray:
    """Symmetrise and snap eigenvalues to {0, 1}."""
    h = (x + dagger(x)) / 2
    w, v = np.linalg.eigh(h)
    keep = v[:, w > 0.5]
    return keep @ dagger(keep)


@dataclass(frozen=True)
class MeetIteration:
    limit: np.ndarray
    iterations: int
    residual: float
    exact: bool


def meet_iteration(p1, p2, tol=LIMIT_TOL, max_iter=10_000) -> MeetIteration:
    """Powers ``(P1 P2)^k`` until successive iterates differ by less than ``tol``."""
    p1, p2 = as_projector(p1), as_projector(p2)
    prod = p1 @ p2
    if _close(prod, p2 @ p1, 1e-12):
        return MeetIteration(prod, 0, 0.0, True)
    x = prod.copy()
    for k in range(1, max_iter + 1):
        nxt = prod @ x
        residual = op_norm(nxt - x)
        x = nxt
        if residual < tol:
            return MeetIteration(x, k, residual, False)
    raise ConvergenceError(f"no convergence in {max_iter} iterations (residual {residual:.3g})", residual)


def projector_meet(p1, p2, tol=LIMIT_TOL, max_iter=10_000) -> np.ndarray:
    """Greatest common subprojector via the limit of ``(P1 P2)^k``; exactly ``P1 P2`` when they commute."""
    it = meet_iteration(p1, p2, tol, max_iter)
    if it.exact:
        return it.limit
    p = round_projector(it.limit)
    if not is_projector(p):
        raise ConvergenceError("limit is not a projector", it.residual)
    return p


def projector_join(p1, p2, tol=LIMIT_TOL, max_iter=10_000) -> np.ndarray:
    p1, p2 = as_projector(p1), as_projector(p2)
    if _close(p1 @ p2, p2 @ p1, 1e-12):
        return p1 + p2 - p1 @ p2
    I = np.eye(len(p1), dtype=complex)
    return I - projector_meet(I - p1, I - p2, tol, max_iter)


def absorption_check(p1, p2, tol=TOL) -> bool:
    """``P_i (P1∧P2) = (P1∧P2) P_i = P1∧P2`` and ``P_i (P1∨P2) = (P1∨P2) P_i = P_i`` for i = 1, 2."""
    m = projector_meet(p1, p2)
    j = projector_join(p1, p2)
    for p in (p1, p2):
        if not (_close(p @ m, m, tol) and _close(m @ p, m, tol)):
            return False
        if not (_close(p @ j, p, tol) and _close(j @ p, p, tol)):
            return False
    return True


def projector_lattice(projectors: dict, tol=LIMIT_TOL, include_bounds=True, max_iter=10_000):
    """Finite ortho-closed projector family as a lattice, with meets from the power limit.

    ``projectors`` maps labels to projectors; the family must be closed under
    complement and under the computed meets and joins.
    """
    from .lattice import FiniteLattice, LatticeError

    items = dict(projectors)
    if include_bounds:
        n = len(next(iter(items.values())))
        items = {"0": np.zeros((n, n), dtype=complex), "1": np.eye(n, dtype=complex), **items}
    labels = list(items)
    mats = [as_projector(items[k]) for k in labels]
    n = len(mats[0])
    I = np.eye(n, dtype=complex)

    def find(x):
        for k, m in enumerate(mats):
            if _close(x, m, max(tol, TOL) * 10):
                return k
        raise LatticeError("projector family is not closed under meet, join and complement")

    size = len(mats)
    meet = np.empty((size, size), dtype=np.int64)
    join = np.empty((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            meet[i, j] = find(projector_meet(mats[i], mats[j], tol, max_iter))
            join[i, j] = find(projector_join(mats[i], mats[j], tol, max_iter))
    ortho = np.array([find(I - m) for m in mats], dtype=np.int64)
    leq = meet == np.arange(size)[:, None]
    return FiniteLattice(labels, leq, meet, join, ortho, check=True)


def qubit_projector_family() -> dict:
    """Rank-one projectors onto |0>, |1>, |+>, |->."""
    s = 1 / np.sqrt(2)
    return {
        "|0>": projector_onto([1, 0]),
        "|1>": projector_onto([0, 1]),
        "|+>": projector_onto([s, s]),
        "|->": projector_onto([s, -s]),
    }


# ---------------------------------------------------------------------------
# spectral decomposition


@dataclass
class SpectralDecomposition:
    eigenvalues: list
    projectors: list

    def reconstruct(self) -> np.ndarray:
        return sum(a * p for a, p in zip(self.eigenvalues, self.projectors))

    def residuals(self, a) -> dict:
        n = len(a)
        name_sum = sum(self.projectors) - np.eye(n)
        orth = max((op_norm(p @ q) for i, p in enumerate(self.projectors)
                    for j, q in enumerate(self.projectors) if i != j), default=0.0)
        comm = max(op_norm(commutator(a, p)) for p in self.projectors)
        return {"reconstruction": op_norm(self.reconstruct() - a), "completeness": op_norm(name_sum),
                "orthogonality": orth, "commutation": comm}


def spectral_decomposition(a, tol=1e-8) -> SpectralDecomposition:
    """Eigenvalues (clustered within ``tol``) and their eigenprojectors."""
    a = np.asarray(a, dtype=complex)
    _require_self_adjoint(a)
    w, v = np.linalg.eigh((a + dagger(a)) / 2)
    values, projs = [], []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > tol * max(1.0, abs(w[k - 1])):
            block = v[:, start:k]
            values.append(float(w[start:k].mean()))
            projs.append(block @ dagger(block))
            start = k
    return SpectralDecomposition(values, projs)


# ---------------------------------------------------------------------------
# GNS construction


@dataclass
class GnsResult:
    ideal_basis: list
    hilbert_dim: int
    representatives: list
    gram: np.ndarray
    algebra: Algebra
    state: State

    def inner(self, x, y) -> complex:
        """``<[X], [Y]> = z(X* Y)``."""
        return self.state(dagger(x) @ y)

    def rep(self, a) -> np.ndarray:
        """Matrix of ``[B] -> [A B]`` on the representative basis."""
        d = self.hilbert_dim
        h = np.array([[self.inner(self.representatives[k], a @ self.representatives[l]) for l in range(d)]
                      for k in range(d)])
        return np.linalg.solve(self.gram, h)

    def class_vector(self, x) -> np.ndarray:
        v = np.array([self.inner(r, x) for r in self.representatives])
        return np.linalg.solve(self.gram, v)

    def multiplicativity_residual(self) -> float:
        worst = 0.0
        reps = [self.rep(b) for b in self.algebra.basis]
        for i, a in enumerate(self.algebra.basis):
            for j, b in enumerate(self.algebra.basis):
                worst = max(worst, float(np.abs(self.rep(a @ b) - reps[i] @ reps[j]).max()))
        return worst

    def expectation(self, a) -> complex:
        one = np.eye(self.algebra.n, dtype=complex)
        e = self.class_vector(one)
        ae = self.rep(a) @ e
        return complex((e.conj() @ self.gram @ ae) / (e.conj() @ self.gram @ e))


def gns(z: State, algebra: Algebra, tol=TOL) -> GnsResult:
    """Vanishing ideal, quotient Hilbert space and representation for state ``z``."""
    if z.is_zero:
        raise ZeroStateError("GNS construction needs a nonzero state")
    basis = algebra.basis
    d = len(basis)
    g = np.array([[z(dagger(bi) @ bj) for bj in basis] for bi in basis])
    g = (g + dagger(g)) / 2
    w, v = np.linalg.eigh(g)
    scale = max(1.0, float(np.abs(w).max()))
    null = w <= tol * scale
    ideal = [algebra.element(v[:, k]) for k in np.nonzero(null)[0]]
    reps = [algebra.element(v[:, k]) for k in np.nonzero(~null)[0]]
    gram = np.array([[z(dagger(x) @ y) for y in reps] for x in reps]).reshape(len(reps), len(reps))
    return GnsResult(ideal, d - len(ideal), reps, gram, algebra, z)


# ---------------------------------------------------------------------------
# composites, entanglement, CHSH

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def tensor(a, b) -> np.ndarray:
    return np.kron(a, b)


def tensor_state(z1: State, z2: State) -> State:
    return State(np.kron(z1.density, z2.density))


def lift_left(a, n2) -> np.ndarray:
    return np.kron(a, np.eye(n2))


def lift_right(b, n1) -> np.ndarray:
    return np.kron(np.eye(n1), b)


def singlet() -> State:
    s = 1 / np.sqrt(2)
    return State.pure([0, s, -s, 0])


def partial_transpose(rho, dims=(2, 2)) -> np.ndarray:
    d1, d2 = dims
    r = np.asarray(rho).reshape(d1, d2, d1, d2)
    return r.transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2)


@dataclass(frozen=True)
class EntanglementCheck:
    entangled: bool
    min_pt_eigenvalue: float
    schmidt_rank: int | None


def _check_two_qubit(z: State, tol):
    if z.density.shape != (4, 4):
        raise StarError("two-qubit state must be 4x4")
    if abs(np.trace(z.density) - 1) > tol * 100:
        raise StarError("state is not trace-normalised")


def entanglement_check(z: State, tol=TOL) -> EntanglementCheck:
    """Partial-transpose test, plus the Schmidt rank for pure states."""
    _check_two_qubit(z, tol)
    rho = (z.density + dagger(z.density)) / 2
    min_eig = float(np.linalg.eigvalsh(partial_transpose(rho)).min())
    pt_entangled = min_eig < -tol
    rank = None
    w, v = np.linalg.eigh(rho)
    if w[-1] > 1 - 1e-8:
        psi = v[:, -1].reshape(2, 2)
        svals = np.linalg.svd(psi, compute_uv=False)
        rank = int((svals > 1e-7).sum())
        if (rank > 1) != pt_entangled:
            raise StarError("Schmidt rank and partial transpose disagree on a pure state")
    return EntanglementCheck(pt_entangled, min_eig, rank)


def is_entangled(z: State, tol=TOL) -> bool:
    return entanglement_check(z, tol).entangled


def spin(theta: float) -> np.ndarray:
    """Two-outcome observable for analyser angle ``theta`` (radians) in the x–z plane.

    Analyser angles are half the Bloch-sphere angle, so orthogonal outcomes
    sit 90° apart.
    """
    return np.cos(2 * theta) * SIGMA_Z + np.sin(2 * theta) * SIGMA_X


def correlation(z: State, a: float, b: float) -> float:
    return expectation(z, np.kron(spin(a), spin(b))).real


def chsh_value(z: State, angles: Sequence[float]) -> float:
    """``E(a,b) - E(a,b') + E(a',b) + E(a',b')`` for angles ``(a, a', b, b')`` in radians."""
    _check_two_qubit(z, 1e-6)
    a, a2, b, b2 = angles
    return (correlation(z, a, b) - correlation(z, a, b2)
            + correlation(z, a2, b) + correlation(z, a2, b2))


CANONICAL_ANGLES = tuple(np.deg2rad([0.0, 45.0, 22.5, 67.5]))


def chsh_maximize(z: State, grid_step_deg: float = 1.0) -> tuple[float, tuple]:
    """Largest ``|S|`` over a grid of analyser angles in [0°, 180°).

    Correlators are linear in the state's z/x correlation tensor, so the grid
    of ``E(a, b)`` is built from four expectation values.  For fixed ``(b, b')``
    the ``a`` and ``a'`` terms separate, which makes the scan cubic.
    """
    _check_two_qubit(z, 1e-6)
    paulis = (SIGMA_Z, SIGMA_X)
    t = np.array([[expectation(z, np.kron(p, q)).real for q in paulis] for p in paulis])
    thetas = np.deg2rad(np.arange(0.0, 180.0, grid_step_deg))
    u = np.stack([np.cos(2 * thetas), np.sin(2 * thetas)], axis=1)
    e = u @ t @ u.T                       # e[a, b]
    diff = e[:, :, None] - e[:, None, :]  # E(a,b) - E(a,b')
    summ = e[:, :, None] + e[:, None, :]  # E(a',b) + E(a',b')
    best, arg = -np.inf, None
    for sign in (1.0, -1.0):
        d, s = sign * diff, sign * summ
        total = d.max(axis=0) + s.max(axis=0)
        k = np.unravel_index(int(total.argmax()), total.shape)
        if total[k] > best:
            best = float(total[k])
            b, b2 = k
            arg = (thetas[int(d[:, b, b2].argmax())], thetas[int(s[:, b, b2].argmax())], thetas[b], thetas[b2])
    return best, tuple(float(x) for x in arg)


# ---------------------------------------------------------------------------
# truncated canonical pair


def truncated_canonical_pair(n: int, hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray, float]:
    """Position and momentum from the n-level truncated ladder operator.

    ``[Q, P] = iħ diag(1, …, 1, -(n-1))``: the truncation shows up only in the
    last diagonal entry.
    """
    if n < 2:
        raise StarError("truncation dimension must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    s = np.sqrt(hbar / 2)
    q = s * (a + dagger(a))
    p = 1j * s * (dagger(a) - a)
    return q, p, hbar


def heisenberg_spreads(n: int, states: Sequence[State], hbar=1.0) -> list[float]:
    """``σ_Q σ_P`` for each state on the truncated pair."""
    q, p, hbar = truncated_canonical_pair(n, hbar)
    return [uncertainty(z, q) * uncertainty(z, p) for z in states]


def random_low_state(n: int, rng) -> State:
    """Random pure state supported on the lowest ``n // 2`` levels."""
    k = n // 2
    v = np.zeros(n, dtype=complex)
    v[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return State.pure(v / np.linalg.norm(v))
