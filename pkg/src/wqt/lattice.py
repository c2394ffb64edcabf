"""Finite bounded lattices with optional orthocomplementation.

Lattices are stored as a boolean order matrix plus integer meet / join tables
over element indices.  Label-level helpers (``meet``, ``join``, ``comp``,
``le``) accept element labels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

MAX_ELEMENTS = 4096


class LatticeError(ValueError):
    pass


def _transitive_closure(rel: np.ndarray) -> np.ndarray:
    rel = rel.copy()
    n = len(rel)
    for k in range(n):
        rel |= rel[:, [k]] & rel[[k], :]
    return rel


def _meet_join_from_order(leq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(leq)
    down = leq.sum(axis=0)  # number of elements below each element
    up = leq.sum(axis=1)
    meet = np.empty((n, n), dtype=np.int64)
    join = np.empty((n, n), dtype=np.int64)
    for b in range(n):
        lb = leq & leq[:, [b]]             # lb[x, a]: x <= a and x <= b
        m = np.where(lb, down[:, None], -1).argmax(axis=0)
        ub = leq & leq[[b], :]             # ub[a, x]: a <= x and b <= x
        j = np.where(ub, up[None, :], -1).argmax(axis=1)
        if not lb[m, np.arange(n)].all() or not ub[np.arange(n), j].all():
            raise LatticeError("some pair has no common bound")
        # greatest lower bound must dominate every lower bound
        if (lb & ~leq[:, m]).any():
            a = int(np.nonzero((lb & ~leq[:, m]).any(axis=0))[0][0])
            raise LatticeError(f"elements {a} and {b} have no meet")
        if (ub & ~leq[j, :]).any():
            a = int(np.nonzero((ub & ~leq[j, :]).any(axis=1))[0][0])
            raise LatticeError(f"elements {a} and {b} have no join")
        meet[:, b] = m
        join[:, b] = j
    return meet, join


class FiniteLattice:
    """A finite lattice given by its order; meet/join tables are derived or cross-checked."""

    def __init__(self, elements: Sequence[Hashable], leq, meet=None, join=None, ortho=None, check=True):
        self.elements = tuple(elements)
        n = len(self.elements)
        if n == 0:
            raise LatticeError("empty lattice")
        if n > MAX_ELEMENTS:
            raise LatticeError(f"lattice has {n} elements, budget is {MAX_ELEMENTS}")
        if len(set(self.elements)) != n:
            raise LatticeError("duplicate element labels")
        self.index = {e: i for i, e in enumerate(self.elements)}
        leq = np.asarray(leq, dtype=bool)
        if leq.shape != (n, n):
            raise LatticeError("order matrix has the wrong shape")
        if check:
            if not leq.diagonal().all():
                raise LatticeError("order is not reflexive")
            if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
                raise LatticeError("order is not antisymmetric")
            if (_transitive_closure(leq) != leq).any():
                raise LatticeError("order is not transitive")
        self.leq = leq
        derived = None
        if meet is None or join is None or check:
            derived = _meet_join_from_order(leq)
        if meet is None or join is None:
            meet, join = derived
        else:
            meet = np.asarray(meet, dtype=np.int64)
            join = np.asarray(join, dtype=np.int64)
            if check and ((meet != derived[0]).any() or (join != derived[1]).any()):
                raise LatticeError("meet/join tables disagree with the order")
        self.meet_table = meet
        self.join_table = join
        self.bottom = int(np.nonzero(leq.all(axis=1))[0][0])
        self.top = int(np.nonzero(leq.all(axis=0))[0][0])
        self.ortho = None
        if ortho is not None:
            c = np.asarray(ortho, dtype=np.int64)
            if c.shape != (n,):
                raise LatticeError("orthocomplement map has the wrong length")
            self.ortho = c
            if check:
                self._check_ortho()

    def _check_ortho(self):
        c = self.ortho
        idx = np.arange(len(c))
        if (c[c] != idx).any():
            raise LatticeError("orthocomplement is not an involution")
        if (self.meet_table[idx, c] != self.bottom).any() or (self.join_table[idx, c] != self.top).any():
            raise LatticeError("a ∧ a' = 0 and a ∨ a' = 1 must hold")
        if (self.leq & ~self.leq[np.ix_(c, c)].T).any():
            raise LatticeError("orthocomplement is not order-reversing")

    # constructors -----------------------------------------------------
    @classmethod
    def from_order(cls, elements, pairs: Iterable[tuple], ortho: Iterable[tuple] | None = None, check=True):
        """From generating order pairs ``(x, y)`` meaning x <= y; closure is taken."""
        elements = tuple(elements)
        idx = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        if n > MAX_ELEMENTS:
            raise LatticeError(f"lattice has {n} elements, budget is {MAX_ELEMENTS}")
        rel = np.eye(n, dtype=bool)
        for x, y in pairs:
            try:
                rel[idx[x], idx[y]] = True
            except KeyError as exc:
                raise LatticeError(f"unknown element {exc.args[0]!r} in order pairs") from None
        rel = _transitive_closure(rel)
        c = None
        if ortho is not None:
            c = np.full(n, -1, dtype=np.int64)
            for x, y in ortho:
                c[idx[x]], c[idx[y]] = idx[y], idx[x]
            if (c < 0).any():
                missing = elements[int(np.nonzero(c < 0)[0][0])]
                raise LatticeError(f"no orthocomplement given for {missing!r}")
        return cls(elements, rel, ortho=c, check=check)

    @classmethod
    def from_sets(cls, family: Mapping[Hashable, frozenset], universe: frozenset, check=True):
        """Lattice of subsets ordered by inclusion, complemented within ``universe``."""
        labels = list(family)
        sets = [frozenset(family[k]) for k in labels]
        index = {s: i for i, s in enumerate(sets)}
        if len(index) != len(sets):
            raise LatticeError("two labels name the same set")
        n = len(sets)
        if n > MAX_ELEMENTS:
            raise LatticeError(f"lattice has {n} elements, budget is {MAX_ELEMENTS}")
        leq = np.array([[a <= b for b in sets] for a in sets], dtype=bool)
        try:
            meet = np.array([[index[a & b] for b in sets] for a in sets], dtype=np.int64)
            join = np.array([[index[a | b] for b in sets] for a in sets], dtype=np.int64)
            ortho = np.array([index[universe - a] for a in sets], dtype=np.int64)
        except KeyError:
            raise LatticeError("family is not closed under intersection, union and complement") from None
        return cls(labels, leq, meet, join, ortho, check=check)

    # label-level access -----------------------------------------------
    def __len__(self):
        return len(self.elements)

    def _i(self, a) -> int:
        try:
            return self.index[a]
        except KeyError:
            raise LatticeError(f"unknown element {a!r}") from None

    def meet(self, a, b):
        return self.elements[self.meet_table[self._i(a), self._i(b)]]

    def join(self, a, b):
        return self.elements[self.join_table[self._i(a), self._i(b)]]

    def le(self, a, b) -> bool:
        return bool(self.leq[self._i(a), self._i(b)])

    def lt(self, a, b) -> bool:
        return a != b and self.le(a, b)

    def comp(self, a):
        if self.ortho is None:
            raise LatticeError("lattice has no orthocomplementation")
        return self.elements[self.ortho[self._i(a)]]

    @property
    def bottom_label(self):
        return self.elements[self.bottom]

    @property
    def top_label(self):
        return self.elements[self.top]

    def order_pairs(self) -> list[tuple]:
        """Covering pairs (Hasse diagram edges)."""
        n = len(self)
        strict = self.leq & ~np.eye(n, dtype=bool)
        through = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
        cover = strict & ~through
        return [(self.elements[i], self.elements[j]) for i, j in zip(*np.nonzero(cover))]

    def ortho_pairs(self) -> list[tuple] | None:
        if self.ortho is None:
            return None
        return [(self.elements[i], self.elements[j]) for i, j in enumerate(self.ortho) if i <= j]

    def __repr__(self):
        return f"FiniteLattice({len(self)} elements{', ortho' if self.ortho is not None else ''})"


# ---------------------------------------------------------------------------
# standard lattices


def boolean_lattice(n_atoms: int) -> FiniteLattice:
    atoms = [chr(ord("a") + k) for k in range(n_atoms)]
    universe = frozenset(atoms)
    family = {}
    for r in range(n_atoms + 1):
        for combo in itertools.combinations(atoms, r):
            label = "".join(combo) if combo else "0"
            family["1" if len(combo) == n_atoms and n_atoms else label] = frozenset(combo)
    return FiniteLattice.from_sets(family, universe)


def chain(n: int) -> FiniteLattice:
    elements = list(range(n))
    return FiniteLattice.from_order(elements, [(i, i + 1) for i in range(n - 1)])


def diamond_m3() -> FiniteLattice:
    return FiniteLattice.from_order(["0", "a", "b", "c", "1"], [("0", x) for x in "abc"] + [(x, "1") for x in "abc"])


def pentagon_n5() -> FiniteLattice:
    return FiniteLattice.from_order(["0", "a", "b", "c", "1"], [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")])


def mo(n_pairs: int) -> FiniteLattice:
    """MO_n: bottom, top and n incomparable complementary atom pairs."""
    atoms = []
    ortho = [("0", "1")]
    for k in range(n_pairs):
        a, b = f"a{k}", f"a{k}'"
        atoms += [a, b]
        ortho.append((a, b))
    pairs = [("0", x) for x in atoms] + [(x, "1") for x in atoms]
    return FiniteLattice.from_order(["0"] + atoms + ["1"], pairs, ortho)


def hexagon_o6() -> FiniteLattice:
    """Benzene ortholattice: 0 < a < b < 1 and 0 < b' < a' < 1."""
    return FiniteLattice.from_order(
        ["0", "a", "b", "b'", "a'", "1"],
        [("0", "a"), ("a", "b"), ("b", "1"), ("0", "b'"), ("b'", "a'"), ("a'", "1")],
        [("0", "1"), ("a", "a'"), ("b", "b'")],
    )


# ---------------------------------------------------------------------------
# laws and classification


@dataclass
class LatticeVerdict:
    distributive: bool
    absorption: bool
    identities: bool = True
    distributivity_witness: tuple | None = None
    quantum_pairs: list = field(default_factory=list)
    information_pairs: list = field(default_factory=list)
    boolean_local: bool | None = None
    boolean_local_witness: tuple | None = None

    @property
    def information_only(self) -> list:
        wq = set(self.quantum_pairs)
        return [p for p in self.information_pairs if p not in wq]

    def to_dict(self):
        return {
            "distributive": self.distributive,
            "distributivity_witness": _plain(self.distributivity_witness),
            "absorption": self.absorption,
            "lattice_identities": self.identities,
            "quantum_type_pairs": [_plain(p) for p in self.quantum_pairs],
            "information_type_pairs": [_plain(p) for p in self.information_pairs],
            "boolean_local": self.boolean_local,
            "boolean_local_witness": _plain(self.boolean_local_witness),
        }


def _plain(x):
    if x is None:
        return None
    return [str(v) for v in x]


def _identities_hold(lat: FiniteLattice) -> bool:
    M, J = lat.meet_table, lat.join_table
    idx = np.arange(len(lat))
    if (M[idx, idx] != idx).any() or (J[idx, idx] != idx).any():
        return False
    if (M != M.T).any() or (J != J.T).any():
        return False
    if (M[lat.bottom] != lat.bottom).any() or (M[lat.top] != idx).any():
        return False
    if (J[lat.bottom] != idx).any() or (J[lat.top] != lat.top).any():
        return False
    for a in idx:
        # a ∧ (b ∧ c) = (a ∧ b) ∧ c and the same for joins
        if (M[a][M] != M[M[a]]).any() or (J[a][J] != J[J[a]]).any():
            return False
    return True


def _absorption_holds(lat: FiniteLattice) -> bool:
    M, J = lat.meet_table, lat.join_table
    idx = np.arange(len(lat))
    col = idx[:, None]
    return bool((M[col, J] == col).all() and (J[col, M] == col).all())


def _distributivity_witness(lat: FiniteLattice, subset=None) -> tuple | None:
    M, J = lat.meet_table, lat.join_table
    items = np.arange(len(lat)) if subset is None else np.asarray(sorted(subset))
    sub = np.ix_(items, items)
    Ms, Js = M[sub], J[sub]
    for a in items:
        lhs = M[a][Js]                      # a ∧ (b ∨ c)
        rhs = J[M[a][items][:, None], M[a][items][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            b, c = bad[0]
            return (lat.elements[a], lat.elements[items[b]], lat.elements[items[c]])
        lhs = J[a][Ms]
        rhs = M[J[a][items][:, None], J[a][items][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            b, c = bad[0]
            return (lat.elements[a], lat.elements[items[b]], lat.elements[items[c]])
    return None


def generated_sublattice(lat: FiniteLattice, generators: Iterable[int]) -> set[int]:
    """Indices of the sublattice generated by ``generators`` together with 0, 1 and complements."""
    found = set(generators) | {lat.bottom, lat.top}
    if lat.ortho is not None:
        found |= {int(lat.ortho[g]) for g in list(found)}
    frontier = set(found)
    while frontier:
        new = set()
        for a in found:
            for b in frontier:
                for x in (lat.meet_table[a, b], lat.join_table[a, b]):
                    x = int(x)
                    if x not in found:
                        new.add(x)
                    if lat.ortho is not None and int(lat.ortho[x]) not in found:
                        new.add(int(lat.ortho[x]))
        found |= new
        frontier = new
    return found


def _boolean_local(lat: FiniteLattice) -> tuple[bool, tuple | None]:
    n = len(lat)
    for a in range(n):
        for b in range(n):
            if a == b or not lat.leq[a, b]:
                continue
            sub = generated_sublattice(lat, [a, b])
            if _distributivity_witness(lat, sub) is not None:
                return False, (lat.elements[a], lat.elements[b])
    return True, None


def quantum_type(lat: FiniteLattice, a: int, b: int, clause: int = 0) -> bool:
    """Strict ``a > (a ∧ b) ∨ (a ∧ b')`` (clause 0) or the mirrored inequality for ``b`` (clause 1)."""
    if clause:
        a, b = b, a
    M, J, c = lat.meet_table, lat.join_table, lat.ortho
    x = J[M[a, b], M[a, c[b]]]
    return bool(x != a and lat.leq[x, a])


def information_type(lat: FiniteLattice, a: int, b: int, clause: int = 0) -> bool:
    """Strict ``a < (a ∨ b) ∧ (a ∨ b')`` (clause 0) or the mirrored inequality for ``b`` (clause 1)."""
    if clause:
        a, b = b, a
    M, J, c = lat.meet_table, lat.join_table, lat.ortho
    y = M[J[a, b], J[a, c[b]]]
    return bool(y != a and lat.leq[a, y])


def _witness_pairs(lat: FiniteLattice):
    M, J, c = lat.meet_table, lat.join_table, lat.ortho
    n = len(lat)
    idx = np.arange(n)
    A, B = np.meshgrid(idx, idx, indexing="ij")
    x = J[M[A, B], M[A, c[B]]]          # (a∧b) ∨ (a∧b')
    below = (x != A) & lat.leq[x, A]
    y = M[J[A, B], J[A, c[B]]]          # (a∨b) ∧ (a∨b')
    above = (y != A) & lat.leq[A, y]
    q = below & below.T                  # both inequalities
    i = above | above.T                  # at least one
    wq = [(lat.elements[a], lat.elements[b]) for a, b in zip(*np.nonzero(q))]
    w43 = [(lat.elements[a], lat.elements[b]) for a, b in zip(*np.nonzero(i))]
    return wq, w43


def check_laws(lat: FiniteLattice) -> LatticeVerdict:
    """Exhaustive lattice identities, absorption and distributivity over all triples.

    With an orthocomplementation the non-distributivity pairs and the local
    Boolean condition on comparable pairs are filled in as well.
    """
    witness = _distributivity_witness(lat)
    verdict = LatticeVerdict(
        distributive=witness is None,
        absorption=_absorption_holds(lat),
        identities=_identities_hold(lat),
        distributivity_witness=witness,
    )
    if lat.ortho is not None:
        verdict.quantum_pairs, verdict.information_pairs = _witness_pairs(lat)
        if verdict.distributive:
            # every sublattice of a distributive lattice is distributive
            verdict.boolean_local = True
        else:
            verdict.boolean_local, verdict.boolean_local_witness = _boolean_local(lat)
    return verdict


def classify_nondistributivity(lat: FiniteLattice) -> LatticeVerdict:
    if lat.ortho is None:
        raise LatticeError("classification needs an orthocomplementation")
    return check_laws(lat)


def dualize(lat: FiniteLattice) -> FiniteLattice:
    """Order-reversed lattice: meet and join exchange, bounds swap, same complement."""
    return FiniteLattice(lat.elements, lat.leq.T.copy(), lat.join_table.copy(), lat.meet_table.copy(),
                         None if lat.ortho is None else lat.ortho.copy(), check=False)


def find_isomorphism(l1: FiniteLattice, l2: FiniteLattice, respect_ortho: bool = False) -> dict | None:
    """An order isomorphism ``l1 -> l2`` as a label mapping, or None."""
    n = len(l1)
    if n != len(l2):
        return None
    sig1 = list(zip(l1.leq.sum(0), l1.leq.sum(1)))
    sig2 = list(zip(l2.leq.sum(0), l2.leq.sum(1)))
    if sorted(sig1) != sorted(sig2):
        return None
    if respect_ortho and ((l1.ortho is None) != (l2.ortho is None)):
        return None
    order = sorted(range(n), key=lambda i: sig1[i])
    image = [-1] * n
    used = [False] * n

    def consistent(i, j):
        for k in range(n):
            if image[k] < 0:
                continue
            if l1.leq[i, k] != l2.leq[j, image[k]] or l1.leq[k, i] != l2.leq[image[k], j]:
                return False
        if respect_ortho and l1.ortho is not None:
            ci = l1.ortho[i]
            if image[ci] >= 0 and image[ci] != l2.ortho[j]:
                return False
        return True

    def extend(pos):
        if pos == n:
            return True
        i = order[pos]
        for j in range(n):
            if used[j] or sig2[j] != sig1[i] or not consistent(i, j):
                continue
            image[i], used[j] = j, True
            if extend(pos + 1):
                return True
            image[i], used[j] = -1, False
        return False

    if not extend(0):
        return None
    return {l1.elements[i]: l2.elements[image[i]] for i in range(n)}


def isomorphic(l1, l2, respect_ortho=False) -> bool:
    return find_isomorphism(l1, l2, respect_ortho) is not None


# ---------------------------------------------------------------------------
# lattices from weak-system propositions


def from_propositions(system, props: Iterable, max_elements: int = MAX_ELEMENTS) -> FiniteLattice:
    """Close a compatible, negation-closed set of propositions under ∧, ∨ and negation.

    Elements are labelled by observable names; generated composites get
    names built from ``∧``.  Order is ``p <= q`` iff ``p ∧ q = p``.
    """
    from .core import IncompatibleError, Proposition, compatible, conjunction

    props = list(props)
    start = [system.proposition(system.zero), system.proposition(system.unit)] + props
    elems: dict = {}
    for p in start:
        elems.setdefault(p.observable.images, p)
    for p in list(elems.values()):
        neg = p.negated()
        if neg.observable.images not in elems:
            raise IncompatibleError(f"proposition set is not closed under negation ({p.name!r})")
    frontier = list(elems.values())
    while frontier:
        new = []
        current = list(elems.values())
        for p in current:
            for q in frontier:
                if not compatible(p.observable, q.observable):
                    raise IncompatibleError(f"{p.name!r} and {q.name!r} are incompatible")
                r = conjunction(p, q, system)
                for x in (r, r.negated()):
                    if x.observable.images not in elems:
                        elems[x.observable.images] = x
                        new.append(x)
                        if len(elems) > max_elements:
                            raise LatticeError(f"closure exceeds {max_elements} elements")
        frontier = new
    items = list(elems.values())
    names = []
    for p in items:
        name = p.name
        while name in names:
            name += "'"
        names.append(name)
    key = {p.observable.images: k for k, p in enumerate(items)}
    n = len(items)
    meet = np.empty((n, n), dtype=np.int64)
    for i, p in enumerate(items):
        for j, q in enumerate(items):
            meet[i, j] = key[_compose(p.observable.images, q.observable.images)]
    leq = meet == np.arange(n)[:, None]
    ortho = np.array([key[p.negation.images] for p in items], dtype=np.int64)
    # joins through De Morgan on the negation map
    join = ortho[meet[np.ix_(ortho, ortho)]]
    return FiniteLattice(names, leq, meet, join, ortho, check=True)


def _compose(a, b):
    return tuple(-1 if j == -1 else a[j] for j in b)


# ---------------------------------------------------------------------------
# exhaustive ortholattice search


def enumerate_ortholattices(max_size: int = 8) -> list[FiniteLattice]:
    """All ortholattices with at most ``max_size`` elements, up to ortho-isomorphism.

    Complementation has no fixed points, so sizes are even.  The middle
    elements are ``x`` and ``x'`` pairs; the strict order among them is chosen
    per orbit of unordered pairs under ``{x, y} -> {x', y'}``, which keeps the
    complement order-reversing by construction.
    """
    found = []
    for size in range(2, max_size + 1, 2):
        k = (size - 2) // 2
        m = 2 * k
        comp = [(i + k) % m for i in range(m)]
        pairs = list(itertools.combinations(range(m), 2))
        orbits, seen = [], set()
        for x, y in pairs:
            if (x, y) in seen:
                continue
            img = tuple(sorted((comp[x], comp[y])))
            seen |= {(x, y), img}
            orbits.append(((x, y), img))
        perms = _pair_permutations(k)
        canon_seen = set()
        for choice in itertools.product((0, 1, 2), repeat=len(orbits)):
            rel = np.zeros((m, m), dtype=bool)
            for (pair, img), c in zip(orbits, choice):
                if c == 0:
                    continue
                x, y = pair if c == 1 else pair[::-1]
                rel[x, y] = True
                rel[comp[y], comp[x]] = True
            if (rel & rel.T).any() or rel.diagonal().any():
                continue
            if ((rel.astype(np.int64) @ rel.astype(np.int64) > 0) & ~rel).any():
                continue
            key = min(rel[np.ix_(p, p)].tobytes() for p in perms)
            if key in canon_seen:
                continue
            canon_seen.add(key)
            lat = _ortho_candidate(rel, comp, k)
            if lat is not None:
                found.append(lat)
    return found


def _pair_permutations(k: int) -> list[list[int]]:
    perms = []
    for order in itertools.permutations(range(k)):
        for flips in itertools.product((0, 1), repeat=k):
            p = [0] * (2 * k)
            for i, j in enumerate(order):
                a, b = (j, j + k) if not flips[i] else (j + k, j)
                p[i], p[i + k] = a, b
            perms.append(p)
    return perms


def _ortho_candidate(rel: np.ndarray, comp: list[int], k: int) -> FiniteLattice | None:
    m = 2 * k
    n = m + 2
    leq = np.eye(n, dtype=bool)
    leq[0, :] = True
    leq[:, n - 1] = True
    leq[1:n - 1, 1:n - 1] |= rel
    labels = ["0"] + [f"x{i}" for i in range(k)] + [f"x{i}'" for i in range(k)] + ["1"]
    ortho = [n - 1] + [c + 1 for c in comp] + [0]
    try:
        return FiniteLattice(labels, leq, ortho=ortho)
    except LatticeError:
        return None


def search_information_type(max_size: int = 8) -> list[tuple[FiniteLattice, LatticeVerdict]]:
    """Ortholattices (smallest first) having a pair of the ∨-form that is not of the ∧-form."""
    hits = []
    for lat in enumerate_ortholattices(max_size):
        v = classify_nondistributivity(lat)
        if v.information_only:
            hits.append((lat, v))
    return hits
