import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wqt import corpus
from wqt.lattice import (
    FiniteLattice,
    LatticeError,
    MAX_ELEMENTS,
    boolean_lattice,
    chain,
    check_laws,
    classify_nondistributivity,
    diamond_m3,
    dualize,
    enumerate_ortholattices,
    from_propositions,
    hexagon_o6,
    information_type,
    isomorphic,
    mo,
    pentagon_n5,
    quantum_type,
    search_information_type,
)


def _label_level_pairs(lat):
    """Witness pairs recomputed through the label API, one pair at a time."""
    def q(a, b):
        x = lat.join(lat.meet(a, b), lat.meet(a, lat.comp(b)))
        return lat.lt(x, a)

    def i(a, b):
        y = lat.meet(lat.join(a, b), lat.join(a, lat.comp(b)))
        return lat.lt(a, y)

    els = lat.elements
    quantum = [(a, b) for a in els for b in els if q(a, b) and q(b, a)]
    info = [(a, b) for a in els for b in els if i(a, b) or i(b, a)]
    return quantum, info


# --- construction -------------------------------------------------------------------


def test_meet_join_agree_with_order():
    lat = pentagon_n5()
    for a in lat.elements:
        for b in lat.elements:
            m, j = lat.meet(a, b), lat.join(a, b)
            lower = [c for c in lat.elements if lat.le(c, a) and lat.le(c, b)]
            upper = [c for c in lat.elements if lat.le(a, c) and lat.le(b, c)]
            assert all(lat.le(c, m) for c in lower) and m in lower
            assert all(lat.le(j, c) for c in upper) and j in upper


def test_rejects_non_lattice_order():
    # two maximal elements without a join
    with pytest.raises(LatticeError):
        FiniteLattice.from_order(["0", "a", "b"], [("0", "a"), ("0", "b")])


def test_rejects_bad_ortho():
    with pytest.raises(LatticeError):
        FiniteLattice.from_order(["0", "a", "1"], [("0", "a"), ("a", "1")], [("0", "1"), ("a", "a")])


def test_budget():
    with pytest.raises(LatticeError):
        chain(MAX_ELEMENTS + 1)
    assert len(chain(3)) == 3


# --- laws -----------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_boolean_lattices_are_distributive(n):
    v = check_laws(boolean_lattice(n))
    assert v.distributive and v.absorption and v.identities
    assert v.quantum_pairs == [] and v.information_pairs == []
    assert v.boolean_local


@pytest.mark.parametrize("make", [diamond_m3, pentagon_n5])
def test_small_nondistributive(make):
    v = check_laws(make())
    assert not v.distributive
    a, b, c = v.distributivity_witness
    lat = make()
    assert lat.meet(a, lat.join(b, c)) != lat.join(lat.meet(a, b), lat.meet(a, c)) or \
        lat.join(a, lat.meet(b, c)) != lat.meet(lat.join(a, b), lat.join(a, c))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.frozensets(st.integers(0, 3)), max_size=6))
def test_set_fields_are_distributive(gens):
    universe = frozenset(range(4))
    family = {frozenset(), universe, *gens}
    while True:
        new = {a & b for a in family for b in family} | {a | b for a in family for b in family} \
            | {universe - a for a in family}
        if new <= family:
            break
        family |= new
    lat = FiniteLattice.from_sets({tuple(sorted(s)): s for s in family}, universe)
    v = classify_nondistributivity(lat)
    assert v.distributive and not v.quantum_pairs and not v.information_pairs


@pytest.mark.parametrize("make", [lambda: mo(2), lambda: mo(3), hexagon_o6, lambda: boolean_lattice(3)])
def test_witness_lists_match_label_level_recomputation(make):
    lat = make()
    v = classify_nondistributivity(lat)
    quantum, info = _label_level_pairs(lat)
    assert sorted(v.quantum_pairs) == sorted(quantum)
    assert sorted(v.information_pairs) == sorted(info)


def test_mo2_is_quantum_type_only():
    v = classify_nondistributivity(mo(2))
    assert ("a0", "a1") in v.quantum_pairs
    assert v.information_only == []
    assert v.boolean_local


def test_hexagon_has_information_only_pairs():
    lat = hexagon_o6()
    v = classify_nondistributivity(lat)
    assert v.information_only
    assert not v.boolean_local
    for a, b in v.information_only:
        ia, ib = lat.index[a], lat.index[b]
        assert information_type(lat, ia, ib, 0) or information_type(lat, ia, ib, 1)


def test_classification_needs_ortho():
    with pytest.raises(LatticeError):
        classify_nondistributivity(pentagon_n5())


# --- duality ----------------------------------------------------------------------------


def test_dualize_self_dual_and_involutive():
    b2 = boolean_lattice(2)
    assert isomorphic(dualize(b2), b2)
    n5 = pentagon_n5()
    assert isomorphic(dualize(n5), n5)
    assert isomorphic(dualize(dualize(n5)), n5)
    assert not isomorphic(pentagon_n5(), diamond_m3())


@pytest.mark.parametrize("make", [lambda: mo(2), hexagon_o6, lambda: boolean_lattice(2)])
def test_dualize_exchanges_relation_forms(make):
    lat = make()
    dual = dualize(lat)
    n = len(lat)
    for a in range(n):
        for b in range(n):
            for clause in (0, 1):
                assert information_type(lat, a, b, clause) == quantum_type(dual, a, b, clause)
                assert quantum_type(lat, a, b, clause) == information_type(dual, a, b, clause)


# --- from propositions --------------------------------------------------------------------


def test_from_propositions_sizes():
    s = corpus.boolean_pair()
    assert len(from_propositions(s, [])) == 2
    four = from_propositions(s, [s.proposition("P"), s.proposition("notP")])
    assert len(four) == 4 and isomorphic(four, boolean_lattice(2))

    c = corpus.boolean_composite()
    props = [c.proposition(n) for n in ("P⊗1", "notP⊗1", "1⊗P", "1⊗notP")]
    lat = from_propositions(c, props)
    assert len(lat) == 16
    assert isomorphic(lat, boolean_lattice(4))
    v = check_laws(lat)
    assert v.absorption and v.distributive


# --- exhaustive search ----------------------------------------------------------------------


def _oracle_ortholattices(size):
    """Brute force over all relations on the middle elements and all complement pairings."""
    k = size - 2
    mids = list(range(1, size - 1))
    bottom, top = 0, size - 1
    pairs = [(x, y) for x in mids for y in mids if x != y]

    def matchings(items):
        if not items:
            yield []
            return
        a = items[0]
        for i in range(1, len(items)):
            rest = items[1:i] + items[i + 1:]
            for m in matchings(rest):
                yield [(a, items[i])] + m

    found = []
    for m in matchings(mids):
        comp = {bottom: top, top: bottom}
        for a, b in m:
            comp[a], comp[b] = b, a
        for mask in range(2 ** len(pairs)):
            leq = np.eye(size, dtype=bool)
            leq[bottom, :] = True
            leq[:, top] = True
            for bit, (x, y) in enumerate(pairs):
                if mask >> bit & 1:
                    leq[x, y] = True
            if (leq & leq.T & ~np.eye(size, dtype=bool)).any():
                continue
            if ((leq.astype(int) @ leq.astype(int) > 0) & ~leq).any():
                continue
            ok = True
            meet = {}
            join = {}
            for a in range(size):
                for b in range(size):
                    lower = [c for c in range(size) if leq[c, a] and leq[c, b]]
                    glb = [c for c in lower if all(leq[d, c] for d in lower)]
                    upper = [c for c in range(size) if leq[a, c] and leq[b, c]]
                    lub = [c for c in upper if all(leq[c, d] for d in upper)]
                    if len(glb) != 1 or len(lub) != 1:
                        ok = False
                        break
                    meet[a, b], join[a, b] = glb[0], lub[0]
                if not ok:
                    break
            if not ok:
                continue
            if any(meet[a, comp[a]] != bottom or join[a, comp[a]] != top for a in range(size)):
                continue
            if any(leq[a, b] and not leq[comp[b], comp[a]] for a in range(size) for b in range(size)):
                continue
            found.append((leq, comp))
    # dedupe up to relabelings of the middle that respect order and complement
    classes = []
    for leq, comp in found:
        dup = False
        for leq2, comp2 in classes:
            for perm in itertools.permutations(mids):
                p = {bottom: bottom, top: top, **dict(zip(mids, perm))}
                if all(leq[a, b] == leq2[p[a], p[b]] for a in range(size) for b in range(size)) and \
                        all(p[comp[a]] == comp2[p[a]] for a in range(size)):
                    dup = True
                    break
            if dup:
                break
        if not dup:
            classes.append((leq, comp))
    assert k % 2 == 0
    return len(classes)


def test_ortholattice_enumeration_matches_oracle():
    lats = enumerate_ortholattices(6)
    sizes = sorted(len(l) for l in lats)
    for size in (2, 4, 6):
        assert sizes.count(size) == _oracle_ortholattices(size)


def test_search_up_to_eight_finds_hexagon_first():
    hits = search_information_type(8)
    assert hits
    smallest, verdict = hits[0]
    assert len(smallest) == 6
    assert isomorphic(smallest, hexagon_o6(), respect_ortho=True)
    assert verdict.information_only
    for lat, v in hits:
        assert v.information_only
        assert not v.boolean_local
