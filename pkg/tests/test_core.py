import itertools

import pytest
from hypothesis import given, settings, strategies as st

from wqt import corpus
from wqt.core import (
    FALSE,
    TRUE,
    BudgetExceeded,
    IncompatibleError,
    MissingNegationError,
    Observable,
    StateSpace,
    Verdict,
    WeakSystem,
    WeakSystemError,
    adjunction,
    check_axioms,
    compatible,
    complementary,
    compose,
    composite,
    conjunction,
    detect_entanglement,
    enumerate_models,
    factor_swap,
    identity,
    make_system,
    replay_witness,
    transformation_monoid,
    verify_spectral_family,
)


# --- brute-force oracle for the model count -----------------------------------


def _oracle_model_count(n):
    """Closed sets of zero-fixing maps containing 1 and 0, counted up to permutations of the nonzero states."""
    z = n
    maps = [tuple(m) + (z,) for m in itertools.product(range(n + 1), repeat=n)]
    ident, zero = tuple(range(n + 1)), (z,) * (n + 1)
    rest = [m for m in maps if m not in (ident, zero)]

    def comp(a, b):
        return tuple(a[b[i]] for i in range(n + 1))

    perms = [tuple(p) + (z,) for p in itertools.permutations(range(n))]

    def conj(m, p):
        inv = [0] * (n + 1)
        for i, j in enumerate(p):
            inv[j] = i
        return tuple(p[m[inv[i]]] for i in range(n + 1))

    seen = set()
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            s = {ident, zero, *extra}
            if all(comp(a, b) in s for a in s for b in s):
                seen.add(min(tuple(sorted(conj(m, p) for m in s)) for p in perms))
    return len(seen)


def test_oracle_counts_small_cases():
    assert _oracle_model_count(1) == 1


def test_enumerate_two_states_matches_oracle():
    expected = _oracle_model_count(2)
    systems = enumerate_models(2)
    assert len(systems) == expected == 21


def test_enumerate_one_state_is_unit_and_zero():
    (s,) = enumerate_models(1)
    assert sorted(s.names) == ["0", "1"]


def test_enumerated_models_pass_axioms():
    for s in enumerate_models(2):
        assert check_axioms(s).ok


def test_enumerate_budget_guard():
    with pytest.raises(BudgetExceeded):
        enumerate_models(3, budget=50)
    with pytest.raises(BudgetExceeded):
        enumerate_models(6)


# --- transformation monoids ------------------------------------------------------


@pytest.mark.parametrize("n, size", [(1, 2), (2, 9), (3, 64)])
def test_transformation_monoid_sizes(n, size):
    assert len(transformation_monoid(n)) == size


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_composition_is_associative(data):
    sys3 = transformation_monoid(3)
    obs = sys3.observables
    a, b, c = (data.draw(st.sampled_from(obs)) for _ in range(3))
    assert compose(a, compose(b, c)).same_map(compose(compose(a, b), c))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_unit_and_zero_laws(data):
    s = transformation_monoid(3)
    a = data.draw(st.sampled_from(s.observables))
    one, zero = s.unit_observable, s.zero_observable
    assert compose(one, a).same_map(a) and compose(a, one).same_map(a)
    assert compose(zero, a).same_map(zero) and compose(a, zero).same_map(zero)


def test_compose_applies_right_argument_first():
    space = StateSpace(("z1", "z2", "o"), "o")
    swap = Observable.from_mapping("s", space, {"z1": "z2", "z2": "z1", "o": "o"})
    c1 = Observable.from_mapping("c", space, {"z1": "z1", "z2": "z1", "o": "o"})
    # swap after c1 sends everything nonzero to z2
    assert compose(swap, c1).mapping() == {"z1": "z2", "z2": "z2", "o": "o"}
    assert complementary(swap, c1) and not compatible(swap, c1)


# --- axiom corpus -----------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(corpus.POSITIVE))
def test_positive_corpus_passes(name):
    rep = check_axioms(corpus.POSITIVE[name]())
    assert rep.ok, rep.to_dict()


@pytest.mark.parametrize("axiom", sorted(corpus.NEGATIVE))
def test_negative_corpus_fails_exactly_its_axiom(axiom):
    system = corpus.NEGATIVE[axiom]()
    rep = check_axioms(system)
    assert rep.failed_groups() == [axiom]
    failed = [r for r in rep.results.values() if r.verdict is Verdict.FAIL]
    assert failed
    for r in failed:
        assert r.witness
        assert replay_witness(system, r)


def test_axiom_report_marks_missing_propositions_not_applicable():
    rep = check_axioms(corpus.minimal())
    assert rep.group("VI") is Verdict.NA


# --- propositions -------------------------------------------------------------------


def test_proposition_laws_boolean_pair():
    s = corpus.boolean_pair()
    p = s.proposition("P")
    q = p.negated()
    assert q.name == "notP" and q.negated().name == "P"
    assert compose(p.observable, p.observable).same_map(p.observable)
    assert compose(p.observable, q.observable).same_map(s.zero_observable)


def test_conjunction_and_adjunction_of_compatible_pair():
    s = corpus.boolean_pair()
    p, q = s.proposition("P"), s.proposition("notP")
    assert conjunction(p, q, s).observable.same_map(s.zero_observable)
    assert adjunction(p, q, s).observable.same_map(s.unit_observable)
    assert conjunction(p, p, s).observable.same_map(p.observable)


def test_conjunction_of_incompatible_pair_needs_lattice():
    s = corpus.weak_qubit()
    pu, pp = s.proposition("Pu"), s.proposition("Pp")
    assert not compatible(pu.observable, pp.observable)
    with pytest.raises(IncompatibleError):
        conjunction(pu, pp, s)


def test_proposition_without_negation():
    s = corpus.minimal()
    with pytest.raises(WeakSystemError):
        s.proposition("missing")
    nilp = make_system(["z1", "z2", "o"], "o", {"N": ({"z1": "o", "z2": "z1", "o": "o"}, {"n"})})
    with pytest.raises((MissingNegationError, WeakSystemError)):
        nilp.proposition("N")


def test_spectral_families():
    s = corpus.weak_qubit()
    for fam in s.spectral_families:
        assert verify_spectral_family(fam).ok


# --- construction errors ---------------------------------------------------------------


def test_duplicate_maps_rejected():
    space = StateSpace(("z1", "o"), "o")
    with pytest.raises(WeakSystemError):
        WeakSystem(space, (identity(space), identity(space, "id2")))


def test_conflicting_negations_rejected():
    with pytest.raises(WeakSystemError):
        make_system(
            ["z1", "z2", "o"], "o",
            {"P": ({"z1": "z1", "z2": "o", "o": "o"}, None), "Q": ({"z1": "o", "z2": "z2", "o": "o"}, None)},
            negations=[("P", "Q"), ("P", "1")],
        )


def test_spectrum_must_be_nonempty():
    space = StateSpace(("z1", "o"), "o")
    with pytest.raises(WeakSystemError):
        Observable("A", space, (0, 1), frozenset())


# --- composites and entanglement ---------------------------------------------------------


def test_composite_is_product_and_passes():
    s = corpus.boolean_composite()
    assert len(s.space) == 5  # four product states plus the joint zero
    assert check_axioms(s).ok
    rep = detect_entanglement(s)
    assert not rep.weakly_entangled


def test_swap_is_weakly_entangling():
    s = corpus.boolean_composite()
    swap = factor_swap(s)
    bigger = s.with_observables([swap])
    assert check_axioms(bigger).ok
    rep = detect_entanglement(bigger)
    assert rep.weakly_entangled
    assert any("swap" in pair[0] or "swap" in pair[1] for pair in rep.incompatible)


def test_composite_parts_commute():
    s = corpus.boolean_composite()
    for a in s.product.part1:
        for b in s.product.part2:
            assert compatible(s[a], s[b])


def test_composite_rejects_shared_labels():
    with pytest.raises(WeakSystemError):
        composite(corpus.boolean_pair(), corpus.boolean_pair())


def test_truth_values_are_fixed_strings():
    assert {TRUE, FALSE} == {"true", "false"}
