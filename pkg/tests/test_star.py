import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wqt.lattice import classify_nondistributivity
from wqt.star import (
    CANONICAL_ANGLES,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Algebra,
    ConvergenceError,
    State,
    StarError,
    ZeroStateError,
    absorption_check,
    act,
    check_ladder,
    check_uncertainty_relation,
    chsh_maximize,
    chsh_value,
    commutator,
    entanglement_check,
    expectation,
    frobenius_norm,
    gns,
    heisenberg_spreads,
    is_projector,
    meet_iteration,
    op_norm,
    partial_transpose,
    projector_join,
    projector_lattice,
    projector_meet,
    projector_onto,
    qubit_projector_family,
    random_low_state,
    random_self_adjoint,
    random_state,
    replay_ladder_witness,
    singlet,
    spectral_decomposition,
    tensor_state,
    truncated_canonical_pair,
    uncertainty,
)


def _random_pure(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return State.pure(v / np.linalg.norm(v))


# --- ladder ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("seed", range(5))
def test_full_algebras_pass_ladder(n, seed):
    rep = check_ladder(Algebra.full(n), samples=10, seed=seed)
    assert rep.ok, rep.failed_groups()


def test_upper_triangular_fails_only_involution():
    alg = Algebra.upper_triangular(2)
    rep = check_ladder(alg, samples=10, seed=0)
    assert rep.failed_groups() == ["S"]
    for r in rep.results.values():
        if not r.passed:
            assert replay_ladder_witness(alg, r)


def test_frobenius_norm_fails_only_cstar():
    alg = Algebra.full(2)
    alg = Algebra(alg.n, alg.basis, "M2-frobenius", frobenius_norm)
    rep = check_ladder(alg, samples=10, seed=0)
    assert rep.failed_groups() == ["C"]
    assert replay_ladder_witness(alg, rep.results["C1"])


def test_diagonal_algebra_passes():
    assert check_ladder(Algebra.diagonal(3), samples=10, seed=1).ok


def test_ladder_is_seed_deterministic():
    a = check_ladder(Algebra.upper_triangular(2), samples=5, seed=3).to_dict()
    b = check_ladder(Algebra.upper_triangular(2), samples=5, seed=3).to_dict()
    assert a == b


def test_algebra_membership():
    t2 = Algebra.upper_triangular(2)
    assert t2.contains(np.array([[1, 2], [0, 3]]))
    assert not t2.contains(np.array([[1, 0], [1, 1]]))
    x = np.array([[1, 2j], [0, -1]])
    assert np.allclose(t2.element(t2.coords(x)), x)


def test_norms():
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    assert op_norm(a) == pytest.approx(1.0)
    assert frobenius_norm(np.eye(2)) == pytest.approx(np.sqrt(2))


# --- states and uncertainty ---------------------------------------------------------------


def test_state_basics():
    z = State.maximally_mixed(3)
    assert z(np.eye(3)) == pytest.approx(1.0)
    assert z.is_positive()
    assert State(np.zeros((2, 2))).is_zero
    assert not State(np.diag([1.0, -0.5])).is_positive()


def test_uncertainty_relation_sweep():
    rng = np.random.default_rng(7)
    worst = np.inf
    for k in range(300):
        n = 2 + k % 3
        z = random_state(n, rng)
        a, b = random_self_adjoint(n, rng), random_self_adjoint(n, rng)
        chk = check_uncertainty_relation(z, a, b)
        assert chk.holds
        worst = min(worst, chk.lhs - chk.rhs)
    assert worst >= -1e-9


def test_uncertainty_equality_case():
    z = State.pure([1, 0])
    chk = check_uncertainty_relation(z, SIGMA_X, SIGMA_Y)
    assert chk.lhs == pytest.approx(1.0, abs=1e-12)
    assert chk.rhs == pytest.approx(1.0, abs=1e-12)


def test_uncertainty_oracle_by_hand():
    # |+> has zero spread in sigma_x and unit spread in sigma_z
    s = 1 / np.sqrt(2)
    z = State.pure([s, s])
    assert uncertainty(z, SIGMA_X) == pytest.approx(0.0, abs=1e-12)
    assert uncertainty(z, SIGMA_Z) == pytest.approx(1.0)


def test_act_can_reach_zero_state():
    z = State.pure([1, 0])
    out = act(SIGMA_X, z)
    assert expectation(out, SIGMA_Z).real == pytest.approx(-1.0)
    killed = act(np.array([[0, 0], [0, 1]]), z)
    assert killed.is_zero


# --- projectors ----------------------------------------------------------------------------


def test_45_degree_meet_converges_to_zero():
    fam = qubit_projector_family()
    it = meet_iteration(fam["|0>"], fam["|+>"])
    assert not it.exact
    assert it.iterations <= 200
    assert it.residual <= 1e-6
    assert op_norm(it.limit) <= 1e-6
    assert np.allclose(projector_meet(fam["|0>"], fam["|+>"]), 0)
    assert np.allclose(projector_join(fam["|0>"], fam["|+>"]), np.eye(2))


def test_meet_iterate_oracle():
    # P0 P+ = 2^{-1/2} |0><+| and <+|0> = 2^{-1/2}, so (P0 P+)^k = 2^{-(2k-1)/2} |0><+|
    fam = qubit_projector_family()
    prod = fam["|0>"] @ fam["|+>"]
    for k in (1, 2, 5):
        assert op_norm(np.linalg.matrix_power(prod, k)) == pytest.approx(2 ** (-k / 2) * 2 ** (-(k - 1) / 2))


def test_meet_budget():
    fam = qubit_projector_family()
    with pytest.raises(ConvergenceError):
        meet_iteration(fam["|0>"], fam["|+>"], max_iter=3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_compatible_pairs_meet_and_join_exactly(seed):
    rng = np.random.default_rng(seed)
    n = 4
    u, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    d1, d2 = rng.integers(0, 2, n), rng.integers(0, 2, n)
    p1 = u @ np.diag(d1) @ u.conj().T
    p2 = u @ np.diag(d2) @ u.conj().T
    m, j = projector_meet(p1, p2), projector_join(p1, p2)
    assert np.abs(m - p1 @ p2).max() <= 1e-12
    assert np.abs(j - (p1 + p2 - p1 @ p2)).max() <= 1e-12
    assert absorption_check(p1, p2)


def test_noncommuting_absorption():
    fam = qubit_projector_family()
    assert absorption_check(fam["|0>"], fam["|+>"])


def test_higher_rank_meet():
    # two planes in C^3 meeting along e1
    p1 = projector_onto([1, 0, 0], [0, 1, 0])
    p2 = projector_onto([1, 0, 0], [0, 1, 1])
    m = projector_meet(p1, p2)
    assert is_projector(m)
    assert np.allclose(m, projector_onto([1, 0, 0]), atol=1e-6)


def test_qubit_projector_lattice_is_quantum_type():
    lat = projector_lattice(qubit_projector_family())
    assert len(lat) == 6
    v = classify_nondistributivity(lat)
    assert not v.distributive
    assert ("|0>", "|+>") in v.quantum_pairs
    assert v.information_only == []


def test_spectral_decomposition():
    rng = np.random.default_rng(0)
    a = random_self_adjoint(3, rng)
    sd = spectral_decomposition(a)
    r = sd.residuals(a)
    assert max(r.values()) < 1e-10
    deg = spectral_decomposition(np.diag([1.0, 1.0, 2.0]))
    assert deg.eigenvalues == [1.0, 2.0]
    assert [round(np.trace(p).real) for p in deg.projectors] == [2, 1]


# --- GNS ----------------------------------------------------------------------------------


def test_gns_pure_state():
    res = gns(State.pure([1, 0]), Algebra.full(2))
    assert res.hilbert_dim == 2
    assert len(res.ideal_basis) == 2
    assert res.multiplicativity_residual() <= 1e-10
    # the vanishing ideal is the left ideal of matrices killing |0>
    for x in res.ideal_basis:
        assert np.allclose(x[:, 0], 0)


def test_gns_mixed_state():
    rng = np.random.default_rng(4)
    z = random_state(2, rng)
    res = gns(z, Algebra.full(2))
    assert res.hilbert_dim == 4 and not res.ideal_basis
    assert res.multiplicativity_residual() <= 1e-10
    a = random_self_adjoint(2, rng)
    assert res.expectation(a) == pytest.approx(z(a))


def test_gns_zero_state():
    with pytest.raises(ZeroStateError):
        gns(State(np.zeros((2, 2))), Algebra.full(2))


# --- entanglement and CHSH ---------------------------------------------------------------


def test_singlet_entangled():
    chk = entanglement_check(singlet())
    assert chk.entangled and chk.schmidt_rank == 2
    assert chk.min_pt_eigenvalue == pytest.approx(-0.5, abs=1e-10)


def test_partial_transpose_oracle():
    # explicit index swap b <-> d on rho[(a,b),(c,d)]
    rng = np.random.default_rng(1)
    rho = random_state(4, rng).density
    pt = partial_transpose(rho)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    assert pt[2 * a + b, 2 * c + d] == rho[2 * a + d, 2 * c + b]


def test_product_states_are_separable():
    rng = np.random.default_rng(2)
    for _ in range(20):
        z = tensor_state(_random_pure(rng, 2), _random_pure(rng, 2))
        chk = entanglement_check(z)
        assert not chk.entangled and chk.schmidt_rank == 1


def test_canonical_chsh():
    assert abs(chsh_value(singlet(), CANONICAL_ANGLES)) == pytest.approx(2 * np.sqrt(2), abs=1e-9)


def test_chsh_maximize_matches_brute_force():
    rng = np.random.default_rng(5)
    z = random_state(4, rng)
    best, angles = chsh_maximize(z, grid_step_deg=15.0)
    grid = np.deg2rad(np.arange(0.0, 180.0, 15.0))
    brute = max(abs(chsh_value(z, (a, a2, b, b2))) for a in grid for a2 in grid for b in grid for b2 in grid)
    assert best == pytest.approx(brute, abs=1e-12)
    assert abs(chsh_value(z, angles)) == pytest.approx(best, abs=1e-12)


def test_chsh_bounds():
    rng = np.random.default_rng(6)
    for _ in range(10):
        prod = tensor_state(random_state(2, rng), random_state(2, rng))
        assert chsh_maximize(prod, 5.0)[0] <= 2 + 1e-6
        assert chsh_maximize(random_state(4, rng), 5.0)[0] <= 2 * np.sqrt(2) + 1e-6
    assert chsh_maximize(singlet(), 1.0)[0] <= 2 * np.sqrt(2) + 1e-6


def test_two_qubit_shape_checked():
    with pytest.raises(StarError):
        chsh_value(State.pure([1, 0]), CANONICAL_ANGLES)


# --- canonical pair -----------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 5, 50])
def test_truncated_commutator(n):
    q, p, hbar = truncated_canonical_pair(n)
    expected = 1j * hbar * np.diag([1.0] * (n - 1) + [-(n - 1.0)])
    assert np.abs(commutator(q, p) - expected).max() < 1e-12 * n
    assert np.trace(commutator(q, p)) == pytest.approx(0.0, abs=1e-9)


def test_heisenberg_on_low_states():
    rng = np.random.default_rng(0)
    states = [random_low_state(20, rng) for _ in range(20)]
    assert min(heisenberg_spreads(20, states)) >= 0.5 - 1e-9
    ground = State.pure(np.eye(20)[0])
    assert heisenberg_spreads(20, [ground])[0] == pytest.approx(0.5)
