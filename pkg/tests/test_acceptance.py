"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line and then asserts."""
import io
import math
from pathlib import Path

import numpy as np
import pytest

from wqt import corpus
from wqt.cli import run_command
from wqt.core import Verdict, check_axioms, replay_witness
from wqt.infodyn import (
    InfoParams,
    TimeGrid,
    bandwidth_duration_product,
    commutator_lm_check,
    commutator_lt_check,
    doubling_map,
    gaussian,
    gaussian_pulse,
    ks_entropy_lyapunov,
    ks_entropy_symbolic,
    logistic_map,
    rectangular_pulse,
    rotation_map,
    tent_map,
)
from wqt.lattice import (
    boolean_lattice,
    classify_nondistributivity,
    dualize,
    information_type,
    quantum_type,
    search_information_type,
)
from wqt.star import (
    CANONICAL_ANGLES,
    SIGMA_X,
    SIGMA_Y,
    Algebra,
    State,
    check_ladder,
    check_uncertainty_relation,
    chsh_maximize,
    chsh_value,
    entanglement_check,
    frobenius_norm,
    gns,
    meet_iteration,
    op_norm,
    projector_join,
    projector_lattice,
    projector_meet,
    qubit_projector_family,
    random_self_adjoint,
    random_state,
    replay_ladder_witness,
    singlet,
    tensor_state,
)

FX = Path(__file__).resolve().parent.parent / "fixtures"
LN2 = math.log(2)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, checks):
        failed = [name for name, ok in checks.items() if not ok]
        line = f"criterion {number:2d} {'PASS' if not failed else 'FAIL'}: {title}"
        if failed:
            line += "; failed: " + ", ".join(failed)
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line
    return emit


def test_axiom_suite(verdict):
    checks = {}
    assert len(corpus.POSITIVE) >= 6
    assert {"monoid-2", "monoid-3"} <= set(corpus.POSITIVE)
    for name, make in corpus.POSITIVE.items():
        checks[f"positive {name}"] = check_axioms(make()).ok
    for axiom, make in corpus.NEGATIVE.items():
        system = make()
        rep = check_axioms(system)
        failed = [r for r in rep.results.values() if r.verdict is Verdict.FAIL]
        checks[f"negative {axiom} fails only {axiom}"] = rep.failed_groups() == [axiom]
        checks[f"negative {axiom} witnesses replay"] = bool(failed) and all(replay_witness(system, r) for r in failed)
    verdict(1, "axiom suite (positive and negative corpora)", checks)


def test_ladder_suite(verdict):
    checks = {}
    for n in (2, 3):
        for seed in range(5):
            checks[f"M{n} seed {seed}"] = check_ladder(Algebra.full(n), samples=20, seed=seed).ok
    for seed in range(5):
        t2 = Algebra.upper_triangular(2)
        rep = check_ladder(t2, samples=20, seed=seed)
        checks[f"T2 seed {seed} fails exactly S"] = rep.failed_groups() == ["S"]
        checks[f"T2 seed {seed} witnesses replay"] = all(
            replay_ladder_witness(t2, r) for r in rep.results.values() if not r.passed)
        fro = Algebra(2, Algebra.full(2).basis, "M2-frobenius", frobenius_norm)
        rep = check_ladder(fro, samples=20, seed=seed)
        failing = sorted(k for k, r in rep.results.items() if not r.passed)
        checks[f"Frobenius seed {seed} fails exactly C1"] = failing == ["C1"]
    verdict(2, "enrichment ladder on M2, M3, T2 and the Frobenius-normed M2", checks)


def test_uncertainty(verdict):
    rng = np.random.default_rng(2024)
    worst = math.inf
    for k in range(1000):
        n = 2 + k % 3
        z = random_state(n, rng)
        r = check_uncertainty_relation(z, random_self_adjoint(n, rng), random_self_adjoint(n, rng))
        worst = min(worst, r.lhs - r.rhs)
    eq = check_uncertainty_relation(State.pure([1, 0]), SIGMA_X, SIGMA_Y)
    verdict(3, "Robertson uncertainty relation", {
        f"1000 random triples (min margin {worst:.3g})": worst >= -1e-9,
        "sigma_x, sigma_y on |0>: lhs = 1": abs(eq.lhs - 1) <= 1e-12,
        "sigma_x, sigma_y on |0>: rhs = 1": abs(eq.rhs - 1) <= 1e-12,
    })


def test_gns(verdict):
    m2 = Algebra.full(2)
    pure = gns(State.pure([1, 0]), m2)
    mixed = gns(State(np.diag([0.7, 0.3]).astype(complex)), m2)
    verdict(4, "GNS construction on M2", {
        "pure: hilbert dim 2": pure.hilbert_dim == 2,
        "pure: ideal dim 2": len(pure.ideal_basis) == 2,
        "mixed: hilbert dim 4": mixed.hilbert_dim == 4,
        "pure: multiplicativity": pure.multiplicativity_residual() <= 1e-10,
        "mixed: multiplicativity": mixed.multiplicativity_residual() <= 1e-10,
    })


def test_entanglement_and_chsh(verdict):
    rng = np.random.default_rng(5)
    chk = entanglement_check(singlet())
    s = chsh_value(singlet(), CANONICAL_ANGLES)
    tsirelson = 2 * math.sqrt(2)
    product_max, any_max = 0.0, 0.0
    for _ in range(25):
        product_max = max(product_max, chsh_maximize(tensor_state(random_state(2, rng), random_state(2, rng)), 2.0)[0])
        any_max = max(any_max, chsh_maximize(random_state(4, rng), 2.0)[0])
    any_max = max(any_max, chsh_maximize(singlet(), 1.0)[0])
    verdict(5, "entanglement and CHSH", {
        "singlet entangled": chk.entangled,
        f"partial transpose eigenvalue {chk.min_pt_eigenvalue:.12f}": abs(chk.min_pt_eigenvalue + 0.5) <= 1e-10,
        f"canonical |S| = {abs(s):.12f}": abs(abs(s) - tsirelson) <= 1e-9,
        f"product states max {product_max:.6f}": product_max <= 2 + 1e-6,
        f"all states max {any_max:.6f}": any_max <= tsirelson + 1e-6,
    })


def test_projector_calculus(verdict):
    fam = qubit_projector_family()
    it = meet_iteration(fam["|0>"], fam["|+>"])
    rng = np.random.default_rng(9)
    exact = True
    for _ in range(50):
        u, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        p1 = u @ np.diag(rng.integers(0, 2, 4)) @ u.conj().T
        p2 = u @ np.diag(rng.integers(0, 2, 4)) @ u.conj().T
        exact &= np.abs(projector_meet(p1, p2) - p1 @ p2).max() <= 1e-12
        exact &= np.abs(projector_join(p1, p2) - (p1 + p2 - p1 @ p2)).max() <= 1e-12
    verdict(6, "projector meet by power iteration", {
        f"45 degree pair within 200 iterations ({it.iterations})": it.iterations <= 200,
        f"residual {it.residual:.3g}": it.residual <= 1e-6,
        "limit is the zero projector": op_norm(it.limit) <= 1e-6,
        "compatible pairs exact": bool(exact),
    })


def test_lattice_classification(verdict):
    checks = {}
    for n in (1, 2, 3):
        v = classify_nondistributivity(boolean_lattice(n))
        checks[f"B{n} empty witness lists"] = not v.quantum_pairs and not v.information_pairs
    q = classify_nondistributivity(projector_lattice(qubit_projector_family()))
    checks["qubit projectors: quantum pair (|0>, |+>)"] = ("|0>", "|+>") in q.quantum_pairs
    hits = search_information_type(8)
    checks["search finds an information-only lattice"] = bool(hits)
    for lat, v in hits:
        dual = dualize(lat)
        mapped = True
        for a, b in v.information_only:
            ia, ib = lat.index[a], lat.index[b]
            for clause in (0, 1):
                if information_type(lat, ia, ib, clause):
                    mapped &= quantum_type(dual, ia, ib, clause)
        checks[f"dual of the {len(lat)}-element hit turns its relations into meet form"] = mapped
    verdict(7, "non-distributivity classification and duality", checks)


def test_infodyn(verdict):
    grid = TimeGrid.symmetric(8.0, 1e-3)
    lm = commutator_lm_check(gaussian, grid, InfoParams())
    lt = commutator_lt_check(gaussian, grid)
    est = {
        "doubling lyapunov": (ks_entropy_lyapunov(doubling_map()).value, 1e-12),
        "tent lyapunov": (ks_entropy_lyapunov(tent_map()).value, 1e-12),
        "doubling symbolic": (ks_entropy_symbolic(doubling_map(), n_iter=1_000_000).value, 2e-2),
        "tent symbolic": (ks_entropy_symbolic(tent_map(), n_iter=1_000_000).value, 2e-2),
        "logistic r=4": (ks_entropy_lyapunov(logistic_map(4.0), n_iter=1_000_000).value, 1e-2),
    }
    checks = {f"{k} = {v:.15f}": abs(v - LN2) <= tol for k, (v, tol) in est.items()}
    rot = ks_entropy_lyapunov(rotation_map()).value
    checks[f"rotation |K| = {abs(rot):.3g}"] = abs(rot) <= 1e-3
    for name, c in (("LM", lm), ("LT", lt)):
        checks[f"{name} halving ratio {c.ratio:.4f}"] = 3.5 <= c.ratio <= 4.5
        checks[f"{name} residual {c.residual:.3g}"] = c.residual <= 1e-5
    verdict(8, "entropy rates and commutator convergence", checks)


def test_fourier(verdict):
    grid = TimeGrid.symmetric(60.0, 0.01)
    g = bandwidth_duration_product(gaussian_pulse(grid)).product
    r = bandwidth_duration_product(rectangular_pulse(grid)).product
    c = bandwidth_duration_product(gaussian_pulse(grid, chirp=0.3)).product
    verdict(9, "bandwidth-duration products", {
        f"gaussian {g:.6f}": abs(g - 0.5) <= 1e-3,
        f"rectangular {r:.4f}": r > 0.5,
        f"chirped {c:.4f}": c > 0.5,
    })


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], out, err)
    return code, out.getvalue()


def test_determinism(verdict):
    commands = [
        ("check", FX / "boolean.wqt"),
        ("check", FX / "open_table.wqt", "--lenient"),
        ("ladder", FX / "m3.alg", "--samples", 10, "--seed", 4),
        ("ladder", FX / "t2.alg", "--samples", 10, "--seed", 4),
        ("lattice", FX / "hexagon.lat"),
        ("lattice", "--qubit-projectors"),
        ("gns", FX / "mixed2.state", FX / "m2.alg"),
        ("uncertainty", "--samples", 200, "--seed", 8),
        ("entangle", FX / "singlet.state"),
        ("chsh", FX / "singlet.state", "--grid", 5),
        ("infodyn", "--fixture", FX / "logistic.fix", "--iters", 50000, "--depth", 8),
        ("infodyn", "--fixture", FX / "gaussian.fix", "--op", "lm"),
        ("infodyn", "--fixture", FX / "chirp.fix", "--op", "fourier"),
        ("infodyn", "--fixture", "tent", "--op", "lattice", "--horizon", 3, "--iters", 20000),
        ("search", "--states", 2),
        ("search", "--target", "ortholattices", "--max-size", 6),
    ]
    checks = {}
    for argv in commands:
        first, second = _run(argv), _run(argv)
        checks[" ".join(str(a) if not isinstance(a, Path) else a.name for a in argv)] = \
            first == second and first[1] != ""
    verdict(10, "byte-identical CLI reports on rerun", checks)
