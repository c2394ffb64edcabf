"""Command-line front end: ``wqt <command> ...`` prints a JSON report on stdout and a summary on stderr.

Exit codes: 0 when every check passes, 1 when a check fails (the report
carries a witness), 2 for usage, schema or input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [_jsonable(x.real), _jsonable(x.imag)]
    return x


def _digest(paths: Sequence[str], extra: str = "") -> str:
    h = hashlib.sha256()
    for p in paths:
        with open(p, "rb") as fh:
            h.update(fh.read())
        h.update(b"\0")
    h.update(extra.encode())
    return h.hexdigest()


def _read(path, kind=None):
    from .io import DocumentError, read_document

    try:
        doc = read_document(path, strict=True)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except DocumentError as e:
        raise UsageError(f"{path}: {e}") from None
    if kind is not None and doc.kind not in _as_tuple(kind):
        raise UsageError(f"{path}: expected a {kind} document, got {doc.kind}")
    return doc


def _read_lenient(path):
    from .io import DocumentError, read_document

    try:
        return read_document(path, strict=False)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except DocumentError as e:
        raise UsageError(f"{path}: {e}") from None


def _as_tuple(x):
    return x if isinstance(x, tuple) else (x,)


# ---------------------------------------------------------------------------
# commands; each returns (passed, payload, input paths)


def cmd_check(args):
    from .core import WeakSystemError, check_axioms

    doc = _read_lenient(args.file) if args.lenient else _read(args.file, "weak-system")
    if doc.kind != "weak-system":
        raise UsageError(f"{args.file}: expected a weak-system document, got {doc.kind}")
    try:
        system = doc.build()
    except WeakSystemError as e:
        raise UsageError(f"{args.file}: {e}") from None
    rep = check_axioms(system)
    groups = {g: rep.group(g).value for g in ("I", "II", "III", "IV", "V", "VI")}
    return rep.ok, {"groups": groups, "axioms": rep.to_dict(), "observables": len(system)}, [args.file]


def cmd_ladder(args):
    from .star import check_ladder

    alg = _read(args.file, "star-algebra").build()
    states = None
    paths = [args.file]
    if args.state:
        states = [_read(args.state, "state").build()]
        paths.append(args.state)
    rep = check_ladder(alg, samples=args.samples, seed=args.seed, states=states, tol=args.tol)
    groups = {g: "pass" if rep.group_passed(g) else "fail" for g in ("A", "S", "B", "C", "Z")}
    return rep.ok, {"algebra": alg.name, "dim": alg.dim, "groups": groups, "axioms": rep.to_dict()}, paths


def cmd_lattice(args):
    from .lattice import check_laws
    from .star import ConvergenceError, LIMIT_TOL, projector_lattice, qubit_projector_family

    if args.qubit_projectors:
        if args.file:
            raise UsageError("give a lattice file or --qubit-projectors, not both")
        try:
            lat = projector_lattice(qubit_projector_family(), LIMIT_TOL, max_iter=args.max_iter)
        except ConvergenceError as e:
            raise UsageError(f"projector meet did not converge: {e}") from None
        paths = []
    elif args.file:
        lat = _read(args.file, "lattice").build()
        paths = [args.file]
    else:
        raise UsageError("lattice needs a file or --qubit-projectors")
    v = check_laws(lat)
    ok = v.absorption and v.identities
    return ok, {"elements": len(lat), "laws": v.to_dict(),
                "information_only_pairs": [[str(a), str(b)] for a, b in v.information_only]}, paths


def cmd_gns(args):
    from .star import gns

    z = _read(args.state, "state").build()
    alg = _read(args.algebra, "star-algebra").build()
    g = gns(z, alg, tol=args.tol)
    mult = g.multiplicativity_residual()
    ev = np.linalg.eigvalsh((g.gram + g.gram.conj().T) / 2) if g.hilbert_dim else np.array([])
    min_gram = float(ev.min()) if ev.size else 0.0
    ok = mult <= max(args.tol, 1e-10) * 10 and (not ev.size or min_gram > 0)
    return ok, {"hilbert_dim": g.hilbert_dim, "ideal_dim": len(g.ideal_basis), "algebra_dim": alg.dim,
                "multiplicativity_residual": mult, "min_gram_eigenvalue": min_gram}, [args.state, args.algebra]


_NAMED = {
    "id": np.eye(2, dtype=complex),
    "sx": np.array([[0, 1], [1, 0]], dtype=complex),
    "sy": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sz": np.array([[1, 0], [0, -1]], dtype=complex),
}


def cmd_uncertainty(args):
    from .star import check_uncertainty_relation, random_self_adjoint, random_state

    paths = []
    if args.state:
        z = _read(args.state, "state").build()
        paths.append(args.state)
        for name in (args.a, args.b):
            if name not in _NAMED:
                raise UsageError(f"unknown operator {name!r}; known: {sorted(_NAMED)}")
        if z.n != 2:
            raise UsageError("named operators act on a qubit; the state must be 2x2")
        r = check_uncertainty_relation(z, _NAMED[args.a], _NAMED[args.b], args.tol)
        return r.holds, {"lhs": r.lhs, "rhs": r.rhs, "holds": r.holds}, paths
    rng = np.random.default_rng(args.seed)
    worst, first_fail = math.inf, None
    for k in range(args.samples):
        n = int(rng.integers(2, args.max_dim + 1))
        z = random_state(n, rng)
        a, b = random_self_adjoint(n, rng), random_self_adjoint(n, rng)
        r = check_uncertainty_relation(z, a, b, args.tol)
        worst = min(worst, r.lhs - r.rhs)
        if not r.holds and first_fail is None:
            first_fail = {"sample": k, "dim": n, "lhs": r.lhs, "rhs": r.rhs}
    return first_fail is None, {"samples": args.samples, "min_margin": worst, "witness": first_fail}, paths


def cmd_entangle(args):
    from .star import entanglement_check

    z = _read(args.state, "state").build()
    if z.density.shape != (4, 4):
        raise UsageError("entanglement test needs a 4x4 two-qubit state")
    if z.is_zero:
        raise UsageError("the zero state has no entanglement verdict")
    r = entanglement_check(z.normalized())
    return True, {"entangled": r.entangled, "min_partial_transpose_eigenvalue": r.min_pt_eigenvalue,
                  "schmidt_rank": r.schmidt_rank}, [args.state]


def cmd_chsh(args):
    from .star import CANONICAL_ANGLES, chsh_maximize, chsh_value

    z = _read(args.state, "state").build()
    if z.density.shape != (4, 4):
        raise UsageError("CHSH needs a 4x4 two-qubit state")
    if z.is_zero:
        raise UsageError("CHSH needs a nonzero state")
    z = z.normalized()
    angles = tuple(np.deg2rad(args.angles)) if args.angles else CANONICAL_ANGLES
    s = chsh_value(z, angles)
    best, arg = chsh_maximize(z, args.grid)
    bound = 2 * math.sqrt(2)
    ok = abs(s) <= bound + args.tol and best <= bound + 1e-6
    return ok, {"angles_deg": [float(np.rad2deg(a)) for a in angles], "S": s, "abs_S": abs(s),
                "grid_step_deg": args.grid, "max_abs_S": best,
                "argmax_deg": [float(np.rad2deg(a)) for a in arg], "local_bound": 2.0,
                "tsirelson_bound": bound}, [args.state]


def _infodyn_fixture(source):
    from .infodyn import FIXTURES

    if source in FIXTURES:
        return {"map": source}, []
    if os.path.exists(source):
        return _read(source, "infodyn-fixture").build(), [source]
    raise UsageError(f"fixture {source!r} is neither a built-in map ({sorted(FIXTURES)}) nor a file")


def _map_from(fx):
    from . import infodyn as D

    if "map" not in fx:
        raise UsageError("fixture names no map")
    m = D.get_map(fx["map"])
    params = fx.get("params", {})
    ctor = {"logistic": lambda: D.logistic_map(params.get("r", 4.0)),
            "rotation": lambda: D.rotation_map(params.get("alpha", D.GOLDEN))}.get(fx["map"])
    if ctor is not None:
        m = ctor()
    return m


def cmd_infodyn(args):
    from . import infodyn as D
    from .core import BudgetExceeded

    fx, paths = _infodyn_fixture(args.fixture)
    x0 = fx.get("x0", 0.1234567)
    op = args.op
    if op == "ks":
        m = _map_from(fx)
        part = fx.get("partition")
        lyap = D.ks_entropy_lyapunov(m, args.iters, x0=x0)
        out = {"map": m.name, "estimate": lyap.value, "lyapunov": lyap.to_dict(), "ln2": math.log(2)}
        try:
            sym = D.ks_entropy_symbolic(m, part, args.depth, args.iters, x0=x0)
            out["symbolic"] = sym.to_dict()
        except D.UndersampledError as e:
            out["symbolic"] = {"error": str(e), "coverage": e.coverage}
        return True, out, paths
    if op in ("lm", "lt"):
        grid_spec = fx.get("grid", {})
        grid = D.TimeGrid.symmetric(grid_spec.get("half_width", 8.0), grid_spec.get("dt", 1e-3))
        dens = fx.get("density", {})
        width = dens.get("width", 1.0)
        f = (lambda t: D.gaussian(t, width)) if dens.get("shape", "gaussian") == "gaussian" else (lambda t: 2 * t + 1)
        if op == "lm":
            info = fx.get("info", {})
            params = D.InfoParams(info.get("I0", 0.0), info.get("K", math.log(2)))
            r = D.commutator_lm_check(f, grid, params)
        else:
            r = D.commutator_lt_check(f, grid)
        ok = r.residual <= 1e-12 or 3.5 <= r.ratio <= 4.5
        return ok, {"op": op, **r.to_dict()}, paths
    if op == "fourier":
        sig = fx.get("signal", {})
        grid = D.TimeGrid.symmetric(60.0, 0.01)
        width = sig.get("width", 1.0)
        shape = sig.get("shape", "gaussian")
        if shape == "rectangular":
            s = D.rectangular_pulse(grid, sig.get("half_width", 1.0))
        else:
            s = D.gaussian_pulse(grid, width, sig.get("chirp", 0.3 if shape == "chirp" else 0.0))
        r = D.bandwidth_duration_product(s)
        return r.product >= 0.5 - 1e-3, {"shape": shape, **r.to_dict()}, paths
    if op == "lattice":
        from .lattice import check_laws

        m = _map_from(fx)
        try:
            lat = D.build_prediction_lattice(m, args.horizon, fx.get("partition"), min(args.iters, 200_000), x0)
        except BudgetExceeded as e:
            raise UsageError(str(e)) from None
        v = check_laws(lat)
        return True, {"map": m.name, "horizon": args.horizon, "elements": len(lat), "laws": {
            k: v.to_dict()[k] for k in ("distributive", "boolean_local")},
            "quantum_type_pairs": len(v.quantum_pairs), "information_type_pairs": len(v.information_pairs)}, paths
    raise UsageError(f"unknown op {op!r}")


def cmd_search(args):
    from .core import BudgetExceeded, check_axioms, enumerate_models
    from .lattice import enumerate_ortholattices, search_information_type

    if args.target == "ortholattices":
        lats = enumerate_ortholattices(args.max_size)
        hits = search_information_type(args.max_size)
        return True, {"max_size": args.max_size, "count": len(lats), "sizes": [len(l) for l in lats],
                      "information_only": [{"elements": len(l), "order": [list(map(str, p)) for p in l.order_pairs()],
                                            "pairs": [list(map(str, p)) for p in v.information_only]}
                                           for l, v in hits]}, []
    try:
        systems = enumerate_models(args.states, args.max_obs, args.budget)
    except BudgetExceeded as e:
        raise UsageError(str(e)) from None
    rows = []
    ok = True
    for s in systems:
        rep = check_axioms(s)
        ok &= rep.ok
        prof = s.commutativity_profile()
        rows.append({"observables": sorted(s.names), "axioms_ok": rep.ok, "commutative": prof["commutative"],
                     "complementary_pairs": [list(p) for p in prof["incompatible_pairs"]]})
    return ok, {"states": args.states, "count": len(systems), "systems": rows}, []


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--max-iter", type=int, default=10_000)
    common.add_argument("--json-only", action="store_true", help="suppress the stderr summary")

    p = _Parser(prog="wqt", description="Checks for weak quantum systems, lattices, *-algebras and maps.")
    p.add_argument("--version", action="version", version=f"wqt {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("check", parents=[common], help="axioms I-VI of a weak-system document")
    s.add_argument("file")
    s.add_argument("--lenient", action="store_true", help="skip the closed-table schema check")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("ladder", parents=[common], help="algebra, involution, norm and state axioms")
    s.add_argument("file")
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--state", help="state document used for the Z-group (default: random states)")
    s.set_defaults(run=cmd_ladder)

    s = sub.add_parser("lattice", parents=[common], help="lattice laws and non-distributivity pairs")
    s.add_argument("file", nargs="?")
    s.add_argument("--qubit-projectors", action="store_true",
                   help="use the projector lattice of |0>, |1>, |+>, |-> (meets iterate up to --max-iter)")
    s.set_defaults(run=cmd_lattice)

    s = sub.add_parser("gns", parents=[common], help="GNS representation of a state on an algebra")
    s.add_argument("state")
    s.add_argument("algebra")
    s.set_defaults(run=cmd_gns)

    s = sub.add_parser("uncertainty", parents=[common], help="σ_A σ_B >= |E[A,B]|/2")
    s.add_argument("state", nargs="?", help="qubit state document; omit for a random sweep")
    s.add_argument("--a", default="sx")
    s.add_argument("--b", default="sy")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--max-dim", type=int, default=4)
    s.set_defaults(run=cmd_uncertainty)

    s = sub.add_parser("entangle", parents=[common], help="partial-transpose test for two qubits")
    s.add_argument("state")
    s.set_defaults(run=cmd_entangle)

    s = sub.add_parser("chsh", parents=[common], help="CHSH value and grid maximum for two qubits")
    s.add_argument("state")
    s.add_argument("--angles", type=float, nargs=4, metavar=("A", "A2", "B", "B2"), help="degrees")
    s.add_argument("--grid", type=float, default=1.0, help="grid step in degrees")
    s.set_defaults(run=cmd_chsh)

    s = sub.add_parser("infodyn", parents=[common], help="entropy rates, commutators, Fourier spreads")
    s.add_argument("--fixture", required=True, help="built-in map name or infodyn-fixture document")
    s.add_argument("--op", choices=["ks", "lm", "lt", "fourier", "lattice"], default="ks")
    s.add_argument("--iters", type=int, default=1_000_000)
    s.add_argument("--depth", type=int, default=10)
    s.add_argument("--horizon", type=int, default=2)
    s.set_defaults(run=cmd_infodyn)

    s = sub.add_parser("search", parents=[common], help="enumerate weak-system models or ortholattices")
    s.add_argument("--target", choices=["models", "ortholattices"], default="models")
    s.add_argument("--states", type=int, default=2)
    s.add_argument("--max-obs", type=int, default=64)
    s.add_argument("--budget", type=int, default=200_000)
    s.add_argument("--max-size", type=int, default=8)
    s.set_defaults(run=cmd_search)
    return p


def _summary(command, passed, stream):
    color = stream.isatty() and "NO_COLOR" not in os.environ
    word = "PASS" if passed else "FAIL"
    if color:
        word = ("\033[32m" if passed else "\033[31m") + word + "\033[0m"
    print(f"{word} {command}", file=stream)


def run_command(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
        passed, payload, paths = args.run(args)
        digest = _digest(paths, "\0".join(argv))
    except UsageError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE
    except ValueError as e:  # kernel input errors (zero state, bad dimension, ...)
        print(f"error: {type(e).__name__}: {e}", file=stderr)
        return EXIT_USAGE
    report = {
        "command": argv,
        "tool_version": f"wqt {__version__}",
        "seed": args.seed,
        "input_digest": digest,
        "verdict": "pass" if passed else "fail",
        "result": payload,
    }
    stdout.write(json.dumps(_jsonable(report), indent=2, allow_nan=False) + "\n")
    if not args.json_only:
        _summary(" ".join([args.command, *paths]), passed, stderr)
    return EXIT_OK if passed else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return run_command(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
