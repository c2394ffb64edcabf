"""System-description documents: YAML text with a ``kind`` key and kind-specific fields.

Kinds: ``weak-system``, ``lattice``, ``star-algebra``, ``state`` and
``infodyn-fixture``.  Diagnostics carry the line and column of the offending
node.  The canonical text form has sorted keys, labels as strings and complex
entries written ``a+bi`` with 17 significant digits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

KINDS = ("weak-system", "lattice", "star-algebra", "state", "infodyn-fixture")
ALGEBRA_FAMILIES = ("full", "upper_triangular", "diagonal", "explicit")
NORMS = ("operator", "frobenius")


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


# ---------------------------------------------------------------------------
# YAML nodes with positions


class _Tree:
    """Plain data plus the source mark of every node, keyed by path tuple."""

    def __init__(self, data, marks):
        self.data = data
        self.marks = marks

    def error(self, path, message):
        path = tuple(path)
        while path and path not in self.marks:
            path = path[:-1]
        mark = self.marks.get(path)
        if mark is None:
            raise DocumentError(message)
        raise DocumentError(message, mark.line + 1, mark.column + 1)


_constructor = yaml.SafeLoader("")


def _build(node, path, marks):
    marks[path] = node.start_mark
    if isinstance(node, yaml.MappingNode):
        out = {}
        for knode, vnode in node.value:
            key = _label(_build(knode, path + ("<key>",), {}))
            if key in out:
                m = knode.start_mark
                raise DocumentError(f"duplicate key {key!r}", m.line + 1, m.column + 1)
            out[key] = _build(vnode, path + (key,), marks)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_build(v, path + (i,), marks) for i, v in enumerate(node.value)]
    return _constructor.construct_object(node, deep=True)


def _load(text: str) -> _Tree:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as e:
        m = e.problem_mark
        raise DocumentError(f"malformed document: {e.problem}", m.line + 1 if m else None,
                            m.column + 1 if m else None) from None
    if node is None:
        raise DocumentError("empty document")
    marks: dict = {}
    data = _build(node, (), marks)
    if not isinstance(data, dict):
        raise DocumentError("document must be a mapping", 1, 1)
    return _Tree(data, marks)


def _label(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x)


# ---------------------------------------------------------------------------
# complex scalars

def parse_complex(x) -> complex:
    """Number or ``a+bi`` / ``a+bj`` text."""
    if isinstance(x, bool):
        raise ValueError("boolean is not a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if not isinstance(x, str):
        raise ValueError(f"not a number: {x!r}")
    s = x.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"not a complex number: {x!r}") from None


def _fmt_real(v: float) -> str:
    v = float(v)
    if v == 0:
        v = 0.0  # drop the sign of negative zero
    if not np.isfinite(v):
        raise ValueError("non-finite entry")
    return format(v, ".17g")


def format_complex(z) -> str:
    z = complex(z)
    im = _fmt_real(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{_fmt_real(z.real)}{sign}{im}i"


def format_real(v) -> float:
    """Round-trip a real through its 17-digit text so dumps are stable."""
    return float(_fmt_real(v))


def matrix_from_rows(rows) -> np.ndarray:
    return np.array([[parse_complex(x) for x in row] for row in rows], dtype=complex)


def matrix_to_rows(m) -> list:
    return [[format_complex(x) for x in row] for row in np.asarray(m)]


# ---------------------------------------------------------------------------
# documents


@dataclass
class SystemDocument:
    kind: str
    body: dict
    meta: dict = field(default_factory=dict)

    def build(self):
        return _BUILDERS[self.kind](self.body)

    def to_data(self) -> dict:
        out = {"kind": self.kind, **self.body}
        if self.meta:
            out["meta"] = dict(self.meta)
        return out


def _expect(tree, path, value, types, what):
    if not isinstance(value, types) or isinstance(value, bool) and bool not in _as_tuple(types):
        tree.error(path, f"{what} must be {_type_name(types)}")
    return value


def _as_tuple(t):
    return t if isinstance(t, tuple) else (t,)


def _type_name(types):
    names = {dict: "a mapping", list: "a list", str: "a string", int: "an integer", float: "a number",
             bool: "a boolean"}
    return " or ".join(names.get(t, t.__name__) for t in _as_tuple(types))


def _labels(tree, path, value, what):
    _expect(tree, path, value, list, what)
    out = [_label(v) for v in value]
    seen = set()
    for i, v in enumerate(out):
        if v in seen:
            tree.error(path + (i,), f"duplicate label {v!r} in {what}")
        seen.add(v)
    return out


def _unknown_keys(tree, path, data, allowed):
    for k in data:
        if k not in allowed:
            tree.error(path + (k,), f"unknown field {k!r}; expected one of {sorted(allowed)}")


def _matrix(tree, path, value, what, n=None):
    _expect(tree, path, value, list, what)
    try:
        m = matrix_from_rows(value)
    except (ValueError, TypeError) as e:
        tree.error(path, f"{what}: {e}")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        tree.error(path, f"{what} must be a square matrix")
    if n is not None and m.shape[0] != n:
        tree.error(path, f"{what} must be {n}x{n}")
    if not np.isfinite(m).all():
        tree.error(path, f"{what} has a non-finite entry")
    return matrix_to_rows(m)


def _number(tree, path, value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        tree.error(path, f"{what} must be a number")
    return format_real(value)


# --- weak-system -------------------------------------------------------------


def _body_weak(tree: _Tree, data: dict, strict: bool) -> dict:
    allowed = {"states", "zero_state", "unit", "zero", "observables", "negations", "families"}
    _unknown_keys(tree, (), data, allowed)
    if "states" not in data:
        tree.error((), "missing field 'states'")
    states = _labels(tree, ("states",), data["states"], "states")
    if "zero_state" not in data:
        tree.error((), "Axiom V: no zero state declared (field 'zero_state')")
    zero_state = _label(data["zero_state"])
    if zero_state not in states:
        tree.error(("zero_state",), f"Axiom V: zero state {zero_state!r} is not among the states")
    unit = _label(data.get("unit", "1"))
    zero = _label(data.get("zero", "0"))
    raw = _expect(tree, ("observables",), data.get("observables", {}), dict, "observables")
    observables = {}
    for name, entry in raw.items():
        p = ("observables", name)
        _expect(tree, p, entry, dict, f"observable {name!r}")
        _unknown_keys(tree, p, entry, {"map", "spectrum"})
        mapping = _expect(tree, p + ("map",), entry.get("map", {}), dict, f"map of {name!r}")
        m = {}
        for s, t in mapping.items():
            s, t = _label(s), _label(t)
            if s not in states:
                tree.error(p + ("map", s), f"unknown state {s!r}")
            if t not in states:
                tree.error(p + ("map", s), f"unknown image state {t!r}")
            m[s] = t
        obs = {"map": dict(sorted(m.items()))}
        if "spectrum" in entry:
            obs["spectrum"] = sorted({_label(v) for v in _expect(tree, p + ("spectrum",), entry["spectrum"], list,
                                                                  "spectrum")})
        observables[name] = obs
    body = {"states": states, "zero_state": zero_state, "observables": dict(sorted(observables.items()))}
    if unit != "1":
        body["unit"] = unit
    if zero != "0":
        body["zero"] = zero
    if zero not in observables:
        tree.error(("observables",), f"Axiom V: zero observable {zero!r} is not listed")
    if unit not in observables:
        tree.error(("observables",), f"Axiom IV: unit observable {unit!r} is not listed")
    if "negations" in data:
        pairs = []
        for i, pair in enumerate(_expect(tree, ("negations",), data["negations"], list, "negations")):
            pth = ("negations", i)
            if not isinstance(pair, list) or len(pair) != 2:
                tree.error(pth, "negation entries are [P, notP] pairs")
            a, b = _label(pair[0]), _label(pair[1])
            for x in (a, b):
                if x not in observables:
                    tree.error(pth, f"negation names unknown observable {x!r}")
            pairs.append([a, b])
        body["negations"] = pairs
    if "families" in data:
        fams = {}
        for parent, members in _expect(tree, ("families",), data["families"], dict, "families").items():
            pth = ("families", parent)
            if parent not in observables:
                tree.error(pth, f"family parent {parent!r} is not listed")
            _expect(tree, pth, members, dict, "family members")
            fams[parent] = {_label(k): _label(v) for k, v in sorted(members.items(), key=lambda kv: _label(kv[0]))}
            for v in fams[parent].values():
                if v not in observables:
                    tree.error(pth, f"family member {v!r} is not listed")
        body["families"] = dict(sorted(fams.items()))
    if strict:
        _check_closed(tree, body)
    return body


def _check_closed(tree, body):
    states = body["states"]
    total = {}
    for name, o in body["observables"].items():
        if len(o["map"]) == len(states):
            total[name] = tuple(o["map"][s] for s in states)
    images = {v: k for k, v in total.items()}
    for a, ia in total.items():
        for b, ib in total.items():
            # compose(a, b) applies b first
            comp = tuple(ia[states.index(t)] for t in ib)
            if comp not in images:
                tree.error(("observables",), f"observable table is not closed: {a}·{b} is not listed")


def _build_weak(body):
    from .core import make_system

    obs = {name: (o["map"], o.get("spectrum")) for name, o in body["observables"].items()}
    return make_system(body["states"], body["zero_state"], obs, body.get("unit", "1"), body.get("zero", "0"),
                       [tuple(p) for p in body.get("negations", [])], body.get("families"))


# --- lattice -----------------------------------------------------------------


def _body_lattice(tree, data, strict):
    _unknown_keys(tree, (), data, {"elements", "order", "ortho"})
    if "elements" not in data:
        tree.error((), "missing field 'elements'")
    elements = _labels(tree, ("elements",), data["elements"], "elements")

    def pairs(key):
        out = []
        for i, pr in enumerate(_expect(tree, (key,), data[key], list, key)):
            if not isinstance(pr, list) or len(pr) != 2:
                tree.error((key, i), f"{key} entries are [x, y] pairs")
            a, b = _label(pr[0]), _label(pr[1])
            for x in (a, b):
                if x not in elements:
                    tree.error((key, i), f"unknown element {x!r}")
            out.append([a, b])
        return sorted(out)

    body = {"elements": elements, "order": pairs("order") if "order" in data else []}
    if "ortho" in data:
        body["ortho"] = pairs("ortho")
    if strict:
        from .lattice import LatticeError
        try:
            _build_lattice(body)
        except LatticeError as e:
            tree.error(("order",), str(e))
    return body


def _build_lattice(body):
    from .lattice import FiniteLattice

    return FiniteLattice.from_order(body["elements"], [tuple(p) for p in body["order"]],
                                    [tuple(p) for p in body["ortho"]] if "ortho" in body else None)


# --- star-algebra ------------------------------------------------------------


def _body_algebra(tree, data, strict):
    _unknown_keys(tree, (), data, {"n", "family", "basis", "norm"})
    n = _expect(tree, ("n",), data.get("n"), int, "n")
    if n < 1:
        tree.error(("n",), "n must be positive")
    family = _label(data.get("family", "full"))
    if family not in ALGEBRA_FAMILIES:
        tree.error(("family",), f"family must be one of {list(ALGEBRA_FAMILIES)}")
    norm = _label(data.get("norm", "operator"))
    if norm not in NORMS:
        tree.error(("norm",), f"norm must be one of {list(NORMS)}")
    body = {"n": n, "family": family, "norm": norm}
    if family == "explicit":
        basis = _expect(tree, ("basis",), data.get("basis"), list, "basis")
        if not basis:
            tree.error(("basis",), "explicit basis must not be empty")
        body["basis"] = [_matrix(tree, ("basis", i), b, f"basis element {i}", n) for i, b in enumerate(basis)]
    elif "basis" in data:
        tree.error(("basis",), "basis is only allowed with family: explicit")
    return body


def _build_algebra(body):
    from . import star

    n, fam = body["n"], body["family"]
    if fam == "explicit":
        alg = star.Algebra(n, [matrix_from_rows(b) for b in body["basis"]], "explicit")
    else:
        alg = {"full": star.Algebra.full, "upper_triangular": star.Algebra.upper_triangular,
               "diagonal": star.Algebra.diagonal}[fam](n)
    alg.norm = star.NORMS[body["norm"]]
    return alg


# --- state -------------------------------------------------------------------


def _body_state(tree, data, strict):
    _unknown_keys(tree, (), data, {"density", "vector"})
    if ("density" in data) == ("vector" in data):
        tree.error((), "give exactly one of 'density' or 'vector'")
    if "vector" in data:
        vec = _expect(tree, ("vector",), data["vector"], list, "vector")
        try:
            v = [format_complex(parse_complex(x)) for x in vec]
        except ValueError as e:
            tree.error(("vector",), str(e))
        if not v:
            tree.error(("vector",), "vector must not be empty")
        return {"vector": v}
    body = {"density": _matrix(tree, ("density",), data["density"], "density")}
    if strict:
        from .star import State
        if not State(matrix_from_rows(body["density"])).is_positive(1e-9):
            tree.error(("density",), "density is not positive semidefinite")
    return body


def _build_state(body):
    from .star import State

    if "vector" in body:
        return State.pure([parse_complex(x) for x in body["vector"]])
    return State(matrix_from_rows(body["density"]))


# --- infodyn fixture ---------------------------------------------------------


def _body_infodyn(tree, data, strict):
    from .infodyn import FIXTURES

    _unknown_keys(tree, (), data, {"map", "params", "partition", "x0", "signal", "density", "grid", "info"})
    body = {}
    if "map" in data:
        name = _label(data["map"])
        if name not in FIXTURES:
            tree.error(("map",), f"unknown map {name!r}; known: {sorted(FIXTURES)}")
        body["map"] = name
    if "params" in data:
        params = _expect(tree, ("params",), data["params"], dict, "params")
        body["params"] = {k: _number(tree, ("params", k), v, k) for k, v in sorted(params.items())}
    if "partition" in data:
        part = _expect(tree, ("partition",), data["partition"], list, "partition")
        vals = [_number(tree, ("partition", i), v, "breakpoint") for i, v in enumerate(part)]
        if vals != sorted(vals) or any(not 0 < v < 1 for v in vals):
            tree.error(("partition",), "breakpoints must be increasing and inside (0, 1)")
        body["partition"] = vals
    if "x0" in data:
        body["x0"] = _number(tree, ("x0",), data["x0"], "x0")
    for key, allowed in (("signal", {"shape", "width", "chirp", "half_width"}),
                         ("density", {"shape", "width"}),
                         ("grid", {"half_width", "dt"}),
                         ("info", {"I0", "K"})):
        if key in data:
            sub = _expect(tree, (key,), data[key], dict, key)
            _unknown_keys(tree, (key,), sub, allowed)
            out = {}
            for k, v in sorted(sub.items()):
                out[k] = _label(v) if k == "shape" else _number(tree, (key, k), v, k)
            body[key] = out
    if "signal" in body and body["signal"].get("shape", "gaussian") not in ("gaussian", "rectangular", "chirp"):
        tree.error(("signal", "shape"), "signal shape must be gaussian, rectangular or chirp")
    if "density" in body and body["density"].get("shape", "gaussian") not in ("gaussian", "linear"):
        tree.error(("density", "shape"), "density shape must be gaussian or linear")
    if "info" in body and body["info"].get("K", 0.0) < 0:
        tree.error(("info", "K"), "K must be nonnegative")
    if "grid" in body and body["grid"].get("dt", 1.0) <= 0:
        tree.error(("grid", "dt"), "dt must be positive")
    if not body:
        tree.error((), "infodyn fixture is empty")
    return body


def _build_infodyn(body):
    return dict(body)


_BODIES = {"weak-system": _body_weak, "lattice": _body_lattice, "star-algebra": _body_algebra,
           "state": _body_state, "infodyn-fixture": _body_infodyn}
_BUILDERS = {"weak-system": _build_weak, "lattice": _build_lattice, "star-algebra": _build_algebra,
             "state": _build_state, "infodyn-fixture": _build_infodyn}


def _document(text: str, strict: bool) -> SystemDocument:
    tree = _load(text)
    data = dict(tree.data)
    if "kind" not in data:
        tree.error((), f"missing field 'kind' (one of {list(KINDS)})")
    kind = _label(data.pop("kind"))
    if kind not in KINDS:
        tree.error(("kind",), f"unknown kind {kind!r}; expected one of {list(KINDS)}")
    meta = data.pop("meta", {})
    _expect(tree, ("meta",), meta, dict, "meta")
    _unknown_keys(tree, ("meta",), meta, {"name", "description"})
    meta = {k: str(v) for k, v in sorted(meta.items())}
    body = _BODIES[kind](tree, data, strict)
    return SystemDocument(kind, body, meta)


def parse_document(text: str, strict: bool = True) -> SystemDocument:
    """Validated document; raises ``DocumentError`` with line and column on schema violations.

    ``strict`` adds semantic checks before any kernel sees the data: a closed
    observable table for weak systems, a valid order for lattices and a
    positive density for states.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DocumentError(f"not UTF-8: {e}") from None
    doc = _document(text, strict)
    if strict and doc.kind == "weak-system":
        from .core import WeakSystemError
        try:
            doc.build()
        except WeakSystemError as e:
            raise DocumentError(str(e)) from None
    return doc


def _dump(data) -> str:
    return yaml.safe_dump(data, sort_keys=True, default_flow_style=None, allow_unicode=True, width=100)


def serialize(doc: SystemDocument) -> str:
    return _dump(doc.to_data())


def normalize(text: str) -> str:
    """Canonical text of a document: structure and scalars rewritten, no semantic checks."""
    return serialize(_document(text, strict=False))


def read_document(path, strict: bool = True) -> SystemDocument:
    with open(path, "rb") as fh:
        return parse_document(fh.read(), strict)


def document_from_system(system, name: str = "", description: str = "") -> SystemDocument:
    """Weak system as a document (composites flatten to their state tables)."""
    from .core import UNDEFINED

    states = [_label(s) for s in system.space.states]
    observables = {}
    for o in system.observables:
        m = {states[i]: states[j] for i, j in enumerate(o.images) if j != UNDEFINED}
        entry: dict[str, Any] = {"map": dict(sorted(m.items()))}
        if o.spectrum is not None:
            entry["spectrum"] = sorted(_label(v) for v in o.spectrum)
        observables[o.name] = entry
    body: dict[str, Any] = {"states": states, "zero_state": _label(system.space.zero),
                            "observables": dict(sorted(observables.items()))}
    if system.unit != "1":
        body["unit"] = system.unit
    if system.zero != "0":
        body["zero"] = system.zero
    if system.negations:
        body["negations"] = [list(p) for p in system.negations]
    if system.spectral_families:
        body["families"] = {f.parent.name: {_label(a): p.name for a, p in f.members}
                            for f in system.spectral_families}
    meta = {k: v for k, v in (("name", name), ("description", description)) if v}
    return SystemDocument("weak-system", body, meta)
