"""Weak quantum systems: finite state sets acted on by a monoid of observables.

Observables are maps on a finite state set that fix a designated zero state.
Composition ``compose(a, b)`` means "apply ``b`` first, then ``a``".  A system
carries a unit and a zero observable, optionally a registry of proposition /
negation pairs and spectral families, and optionally a product structure when
it was built as a composite of two subsystems.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Mapping, Sequence

Label = Hashable

#: image index used for an undefined image (the observable is not a total map)
UNDEFINED = -1

TRUE = "true"
FALSE = "false"


class WeakSystemError(ValueError):
    """Structural problem with a state space, observable or system."""


class IncompatibleError(WeakSystemError):
    pass


class MissingNegationError(WeakSystemError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class StateSpace:
    states: tuple
    zero: Label

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        if len(set(states)) != len(states):
            raise WeakSystemError(f"duplicate state labels in {states!r}")
        if self.zero not in states:
            raise WeakSystemError(f"zero state {self.zero!r} is not a member of the state set")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(states)})

    def __len__(self):
        return len(self.states)

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise WeakSystemError(f"unknown state {label!r}") from None

    def __contains__(self, label):
        return label in self._index

    @property
    def zero_index(self) -> int:
        return self._index[self.zero]

    @property
    def nonzero(self) -> tuple:
        return tuple(s for s in self.states if s != self.zero)

    def identity_images(self) -> tuple[int, ...]:
        return tuple(range(len(self.states)))

    def zero_images(self) -> tuple[int, ...]:
        return (self.zero_index,) * len(self.states)


@dataclass(frozen=True)
class Observable:
    """A map on a state space with an outcome set.

    ``images[i]`` is the index of the image of state ``i`` or ``UNDEFINED``.
    ``spectrum`` is None for an unlabeled composite.
    """

    name: str
    space: StateSpace
    images: tuple[int, ...]
    spectrum: frozenset | None = None

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        object.__setattr__(self, "images", images)
        if len(images) != len(self.space):
            raise WeakSystemError(f"observable {self.name!r}: image table has wrong length")
        n = len(self.space)
        if any(not (i == UNDEFINED or 0 <= i < n) for i in images):
            raise WeakSystemError(f"observable {self.name!r}: image index out of range")
        if self.spectrum is not None:
            spec = frozenset(self.spectrum)
            if not spec:
                raise WeakSystemError(f"observable {self.name!r}: empty spectrum")
            object.__setattr__(self, "spectrum", spec)

    @classmethod
    def from_mapping(cls, name, space: StateSpace, mapping: Mapping, spectrum=None) -> "Observable":
        """Build from ``{state: image}``; missing or unknown images become undefined."""
        images = []
        for s in space.states:
            target = mapping.get(s, None)
            images.append(space.index(target) if target is not None and target in space else UNDEFINED)
        return cls(name, space, tuple(images), spectrum)

    def __call__(self, state: Label) -> Label | None:
        j = self.images[self.space.index(state)]
        return None if j == UNDEFINED else self.space.states[j]

    @property
    def is_total(self) -> bool:
        return UNDEFINED not in self.images

    def same_map(self, other: "Observable") -> bool:
        return self.space == other.space and self.images == other.images

    def mapping(self) -> dict:
        return {s: self(s) for s in self.space.states}

    def renamed(self, name: str, spectrum=None) -> "Observable":
        return Observable(name, self.space, self.images, self.spectrum if spectrum is None else spectrum)

    def __repr__(self):
        return f"Observable({self.name!r})"


def _check_same_space(a: Observable, b: Observable):
    if a.space != b.space:
        raise WeakSystemError(f"observables {a.name!r} and {b.name!r} act on different state spaces")


def _compose_images(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(UNDEFINED if j == UNDEFINED else a[j] for j in b)


def compose(a: Observable, b: Observable, system: "WeakSystem | None" = None) -> Observable:
    """The map ``z -> a(b(z))``.

    If ``system`` lists an observable with the same map, that observable (name
    and spectrum) is returned; otherwise the result is unlabeled.
    """
    _check_same_space(a, b)
    images = _compose_images(a.images, b.images)
    if system is not None:
        listed = system.lookup(images)
        if listed is not None:
            return listed
    return Observable(f"{a.name}·{b.name}", a.space, images, None)


def compatible(a: Observable, b: Observable) -> bool:
    _check_same_space(a, b)
    return _compose_images(a.images, b.images) == _compose_images(b.images, a.images)


def complementary(a: Observable, b: Observable) -> bool:
    return not compatible(a, b)


def identity(space: StateSpace, name="1") -> Observable:
    return Observable(name, space, space.identity_images(), frozenset({TRUE}))


def zero_observable(space: StateSpace, name="0") -> Observable:
    return Observable(name, space, space.zero_images(), frozenset({FALSE}))


def is_partial_identity(obs: Observable) -> bool:
    z = obs.space.zero_index
    return all(j == i or j == z for i, j in enumerate(obs.images))


def support_complement(obs: Observable, name: str | None = None) -> Observable:
    """Complementary partial identity: keeps exactly the nonzero states that ``obs`` kills."""
    if not is_partial_identity(obs):
        raise MissingNegationError(f"{obs.name!r} is not a partial identity")
    z = obs.space.zero_index
    images = tuple(i if (j == z and i != z) else z for i, j in enumerate(obs.images))
    return Observable(name or f"¬{obs.name}", obs.space, images, None)


@dataclass(frozen=True)
class Proposition:
    observable: Observable
    negation: Observable

    def __post_init__(self):
        _check_same_space(self.observable, self.negation)

    @property
    def name(self) -> str:
        return self.observable.name

    @property
    def space(self) -> StateSpace:
        return self.observable.space

    def negated(self) -> "Proposition":
        return Proposition(self.negation, self.observable)

    def same_map(self, other: "Proposition") -> bool:
        return self.observable.same_map(other.observable)


def _truth_spectrum(images, space) -> frozenset:
    if images == space.identity_images():
        return frozenset({TRUE})
    if images == space.zero_images():
        return frozenset({FALSE})
    return frozenset({TRUE, FALSE})


def _negation_lookup(images, space, known: Iterable[Proposition], system: "WeakSystem | None"):
    if images == space.identity_images():
        return zero_observable(space)
    if images == space.zero_images():
        return identity(space)
    for p in known:
        if p.observable.images == images:
            return p.negation
        if p.negation.images == images:
            return p.observable
    if system is not None:
        neg = system.negation_images(images)
        if neg is not None:
            return neg
    probe = Observable("?", space, images)
    if probe.is_total and is_partial_identity(probe):
        return support_complement(probe)
    raise MissingNegationError("no negation registered or derivable for a composite proposition")


def _as_proposition(images, space, name, known, system) -> Proposition:
    for p in known:
        if p.observable.images == images:
            return p
    listed = system.lookup(images) if system is not None else None
    obs = listed if listed is not None else Observable(name, space, images, _truth_spectrum(images, space))
    neg = _negation_lookup(images, space, known, system)
    if neg.spectrum is None:
        neg = neg.renamed(neg.name, _truth_spectrum(neg.images, space))
    return Proposition(obs, neg)


def conjunction(p1: Proposition, p2: Proposition, system: "WeakSystem | None" = None, lattice=None) -> Proposition:
    """``p1 ∧ p2``; the composite ``p1 p2`` for compatible pairs.

    An incompatible pair needs an enriched proposition lattice (``lattice``,
    whose elements are observable names of ``system``) supplying the meet.
    """
    if not compatible(p1.observable, p2.observable):
        if lattice is None or system is None:
            raise IncompatibleError(f"{p1.name!r} and {p2.name!r} are incompatible")
        return system.proposition(lattice.meet(p1.name, p2.name))
    images = _compose_images(p1.observable.images, p2.observable.images)
    known = (p1, p2)
    return _as_proposition(images, p1.space, f"{p1.name}∧{p2.name}", known, system)


def adjunction(p1: Proposition, p2: Proposition, system: "WeakSystem | None" = None, lattice=None) -> Proposition:
    """``p1 ∨ p2`` through De Morgan: the negation of ``¬p1 ∧ ¬p2``."""
    if not compatible(p1.observable, p2.observable):
        if lattice is None or system is None:
            raise IncompatibleError(f"{p1.name!r} and {p2.name!r} are incompatible")
        return system.proposition(lattice.join(p1.name, p2.name))
    both_false = conjunction(p1.negated(), p2.negated(), system)
    result = both_false.negated()
    if system is None or system.lookup(result.observable.images) is None:
        obs = result.observable
        if obs.spectrum is None or obs.name.startswith("¬"):
            obs = obs.renamed(f"{p1.name}∨{p2.name}", _truth_spectrum(obs.images, obs.space))
        result = Proposition(obs, result.negation)
    return result


@dataclass(frozen=True)
class SpectralFamily:
    parent: Observable
    members: tuple  # ((outcome, Proposition), ...)

    def __post_init__(self):
        members = tuple(self.members.items()) if isinstance(self.members, Mapping) else tuple(self.members)
        object.__setattr__(self, "members", members)
        for _, p in members:
            _check_same_space(self.parent, p.observable)

    def outcomes(self):
        return tuple(a for a, _ in self.members)


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NA = "not-applicable"


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    verdict: Verdict
    witness: dict | None = None
    detail: str = ""

    def __post_init__(self):
        if self.verdict is Verdict.FAIL and not self.witness:
            raise ValueError(f"failing verdict for {self.axiom} without a witness")

    def to_dict(self):
        return {"axiom": self.axiom, "verdict": self.verdict.value, "witness": self.witness, "detail": self.detail}


@dataclass
class AxiomReport:
    results: dict = field(default_factory=dict)

    def add(self, result: AxiomResult):
        self.results[result.axiom] = result

    def __getitem__(self, axiom) -> AxiomResult:
        return self.results[axiom]

    def group(self, top: str) -> Verdict:
        """Aggregate verdict of a top-level axiom (``"VI"`` covers VIa, VIb, VIc)."""
        vs = [r.verdict for k, r in self.results.items() if _top(k) == top]
        if not vs:
            return Verdict.NA
        if Verdict.FAIL in vs:
            return Verdict.FAIL
        if all(v is Verdict.NA for v in vs):
            return Verdict.NA
        return Verdict.PASS

    def failed_groups(self) -> list[str]:
        tops = sorted({_top(k) for k in self.results}, key=_ROMAN.index)
        return [t for t in tops if self.group(t) is Verdict.FAIL]

    @property
    def ok(self) -> bool:
        return all(r.verdict is not Verdict.FAIL for r in self.results.values())

    def to_dict(self):
        return {k: r.to_dict() for k, r in self.results.items()}


_ROMAN = ["I", "II", "III", "IV", "V", "VI"]


def _top(axiom: str) -> str:
    return axiom.rstrip("abc") if axiom.startswith("VI") else axiom


@dataclass(frozen=True)
class ProductStructure:
    left: tuple       # nonzero state labels of factor 1
    right: tuple      # nonzero state labels of factor 2
    part1: tuple      # names of lifted factor-1 observables
    part2: tuple


@dataclass(frozen=True)
class WeakSystem:
    space: StateSpace
    observables: tuple
    unit: str = "1"
    zero: str = "0"
    negations: tuple = ()           # ((P, notP), ...) by observable name
    spectral_families: tuple = ()   # SpectralFamily objects
    product: ProductStructure | None = None

    def __post_init__(self):
        obs = tuple(self.observables)
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "negations", tuple(tuple(p) for p in self.negations))
        object.__setattr__(self, "spectral_families", tuple(self.spectral_families))
        by_name, by_map = {}, {}
        for o in obs:
            if o.space != self.space:
                raise WeakSystemError(f"observable {o.name!r} acts on a different state space")
            if o.name in by_name:
                raise WeakSystemError(f"duplicate observable name {o.name!r}")
            if o.images in by_map:
                raise WeakSystemError(f"observables {by_map[o.images].name!r} and {o.name!r} are the same map")
            by_name[o.name] = o
            by_map[o.images] = o
        for n in (self.unit, self.zero):
            if n not in by_name:
                raise WeakSystemError(f"designated observable {n!r} is not listed")
        neg = {}
        for p, q in self.negations:
            for n in (p, q):
                if n not in by_name:
                    raise WeakSystemError(f"proposition {n!r} is not a listed observable")
            if neg.get(p, q) != q or neg.get(q, p) != p:
                raise WeakSystemError(f"conflicting negation pairs for {p!r}/{q!r}")
            neg[p] = q
            neg[q] = p
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_by_map", by_map)
        object.__setattr__(self, "_neg", neg)

    # lookup -----------------------------------------------------------
    def __getitem__(self, name) -> Observable:
        try:
            return self._by_name[name]
        except KeyError:
            raise WeakSystemError(f"unknown observable {name!r}") from None

    def __contains__(self, name):
        return name in self._by_name

    def __len__(self):
        return len(self.observables)

    @property
    def names(self) -> tuple:
        return tuple(o.name for o in self.observables)

    def lookup(self, images) -> Observable | None:
        return self._by_map.get(tuple(images))

    @property
    def unit_observable(self) -> Observable:
        return self._by_name[self.unit]

    @property
    def zero_observable(self) -> Observable:
        return self._by_name[self.zero]

    def compose(self, a, b) -> Observable:
        a = self[a] if isinstance(a, str) else a
        b = self[b] if isinstance(b, str) else b
        return compose(a, b, self)

    def negation_images(self, images) -> Observable | None:
        listed = self.lookup(images)
        if listed is not None and listed.name in self._neg:
            return self._by_name[self._neg[listed.name]]
        return None

    def proposition_names(self) -> tuple:
        """Registered propositions other than the unit and the zero."""
        seen = []
        for p, q in self.negations:
            for n in (p, q):
                if n not in seen:
                    seen.append(n)
        return tuple(seen)

    def proposition(self, name) -> Proposition:
        obs = self[name]
        if name == self.unit and name not in self._neg:
            return Proposition(obs, self.zero_observable)
        if name == self.zero and name not in self._neg:
            return Proposition(obs, self.unit_observable)
        if name not in self._neg:
            raise MissingNegationError(f"{name!r} is not a registered proposition")
        return Proposition(obs, self._by_name[self._neg[name]])

    def propositions(self) -> list[Proposition]:
        return [self.proposition(n) for n in self.proposition_names()]

    # construction helpers ---------------------------------------------
    def with_observables(self, extra: Iterable[Observable], close: bool = True) -> "WeakSystem":
        """Register extra whole-system observables, optionally closing under composition."""
        obs = list(self.observables)
        for e in extra:
            if self.lookup(e.images) is None and all(e.images != o.images for o in obs):
                obs.append(e)
        if close:
            obs = _close(obs)
        return WeakSystem(self.space, obs, self.unit, self.zero, self.negations, self.spectral_families, self.product)

    def with_states(self, labels: Iterable[Label]) -> "WeakSystem":
        """Add states; the unit fixes them and every other observable sends them to zero."""
        labels = list(labels)
        space = StateSpace(self.space.states + tuple(labels), self.space.zero)
        z = space.zero_index
        n_old = len(self.space)
        new_idx = list(range(n_old, n_old + len(labels)))
        remap = {}
        obs = []
        for o in self.observables:
            tail = tuple(new_idx) if o.name == self.unit else (z,) * len(labels)
            new = Observable(o.name, space, o.images + tail, o.spectrum)
            remap[o.name] = new
            obs.append(new)
        families = tuple(
            SpectralFamily(remap[f.parent.name], tuple((a, _lift_prop(p, remap, space)) for a, p in f.members))
            for f in self.spectral_families
        )
        return WeakSystem(space, obs, self.unit, self.zero, self.negations, families, self.product)

    def relabeled(self, tag: str) -> "WeakSystem":
        """Copy with every state label ``s`` replaced by ``f"{s}{tag}"``."""
        new_states = tuple(f"{s}{tag}" for s in self.space.states)
        space = StateSpace(new_states, f"{self.space.zero}{tag}")
        remap = {o.name: Observable(o.name, space, o.images, o.spectrum) for o in self.observables}
        families = tuple(
            SpectralFamily(remap[f.parent.name], tuple((a, _lift_prop(p, remap, space)) for a, p in f.members))
            for f in self.spectral_families
        )
        return WeakSystem(space, tuple(remap.values()), self.unit, self.zero, self.negations, families, None)

    def commutativity_profile(self) -> dict:
        pairs = [
            (a.name, b.name)
            for a, b in itertools.combinations(self.observables, 2)
            if not compatible(a, b)
        ]
        return {"commutative": not pairs, "incompatible_pairs": pairs}


def _lift_prop(p: Proposition, remap, space) -> Proposition:
    def conv(o):
        if o.name in remap:
            return remap[o.name]
        return Observable(o.name, space, o.images + (space.zero_index,) * (len(space) - len(o.images)), o.spectrum)

    return Proposition(conv(p.observable), conv(p.negation))


def _close(obs: list[Observable]) -> list[Observable]:
    """Close a list of observables under composition, naming new maps ``a·b``."""
    obs = list(obs)
    seen = {o.images: o for o in obs}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.product(list(obs), repeat=2):
            images = _compose_images(a.images, b.images)
            if images not in seen:
                new = Observable(f"{a.name}·{b.name}", a.space, images, _image_spectrum(images, a.space))
                seen[images] = new
                obs.append(new)
                changed = True
    return obs


def _image_spectrum(images, space) -> frozenset:
    # default outcome set: the states an observation can leave the system in
    return frozenset(space.states[j] for j in images if j != UNDEFINED)


def make_system(
    states: Sequence[Label],
    zero: Label,
    observables: Mapping[str, tuple[Mapping, Iterable | None]],
    unit="1",
    zero_name="0",
    negations=(),
    families: Mapping[str, Mapping] | None = None,
) -> WeakSystem:
    """Convenience builder from plain tables.

    ``observables`` maps names to ``(mapping, spectrum)``; the unit and zero
    observables are added automatically when absent.  ``families`` maps a
    parent name to ``{outcome: proposition_name}``.
    """
    space = StateSpace(tuple(states), zero)
    obs = []
    if unit not in observables:
        obs.append(identity(space, unit))
    if zero_name not in observables:
        obs.append(zero_observable(space, zero_name))
    for name, (mapping, spectrum) in observables.items():
        if spectrum is None:
            spectrum = {unit: {TRUE}, zero_name: {FALSE}}.get(name)
            if spectrum is None and any(name in pair for pair in negations):
                spectrum = {TRUE, FALSE}
        obs.append(Observable.from_mapping(name, space, mapping, spectrum))
    system = WeakSystem(space, obs, unit, zero_name, tuple(negations))
    if families:
        fams = tuple(
            SpectralFamily(system[parent], tuple((a, system.proposition(p)) for a, p in members.items()))
            for parent, members in families.items()
        )
        system = WeakSystem(space, obs, unit, zero_name, tuple(negations), fams)
    return system


# ---------------------------------------------------------------------------
# axiom checks


def _state_label(space, i):
    return space.states[i]


def _check_axiom_I(system: WeakSystem) -> AxiomResult:
    for o in system.observables:
        if not o.spectrum:
            return AxiomResult("I", Verdict.FAIL, {"observable": o.name}, "observable has no outcome set")
    return AxiomResult("I", Verdict.PASS)


def _check_axiom_II(system: WeakSystem) -> AxiomResult:
    for o in system.observables:
        for i, j in enumerate(o.images):
            if j == UNDEFINED:
                return AxiomResult(
                    "II", Verdict.FAIL,
                    {"observable": o.name, "state": _state_label(system.space, i)},
                    "image undefined or outside the state set",
                )
    return AxiomResult("II", Verdict.PASS)


def _maps(system: WeakSystem) -> list[Observable]:
    # later axioms only make sense for genuine maps; non-maps are reported under II
    return [o for o in system.observables if o.is_total]


def _check_axiom_III(system: WeakSystem) -> AxiomResult:
    maps = _maps(system)
    for a, b in itertools.product(maps, repeat=2):
        if system.lookup(_compose_images(a.images, b.images)) is None:
            return AxiomResult("III", Verdict.FAIL, {"left": a.name, "right": b.name}, "composite is not listed")
    return AxiomResult("III", Verdict.PASS)


def _check_axiom_IV(system: WeakSystem) -> AxiomResult:
    u = system.unit_observable
    for i, j in enumerate(u.images):
        if j != i:
            return AxiomResult(
                "IV", Verdict.FAIL,
                {"observable": u.name, "state": _state_label(system.space, i)},
                "unit observable moves a state",
            )
    return AxiomResult("IV", Verdict.PASS)


def _check_axiom_V(system: WeakSystem) -> AxiomResult:
    space = system.space
    z = space.zero_index
    zero = system.zero_observable
    for i, j in enumerate(zero.images):
        if j != z:
            return AxiomResult(
                "V", Verdict.FAIL, {"observable": zero.name, "state": space.states[i]},
                "zero observable does not send the state to the zero state",
            )
    for o in _maps(system):
        if o.images[z] != z:
            return AxiomResult(
                "V", Verdict.FAIL, {"observable": o.name, "state": space.zero},
                "observable moves the zero state",
            )
    for o in _maps(system):
        for left, right in ((o, zero), (zero, o)):
            if _compose_images(left.images, right.images) != zero.images:
                return AxiomResult(
                    "V", Verdict.FAIL, {"left": left.name, "right": right.name},
                    "product with the zero observable is not zero",
                )
    return AxiomResult("V", Verdict.PASS)


def _check_axiom_VIa(system: WeakSystem) -> AxiomResult:
    space = system.space
    zimg = space.zero_images()
    if system._neg.get(system.unit, system.zero) != system.zero:
        return AxiomResult(
            "VIa", Verdict.FAIL, {"observable": system.unit},
            "negation of the unit is not the zero observable",
        )
    for name in system.proposition_names():
        p = system.proposition(name)
        P, Q = p.observable.images, p.negation.images
        if not p.observable.is_total or not p.negation.is_total:
            continue
        sq = _compose_images(P, P)
        if sq != P:
            i = next(k for k in range(len(P)) if sq[k] != P[k])
            return AxiomResult(
                "VIa", Verdict.FAIL, {"proposition": name, "state": space.states[i], "check": "idempotent"},
                "P∘P differs from P",
            )
        back = system._neg.get(p.negation.name)
        if back != name:
            return AxiomResult(
                "VIa", Verdict.FAIL, {"proposition": name, "check": "double-negation"},
                "negation of the negation is not the proposition",
            )
        for left, right, label in ((P, Q, "P∘¬P"), (Q, P, "¬P∘P")):
            prod = _compose_images(left, right)
            if prod != zimg:
                i = next(k for k in range(len(prod)) if prod[k] != zimg[k])
                return AxiomResult(
                    "VIa", Verdict.FAIL,
                    {"proposition": name, "state": space.states[i], "check": label},
                    f"{label} is not the zero observable",
                )
        spec = p.observable.spectrum
        expected = _truth_spectrum(P, space)
        if spec is not None and spec != expected:
            return AxiomResult(
                "VIa", Verdict.FAIL, {"proposition": name, "check": "spectrum"},
                f"proposition spectrum {sorted(spec)} should be {sorted(expected)}",
            )
    return AxiomResult("VIa", Verdict.PASS)


def _check_axiom_VIb(system: WeakSystem) -> AxiomResult:
    space = system.space
    z = space.zero_index
    for name in system.proposition_names():
        p = system.proposition(name)
        P, Q = p.observable.images, p.negation.images
        if not p.observable.is_total or not p.negation.is_total:
            continue
        for i in range(len(space)):
            pz = P[i]
            if pz == z:
                continue
            if P[pz] != pz or Q[pz] != z:
                return AxiomResult(
                    "VIb", Verdict.FAIL, {"proposition": name, "state": space.states[i]},
                    "P(z) is not a state in which P holds with certainty",
                )
    return AxiomResult("VIb", Verdict.PASS)


def verify_spectral_family(fam: SpectralFamily) -> AxiomReport:
    """Orthogonality, commutation with the parent, and full adjunction equal to the unit."""
    report = AxiomReport()
    report.add(_check_family(fam))
    return report


def _check_family(fam: SpectralFamily) -> AxiomResult:
    space = fam.parent.space
    zimg = space.zero_images()
    A = fam.parent
    for (a, pa), (b, pb) in itertools.permutations(fam.members, 2):
        prod = _compose_images(pa.observable.images, pb.observable.images)
        if prod != zimg:
            i = next(k for k in range(len(prod)) if prod[k] != zimg[k])
            return AxiomResult(
                "VIc", Verdict.FAIL,
                {"family": A.name, "outcomes": [a, b], "state": space.states[i], "check": "orthogonal"},
                "members for distinct outcomes are not orthogonal",
            )
    for a, pa in fam.members:
        if not compatible(A, pa.observable):
            return AxiomResult(
                "VIc", Verdict.FAIL, {"family": A.name, "outcomes": [a], "check": "commutes"},
                "member does not commute with its observable",
            )
    # ⋁ A_α = 1  ⇔  ∏ ¬A_α = 0 (negation is an involution with ¬1 = 0)
    prod = space.identity_images()
    for _, pa in fam.members:
        prod = _compose_images(prod, pa.negation.images)
    if prod != zimg:
        i = next(k for k in range(len(prod)) if prod[k] != zimg[k])
        return AxiomResult(
            "VIc", Verdict.FAIL,
            {"family": A.name, "state": space.states[i], "check": "exhaustive"},
            "adjunction of the members is not the unit",
        )
    return AxiomResult("VIc", Verdict.PASS)


def families_compatible(fa: SpectralFamily, fb: SpectralFamily) -> bool:
    """Member-wise compatibility of two spectral families."""
    return all(compatible(p.observable, q.observable) for _, p in fa.members for _, q in fb.members)


def check_axioms(system: WeakSystem) -> AxiomReport:
    report = AxiomReport()
    for check in (_check_axiom_I, _check_axiom_II, _check_axiom_III, _check_axiom_IV, _check_axiom_V):
        report.add(check(system))
    if system.proposition_names():
        report.add(_check_axiom_VIa(system))
        report.add(_check_axiom_VIb(system))
    else:
        report.add(AxiomResult("VIa", Verdict.NA, detail="no propositions registered"))
        report.add(AxiomResult("VIb", Verdict.NA, detail="no propositions registered"))
    if system.spectral_families:
        results = [_check_family(f) for f in system.spectral_families]
        bad = next((r for r in results if r.verdict is Verdict.FAIL), None)
        report.add(bad or AxiomResult("VIc", Verdict.PASS))
    else:
        report.add(AxiomResult("VIc", Verdict.NA, detail="no spectral families registered"))
    return report


def replay_witness(system: WeakSystem, result: AxiomResult) -> bool:
    """Re-evaluate a failing verdict's witness directly; True if the failure reproduces."""
    w = result.witness or {}
    space = system.space
    ax = result.axiom
    if ax == "I":
        return not system[w["observable"]].spectrum
    if ax == "II":
        return system[w["observable"]](w["state"]) is None
    if ax == "III":
        return system.lookup(_compose_images(system[w["left"]].images, system[w["right"]].images)) is None
    if ax == "IV":
        return system[w["observable"]](w["state"]) != w["state"]
    if ax == "V":
        if "state" in w:
            return system[w["observable"]](w["state"]) != space.zero
        prod = _compose_images(system[w["left"]].images, system[w["right"]].images)
        return prod != space.zero_images()
    if ax in ("VIa", "VIb"):
        if "proposition" not in w:
            return system._neg.get(system.unit, system.zero) != system.zero
        p = system.proposition(w["proposition"])
        check = w.get("check")
        if ax == "VIb":
            pz = p.observable(w["state"])
            return pz is not None and pz != space.zero and (p.observable(pz) != pz or p.negation(pz) != space.zero)
        if check == "idempotent":
            return p.observable(p.observable(w["state"])) != p.observable(w["state"])
        if check == "double-negation":
            return system._neg.get(p.negation.name) != p.name
        if check == "spectrum":
            return p.observable.spectrum != _truth_spectrum(p.observable.images, space)
        left, right = (p.observable, p.negation) if check == "P∘¬P" else (p.negation, p.observable)
        return left(right(w["state"])) != space.zero
    if ax == "VIc":
        fam = next(f for f in system.spectral_families if f.parent.name == w["family"])
        return _check_family(fam).verdict is Verdict.FAIL
    raise KeyError(ax)


# ---------------------------------------------------------------------------
# composites and entanglement


def composite(sys1: WeakSystem, sys2: WeakSystem) -> WeakSystem:
    """Product system: states are pairs of nonzero factor states plus a composite zero.

    Observables are all ``a⊗b``; they act factor-wise and any pair touching a
    factor zero collapses to the composite zero.
    """
    clash = set(sys1.space.states) & set(sys2.space.states)
    if clash:
        raise WeakSystemError(f"state labels shared by both factors: {sorted(map(str, clash))}")
    l1, l2 = sys1.space.nonzero, sys2.space.nonzero
    pairs = [(a, b) for a in l1 for b in l2]
    zero_label = (sys1.space.zero, sys2.space.zero)
    space = StateSpace(tuple(pairs) + (zero_label,), zero_label)
    zi = space.zero_index
    i1, i2 = sys1.space, sys2.space

    def lift(o1: Observable, o2: Observable) -> tuple[int, ...]:
        images = []
        for (a, b) in pairs:
            ja, jb = o1.images[i1.index(a)], o2.images[i2.index(b)]
            if ja == UNDEFINED or jb == UNDEFINED:
                images.append(UNDEFINED)
            elif ja == i1.zero_index or jb == i2.zero_index:
                images.append(zi)
            else:
                images.append(space.index((i1.states[ja], i2.states[jb])))
        images.append(zi)
        return tuple(images)

    u1, u2 = sys1.unit_observable, sys2.unit_observable
    unit_name, zero_name = f"{u1.name}⊗{u2.name}", "0"
    obs = {space.zero_images(): zero_observable(space, zero_name)}
    part1, part2 = [], []
    ordered = [(a, u2) for a in sys1.observables] + [(u1, b) for b in sys2.observables]
    ordered += [(a, b) for a in sys1.observables for b in sys2.observables]
    for a, b in ordered:
        images = lift(a, b)
        if images not in obs:
            if a is u1 and b is u2:
                spec = frozenset({TRUE})
            elif b is u2:
                spec = a.spectrum
            elif a is u1:
                spec = b.spectrum
            elif a.spectrum is not None and b.spectrum is not None:
                spec = frozenset(itertools.product(a.spectrum, b.spectrum))
            else:
                spec = None
            obs[images] = Observable(f"{a.name}⊗{b.name}", space, images, spec)
        name = obs[images].name
        if b is u2 and name not in part1:
            part1.append(name)
        if a is u1 and name not in part2:
            part2.append(name)

    negations = []
    for p, q in sys1.negations:
        negations.append((obs[lift(sys1[p], u2)].name, obs[lift(sys1[q], u2)].name))
    for p, q in sys2.negations:
        negations.append((obs[lift(u1, sys2[p])].name, obs[lift(u1, sys2[q])].name))
    product = ProductStructure(l1, l2, tuple(part1), tuple(part2))
    return WeakSystem(space, tuple(obs.values()), unit_name, zero_name, tuple(negations), (), product)


def factor_swap(system: WeakSystem, name="swap") -> Observable:
    """Exchange of factors ``(a, b) -> (b', a')`` for a product of relabeled copies.

    Factor labels are matched positionally, so the two factors must have the
    same number of nonzero states.
    """
    prod = system.product
    if prod is None or len(prod.left) != len(prod.right):
        raise WeakSystemError("factor swap needs a product of equal-size factors")
    space = system.space
    li = {s: k for k, s in enumerate(prod.left)}
    ri = {s: k for k, s in enumerate(prod.right)}
    images = []
    for s in space.states:
        if isinstance(s, tuple) and s[0] in li and s[1] in ri:
            a, b = s
            images.append(space.index((prod.left[ri[b]], prod.right[li[a]])))
        else:
            images.append(space.zero_index)
    return Observable(name, space, tuple(images), frozenset({"swap"}))


@dataclass(frozen=True)
class EntanglementReport:
    incompatible: tuple        # ((global name, local name), ...)
    nonproduct_states: tuple

    @property
    def weakly_entangled(self) -> bool:
        return bool(self.incompatible)

    @property
    def empty(self) -> bool:
        return not self.incompatible and not self.nonproduct_states

    def to_dict(self):
        return {
            "weak_entanglement": self.weakly_entangled,
            "incompatible_with_parts": [list(p) for p in self.incompatible],
            "nonproduct_states": [_label_str(s) for s in self.nonproduct_states],
        }


def _label_str(s):
    return "(" + ",".join(map(str, s)) + ")" if isinstance(s, tuple) else str(s)


def _closure_images(maps: Iterable[tuple[int, ...]]) -> set:
    found = set(maps)
    frontier = list(found)
    while frontier:
        new = []
        for a in list(found):
            for b in frontier:
                for images in (_compose_images(a, b), _compose_images(b, a)):
                    if images not in found:
                        found.add(images)
                        new.append(images)
        frontier = new
    return found


def detect_entanglement(system: WeakSystem, part1=None, part2=None) -> EntanglementReport:
    """Whole-system observables incompatible with a part, and non-product states.

    "Whole-system" means listed observables outside the monoid generated by the
    two parts.  Parts default to the lifted factor observables of a composite.
    """
    prod = system.product
    if part1 is None or part2 is None:
        if prod is None:
            raise WeakSystemError("parts must be given for a system without product structure")
        part1 = prod.part1 if part1 is None else part1
        part2 = prod.part2 if part2 is None else part2
    p1 = [system[n] for n in part1]
    p2 = [system[n] for n in part2]
    for label, part in (("part1", p1), ("part2", p2)):
        names = {o.images for o in part}
        for a, b in itertools.product(part, repeat=2):
            if _compose_images(a.images, b.images) not in names:
                raise WeakSystemError(f"{label} is not closed under composition ({a.name}·{b.name})")
    if prod is not None:
        _check_factor_action(system, p1, 0)
        _check_factor_action(system, p2, 1)

    local = _closure_images([o.images for o in p1 + p2])
    incompatible = []
    for g in system.observables:
        if g.images in local:
            continue
        for l in p1 + p2:
            if not compatible(g, l):
                incompatible.append((g.name, l.name))
                break
    nonproduct = []
    if prod is not None:
        product_states = {(a, b) for a in prod.left for b in prod.right}
        nonproduct = [s for s in system.space.nonzero if s not in product_states]
    return EntanglementReport(tuple(incompatible), tuple(nonproduct))


def _check_factor_action(system: WeakSystem, part, slot):
    prod = system.product
    product_states = {(a, b) for a in prod.left for b in prod.right}
    for o in part:
        for s in product_states:
            t = o(s)
            if t is None or t == system.space.zero:
                continue
            if t not in product_states or t[1 - slot] != s[1 - slot]:
                raise WeakSystemError(f"{o.name!r} does not act within its factor")


# ---------------------------------------------------------------------------
# exhaustive model search

MAX_SEARCH_STATES = 5
MAX_SEARCH_OBS = 64
SEARCH_BUDGET = 200_000


def _canonical(monoid: frozenset, perms) -> tuple:
    """Smallest sorted image table over relabelings of the nonzero states."""
    best = None
    for perm, inv in perms:
        conj = sorted(tuple(perm[m[inv[i]]] for i in range(len(perm))) for m in monoid)
        key = tuple(conj)
        if best is None or key < best:
            best = key
    return best


def enumerate_models(n_states: int, max_obs: int = MAX_SEARCH_OBS, budget: int = SEARCH_BUDGET) -> list[WeakSystem]:
    """All closed observable monoids over ``n_states`` states plus a zero state, up to relabeling.

    Each monoid contains the identity and the zero map and consists of maps
    fixing the zero state (index ``n_states``).  Monoids larger than
    ``max_obs`` are skipped.  ``budget`` caps the number of distinct monoids
    visited; exceeding it raises ``BudgetExceeded``.
    """
    if n_states < 1 or n_states > MAX_SEARCH_STATES:
        raise BudgetExceeded(f"n_states must be in 1..{MAX_SEARCH_STATES}")
    if max_obs > MAX_SEARCH_OBS:
        raise BudgetExceeded(f"max_obs must be at most {MAX_SEARCH_OBS}")
    n = n_states
    z = n
    all_maps = [tuple(m) + (z,) for m in itertools.product(range(n + 1), repeat=n)]
    ident = tuple(range(n + 1))
    zero = (z,) * (n + 1)
    perms = []
    for p in itertools.permutations(range(n)):
        perm = tuple(p) + (z,)
        inv = [0] * (n + 1)
        for i, j in enumerate(perm):
            inv[j] = i
        perms.append((perm, tuple(inv)))

    start = frozenset(_closure_images([ident, zero]))
    seen = {_canonical(start, perms)}
    found = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            for g in all_maps:
                if g in m:
                    continue
                closed = frozenset(_closure_images(list(m) + [g]))
                if len(closed) > max_obs:
                    continue
                key = _canonical(closed, perms)
                if key in seen:
                    continue
                seen.add(key)
                if len(seen) > budget:
                    raise BudgetExceeded(f"more than {budget} monoids visited")
                found.append(closed)
                nxt.append(closed)
        frontier = nxt

    states = tuple(f"z{i + 1}" for i in range(n)) + ("o",)
    space = StateSpace(states, "o")
    systems = []
    for key in sorted((_canonical(m, perms) for m in found), key=lambda k: (len(k), k)):
        obs = []
        for images in key:
            if images == ident:
                obs.append(identity(space))
            elif images == zero:
                obs.append(zero_observable(space))
            else:
                name = "[" + ",".join(states[j] for j in images[:-1]) + "]"
                obs.append(Observable(name, space, images, _image_spectrum(images, space)))
        obs.sort(key=lambda o: (o.name not in ("1", "0"), o.name != "1", o.name))
        systems.append(WeakSystem(space, tuple(obs)))
    return systems


def transformation_monoid(n_states: int, full: bool = True) -> WeakSystem:
    """Zero-fixing transformation monoid on ``n_states`` states plus ``o``.

    ``full=True`` gives every zero-fixing map; ``full=False`` gives the maps of
    the nonzero states into themselves together with the zero observable.
    """
    n = n_states
    states = tuple(f"z{i + 1}" for i in range(n)) + ("o",)
    space = StateSpace(states, "o")
    targets = range(n + 1) if full else range(n)
    obs = [identity(space), zero_observable(space)]
    for m in itertools.product(targets, repeat=n):
        images = tuple(m) + (n,)
        if images in (space.identity_images(), space.zero_images()):
            continue
        name = "[" + ",".join(states[j] for j in m) + "]"
        obs.append(Observable(name, space, images, _image_spectrum(images, space)))
    return WeakSystem(space, tuple(obs))
