"""Named weak-system fixtures: a positive corpus that satisfies every axiom and one broken system per axiom."""
from __future__ import annotations

from .core import (
    FALSE,
    TRUE,
    Observable,
    StateSpace,
    WeakSystem,
    _close,
    composite,
    identity,
    make_system,
    transformation_monoid,
    zero_observable,
    SpectralFamily,
)


def minimal() -> WeakSystem:
    return make_system(["z1", "o"], "o", {})


def boolean_pair() -> WeakSystem:
    """Two states with a proposition ``P`` and its negation; ``P ¬P = 0``."""
    return make_system(
        ["z1", "z2", "o"], "o",
        {"P": ({"z1": "z1", "z2": "o", "o": "o"}, None), "notP": ({"z1": "o", "z2": "z2", "o": "o"}, None)},
        negations=[("P", "notP")],
        families={"P": {TRUE: "P", FALSE: "notP"}},
    )


def weak_qubit() -> WeakSystem:
    """Four states ``u, d, p, m`` with two complementary proposition pairs (up/down and plus/minus).

    Each proposition sends the states of the other pair onto its own
    eigenstate, a coarse analogue of projective measurement.  The listing is
    closed under composition.
    """
    states = ("u", "d", "p", "m", "o")
    space = StateSpace(states, "o")
    table = {
        "Pu": {"u": "u", "d": "o", "p": "u", "m": "u"},
        "Pd": {"u": "o", "d": "d", "p": "d", "m": "d"},
        "Pp": {"u": "p", "d": "p", "p": "p", "m": "o"},
        "Pm": {"u": "m", "d": "m", "p": "o", "m": "m"},
    }
    base = [identity(space), zero_observable(space)]
    base += [Observable.from_mapping(k, space, {**v, "o": "o"}, {TRUE, FALSE}) for k, v in table.items()]
    obs = _close(base)
    negs = (("Pu", "Pd"), ("Pp", "Pm"))
    system = WeakSystem(space, tuple(obs), negations=negs)
    fams = (
        SpectralFamily(system["Pu"], ((TRUE, system.proposition("Pu")), (FALSE, system.proposition("Pd")))),
        SpectralFamily(system["Pp"], ((TRUE, system.proposition("Pp")), (FALSE, system.proposition("Pm")))),
    )
    return WeakSystem(space, tuple(obs), negations=negs, spectral_families=fams)


def boolean_composite() -> WeakSystem:
    return composite(boolean_pair().relabeled("a"), boolean_pair().relabeled("b"))


POSITIVE = {
    "minimal": minimal,
    "boolean-pair": boolean_pair,
    "weak-qubit": weak_qubit,
    "monoid-2": lambda: transformation_monoid(2),
    "monoid-3": lambda: transformation_monoid(3),
    "self-maps-2": lambda: transformation_monoid(2, full=False),
    "boolean-composite": boolean_composite,
}


# ---------------------------------------------------------------------------
# one violation each


def partial_map() -> WeakSystem:
    """``A`` leaves ``z2`` without an image."""
    return make_system(["z1", "z2", "o"], "o", {"A": ({"z1": "z1", "o": "o"}, {"a"})})


def open_table() -> WeakSystem:
    """Swap and a constant map are listed but their composite ``swap·c1`` is not."""
    return make_system(
        ["z1", "z2", "o"], "o",
        {"swap": ({"z1": "z2", "z2": "z1", "o": "o"}, {"s"}), "c1": ({"z1": "z1", "z2": "z1", "o": "o"}, {"c"})},
    )


def wrong_unit() -> WeakSystem:
    """The designated unit is a constant map."""
    return make_system(
        ["z1", "z2", "o"], "o",
        {"1": ({"z1": "z1", "z2": "z1", "o": "o"}, {TRUE}), "0": ({"z1": "o", "z2": "o", "o": "o"}, {FALSE})},
    )


def wrong_zero() -> WeakSystem:
    """The designated zero observable sends every state to ``z1`` except ``o``."""
    return make_system(
        ["z1", "z2", "o"], "o",
        {"0": ({"z1": "z1", "z2": "z1", "o": "o"}, {FALSE})},
    )


def self_negating() -> WeakSystem:
    """Nilpotent ``P`` (``z2 -> z1 -> o``) registered as its own negation: ``P·P = 0 != P``."""
    return make_system(
        ["z1", "z2", "o"], "o",
        {"P": ({"z1": "o", "z2": "z1", "o": "o"}, {TRUE, FALSE})},
        negations=[("P", "P")],
    )


NEGATIVE = {
    "II": partial_map,
    "III": open_table,
    "IV": wrong_unit,
    "V": wrong_zero,
    "VI": self_negating,
}
