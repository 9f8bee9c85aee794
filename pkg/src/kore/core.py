"""Finite TU games: balancedness, the core and their duality certificates.

A weight system ``lam`` assigns rationals to finitely many coalitions. It
maps to the simple function ``A(lam) = sum lam_S chi_S`` and the worth
``c(lam) = sum lam_S v(S)``. A game is balanced when no weight system with
``A(lam) = chi_N`` has worth above ``v(N)``; two cones of weights are used:

* ``Variant.SCHMEIDLER``: every weight nonnegative;
* ``Variant.GRAND_FREE``: every weight nonnegative except the grand
  coalition's, which is free.

By LP duality the game has a non-empty core exactly when the grand-free
problem has value ``v(N)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Union

from . import lp
from .charges import FiniteCharge
from .setalgebra import (
    AnyCoalition,
    CoFin,
    Coalition,
    CoalitionSystem,
    FieldOfSets,
    PlayerUniverse,
    SimpleFunction,
    coalition_key,
    coalition_label,
    field_hull,
    UniverseMismatchError,
)

__all__ = [
    "Variant",
    "FiniteGame",
    "WeightSystem",
    "Balanced",
    "Unbalanced",
    "UnboundedViolation",
    "BalancednessVerdict",
    "EmptinessCertificate",
    "Violation",
    "MembershipReport",
    "balancedness_lp",
    "check_balanced",
    "verify_verdict",
    "find_core_element",
    "verify_emptiness",
    "check_core_membership",
    "drop_grand_weight",
    "egyenloseg_transform",
    "GameError",
    "WrongFieldError",
]


class GameError(ValueError):
    """A game definition violates its invariants."""


class WrongFieldError(ValueError):
    """A charge is not defined on the coalitions it is checked against."""


class Variant(str, Enum):
    SCHMEIDLER = "schmeidler"
    GRAND_FREE = "grand-free"


@dataclass(frozen=True)
class FiniteGame:
    """A TU game on a finite coalition system (restricted cooperation allowed)."""

    system: CoalitionSystem
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.system.universe.is_finite:
            raise GameError("FiniteGame needs a finite universe")
        if len(self.values) != len(self.system.members):
            raise GameError(f"{len(self.system.members)} coalitions but {len(self.values)} values")
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if self.value(Coalition.empty(self.n)) != 0:
            raise GameError("v(∅) must be 0")

    @classmethod
    def from_values(cls, n: int, values: Mapping[Coalition, Fraction]) -> FiniteGame:
        """Game on the listed coalitions; ∅ is added with worth 0, N must be listed."""
        table = {s: Fraction(v) for s, v in values.items()}
        if Coalition.grand(n) not in table:
            raise GameError("the grand coalition N must be given a value")
        table.setdefault(Coalition.empty(n), Fraction(0))
        system = CoalitionSystem(PlayerUniverse(n), tuple(table))
        return cls(system, tuple(table[s] for s in system.members))

    @classmethod
    def from_function(cls, n: int, worth, coalitions: Iterable[Coalition] | None = None):
        """Tabulate ``worth(S)`` over ``coalitions`` (default: all of ``P({1..n})``)."""
        system = (CoalitionSystem.power_set(n) if coalitions is None
                  else CoalitionSystem.of(n, (c.members for c in coalitions)))
        vals = tuple(Fraction(0) if s.is_empty else Fraction(worth(s)) for s in system.members)
        return cls(system, vals)

    @property
    def n(self) -> int:
        return self.system.universe.n

    @property
    def universe(self) -> PlayerUniverse:
        return self.system.universe

    @property
    def grand(self) -> Fraction:
        return self.value(Coalition.grand(self.n))

    def value(self, s: Coalition) -> Fraction:
        try:
            return self.values[self._index[s]]
        except KeyError:
            raise GameError(f"{coalition_label(s)} is not a feasible coalition") from None

    @property
    def _index(self) -> dict[Coalition, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {s: i for i, s in enumerate(self.system.members)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def items(self):
        return zip(self.system.members, self.values)

    def hull(self) -> FieldOfSets:
        return field_hull(self.system)


class WeightSystem:
    """A finitely supported map from coalitions to rationals."""

    __slots__ = ("weights", "universe")

    def __init__(self, weights: Mapping[AnyCoalition, Fraction] | Iterable = (), universe=None):
        items = weights.items() if isinstance(weights, Mapping) else weights
        merged: dict = {}
        for s, w in items:
            merged[s] = merged.get(s, Fraction(0)) + Fraction(w)
        if universe is None and merged:
            universe = next(iter(merged)).universe
        for s in merged:
            if s.universe != universe:
                raise UniverseMismatchError(f"{s!r} is not over {universe}")
        self.weights: tuple[tuple[AnyCoalition, Fraction], ...] = tuple(sorted(
            ((s, w) for s, w in merged.items() if w), key=lambda sw: coalition_key(sw[0])))
        self.universe = universe

    def __getitem__(self, s: AnyCoalition) -> Fraction:
        return dict(self.weights).get(s, Fraction(0))

    def __iter__(self):
        return iter(self.weights)

    def __len__(self):
        return len(self.weights)

    def __eq__(self, other):
        if not isinstance(other, WeightSystem):
            return NotImplemented
        return self.weights == other.weights

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{coalition_label(s)}: {w}" for s, w in self.weights)
        return f"WeightSystem({{{body}}})"

    @property
    def grand_weight(self) -> Fraction:
        return sum((w for s, w in self.weights if s.is_grand), Fraction(0))

    def image(self) -> SimpleFunction:
        """``A(lam) = sum lam_S chi_S``."""
        return SimpleFunction(self.weights, universe=self.universe)

    def worth(self, game) -> Fraction:
        """``c(lam) = sum lam_S v(S)``."""
        return sum((w * game.value(s) for s, w in self.weights), Fraction(0))

    def scaled(self, alpha) -> WeightSystem:
        return WeightSystem([(s, alpha * w) for s, w in self.weights], universe=self.universe)

    def __add__(self, other: WeightSystem) -> WeightSystem:
        return WeightSystem(self.weights + other.weights, universe=self.universe or other.universe)

    def is_balancing(self) -> bool:
        """``A(lam) == chi_N``."""
        if self.universe is None:
            return False  # no weights at all
        return self.image() == _chi_grand(self.universe)

    def annihilates(self) -> bool:
        """``A(lam) == 0``."""
        return self.image().is_zero()


def _chi_grand(universe: PlayerUniverse) -> SimpleFunction:
    grand = Coalition.grand(universe.n) if universe.is_finite else CoFin()
    return SimpleFunction.indicator(grand)


@dataclass(frozen=True)
class Balanced:
    value: Fraction
    dual: tuple[Fraction, ...]  # one multiplier per player


@dataclass(frozen=True)
class Unbalanced:
    certificate: WeightSystem
    value: Fraction


@dataclass(frozen=True)
class UnboundedViolation:
    base: WeightSystem
    ray: WeightSystem


BalancednessVerdict = Union[Balanced, Unbalanced, UnboundedViolation]


def _weighted(game: FiniteGame):
    return [s for s in game.system.members if not s.is_empty]


def balancedness_lp(game: FiniteGame, variant: Variant | str = Variant.SCHMEIDLER) -> lp.RationalLP:
    """``max sum lam_S v(S)`` over ``sum_{S ∋ i} lam_S = 1`` for every player ``i``.

    One variable per non-empty feasible coalition; the empty coalition is
    left out since it contributes neither to ``A`` nor to ``c``.
    """
    variant = Variant(variant)
    coalitions = _weighted(game)
    variables = [
        (coalition_label(s), lp.Sign.FREE if (s.is_grand and variant is Variant.GRAND_FREE)
         else lp.Sign.NONNEG)
        for s in coalitions
    ]
    rows = [[1 if i in s else 0 for s in coalitions] for i in range(1, game.n + 1)]
    return lp.RationalLP.build(variables, rows, [1] * game.n,
                               [game.value(s) for s in coalitions], lp.Sense.MAXIMIZE)


def _weights_from(game: FiniteGame, vector) -> WeightSystem:
    return WeightSystem(zip(_weighted(game), vector), universe=game.universe)


def check_balanced(game: FiniteGame, variant: Variant | str = Variant.SCHMEIDLER
                   ) -> BalancednessVerdict:
    """Decide balancedness and return the supporting certificate.

    Finite cones are closed, so the LP optimum is the supervalue. A grand-free
    LP that beats ``v(N)`` is unbounded (subtract the grand coalition), in
    which case a ray is reported.
    """
    program = balancedness_lp(game, variant)
    outcome = lp.solve(program)
    if isinstance(outcome, lp.Optimal):
        if outcome.value <= game.grand:
            return Balanced(outcome.value, outcome.dual)
        return Unbalanced(_weights_from(game, outcome.primal), outcome.value)
    if isinstance(outcome, lp.Unbounded):
        return UnboundedViolation(_weights_from(game, outcome.point),
                                  _weights_from(game, outcome.ray))
    raise AssertionError("the grand coalition alone always balances")


def verify_verdict(game: FiniteGame, verdict: BalancednessVerdict,
                   variant: Variant | str = Variant.SCHMEIDLER) -> bool:
    """Check a verdict's certificate by direct arithmetic."""
    variant = Variant(variant)

    def in_cone(ws: WeightSystem) -> bool:
        return all(w >= 0 or (s.is_grand and variant is Variant.GRAND_FREE) for s, w in ws)

    def feasible(ws: WeightSystem) -> bool:
        return all(s in game.system for s, _ in ws)

    if isinstance(verdict, Unbalanced):
        ws = verdict.certificate
        return (feasible(ws) and in_cone(ws) and ws.is_balancing()
                and ws.worth(game) == verdict.value > game.grand)
    if isinstance(verdict, UnboundedViolation):
        return (feasible(verdict.base) and feasible(verdict.ray) and in_cone(verdict.base)
                and in_cone(verdict.ray) and verdict.base.is_balancing()
                and verdict.ray.annihilates() and verdict.ray.worth(game) > 0)
    if isinstance(verdict, Balanced):
        y = verdict.dual
        if len(y) != game.n or sum(y) != verdict.value or verdict.value > game.grand:
            return False
        for s, v in game.items():
            if s.is_empty:
                continue
            paid = sum((y[i - 1] for i in s), Fraction(0))
            if s.is_grand and variant is Variant.GRAND_FREE:
                if paid != v:
                    return False
            elif paid < v:
                return False
        return True
    return False


@dataclass(frozen=True)
class EmptinessCertificate:
    """Proof that the core is empty.

    ``weights`` balances (``A = chi_N``) and has worth ``value > v(N)``;
    ``ray`` annihilates (``A = 0``), is nonnegative off the grand coalition
    and has positive worth. The ray is the Farkas certificate of the core
    system; the weights come from the nonnegative balancedness LP.
    """

    weights: WeightSystem
    value: Fraction
    ray: WeightSystem


def _core_lp(game: FiniteGame, fld: FieldOfSets) -> tuple[lp.RationalLP, list[Coalition]]:
    # variables: one free mass per atom, then one surplus per proper coalition
    proper = [s for s in game.system.members if not (s.is_empty or s.is_grand)]
    k = len(fld.atoms)
    variables = [(f"mu[{coalition_label(a)}]", lp.Sign.FREE) for a in fld.atoms]
    variables += [(f"surplus[{coalition_label(s)}]", lp.Sign.NONNEG) for s in proper]
    rows, rhs = [], []
    for r, s in enumerate(proper):
        inside = set(fld.atom_indices(s))
        row = [1 if a in inside else 0 for a in range(k)] + [0] * len(proper)
        row[k + r] = -1
        rows.append(row)
        rhs.append(game.value(s))
    rows.append([1] * k + [0] * len(proper))
    rhs.append(game.grand)
    program = lp.RationalLP.build(variables, rows, rhs, [0] * len(variables), lp.Sense.MAXIMIZE)
    return program, proper


def find_core_element(game: FiniteGame) -> FiniteCharge | EmptinessCertificate:
    """A charge on the hull atoms lying in the core, or a proof that none exists."""
    fld = game.hull()
    program, proper = _core_lp(game, fld)
    outcome = lp.solve(program)
    if isinstance(outcome, lp.Optimal):
        return FiniteCharge(fld, outcome.primal[:len(fld.atoms)])
    assert isinstance(outcome, lp.Infeasible)
    y = outcome.farkas
    grand = Coalition.grand(game.n)
    ray = WeightSystem(list(zip(proper, y[:-1])) + [(grand, y[-1])], universe=game.universe)
    verdict = check_balanced(game, Variant.SCHMEIDLER)
    if not isinstance(verdict, Unbalanced):
        raise AssertionError("core system infeasible but the game is balanced")
    return EmptinessCertificate(verdict.certificate, verdict.value, ray)


def verify_emptiness(game: FiniteGame, cert: EmptinessCertificate) -> bool:
    ws, ray = cert.weights, cert.ray
    feasible = all(s in game.system for s, _ in ws) and all(s in game.system for s, _ in ray)
    cone = all(w >= 0 for _, w in ws) and all(w >= 0 or s.is_grand for s, w in ray)
    return (feasible and cone and ws.is_balancing() and ws.worth(game) == cert.value > game.grand
            and ray.annihilates() and ray.worth(game) > 0)


@dataclass(frozen=True)
class Violation:
    coalition: Coalition
    kind: str  # "efficiency" or "rationality"
    required: Fraction
    actual: Fraction

    @property
    def shortfall(self) -> Fraction:
        return self.required - self.actual


@dataclass(frozen=True)
class MembershipReport:
    violations: tuple[Violation, ...]

    @property
    def member(self) -> bool:
        return not self.violations


def check_core_membership(game: FiniteGame, charge: FiniteCharge) -> MembershipReport:
    """Every violated core constraint of ``charge``; empty iff it is in the core."""
    if charge.field.universe != game.universe:
        raise WrongFieldError(f"charge lives over {charge.field.universe}, game over {game.universe}")
    for s in game.system.members:
        if not charge.field.contains(s):
            raise WrongFieldError(f"{coalition_label(s)} is not measurable for the charge")
    found = []
    for s, v in game.items():
        if s.is_empty:
            continue
        mu = charge(s)
        if s.is_grand:
            if mu != v:
                found.append(Violation(s, "efficiency", v, mu))
        elif mu < v:
            found.append(Violation(s, "rationality", v, mu))
    return MembershipReport(tuple(found))


def drop_grand_weight(weights: WeightSystem) -> WeightSystem:
    """Rescale a weight system with grand weight ``L <= 0`` to one without it.

    Every other weight is divided by ``1 - L``. Then
    ``A(new) = (A(old) - L chi_N) / (1 - L)`` and
    ``c(new) = (c(old) - L v(N)) / (1 - L)``, so balancing is preserved and a
    worth above ``v(N)`` stays above ``v(N)``.
    """
    grand_weight = weights.grand_weight
    if grand_weight > 0:
        raise ValueError(f"grand-coalition weight must be <= 0, got {grand_weight}")
    for s, w in weights:
        if not s.is_grand and w < 0:
            raise ValueError(f"weight of {coalition_label(s)} is negative ({w})")
    scale = 1 - grand_weight
    return WeightSystem([(s, w / scale) for s, w in weights if not s.is_grand],
                        universe=weights.universe)


egyenloseg_transform = drop_grand_weight
