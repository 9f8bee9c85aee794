"""Bounded additive set functions (charges) and their continuity.

A charge on a finite field is a value per atom. A charge on the
finite-cofinite field of N is modelled as finitely many point weights
``a_n`` plus a scalar ``tail``, the mass sitting "at infinity":

    mu(Fin A)   = sum(a_n for n in A)
    mu(CoFin B) = sum(a_n) - sum(a_n for n in B) + tail

The tail is invisible to every finite set, which is exactly what makes such
a charge fail countable additivity when ``tail != 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal, Mapping, Union

from .setalgebra import (
    FINITE_COFINITE,
    CoalitionNotInFieldError,
    CoFin,
    Coalition,
    FieldOfSets,
    Fin,
    FinCofForm,
    SimpleFunction,
    AnyCoalition,
    difference,
    intersection,
    is_subset,
)

__all__ = [
    "FiniteCharge",
    "FinCofCharge",
    "Charge",
    "MonotoneSequence",
    "ProbeResult",
    "evaluate",
    "functional",
    "is_sigma_additive",
    "continuity_probe",
    "separating_dirac",
    "InvalidSequenceError",
    "ProbeNotSettledError",
    "NoSeparatorError",
]


class InvalidSequenceError(ValueError):
    """A sequence offered as monotone is not."""


class ProbeNotSettledError(RuntimeError):
    """The probed values did not become constant within the step budget."""


class NoSeparatorError(ValueError):
    """The zero function has no separating Dirac measure."""


@dataclass(frozen=True)
class FiniteCharge:
    """A charge on a finite field: one rational per atom."""

    field: FieldOfSets
    atom_values: tuple[Fraction, ...]

    def __post_init__(self):
        if self.field.is_finite_cofinite:
            raise ValueError("FiniteCharge needs a finite field; use FinCofCharge")
        if len(self.atom_values) != len(self.field.atoms):
            raise ValueError(f"expected {len(self.field.atoms)} atom values, "
                             f"got {len(self.atom_values)}")
        object.__setattr__(self, "atom_values", tuple(Fraction(v) for v in self.atom_values))

    @classmethod
    def from_players(cls, fld: FieldOfSets, values: Mapping[int, Fraction]) -> FiniteCharge:
        """Sum per-player masses into atoms (players not listed carry 0)."""
        atom_values = [Fraction(0)] * len(fld.atoms)
        for p, v in values.items():
            atom_values[fld.atom_of(p)] += Fraction(v)
        return cls(fld, tuple(atom_values))

    def __call__(self, s: Coalition) -> Fraction:
        return sum((self.atom_values[i] for i in self.field.atom_indices(s)), Fraction(0))

    @property
    def total(self) -> Fraction:
        return sum(self.atom_values, Fraction(0))


@dataclass(frozen=True)
class FinCofCharge:
    """A charge on the finite-cofinite field: point weights plus a tail."""

    atoms: tuple[tuple[int, Fraction], ...] = ()
    tail: Fraction = Fraction(0)

    def __post_init__(self):
        merged: dict[int, Fraction] = {}
        for n, a in self.atoms:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"atom index must be a positive integer, got {n!r}")
            merged[n] = merged.get(n, Fraction(0)) + Fraction(a)
        object.__setattr__(self, "atoms", tuple(sorted((n, a) for n, a in merged.items() if a)))
        object.__setattr__(self, "tail", Fraction(self.tail))

    @classmethod
    def of(cls, atoms: Mapping[int, Fraction] | None = None, tail=0) -> FinCofCharge:
        return cls(tuple((atoms or {}).items()), Fraction(tail))

    @classmethod
    def dirac(cls, x: int) -> FinCofCharge:
        return cls(((x, Fraction(1)),))

    field = FINITE_COFINITE

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.atoms)

    @property
    def atom_total(self) -> Fraction:
        return sum((a for _, a in self.atoms), Fraction(0))

    def weight(self, n: int) -> Fraction:
        return dict(self.atoms).get(n, Fraction(0))

    def __call__(self, s: AnyCoalition) -> Fraction:
        if isinstance(s, Fin):
            return sum((a for n, a in self.atoms if n in s.members), Fraction(0))
        if isinstance(s, CoFin):
            left_out = sum((a for n, a in self.atoms if n in s.excluded), Fraction(0))
            return self.atom_total - left_out + self.tail
        raise CoalitionNotInFieldError(f"{s!r} is not in the finite-cofinite field")

    def __repr__(self):
        pts = ", ".join(f"{n}: {a}" for n, a in self.atoms)
        return f"FinCofCharge({{{pts}}}, tail={self.tail})"


Charge = Union[FiniteCharge, FinCofCharge]


def evaluate(charge: Charge, s: AnyCoalition) -> Fraction:
    return charge(s)


def functional(charge: Charge, f: SimpleFunction) -> Fraction:
    """The linear functional a charge induces on simple functions: sum of coef * mu(S)."""
    return sum((c * charge(s) for s, c in f.terms), Fraction(0))


def is_sigma_additive(charge: Charge) -> bool:
    # finite fields make every additive charge countably additive
    if isinstance(charge, FiniteCharge):
        return True
    return charge.tail == 0


@dataclass(frozen=True)
class MonotoneSequence:
    """A rule ``i -> S_i`` (``i >= 1``) claimed monotone with a stated limit."""

    generator: Callable[[int], AnyCoalition]
    direction: Literal["increasing", "decreasing"]
    limit: AnyCoalition

    def __post_init__(self):
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError(f"direction must be increasing or decreasing, got {self.direction!r}")

    @classmethod
    def initial_segments(cls) -> MonotoneSequence:
        """``Fin{1..i}`` increasing to N."""
        return cls(lambda i: Fin(range(1, i + 1)), "increasing", CoFin())

    @classmethod
    def tails(cls) -> MonotoneSequence:
        """``CoFin{1..i}`` decreasing to the empty set."""
        return cls(lambda i: CoFin(range(1, i + 1)), "decreasing", Fin())


@dataclass(frozen=True)
class ProbeResult:
    eventual_value: Fraction
    limit_value: Fraction
    settled_at: int

    @property
    def agree(self) -> bool:
        return self.eventual_value == self.limit_value


def _support_set(charge: Charge):
    if isinstance(charge, FinCofCharge):
        return Fin(charge.support)
    return Coalition.grand(charge.field.universe.n)


def continuity_probe(charge: Charge, seq: MonotoneSequence, max_steps: int = 10_000,
                     confirm: int = 16) -> ProbeResult:
    """Compare ``lim mu(S_i)`` with ``mu(lim S_i)`` along one monotone sequence.

    The residual ``D_i`` (what separates ``S_i`` from the limit) shrinks with
    ``i``. Once it misses the charge's support, ``mu(S_i)`` can only still
    depend on whether ``D_i`` is cofinite; the value is declared after that
    has held for ``confirm`` further steps, which are still checked for
    monotonicity and for lying on the right side of the limit.
    """
    support = _support_set(charge)
    limit_value = charge(seq.limit)
    prev = None
    settled = None
    for i in range(1, max_steps + 1):
        s = seq.generator(i)
        if not charge.field.contains(s):
            raise CoalitionNotInFieldError(f"S_{i} = {s!r} is not in the field")
        if seq.direction == "increasing":
            ok_step = prev is None or is_subset(prev, s)
            ok_limit = is_subset(s, seq.limit)
            residual = difference(seq.limit, s)
        else:
            ok_step = prev is None or is_subset(s, prev)
            ok_limit = is_subset(seq.limit, s)
            residual = difference(s, seq.limit)
        if not ok_step:
            raise InvalidSequenceError(f"sequence is not {seq.direction} at step {i}")
        if not ok_limit:
            raise InvalidSequenceError(f"S_{i} = {s!r} is not on the right side of the limit")
        prev = s
        if not intersection(residual, support).is_empty:
            settled = None
            continue
        kind = isinstance(residual, CoFin)
        if settled is None or settled[1] != kind:
            settled = (i, kind, charge(s))
        elif i - settled[0] >= confirm:
            return ProbeResult(settled[2], limit_value, settled[0])
    raise ProbeNotSettledError(f"values did not settle within {max_steps} steps")


def separating_dirac(f: SimpleFunction) -> int:
    """A player ``x`` with ``f(x) != 0``, so the Dirac measure at ``x`` sees ``f``."""
    form = f.pointwise()
    if isinstance(form, FinCofForm):
        explicit = dict(form.points)
        for x, v in form.points:
            if v != 0:
                return x
        if form.eventual != 0:
            x = 1
            while x in explicit:
                x += 1
            return x
    else:
        for x, v in enumerate(form, start=1):
            if v != 0:
                return x
    raise NoSeparatorError("the zero function is annihilated by every Dirac measure")

