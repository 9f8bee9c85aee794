"""Coalitions, fields of sets and simple functions.

Two player universes are supported. A finite universe ``{1..n}`` stores
coalitions as bitsets. The countably infinite universe ``N = {1, 2, ...}``
is fixed to the finite-cofinite field, whose members are described by
:class:`Fin` (a finite set of players) or :class:`CoFin` (the complement of
a finite set of players).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "PlayerUniverse",
    "COUNTABLE",
    "Coalition",
    "Fin",
    "CoFin",
    "AnyCoalition",
    "union",
    "intersection",
    "complement",
    "difference",
    "is_subset",
    "coalition_key",
    "coalition_label",
    "CoalitionSystem",
    "FieldOfSets",
    "FINITE_COFINITE",
    "field_hull",
    "brute_force_closure",
    "SimpleFunction",
    "FinCofForm",
    "canonicalize",
    "sup_norm",
    "UniverseMismatchError",
    "UnsupportedOperationError",
    "CoalitionNotInFieldError",
]


class UniverseMismatchError(ValueError):
    """Operands live over different player universes."""


class UnsupportedOperationError(ValueError):
    """The operation is not available for this universe."""


class CoalitionNotInFieldError(ValueError):
    """A coalition is not a member of the field in use."""


@dataclass(frozen=True)
class PlayerUniverse:
    """Either ``{1..n}`` (``n`` given) or the countable set of naturals (``n is None``)."""

    n: int | None = None

    def __post_init__(self):
        if self.n is not None and (not isinstance(self.n, int) or self.n < 1):
            raise ValueError(f"finite universe needs n >= 1, got {self.n!r}")

    @classmethod
    def finite(cls, n: int) -> PlayerUniverse:
        return cls(n)

    @classmethod
    def countable(cls) -> PlayerUniverse:
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.n is not None

    def __str__(self):
        return f"{{1..{self.n}}}" if self.is_finite else "N (countable)"


COUNTABLE = PlayerUniverse(None)


def _players(members: Iterable[int]) -> tuple[int, ...]:
    out = sorted(set(members))
    for p in out:
        if not isinstance(p, int) or isinstance(p, bool) or p < 1:
            raise ValueError(f"players are positive integers, got {p!r}")
    return tuple(out)


@dataclass(frozen=True)
class Coalition:
    """A coalition of the finite universe ``{1..n}``; bit ``i-1`` marks player ``i``."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bitset {self.bits:b} has players outside 1..{self.n}")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> Coalition:
        bits = 0
        for p in _players(members):
            if p > n:
                raise ValueError(f"player {p} outside 1..{n}")
            bits |= 1 << (p - 1)
        return cls(n, bits)

    @classmethod
    def empty(cls, n: int) -> Coalition:
        return cls(n, 0)

    @classmethod
    def grand(cls, n: int) -> Coalition:
        return cls(n, (1 << n) - 1)

    @property
    def universe(self) -> PlayerUniverse:
        return PlayerUniverse(self.n)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.bits >> i & 1)

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_grand(self) -> bool:
        return self.bits == (1 << self.n) - 1

    def __contains__(self, player: int) -> bool:
        return 1 <= player <= self.n and bool(self.bits >> (player - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersection(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __invert__(self):
        return complement(self)

    def __le__(self, other):
        return is_subset(self, other)

    def __repr__(self):
        return f"Coalition({self.n}, {list(self.members)})"


@dataclass(frozen=True)
class Fin:
    """A finite coalition of the countable universe."""

    members: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "members", _players(self.members))

    universe = COUNTABLE

    @property
    def is_empty(self) -> bool:
        return not self.members

    @property
    def is_grand(self) -> bool:
        return False

    def __contains__(self, player: int) -> bool:
        return player in self.members

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersection(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __invert__(self):
        return complement(self)

    def __le__(self, other):
        return is_subset(self, other)

    def __repr__(self):
        return f"Fin{set(self.members) or '{}'}"


@dataclass(frozen=True)
class CoFin:
    """A cofinite coalition ``N \\ excluded`` of the countable universe."""

    excluded: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "excluded", _players(self.excluded))

    universe = COUNTABLE

    @property
    def is_empty(self) -> bool:
        return False

    @property
    def is_grand(self) -> bool:
        return not self.excluded

    def __contains__(self, player: int) -> bool:
        return player >= 1 and player not in self.excluded

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersection(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __invert__(self):
        return complement(self)

    def __le__(self, other):
        return is_subset(self, other)

    def __repr__(self):
        return f"CoFin{set(self.excluded) or '{}'}"


AnyCoalition = Union[Coalition, Fin, CoFin]


def _same_universe(a: AnyCoalition, b: AnyCoalition) -> None:
    if isinstance(a, Coalition) != isinstance(b, Coalition):
        raise UniverseMismatchError(f"{a!r} and {b!r} live over different universes")
    if isinstance(a, Coalition) and a.n != b.n:
        raise UniverseMismatchError(f"universe sizes differ: {a.n} vs {b.n}")


def union(a: AnyCoalition, b: AnyCoalition) -> AnyCoalition:
    _same_universe(a, b)
    if isinstance(a, Coalition):
        return Coalition(a.n, a.bits | b.bits)
    if isinstance(a, Fin) and isinstance(b, Fin):
        return Fin(a.members + b.members)
    if isinstance(a, CoFin) and isinstance(b, CoFin):
        return CoFin(set(a.excluded) & set(b.excluded))
    cof, fin = (a, b) if isinstance(a, CoFin) else (b, a)
    return CoFin(set(cof.excluded) - set(fin.members))


def complement(a: AnyCoalition) -> AnyCoalition:
    if isinstance(a, Coalition):
        return Coalition(a.n, ~a.bits & ((1 << a.n) - 1))
    if isinstance(a, Fin):
        return CoFin(a.members)
    return Fin(a.excluded)


def intersection(a: AnyCoalition, b: AnyCoalition) -> AnyCoalition:
    _same_universe(a, b)
    if isinstance(a, Coalition):
        return Coalition(a.n, a.bits & b.bits)
    return complement(union(complement(a), complement(b)))


def difference(a: AnyCoalition, b: AnyCoalition) -> AnyCoalition:
    return intersection(a, complement(b))


def is_subset(a: AnyCoalition, b: AnyCoalition) -> bool:
    return difference(a, b).is_empty


def coalition_key(s: AnyCoalition) -> tuple:
    """Total order used for deterministic listings: by kind, size, then members."""
    if isinstance(s, Coalition):
        return (0, len(s), s.members)
    if isinstance(s, Fin):
        return (1, len(s.members), s.members)
    return (2, len(s.excluded), s.excluded)


def _setstr(items: Iterable[int]) -> str:
    return "{" + ",".join(map(str, items)) + "}"


def coalition_label(s: AnyCoalition) -> str:
    if s.is_empty:
        return "∅"
    if s.is_grand:
        return "N"
    if isinstance(s, CoFin):
        return "N∖" + _setstr(s.excluded)
    return _setstr(s.members)


@dataclass(frozen=True)
class CoalitionSystem:
    """The feasible coalitions of a game.

    For a finite universe ``members`` lists every feasible coalition and must
    contain the empty and the grand coalition. For the countable universe
    ``members`` is ``None``: every finite or cofinite set is feasible.
    """

    universe: PlayerUniverse
    members: tuple[Coalition, ...] | None = None

    def __post_init__(self):
        if not self.universe.is_finite:
            if self.members is not None:
                raise UnsupportedOperationError(
                    "countable systems are the whole finite-cofinite field; pass members=None")
            return
        if self.members is None:
            raise ValueError("finite systems need an explicit member list")
        n = self.universe.n
        ordered = sorted(self.members, key=coalition_key)
        for s in ordered:
            if not isinstance(s, Coalition) or s.n != n:
                raise UniverseMismatchError(f"{s!r} is not a coalition of {{1..{n}}}")
        for a, b in zip(ordered, ordered[1:]):
            if a == b:
                raise ValueError(f"duplicate coalition {coalition_label(a)}")
        if Coalition.empty(n) not in ordered:
            raise ValueError("coalition system must contain the empty coalition")
        if Coalition.grand(n) not in ordered:
            raise ValueError("coalition system must contain the grand coalition N")
        object.__setattr__(self, "members", tuple(ordered))

    @classmethod
    def of(cls, n: int, member_lists: Iterable[Iterable[int]]) -> CoalitionSystem:
        """Build a finite system; the empty and grand coalitions are added if absent."""
        found = {Coalition.empty(n), Coalition.grand(n)}
        found.update(Coalition.of(n, m) for m in member_lists)
        return cls(PlayerUniverse(n), tuple(found))

    @classmethod
    def power_set(cls, n: int) -> CoalitionSystem:
        return cls(PlayerUniverse(n), tuple(Coalition(n, b) for b in range(1 << n)))

    def __contains__(self, s) -> bool:
        if self.members is None:
            return isinstance(s, (Fin, CoFin))
        return s in set(self.members)

    def __iter__(self):
        if self.members is None:
            raise UnsupportedOperationError("the finite-cofinite field cannot be enumerated")
        return iter(self.members)

    def __len__(self):
        if self.members is None:
            raise UnsupportedOperationError("the finite-cofinite field is infinite")
        return len(self.members)


@dataclass(frozen=True)
class FieldOfSets:
    """A field of sets, given by its atoms (finite case) or the finite-cofinite tag.

    The finite field is the set of all unions of ``atoms``; omitting them
    gives the discrete field of all subsets.
    """

    universe: PlayerUniverse
    atoms: tuple[Coalition, ...] | None = None

    def __post_init__(self):
        if not self.universe.is_finite:
            if self.atoms is not None:
                raise UnsupportedOperationError("the countable field is fixed to finite-cofinite")
            return
        n = self.universe.n
        if self.atoms is None:
            object.__setattr__(self, "atoms", tuple(Coalition.of(n, [i]) for i in range(1, n + 1)))
        atoms = tuple(sorted(self.atoms, key=lambda a: a.members[0] if a.bits else 0))
        cover = 0
        for a in atoms:
            if a.n != n:
                raise UniverseMismatchError(f"atom {a!r} not over {{1..{n}}}")
            if a.is_empty:
                raise ValueError("atoms must be non-empty")
            if cover & a.bits:
                raise ValueError("atoms must be pairwise disjoint")
            cover |= a.bits
        if cover != (1 << n) - 1:
            raise ValueError("atoms must cover the ground set")
        object.__setattr__(self, "atoms", atoms)

    @property
    def is_finite_cofinite(self) -> bool:
        return self.atoms is None

    @property
    def cardinality(self) -> int:
        if self.atoms is None:
            raise UnsupportedOperationError("the finite-cofinite field is infinite")
        return 2 ** len(self.atoms)

    def contains(self, s: AnyCoalition) -> bool:
        if self.atoms is None:
            return isinstance(s, (Fin, CoFin))
        if not isinstance(s, Coalition) or s.n != self.universe.n:
            return False
        return all(a.bits & s.bits in (0, a.bits) for a in self.atoms)

    __contains__ = contains

    def atom_indices(self, s: Coalition) -> tuple[int, ...]:
        """Indices of the atoms whose union is ``s``."""
        if not self.contains(s):
            raise CoalitionNotInFieldError(f"{coalition_label(s)} is not in the field")
        return tuple(i for i, a in enumerate(self.atoms) if a.bits & s.bits)

    def atom_of(self, player: int) -> int:
        for i, a in enumerate(self.atoms):
            if player in a:
                return i
        raise ValueError(f"player {player} outside the ground set")

    def sets(self) -> Iterator[Coalition]:
        """Every member of the field (2**len(atoms) of them)."""
        n = self.universe.n
        k = len(self.atoms)
        for mask in range(1 << k):
            bits = 0
            for i in range(k):
                if mask >> i & 1:
                    bits |= self.atoms[i].bits
            yield Coalition(n, bits)

    def as_system(self) -> CoalitionSystem:
        return CoalitionSystem(self.universe, tuple(self.sets()))


FINITE_COFINITE = FieldOfSets(COUNTABLE)


def field_hull(system: CoalitionSystem) -> FieldOfSets:
    """Atoms of the smallest field containing every coalition of ``system``.

    Two players share an atom exactly when no feasible coalition separates
    them, so atoms are the classes of equal membership signatures.
    """
    if not system.universe.is_finite:
        raise UnsupportedOperationError(
            "field hulls are computed for finite universes only; "
            "the countable universe uses the finite-cofinite field")
    n = system.universe.n
    classes: dict[tuple[bool, ...], int] = {}
    for p in range(1, n + 1):
        signature = tuple(p in s for s in system.members)
        classes[signature] = classes.get(signature, 0) | 1 << (p - 1)
    return FieldOfSets(system.universe, tuple(Coalition(n, b) for b in classes.values()))


def brute_force_closure(n: int, coalitions: Iterable[Coalition]) -> frozenset[Coalition]:
    """Close a family under complement and pairwise union until nothing new appears."""
    full = (1 << n) - 1
    sets = {c.bits for c in coalitions} | {0, full}
    while True:
        new = {full ^ a for a in sets} | {a | b for a in sets for b in sets}
        if new <= sets:
            return frozenset(Coalition(n, b) for b in sets)
        sets |= new


Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class FinCofForm:
    """Canonical form of a simple function on the finite-cofinite field.

    ``points`` lists the players whose value differs from ``eventual``, the
    value taken on the rest of N (a cofinite set).
    """

    points: tuple[tuple[int, Fraction], ...]
    eventual: Fraction

    @classmethod
    def build(cls, values: Mapping[int, Fraction], eventual) -> FinCofForm:
        eventual = Fraction(eventual)
        pts = tuple((x, Fraction(v)) for x, v in sorted(values.items()) if v != eventual)
        return cls(pts, eventual)

    def value_at(self, x: int) -> Fraction:
        return dict(self.points).get(x, self.eventual)

    def __add__(self, other: FinCofForm) -> FinCofForm:
        xs = {x for x, _ in self.points} | {x for x, _ in other.points}
        return FinCofForm.build({x: self.value_at(x) + other.value_at(x) for x in xs},
                                self.eventual + other.eventual)

    def __rmul__(self, alpha: Scalar) -> FinCofForm:
        return FinCofForm.build({x: alpha * v for x, v in self.points}, alpha * self.eventual)


class SimpleFunction:
    """A finite linear combination of indicator functions of coalitions.

    Terms are merged per coalition and zero coefficients dropped, but two
    different term lists may still describe the same function; compare
    canonical forms (or use ``==``, which does so).
    """

    __slots__ = ("terms", "universe")

    def __init__(self, terms: Mapping[AnyCoalition, Scalar] | Iterable = (), universe=None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict = {}
        for s, coef in items:
            merged[s] = merged.get(s, Fraction(0)) + Fraction(coef)
        kept = sorted(((s, c) for s, c in merged.items() if c != 0),
                      key=lambda sc: coalition_key(sc[0]))
        if universe is None and merged:
            universe = next(iter(merged)).universe
        for s, _ in kept:
            if s.universe != universe:
                raise UniverseMismatchError(f"{s!r} is not over {universe}")
        self.terms: tuple[tuple[AnyCoalition, Fraction], ...] = tuple(kept)
        self.universe: PlayerUniverse | None = universe

    @classmethod
    def indicator(cls, s: AnyCoalition) -> SimpleFunction:
        return cls({s: 1}, universe=s.universe)

    @classmethod
    def zero(cls, universe: PlayerUniverse | None = None) -> SimpleFunction:
        return cls((), universe=universe)

    def _check(self, other: SimpleFunction) -> PlayerUniverse | None:
        if self.universe and other.universe and self.universe != other.universe:
            raise UniverseMismatchError(f"{self.universe} vs {other.universe}")
        return self.universe or other.universe

    def __add__(self, other: SimpleFunction) -> SimpleFunction:
        return SimpleFunction(self.terms + other.terms, universe=self._check(other))

    def __neg__(self) -> SimpleFunction:
        return SimpleFunction([(s, -c) for s, c in self.terms], universe=self.universe)

    def __sub__(self, other: SimpleFunction) -> SimpleFunction:
        return self + (-other)

    def __mul__(self, alpha: Scalar) -> SimpleFunction:
        return SimpleFunction([(s, alpha * c) for s, c in self.terms], universe=self.universe)

    __rmul__ = __mul__

    def value_at(self, x: int) -> Fraction:
        return sum((c for s, c in self.terms if x in s), Fraction(0))

    def support_points(self) -> tuple[int, ...]:
        """Players named explicitly by some term (for countable functions)."""
        pts: set[int] = set()
        for s, _ in self.terms:
            pts.update(s.members if isinstance(s, (Coalition, Fin)) else s.excluded)
        return tuple(sorted(pts))

    def pointwise(self):
        """Values per player (finite universe) or a :class:`FinCofForm`."""
        if self.universe is None:
            return FinCofForm((), Fraction(0))
        if self.universe.is_finite:
            return tuple(self.value_at(x) for x in range(1, self.universe.n + 1))
        eventual = sum((c for s, c in self.terms if isinstance(s, CoFin)), Fraction(0))
        return FinCofForm.build({x: self.value_at(x) for x in self.support_points()}, eventual)

    def is_zero(self) -> bool:
        form = self.pointwise()
        if isinstance(form, FinCofForm):
            return not form.points and form.eventual == 0
        return not any(form)

    def __eq__(self, other):
        if not isinstance(other, SimpleFunction):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"{c}·χ{coalition_label(s)}" for s, c in self.terms) or "0"
        return f"SimpleFunction({body})"


def canonicalize(f: SimpleFunction, fld: FieldOfSets):
    """Canonical form of ``f`` relative to ``fld``.

    Finite fields give a tuple with one value per atom; the finite-cofinite
    field gives a :class:`FinCofForm`.
    """
    for s, _ in f.terms:
        if not fld.contains(s):
            raise CoalitionNotInFieldError(f"{coalition_label(s)} is not in the field")
    if fld.is_finite_cofinite:
        form = f.pointwise()
        return form
    pointwise = f.pointwise() if f.universe else (Fraction(0),) * fld.universe.n
    return tuple(pointwise[atom.members[0] - 1] for atom in fld.atoms)


def sup_norm(f: SimpleFunction) -> Fraction:
    """``max_x |f(x)|``; for countable functions the eventual value is attained too."""
    form = f.pointwise()
    if isinstance(form, FinCofForm):
        return max([abs(form.eventual)] + [abs(v) for _, v in form.points])
    return max((abs(v) for v in form), default=Fraction(0))


def subsets_up_to(players: Iterable[int], k: int) -> Iterator[tuple[int, ...]]:
    """Non-empty subsets of ``players`` with at most ``k`` elements, smallest first."""
    pool = sorted(players)
    for size in range(1, min(k, len(pool)) + 1):
        yield from combinations(pool, size)
