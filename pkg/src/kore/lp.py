"""Exact rational linear programming.

Problems have the form::

    maximize (or minimize)  c . x
    subject to              A x = b
                            x_j >= 0 for NONNEG variables, x_j free otherwise

and are solved by a two-phase revised simplex method over
:class:`fractions.Fraction` with Bland's anti-cycling rule. Every outcome
carries a certificate that :func:`verify` re-checks without pivoting:

* ``Optimal``: primal ``x``, dual ``y`` with ``A^T y >= c`` on nonnegative
  columns (``<=`` when minimizing), ``= c`` on free columns, and
  ``c . x == b . y``.
* ``Unbounded``: a feasible point and a ray ``r`` with ``A r = 0``,
  ``r_j >= 0`` on nonnegative columns, and ``c . r > 0`` (``< 0`` when
  minimizing).
* ``Infeasible``: Farkas multipliers ``y`` with ``A^T y <= 0`` on
  nonnegative columns, ``= 0`` on free columns, and ``b . y > 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

__all__ = [
    "Sign",
    "Sense",
    "RationalLP",
    "Optimal",
    "Unbounded",
    "Infeasible",
    "LPOutcome",
    "solve",
    "verify",
    "MalformedLPError",
]

log = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


class MalformedLPError(ValueError):
    """Dimensions or names of an LP are inconsistent."""


class Sign(str, Enum):
    NONNEG = "nonneg"
    FREE = "free"


class Sense(str, Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


@dataclass(frozen=True)
class RationalLP:
    names: tuple[str, ...]
    signs: tuple[Sign, ...]
    rows: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    objective: tuple[Fraction, ...]
    sense: Sense = Sense.MAXIMIZE

    def __post_init__(self):
        # normalize to tuples of Fractions so equal inputs give equal outcomes
        conv = lambda seq: tuple(Fraction(v) for v in seq)  # noqa: E731
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "signs", tuple(Sign(s) for s in self.signs))
        object.__setattr__(self, "rows", tuple(conv(r) for r in self.rows))
        object.__setattr__(self, "rhs", conv(self.rhs))
        object.__setattr__(self, "objective", conv(self.objective))
        object.__setattr__(self, "sense", Sense(self.sense))
        n = len(self.names)
        if len(set(self.names)) != n:
            raise MalformedLPError("variable names must be unique")
        if len(self.signs) != n or len(self.objective) != n:
            raise MalformedLPError(f"expected {n} signs and objective coefficients, got "
                                   f"{len(self.signs)} and {len(self.objective)}")
        if len(self.rows) != len(self.rhs):
            raise MalformedLPError(f"{len(self.rows)} rows but {len(self.rhs)} right-hand sides")
        for i, r in enumerate(self.rows):
            if len(r) != n:
                raise MalformedLPError(f"row {i} has {len(r)} coefficients, expected {n}")

    @classmethod
    def build(cls, variables: Sequence[tuple[str, Sign | str]], rows, rhs, objective,
              sense: Sense | str = Sense.MAXIMIZE) -> RationalLP:
        names = tuple(v[0] for v in variables)
        signs = tuple(Sign(v[1]) for v in variables)
        return cls(names, signs, tuple(rows), tuple(rhs), tuple(objective), Sense(sense))

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]


@dataclass(frozen=True)
class Unbounded:
    point: tuple[Fraction, ...]
    ray: tuple[Fraction, ...]


@dataclass(frozen=True)
class Infeasible:
    farkas: tuple[Fraction, ...]


LPOutcome = Union[Optimal, Unbounded, Infeasible]


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


class _Revised:
    """Revised simplex state over sparse columns with an explicit basis inverse."""

    def __init__(self, cols: list[dict[int, Fraction]], b: list[Fraction], m: int):
        self.cols = cols
        self.m = m
        self.binv = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
        self.xb = list(b)
        # artificials occupy the last m column slots
        self.num_real = len(cols) - m
        self.basis = [self.num_real + i for i in range(m)]

    def ftran(self, j: int) -> list[Fraction]:
        col = self.cols[j]
        return [sum((row[k] * v for k, v in col.items() if row[k]), ZERO) for row in self.binv]

    def prices(self, cost: list[Fraction]) -> list[Fraction]:
        cb = [cost[j] for j in self.basis]
        return [sum((cb[i] * self.binv[i][k] for i in range(self.m) if cb[i]), ZERO)
                for k in range(self.m)]

    def pivot(self, r: int, j: int, u: list[Fraction]) -> None:
        piv = u[r]
        row_r = [v / piv for v in self.binv[r]]
        self.binv[r] = row_r
        xr = self.xb[r] / piv
        self.xb[r] = xr
        nz = [k for k, v in enumerate(row_r) if v]
        for i in range(self.m):
            f = u[i]
            if i == r or not f:
                continue
            row_i = self.binv[i]
            for k in nz:
                row_i[k] -= f * row_r[k]
            self.xb[i] -= f * xr
        self.basis[r] = j

    def run(self, cost: list[Fraction], allowed: int, phase: str):
        """Iterate to optimality; returns None or the entering column of an unbounded ray."""
        it = 0
        while True:
            y = self.prices(cost)
            basic = set(self.basis)
            entering = None
            for j in range(allowed):
                if j in basic:
                    continue
                d = cost[j] - sum((y[k] * v for k, v in self.cols[j].items() if y[k]), ZERO)
                if d > 0:
                    entering = j
                    break
            if entering is None:
                return None
            u = self.ftran(entering)
            leave = None
            best = None
            for i in range(self.m):
                if u[i] > 0:
                    ratio = self.xb[i] / u[i]
                    if best is None or ratio < best or (ratio == best and
                                                        self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return entering, u
            if log.isEnabledFor(logging.DEBUG):
                log.debug("%s it %d: x%d enters, x%d leaves at ratio %s",
                          phase, it, entering, self.basis[leave], best)
            self.pivot(leave, entering, u)
            it += 1


def solve(lp: RationalLP) -> LPOutcome:
    """Solve ``lp`` exactly. Deterministic: Bland's rule fixes every pivot."""
    m, n = lp.num_rows, lp.num_vars
    sgn = 1 if lp.sense is Sense.MAXIMIZE else -1
    # split free variables: x_j = x+ - x-
    split: list[tuple[int, int]] = []
    for j in range(n):
        split.append((j, 1))
        if lp.signs[j] is Sign.FREE:
            split.append((j, -1))
    flip = [-1 if lp.rhs[i] < 0 else 1 for i in range(m)]
    cols: list[dict[int, Fraction]] = []
    for j, s in split:
        cols.append({i: s * flip[i] * lp.rows[i][j] for i in range(m) if lp.rows[i][j]})
    ns = len(cols)
    cols.extend({i: ONE} for i in range(m))
    b = [flip[i] * lp.rhs[i] for i in range(m)]
    state = _Revised(cols, b, m)

    # phase 1: maximize minus the sum of artificials
    cost1 = [ZERO] * ns + [-ONE] * m
    state.run(cost1, ns, "phase1")
    infeas = sum((state.xb[i] for i in range(m) if state.basis[i] >= ns), ZERO)
    if infeas > 0:
        y = state.prices(cost1)
        return Infeasible(tuple(-flip[i] * y[i] for i in range(m)))

    # drive zero-level artificials out where some real column can replace them
    for r in range(m):
        if state.basis[r] < ns:
            continue
        basic = set(state.basis)
        row = state.binv[r]
        for j in range(ns):
            if j in basic:
                continue
            val = sum((row[k] * v for k, v in cols[j].items() if row[k]), ZERO)
            if val:
                state.pivot(r, j, state.ftran(j))
                break

    cost2 = [sgn * lp.objective[j] * s for j, s in split] + [ZERO] * m
    ray_info = state.run(cost2, ns, "phase2")

    def assemble(vals: dict[int, Fraction]) -> tuple[Fraction, ...]:
        x = [ZERO] * n
        for k, v in vals.items():
            if k < ns:
                j, s = split[k]
                x[j] += s * v
        return tuple(x)

    point = assemble({state.basis[i]: state.xb[i] for i in range(m)})
    if ray_info is not None:
        entering, u = ray_info
        direction = {entering: ONE}
        for i in range(m):
            if u[i]:
                direction[state.basis[i]] = direction.get(state.basis[i], ZERO) - u[i]
        return Unbounded(point, assemble(direction))
    y = state.prices(cost2)
    dual = tuple(sgn * flip[i] * y[i] for i in range(m))
    value = _dot(lp.objective, point)
    return Optimal(value, point, dual)


def _residual(lp: RationalLP, x) -> list[Fraction]:
    return [_dot(row, x) - bi for row, bi in zip(lp.rows, lp.rhs)]


def _column_images(lp: RationalLP, y) -> list[Fraction]:
    return [sum((lp.rows[i][j] * y[i] for i in range(lp.num_rows)), ZERO)
            for j in range(lp.num_vars)]


def _signs_ok(lp: RationalLP, x) -> bool:
    return all(v >= 0 for v, s in zip(x, lp.signs) if s is Sign.NONNEG)


def verify(lp: RationalLP, outcome: LPOutcome) -> bool:
    """Re-check the certificate in ``outcome`` against ``lp`` by direct arithmetic."""
    n, m = lp.num_vars, lp.num_rows
    maxi = lp.sense is Sense.MAXIMIZE
    if isinstance(outcome, Optimal):
        x, y = outcome.primal, outcome.dual
        if len(x) != n or len(y) != m:
            return False
        if any(_residual(lp, x)) or not _signs_ok(lp, x):
            return False
        aty = _column_images(lp, y)
        for j in range(n):
            gap = aty[j] - lp.objective[j]
            if lp.signs[j] is Sign.FREE and gap != 0:
                return False
            if lp.signs[j] is Sign.NONNEG and (gap < 0 if maxi else gap > 0):
                return False
        return _dot(lp.objective, x) == outcome.value == _dot(lp.rhs, y)
    if isinstance(outcome, Unbounded):
        x, r = outcome.point, outcome.ray
        if len(x) != n or len(r) != n:
            return False
        if any(_residual(lp, x)) or not _signs_ok(lp, x):
            return False
        if any(_dot(row, r) for row in lp.rows) or not _signs_ok(lp, r):
            return False
        gain = _dot(lp.objective, r)
        return gain > 0 if maxi else gain < 0
    if isinstance(outcome, Infeasible):
        y = outcome.farkas
        if len(y) != m:
            return False
        aty = _column_images(lp, y)
        for j in range(n):
            if lp.signs[j] is Sign.FREE and aty[j] != 0:
                return False
            if lp.signs[j] is Sign.NONNEG and aty[j] > 0:
                return False
        return _dot(lp.rhs, y) > 0
    return False
