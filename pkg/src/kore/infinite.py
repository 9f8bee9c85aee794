"""Countable-player games on the finite-cofinite field.

Nothing here decides balancedness of an infinite game outright. Instead
the module offers finite shadows that can be computed exactly:

* :func:`truncate` and :func:`truncation_study` restrict a game to players
  ``1..m`` and run both balancedness LPs on each restriction;
* :func:`pl2_certificate` and :func:`verify_certificate_net` build and check a
  sequence of grand-free weight systems whose images converge, against
  countably additive test charges, to ``chi_N`` while their worth stays above
  ``v(N)``;
* :func:`sigma_core_probe` looks for a countably additive core element
  supported on ``1..s`` under the core constraints of small descriptors.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from . import lp
from .charges import FinCofCharge, functional, is_sigma_additive
from .core import (
    Balanced,
    BalancednessVerdict,
    FiniteGame,
    UnboundedViolation,
    Unbalanced,
    Variant,
    WeightSystem,
    check_balanced,
    verify_verdict,
)
from .setalgebra import (
    COUNTABLE,
    AnyCoalition,
    CoFin,
    Coalition,
    CoalitionSystem,
    Fin,
    coalition_label,
    subsets_up_to,
)

__all__ = [
    "FinCofGame",
    "CoSingletonGame",
    "AdditiveGame",
    "TableGame",
    "truncate",
    "TruncationReport",
    "StudyResult",
    "truncation_study",
    "max_full_m",
    "CertificateNet",
    "pl2_certificate",
    "pl2_net",
    "default_test_charges",
    "NetRow",
    "NetReport",
    "net_deviations",
    "verify_certificate_net",
    "NonSigmaAdditiveChargeError",
    "SigmaFeasible",
    "InfeasibleWithin",
    "sigma_core_probe",
    "verify_probe",
    "TruncationCapError",
]

SPARSE_CAP = 200


class TruncationCapError(ValueError):
    """A truncation study asked for more players than its mode allows."""


class NonSigmaAdditiveChargeError(ValueError):
    """A test charge with mass at infinity was offered to a net check."""


class FinCofGame:
    """A game on every finite and cofinite subset of N."""

    grand: Fraction

    def value(self, s: AnyCoalition) -> Fraction:
        if s.is_empty:
            return Fraction(0)
        if s.is_grand:
            return self.grand
        return self.rule(s)

    def rule(self, s: AnyCoalition) -> Fraction:
        raise NotImplementedError


@dataclass(frozen=True)
class CoSingletonGame(FinCofGame):
    """``v(S) = 1`` when ``S`` is cofinite missing at most ``K`` players, else 0.

    ``K = 1`` is the game whose sigma-additive core is empty although the
    nonnegative balancedness condition holds.
    """

    K: int = 1
    grand: Fraction = Fraction(1)

    def __post_init__(self):
        if self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K}")
        object.__setattr__(self, "grand", Fraction(self.grand))

    def rule(self, s):
        return Fraction(1) if isinstance(s, CoFin) and len(s.excluded) <= self.K else Fraction(0)


@dataclass(frozen=True)
class AdditiveGame(FinCofGame):
    """``v = mu`` for a countably additive, finitely supported charge ``mu``."""

    weights: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", FinCofCharge(self.weights).atoms)

    @classmethod
    def of(cls, weights: Mapping[int, Fraction]) -> AdditiveGame:
        return cls(tuple(weights.items()))

    @property
    def charge(self) -> FinCofCharge:
        return FinCofCharge(self.weights)

    @property
    def grand(self) -> Fraction:
        return self.charge.atom_total

    def rule(self, s):
        return self.charge(s)


@dataclass(frozen=True)
class TableGame(FinCofGame):
    """Worth looked up by (cofinite?, descriptor size), with per-coalition overrides.

    The descriptor size is ``|S|`` for finite ``S`` and ``|N \\ S|`` for
    cofinite ``S``. Unlisted keys are worth 0.
    """

    entries: tuple[tuple[tuple[bool, int], Fraction], ...] = ()
    exceptions: tuple[tuple[AnyCoalition, Fraction], ...] = ()
    grand: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "grand", Fraction(self.grand))

    def rule(self, s):
        for c, v in self.exceptions:
            if c == s:
                return Fraction(v)
        key = (True, len(s.excluded)) if isinstance(s, CoFin) else (False, len(s.members))
        return Fraction(dict(self.entries).get(key, 0))


def max_full_m() -> int:
    return int(os.environ.get("KORE_MAX_FULL_M", "10"))


def truncate(game: FinCofGame, m: int, mode: str = "full") -> FiniteGame:
    """Restrict ``game`` to players ``1..m``.

    A subset ``S`` of ``{1..m}`` is worth what the game gives the cofinite
    set missing exactly ``{1..m} \\ S``. ``mode="sparse"`` keeps only ∅, N,
    singletons and co-singletons.
    """
    if m < 2:
        raise ValueError(f"truncation needs m >= 2, got {m}")
    everyone = range(1, m + 1)
    if mode == "full":
        system = CoalitionSystem.power_set(m)
    elif mode == "sparse":
        members = [[i] for i in everyone] + [[j for j in everyone if j != i] for i in everyone]
        system = CoalitionSystem.of(m, members)
    else:
        raise ValueError(f"mode must be 'full' or 'sparse', got {mode!r}")

    def worth(s: Coalition) -> Fraction:
        if s.is_empty:
            return Fraction(0)
        return game.value(CoFin(i for i in everyone if i not in s))

    return FiniteGame(system, tuple(worth(s) for s in system.members))


@dataclass(frozen=True)
class TruncationReport:
    m: int
    grand: Fraction
    schmeidler: BalancednessVerdict | None = None
    grandfree: BalancednessVerdict | None = None
    verified: bool = True

    @property
    def schmeidler_value(self) -> Fraction | None:
        v = self.schmeidler
        if isinstance(v, (Balanced, Unbalanced)):
            return v.value
        return None


@dataclass(frozen=True)
class StudyResult:
    reports: tuple[TruncationReport, ...]
    grand: Fraction
    schmeidler_values: tuple[Fraction, ...] = ()
    strictly_decreasing: bool | None = None
    final_gap: Fraction | None = None
    all_grandfree_violated: bool | None = None


def _study_one(args) -> TruncationReport:
    game, m, variants, mode = args
    finite = truncate(game, m, mode)
    found = {}
    ok = True
    for variant in variants:
        verdict = check_balanced(finite, variant)
        ok = ok and verify_verdict(finite, verdict, variant)
        found[variant] = verdict
    return TruncationReport(m, finite.grand, found.get(Variant.SCHMEIDLER),
                            found.get(Variant.GRAND_FREE), ok)


def truncation_study(game: FinCofGame, m_from: int, m_to: int,
                     variant: Variant | str | None = None, mode: str = "full",
                     workers: int = 1) -> StudyResult:
    """Run the balancedness LPs on ``truncate(game, m)`` for ``m_from <= m <= m_to``.

    ``variant=None`` runs both. With ``workers > 1`` the indices are spread
    over processes; reports always come back ordered by ``m``.
    """
    if not 2 <= m_from <= m_to:
        raise ValueError(f"need 2 <= m_from <= m_to, got {m_from}..{m_to}")
    cap = max_full_m() if mode == "full" else SPARSE_CAP
    if m_to > cap:
        raise TruncationCapError(f"{mode} truncation is capped at m <= {cap}, asked for {m_to}")
    variants = tuple(Variant) if variant is None else (Variant(variant),)
    jobs = [(game, m, variants, mode) for m in range(m_from, m_to + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = tuple(pool.map(_study_one, jobs))
    else:
        reports = tuple(map(_study_one, jobs))

    grand = game.value(CoFin())
    values = tuple(r.schmeidler_value for r in reports if r.schmeidler_value is not None)
    decreasing = all(a > b for a, b in zip(values, values[1:])) if values else None
    gap = values[-1] - grand if values else None
    violated = None
    if Variant.GRAND_FREE in variants:
        violated = all(not isinstance(r.grandfree, Balanced) for r in reports)
    return StudyResult(reports, grand, values, decreasing, gap, violated)


@dataclass(frozen=True)
class CertificateNet:
    """A sequence ``i -> lam^i`` of finitely supported grand-free weight systems."""

    rule: Callable[[int], WeightSystem]
    name: str = "custom"

    def __call__(self, i: int) -> WeightSystem:
        return self.rule(i)


def pl2_certificate(i: int) -> WeightSystem:
    """Weight 1 on each ``N \\ {n}`` for ``n <= i`` and ``-(i - 2)`` on N.

    Its image is ``2 chi_N - chi_{1..i}`` and, in the co-singleton game, its
    worth is ``i - (i - 2) = 2``.
    """
    if i < 1:
        raise ValueError(f"index must be >= 1, got {i}")
    weights = [(CoFin([n]), Fraction(1)) for n in range(1, i + 1)]
    weights.append((CoFin(), Fraction(-(i - 2))))
    return WeightSystem(weights, universe=COUNTABLE)


def pl2_net() -> CertificateNet:
    return CertificateNet(pl2_certificate, "pl2")


def default_test_charges() -> list[FinCofCharge]:
    """Dirac charges at 1..10 and two spread-out probability charges."""
    charges = [FinCofCharge.dirac(x) for x in range(1, 11)]
    charges.append(FinCofCharge.of({1: Fraction(1, 2), 2: Fraction(1, 2)}))
    charges.append(FinCofCharge.of({n: Fraction(1, 2 ** n) for n in range(1, 8)} |
                                   {8: Fraction(1, 2 ** 7)}))
    return charges


@dataclass(frozen=True)
class NetRow:
    i: int
    charge_index: int
    paired: Fraction  # mu'(A(lam^i))
    deviation: Fraction  # paired - mu(N)


@dataclass(frozen=True)
class NetReport:
    horizon: int
    grand: Fraction
    worths: tuple[Fraction, ...]
    rows: tuple[NetRow, ...]
    charges: tuple[FinCofCharge, ...]
    settled: tuple[bool, ...]  # per charge: zero deviation beyond its support
    limit_worth: Fraction

    @property
    def worth_constant(self) -> bool:
        return len(set(self.worths)) == 1

    @property
    def violation_witnessed(self) -> bool:
        return all(self.settled) and self.worth_constant and self.limit_worth > self.grand


def net_deviations(net: CertificateNet, charge: FinCofCharge, horizon: int,
                   start: int = 1) -> list[Fraction]:
    """``mu'(A(lam^i)) - mu(N)`` for ``start <= i <= horizon``; no restriction on ``mu``."""
    total = charge(CoFin())
    return [functional(charge, net(i).image()) - total for i in range(start, horizon + 1)]


def verify_certificate_net(game: FinCofGame, net: CertificateNet,
                           test_charges: Sequence[FinCofCharge] | None = None,
                           horizon: int = 50, start: int = 1) -> NetReport:
    """Check a certificate net against countably additive test charges.

    The net witnesses a violation when, for every test charge, the paired
    value ``mu'(A(lam^i))`` equals ``mu(N)`` once ``i`` passes the charge's
    support, and the worths ``c(lam^i)`` settle above ``v(N)``. Only the
    listed charges are checked; that is a finite family of the weak
    neighbourhoods, not convergence against every countably additive charge.
    """
    if horizon < start:
        raise ValueError(f"horizon must be >= {start}, got {horizon}")
    charges = tuple(default_test_charges() if test_charges is None else test_charges)
    for k, mu in enumerate(charges):
        if not is_sigma_additive(mu):
            raise NonSigmaAdditiveChargeError(
                f"test charge #{k} has mass {mu.tail} at infinity; it is not countably "
                f"additive, and the paired values drift from mu(N) by that tail forever "
                f"instead of converging")
    worths = tuple(net(i).worth(game) for i in range(start, horizon + 1))
    rows = []
    settled = []
    for k, mu in enumerate(charges):
        devs = net_deviations(net, mu, horizon, start)
        edge = max(mu.support, default=0)
        rows.extend(NetRow(i, k, d + mu(CoFin()), d)
                    for i, d in zip(range(start, horizon + 1), devs))
        beyond = [d for i, d in zip(range(start, horizon + 1), devs) if i > edge]
        settled.append(bool(beyond) and all(d == 0 for d in beyond))
    return NetReport(horizon, game.value(CoFin()),
                     worths, tuple(rows), charges, tuple(settled), worths[-1])


@dataclass(frozen=True)
class SigmaFeasible:
    charge: FinCofCharge
    s: int
    k: int


@dataclass(frozen=True)
class InfeasibleWithin:
    """No countably additive core element supported on ``1..s`` within depth ``k``.

    ``certificate`` weights coalitions (nonnegative except N); restricted to
    the window its image vanishes and its worth is positive.
    """

    s: int
    k: int
    certificate: WeightSystem
    worth: Fraction


SigmaProbeResult = Union[SigmaFeasible, InfeasibleWithin]


def _probe_coalitions(s: int, k: int) -> list[AnyCoalition]:
    window = range(1, s + 1)
    found: list[AnyCoalition] = [Fin(t) for t in subsets_up_to(window, k)]
    found += [CoFin(t) for t in subsets_up_to(window, k)]
    return found


def _restrict(c: AnyCoalition, s: int) -> list[int]:
    return [n for n in range(1, s + 1) if n in c]


def sigma_core_probe(game: FinCofGame, s: int, k: int) -> SigmaProbeResult:
    """Search a countably additive core element with atoms in ``1..s``.

    Candidates have tail 0 and point weights ``a_1..a_s``; constraints are
    efficiency ``sum a_n = v(N)`` plus ``mu(S) >= v(S)`` for every finite
    ``S`` and every cofinite ``N \\ S`` with ``S`` a subset of the window of
    size at most ``k``. The weight LP over those coalitions (grand weight
    free) is solved: its dual is the charge, its improving ray the Farkas
    certificate of infeasibility.
    """
    if s < 1 or k < 1:
        raise ValueError(f"need s >= 1 and k >= 1, got s={s}, k={k}")
    coalitions = _probe_coalitions(s, k)
    grand = game.value(CoFin())
    variables = [(coalition_label(c), lp.Sign.NONNEG) for c in coalitions]
    variables.append(("N", lp.Sign.FREE))
    members = [set(_restrict(c, s)) for c in coalitions]
    rows = [[1 if n in mem else 0 for mem in members] + [1] for n in range(1, s + 1)]
    objective = [game.value(c) for c in coalitions] + [grand]
    program = lp.RationalLP.build(variables, rows, [1] * s, objective, lp.Sense.MAXIMIZE)
    outcome = lp.solve(program)
    if isinstance(outcome, lp.Optimal):
        charge = FinCofCharge(tuple(zip(range(1, s + 1), outcome.dual)))
        return SigmaFeasible(charge, s, k)
    assert isinstance(outcome, lp.Unbounded)
    ray = outcome.ray
    cert = WeightSystem(list(zip(coalitions, ray[:-1])) + [(CoFin(), ray[-1])],
                        universe=COUNTABLE)
    return InfeasibleWithin(s, k, cert, cert.worth(game))


def verify_probe(game: FinCofGame, result: SigmaProbeResult) -> bool:
    """Re-check a probe result by direct arithmetic."""
    s, k = result.s, result.k
    allowed = set(_probe_coalitions(s, k))
    if isinstance(result, SigmaFeasible):
        mu = result.charge
        if mu.tail != 0 or any(n > s for n in mu.support):
            return False
        if mu(CoFin()) != game.value(CoFin()):
            return False
        return all(mu(c) >= game.value(c) for c in allowed)
    cert = result.certificate
    for c, w in cert:
        if c.is_grand:
            continue
        if c not in allowed or w < 0:
            return False
    for n in range(1, s + 1):
        if sum((w for c, w in cert if n in c), Fraction(0)) != 0:
            return False
    return cert.worth(game) == result.worth > 0
