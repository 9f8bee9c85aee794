"""Acceptance criteria, one test each; outcomes are listed at the end of the run."""

import random
import time
from fractions import Fraction

import pytest

from kore import lp
from kore.charges import (
    FinCofCharge,
    FiniteCharge,
    MonotoneSequence,
    continuity_probe,
    functional,
    is_sigma_additive,
)
from kore.core import (
    Balanced,
    EmptinessCertificate,
    FiniteGame,
    UnboundedViolation,
    Unbalanced,
    Variant,
    WeightSystem,
    check_balanced,
    check_core_membership,
    drop_grand_weight,
    find_core_element,
    verify_emptiness,
    verify_verdict,
)
from kore.infinite import (
    CoSingletonGame,
    InfeasibleWithin,
    default_test_charges,
    net_deviations,
    pl2_certificate,
    pl2_net,
    sigma_core_probe,
    truncation_study,
    verify_certificate_net,
    verify_probe,
)
from kore.setalgebra import (
    COUNTABLE,
    CoFin,
    Coalition,
    CoalitionSystem,
    Fin,
    PlayerUniverse,
    SimpleFunction,
    brute_force_closure,
    field_hull,
    intersection,
    union,
)

from helpers import closure_by_frozensets, explicit_dual, random_game, random_lp

pytestmark = pytest.mark.acceptance
q = Fraction


def _suite_games():
    rng = random.Random(20240501)
    return [random_game(rng) for _ in range(250)]


def test_finite_bondareva_shapley(criterion):
    criterion("1 finite Bondareva-Shapley (250 games, n<=4, <=30 s)")
    start = time.perf_counter()
    kinds = {"nonempty": 0, "empty": 0}
    for game in _suite_games():
        verdict = check_balanced(game, Variant.SCHMEIDLER)
        result = find_core_element(game)
        balanced = verdict.value <= game.grand
        assert isinstance(result, FiniteCharge) == balanced
        if isinstance(result, FiniteCharge):
            kinds["nonempty"] += 1
            assert check_core_membership(game, result).member
        else:
            kinds["empty"] += 1
            assert isinstance(result, EmptinessCertificate)
            chi_n = SimpleFunction.indicator(Coalition.grand(game.n))
            assert result.weights.image() == chi_n
            assert result.weights.worth(game) == result.value > game.grand
            assert verify_emptiness(game, result)
    assert min(kinds.values()) >= 40, kinds
    assert time.perf_counter() - start <= 30


def test_variant_collapse(criterion):
    criterion("2 variant collapse on the suite-1 games")
    for game in _suite_games():
        nonneg = check_balanced(game, Variant.SCHMEIDLER)
        free = check_balanced(game, Variant.GRAND_FREE)
        assert verify_verdict(game, nonneg, Variant.SCHMEIDLER)
        assert verify_verdict(game, free, Variant.GRAND_FREE)
        assert isinstance(nonneg, Balanced) == isinstance(free, Balanced)
        assert isinstance(nonneg, (Balanced, Unbalanced))
        assert isinstance(free, (Balanced, UnboundedViolation))


def test_truncation_ladder(criterion):
    criterion("3 co-singleton truncation ladder m=2..8 (<=10 s)")
    start = time.perf_counter()
    study = truncation_study(CoSingletonGame(1), 2, 8)
    assert study.schmeidler_values == tuple(q(m, m - 1) for m in range(2, 9))
    assert study.strictly_decreasing
    for report in study.reports:
        assert isinstance(report.grandfree, UnboundedViolation)
        assert report.grandfree.ray.annihilates()
        assert report.verified
    assert time.perf_counter() - start <= 10


def test_certificate_net(criterion):
    criterion("4 certificate net i=2..50")
    game = CoSingletonGame(1)
    for i in range(2, 51):
        assert pl2_certificate(i).worth(game) == 2
    for mu in default_test_charges():
        devs = net_deviations(pl2_net(), mu, horizon=50, start=2)
        edge = max(mu.support)
        for i, d in zip(range(2, 51), devs):
            paired = functional(mu, pl2_certificate(i).image())
            assert d == paired - mu(CoFin())
            if i > edge:
                assert paired == mu(CoFin())
    assert verify_certificate_net(game, pl2_net(), horizon=50, start=2).violation_witnessed
    tail = FinCofCharge.of({}, tail=1)
    assert net_deviations(pl2_net(), tail, horizon=50, start=2) == [1] * 49


def _random_weights(rng, universe):
    if universe.is_finite:
        n = universe.n
        pool = [Coalition(n, b) for b in range(1, (1 << n) - 1)]
        grand = Coalition.grand(n)
    else:
        pool = [Fin(rng.sample(range(1, 9), rng.randint(1, 3))) for _ in range(4)]
        pool += [CoFin(rng.sample(range(1, 9), rng.randint(1, 3))) for _ in range(4)]
        grand = CoFin()
    chosen = rng.sample(pool, min(len(pool), rng.randint(0, 5)))
    weights = {s: q(rng.randint(0, 6), rng.randint(1, 4)) for s in chosen}
    weights[grand] = -q(rng.randint(0, 9), rng.randint(1, 3))
    return WeightSystem(weights, universe=universe), grand


def test_grand_weight_transform(criterion):
    criterion("5 grand-weight transform identities (100 systems) and pl2 -> i/(i-1)")
    rng = random.Random(77)
    for t in range(100):
        universe = PlayerUniverse(rng.randint(2, 4)) if t % 2 else COUNTABLE
        ws, grand = _random_weights(rng, universe)
        if universe.is_finite:
            worth = {Coalition(universe.n, b): q(rng.randint(-3, 3), rng.randint(1, 3))
                     for b in range(1, 1 << universe.n)}
            game = FiniteGame.from_values(universe.n, worth)
        else:
            game = CoSingletonGame(rng.randint(0, 2), q(rng.randint(1, 3)))
        L = ws.grand_weight
        new = drop_grand_weight(ws)
        chi_n = SimpleFunction.indicator(grand)
        assert new.image() == (ws.image() - L * chi_n) * (1 / (1 - L))
        assert new.worth(game) == (ws.worth(game) - L * game.value(grand)) / (1 - L)
    ladder = truncation_study(CoSingletonGame(1), 2, 8, variant="schmeidler").schmeidler_values
    for i in range(2, 9):
        bar = drop_grand_weight(pl2_certificate(i))
        assert bar.worth(CoSingletonGame(1)) == q(i, i - 1) == ladder[i - 2]


def test_sigma_core_emptiness(criterion):
    criterion("6 sigma-core probe s=1..20, k=1..3 infeasible and verified (<=10 s)")
    start = time.perf_counter()
    game = CoSingletonGame(1)
    for s in range(1, 21):
        for k in range(1, 4):
            result = sigma_core_probe(game, s, k)
            assert isinstance(result, InfeasibleWithin)
            assert verify_probe(game, result)
    assert time.perf_counter() - start <= 10


def test_lp_soundness(criterion):
    criterion("7 LP soundness (600 random LPs) with dual value equality")
    rng = random.Random(424242)
    counts = {lp.Optimal: 0, lp.Unbounded: 0, lp.Infeasible: 0}
    mixed = 0
    for _ in range(600):
        program = random_lp(rng)
        mixed += len(set(program.signs)) == 2
        outcome = lp.solve(program)
        assert lp.verify(program, outcome)
        counts[type(outcome)] += 1
        if isinstance(outcome, lp.Optimal):
            dual = lp.solve(explicit_dual(program))
            assert isinstance(dual, lp.Optimal) and dual.value == outcome.value
    assert min(counts.values()) >= 50, counts
    assert mixed >= 200


def test_set_and_charge_laws(criterion):
    criterion("8 set/charge laws: hull closure, modularity, sigma-additivity")
    rng = random.Random(8)
    for _ in range(300):
        n = rng.randint(1, 5)
        sets = [rng.sample(range(1, n + 1), rng.randint(0, n)) for _ in range(rng.randint(0, 4))]
        system = CoalitionSystem.of(n, sets)
        fld = field_hull(system)
        got = set(fld.sets())
        assert got == set(brute_force_closure(n, system.members))
        assert {frozenset(s.members) for s in got} == closure_by_frozensets(n, sets)
        assert len(got) == 2 ** len(fld.atoms) == fld.cardinality

    def descriptor():
        members = rng.sample(range(1, 13), rng.randint(0, 5))
        return Fin(members) if rng.random() < 0.5 else CoFin(members)

    def charge(tail_zero):
        atoms = {x: q(rng.randint(-4, 4), rng.randint(1, 5)) for x in rng.sample(range(1, 13), 4)}
        return FinCofCharge.of(atoms, 0 if tail_zero else q(rng.randint(-3, 3), rng.randint(1, 3)))

    for _ in range(500):
        mu = charge(rng.random() < 0.5)
        a, b = descriptor(), descriptor()
        assert mu(union(a, b)) + mu(intersection(a, b)) == mu(a) + mu(b)

    for t in range(100):
        mu = charge(t % 2 == 0)
        up = continuity_probe(mu, MonotoneSequence.initial_segments())
        down = continuity_probe(mu, MonotoneSequence.tails())
        assert is_sigma_additive(mu) == (mu.tail == 0) == (up.agree and down.agree)
