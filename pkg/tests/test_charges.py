from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kore.charges import (
    FinCofCharge,
    FiniteCharge,
    InvalidSequenceError,
    MonotoneSequence,
    NoSeparatorError,
    continuity_probe,
    functional,
    is_sigma_additive,
    separating_dirac,
)
from kore.setalgebra import (
    COUNTABLE,
    CoFin,
    Coalition,
    CoalitionNotInFieldError,
    CoalitionSystem,
    Fin,
    SimpleFunction,
    field_hull,
    intersection,
    union,
)

from conftest import fincof, rationals

half = Fraction(1, 2)
chi = SimpleFunction.indicator

charges = st.builds(
    lambda atoms, tail: FinCofCharge.of(dict(atoms), tail),
    st.lists(st.tuples(st.integers(1, 12), rationals), max_size=5),
    rationals,
)


def oracle_value(mu, s, horizon=40):
    """Point masses read off player by player; the tail counts for cofinite sets."""
    pts = sum((mu.weight(x) for x in range(1, horizon) if x in s), Fraction(0))
    return pts + (mu.tail if isinstance(s, CoFin) else 0)


class TestEvaluate:
    def test_examples(self):
        assert FinCofCharge.dirac(3)(CoFin([3])) == 0
        assert FinCofCharge.of({1: half, 2: half})(CoFin([1])) == half
        pure_tail = FinCofCharge.of({}, tail=1)
        assert pure_tail(Fin(range(1, 30))) == 0
        assert pure_tail(CoFin()) == 1
        assert pure_tail(Fin()) == 0

    def test_finite_charge(self):
        fld = field_hull(CoalitionSystem.of(4, [[1, 2], [3, 4]]))
        mu = FiniteCharge(fld, (1, 2))
        assert mu(Coalition.of(4, [1, 2])) == 1
        assert mu(Coalition.grand(4)) == 3
        assert mu(Coalition.empty(4)) == 0
        with pytest.raises(CoalitionNotInFieldError):
            mu(Coalition.of(4, [1]))

    @given(charges, fincof)
    def test_formula_against_oracle(self, mu, s):
        assert mu(s) == oracle_value(mu, s)

    @given(charges, fincof, fincof)
    def test_modularity(self, mu, s, t):
        assert mu(union(s, t)) + mu(intersection(s, t)) == mu(s) + mu(t)


class TestFunctional:
    def test_sigma_additive_pairing(self):
        mu = FinCofCharge.of({1: Fraction(1, 4), 3: Fraction(3, 4)})
        for i in range(1, 6):
            f = 2 * chi(CoFin()) - chi(Fin(range(1, i + 1)))
            assert functional(mu, f) == 2 - mu(Fin(range(1, i + 1)))

    def test_zero(self):
        assert functional(FinCofCharge.of({2: 5}, tail=3), SimpleFunction.zero(COUNTABLE)) == 0

    @given(st.lists(st.tuples(fincof, rationals), max_size=4), st.integers(1, 12))
    def test_dirac_evaluates(self, terms, x):
        f = SimpleFunction(terms, universe=COUNTABLE)
        assert functional(FinCofCharge.dirac(x), f) == f.value_at(x)

    @given(charges, charges, st.lists(st.tuples(fincof, rationals), max_size=4),
           st.lists(st.tuples(fincof, rationals), max_size=4), rationals)
    def test_bilinear_and_representation_free(self, mu, nu, ft, gt, a):
        f = SimpleFunction(ft, universe=COUNTABLE)
        g = SimpleFunction(gt, universe=COUNTABLE)
        assert functional(mu, f + a * g) == functional(mu, f) + a * functional(mu, g)
        both = FinCofCharge(mu.atoms + nu.atoms, mu.tail + nu.tail)
        assert functional(both, f) == functional(mu, f) + functional(nu, f)
        # rewrite f through its canonical form: eventual * chi_N + point corrections
        form = f.pointwise()
        rebuilt = form.eventual * chi(CoFin()) + SimpleFunction(
            [(Fin([x]), v - form.eventual) for x, v in form.points], universe=COUNTABLE)
        assert functional(mu, rebuilt) == functional(mu, f)


class TestSigmaAdditivity:
    def test_examples(self):
        assert is_sigma_additive(FinCofCharge.dirac(5))
        assert not is_sigma_additive(FinCofCharge.of({}, tail=1))
        assert is_sigma_additive(FinCofCharge.of({1: 3, 7: -2}))

    def test_probe_examples(self):
        up, down = MonotoneSequence.initial_segments(), MonotoneSequence.tails()
        sigma = FinCofCharge.of({2: half, 9: half})
        assert continuity_probe(sigma, up).agree
        res = continuity_probe(FinCofCharge.of({}, tail=1), up)
        assert (res.eventual_value, res.limit_value, res.agree) == (0, 1, False)
        for mu in (sigma, FinCofCharge.of({3: 1}, tail=Fraction(-2, 3))):
            res = continuity_probe(mu, down)
            assert res.eventual_value == mu.tail
            assert res.agree == (mu.tail == 0)

    @given(charges)
    def test_three_way_equivalence(self, mu):
        up = continuity_probe(mu, MonotoneSequence.initial_segments())
        down = continuity_probe(mu, MonotoneSequence.tails())
        assert is_sigma_additive(mu) == (mu.tail == 0) == up.agree == down.agree

    @given(st.integers(1, 12), st.integers(0, 6))
    def test_dirac_continuous_along_shifted_sequences(self, x, shift):
        mu = FinCofCharge.dirac(x)
        seqs = [
            MonotoneSequence(lambda i: Fin(range(shift + 1, shift + i + 1)), "increasing",
                             CoFin(range(1, shift + 1))),
            MonotoneSequence(lambda i: CoFin(range(1, shift + i + 1)), "decreasing", Fin()),
        ]
        for seq in seqs:
            assert continuity_probe(mu, seq).agree

    def test_finite_charge_sequences(self):
        fld = field_hull(CoalitionSystem.power_set(3))
        mu = FiniteCharge.from_players(fld, {1: 1, 2: -1, 3: 2})
        seq = MonotoneSequence(lambda i: Coalition.of(3, range(1, min(i, 3) + 1)),
                               "increasing", Coalition.grand(3))
        res = continuity_probe(mu, seq)
        assert res.agree and res.eventual_value == 2

    def test_non_monotone_rejected(self):
        bad = MonotoneSequence(lambda i: Fin([i]), "increasing", CoFin())
        with pytest.raises(InvalidSequenceError):
            continuity_probe(FinCofCharge.dirac(1), bad)
        wrong_limit = MonotoneSequence(lambda i: Fin(range(1, i + 1)), "increasing", Fin([1, 2]))
        with pytest.raises(InvalidSequenceError):
            continuity_probe(FinCofCharge.dirac(1), wrong_limit)


class TestSeparatingDirac:
    def test_examples(self):
        assert separating_dirac(chi(Fin([7]))) == 7
        assert separating_dirac(chi(CoFin()) - chi(CoFin([2]))) == 2
        with pytest.raises(NoSeparatorError):
            separating_dirac(SimpleFunction.zero(COUNTABLE))
        with pytest.raises(NoSeparatorError):
            separating_dirac(chi(Fin([3])) + chi(CoFin([3])) - chi(CoFin()))

    def test_finite_universe(self):
        f = chi(Coalition.of(3, [2, 3])) - chi(Coalition.of(3, [3]))
        assert separating_dirac(f) == 2

    @given(st.lists(st.tuples(fincof, rationals), max_size=4))
    def test_separates(self, terms):
        f = SimpleFunction(terms, universe=COUNTABLE)
        if f.is_zero():
            with pytest.raises(NoSeparatorError):
                separating_dirac(f)
        else:
            x = separating_dirac(f)
            assert functional(FinCofCharge.dirac(x), f) == f.value_at(x) != 0
