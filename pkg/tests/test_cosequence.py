from fractions import Fraction

import pytest

from invariant_set.cosequence import (
    EstimatedFrequency,
    FrequencyReport,
    MonteCarloSampler,
    agreement,
    binomial_draw_probability,
    dispersion,
    frequency,
    sample,
)
from invariant_set.exceptions import DimensionMismatch, InvariantSetError
from invariant_set.indexed import IndexedCoSequence, PowerRecipe
from invariant_set.rationality import Surd
from invariant_set.root_family import power
from invariant_set.sign_algebra import CoSequence, apply
from tests.helpers import all_plus

HALF = CoSequence("a", [1, -1, 1, -1])
QUARTER = CoSequence("a", [1, -1, -1, -1])


class TestExact:
    def test_frequency_of_all_plus(self, config3):
        assert frequency(all_plus(config3)) == FrequencyReport(total=256, plus_count=256)

    def test_frequency_of_quarter_root(self, family3, config3):
        s = apply(power(family3, 1, Fraction(1, 4)), all_plus(config3))
        assert frequency(s).frequency == Fraction(7, 8)

    def test_agreement_and_correlation(self):
        report = agreement(HALF, QUARTER)
        assert report.agreement == Fraction(3, 4)
        assert report.correlation == Fraction(1, 2)
        assert agreement(HALF, HALF).correlation == 1

    def test_agreement_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            agreement(HALF, CoSequence("a", [1, -1]))

    def test_dispersion_peaks_at_half(self):
        assert dispersion(HALF, CoSequence("b", [-1, 1, -1, 1])) == Fraction(1, 4)

    def test_dispersion_irrational(self):
        d = dispersion(QUARTER, HALF)
        assert d == Surd(Fraction(1, 8), 3)
        assert str(d) == "(1/8)√3"
        assert d <= Fraction(1, 4)

    def test_dispersion_vanishes_for_constant(self):
        assert dispersion(CoSequence.all_plus("a", 4), HALF) == 0

    @pytest.mark.parametrize("p, successes, draws, expected", [
        (Fraction(1, 2), 1, 4, Fraction(1, 4)),
        (Fraction(1, 2), 1, 3, Fraction(3, 8)),
        (Fraction(1, 4), 0, 2, Fraction(9, 16)),
        (1, 2, 2, 1),
    ])
    def test_binomial_draw_probability(self, p, successes, draws, expected):
        assert binomial_draw_probability(p, successes, draws) == expected


class TestSampling:
    def test_sample_is_seeded(self):
        assert sample(QUARTER, 20, seed=7) == sample(QUARTER, 20, seed=7)
        assert set(sample(QUARTER, 200, seed=1)) == {"a", "¬a"}

    def test_sample_size_positive(self):
        with pytest.raises(InvariantSetError):
            sample(HALF, 0, seed=0)

    def test_counts_do_not_depend_on_workers(self, family3):
        s = IndexedCoSequence("a", PowerRecipe(family3, 1, Fraction(1, 4)))
        single = MonteCarloSampler(seed=3, workers=1, chunk_size=100).frequency(s, 1050)
        pooled = MonteCarloSampler(seed=3, workers=4, chunk_size=100).frequency(s, 1050)
        assert single == pooled
        assert single.samples == 1050

    def test_indexed_frequency_is_estimated(self, family3):
        s = IndexedCoSequence("a", PowerRecipe(family3, 1, Fraction(1, 4)))
        estimate = frequency(s, samples=4000, seed=0)
        assert isinstance(estimate, EstimatedFrequency)
        assert abs(float(estimate.estimate) - 7 / 8) <= 5 * estimate.sigma(Fraction(7, 8))

    def test_sampled_agreement_of_identical_sequences(self):
        estimate = MonteCarloSampler(seed=0).agreement(QUARTER, QUARTER, 500)
        assert estimate.estimate == 1
        assert estimate.correlation == 1

    def test_multinomial_hits(self):
        estimate = MonteCarloSampler(seed=5).multinomial_hits(HALF, trials=20000, draws=4, successes=1)
        assert estimate.samples == 20000
        assert abs(float(estimate.estimate) - 0.25) <= 5 * estimate.sigma(Fraction(1, 4))

    def test_trajectory_counts_cover_every_trial(self):
        devices = [HALF, QUARTER, CoSequence.all_plus("c", 4)]
        counts = MonteCarloSampler(seed=2, chunk_size=300).trajectories(devices, 1000)
        assert counts.tolist()[-1] == 0
        assert int(counts.sum()) == 1000
        assert len(counts) == 4


@pytest.mark.slow
class TestLongRuns:
    draws = 100_000

    def test_indexed_frequency(self, family3):
        s = IndexedCoSequence("a", PowerRecipe(family3, 1, Fraction(1, 4)))
        estimate = MonteCarloSampler(seed=11).frequency(s, self.draws)
        assert estimate.samples == self.draws
        assert estimate.within_sigma(Fraction(7, 8))

    def test_pair_agreement(self, family3, config3):
        s1 = apply(power(family3, 2, Fraction(1, 8)), all_plus(config3))
        s2 = apply(power(family3, 2, Fraction(11, 8)), all_plus(config3))
        expected = agreement(s1, s2).agreement
        estimate = MonteCarloSampler(seed=12, workers=2).agreement(s1, s2, self.draws)
        assert estimate.within_sigma(expected)

    def test_multinomial_hits(self):
        estimate = MonteCarloSampler(seed=13).multinomial_hits(QUARTER, trials=self.draws, draws=3, successes=2)
        assert estimate.within_sigma(binomial_draw_probability(Fraction(1, 4), 2, 3))


class TestSigma:
    def test_within_sigma(self):
        assert EstimatedFrequency(samples=100, hits=50).within_sigma(Fraction(1, 2))
        assert not EstimatedFrequency(samples=100, hits=80).within_sigma(Fraction(1, 2))

    def test_degenerate_expectations_must_be_exact(self):
        assert EstimatedFrequency(samples=10, hits=10).within_sigma(1)
        assert not EstimatedFrequency(samples=10, hits=9).within_sigma(1)
        assert EstimatedFrequency(samples=10, hits=0).within_sigma(0)
