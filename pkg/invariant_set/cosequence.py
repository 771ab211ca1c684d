"""Statistics over co-sequences: exact counts and seeded Monte-Carlo estimates."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence, Union

import numpy as np

from . import settings
from .exceptions import DimensionMismatch, InvariantSetError
from .indexed import IndexedCoSequence
from .rationality import Surd
from .sign_algebra import CoSequence

logger = logging.getLogger(__name__)

AnyCoSequence = Union[CoSequence, IndexedCoSequence]


@dataclass(frozen=True)
class FrequencyReport:
    total: int
    plus_count: int

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.plus_count, self.total)


@dataclass(frozen=True)
class CorrelationReport:
    agreement: Fraction

    @property
    def correlation(self) -> Fraction:
        return 2 * self.agreement - 1


@dataclass(frozen=True)
class EstimatedFrequency:
    """Monte-Carlo estimate; never mixed with exact counts"""

    samples: int
    hits: int

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.hits, self.samples)

    @property
    def correlation(self) -> Fraction:
        return 2 * self.estimate - 1

    def sigma(self, expected) -> float:
        p = float(expected)
        return math.sqrt(p * (1 - p) / self.samples)

    def within_sigma(self, expected, k: float = 3.0) -> bool:
        expected = Fraction(expected)
        # a degenerate binomial has no spread, so the estimate must be exact
        if expected in (0, 1):
            return self.estimate == expected
        return abs(float(self.estimate - expected)) <= k * self.sigma(expected)


def frequency(s: AnyCoSequence, samples: int = None, seed: int = None):
    """Exact frequency of the plus symbol, or a sampled estimate in indexed mode"""
    if isinstance(s, IndexedCoSequence):
        sampler = MonteCarloSampler(settings.DEFAULT_SEED if seed is None else seed)
        return sampler.frequency(s, samples or settings.DEFAULT_SAMPLES)
    return FrequencyReport(total=s.length, plus_count=int(np.count_nonzero(s.signs > 0)))


def agreement(s1: CoSequence, s2: CoSequence) -> CorrelationReport:
    if s1.length != s2.length:
        raise DimensionMismatch(f"Co-sequence lengths differ: {s1.length} vs {s2.length}")
    equal = int(np.count_nonzero(s1.signs == s2.signs))
    return CorrelationReport(agreement=Fraction(equal, s1.length))


def dispersion(s1: CoSequence, s2: CoSequence) -> Surd:
    """Product of population standard deviations with symbols mapped to ±1/2.

    For frequency p the deviation is sqrt(p(1-p)), so the product never
    exceeds 1/4 and reaches it only when both frequencies are 1/2.
    """
    p1 = frequency(s1).frequency
    p2 = frequency(s2).frequency
    return Surd.sqrt_of(p1 * (1 - p1) * p2 * (1 - p2))


def sample(s: AnyCoSequence, n: int, seed: int) -> List[str]:
    """n uniform draws with replacement, as symbols"""
    if n < 1:
        raise InvariantSetError("Sample size must be at least 1")
    rng = np.random.default_rng(seed)
    positions = rng.integers(0, s.length, size=n)
    signs = s.signs_at(positions) if isinstance(s, IndexedCoSequence) else s.signs[positions]
    return [s.label if x > 0 else f"¬{s.label}" for x in signs]


def binomial_draw_probability(p, successes: int, draws: int) -> Fraction:
    """Exact probability of ``successes`` plus symbols in ``draws`` draws"""
    p = Fraction(p)
    return math.comb(draws, successes) * p ** successes * (1 - p) ** (draws - successes)


def _signs(s: AnyCoSequence, positions: np.ndarray) -> np.ndarray:
    return s.signs_at(positions) if isinstance(s, IndexedCoSequence) else s.signs[positions]


class MonteCarloSampler:
    """Chunked, seeded sampler.

    Draws are split into fixed chunks of ``chunk_size``; chunk k uses
    ``default_rng(seed + k)``. Chunks are spread over ``workers`` threads and
    the counts summed, so totals do not depend on the worker count.
    """

    def __init__(self, seed: int, workers: int = 1, chunk_size: int = None):
        self.seed = seed
        self.workers = max(1, workers)
        self.chunk_size = chunk_size or settings.SAMPLE_CHUNK_SIZE

    def _chunks(self, n: int):
        full, rest = divmod(n, self.chunk_size)
        sizes = [self.chunk_size] * full + ([rest] if rest else [])
        return list(enumerate(sizes))

    def _run(self, n: int, task: Callable[[np.random.Generator, int], int]) -> int:
        def work(chunk):
            index, size = chunk
            return task(np.random.default_rng(self.seed + index), size)

        chunks = self._chunks(n)
        if self.workers == 1:
            return sum(work(chunk) for chunk in chunks)
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return sum(pool.map(work, chunks))

    def frequency(self, s: AnyCoSequence, n: int) -> EstimatedFrequency:
        def task(rng, size):
            positions = rng.integers(0, s.length, size=size)
            return int(np.count_nonzero(_signs(s, positions) > 0))

        hits = self._run(n, task)
        logger.debug(f"Sampled frequency of {s.label}: {hits}/{n}")
        return EstimatedFrequency(samples=n, hits=hits)

    def agreement(self, s1: AnyCoSequence, s2: AnyCoSequence, n: int) -> EstimatedFrequency:
        """Shared positions drawn once and read from both co-sequences"""
        if s1.length != s2.length:
            raise DimensionMismatch(f"Co-sequence lengths differ: {s1.length} vs {s2.length}")

        def task(rng, size):
            positions = rng.integers(0, s1.length, size=size)
            return int(np.count_nonzero(_signs(s1, positions) == _signs(s2, positions)))

        return EstimatedFrequency(samples=n, hits=self._run(n, task))

    def multinomial_hits(self, s: AnyCoSequence, trials: int, draws: int, successes: int) -> EstimatedFrequency:
        """Share of trials in which exactly ``successes`` of ``draws`` draws are plus"""

        def task(rng, size):
            positions = rng.integers(0, s.length, size=(size, draws))
            plus = (_signs(s, positions.ravel()) > 0).reshape(size, draws).sum(axis=1)
            return int(np.count_nonzero(plus == successes))

        return EstimatedFrequency(samples=trials, hits=self._run(trials, task))

    def trajectories(self, devices: Sequence[AnyCoSequence], n: int) -> np.ndarray:
        """Counts of sequential-device outcomes.

        Each trial draws a position from device 0; an up (plus) outcome ends
        the trial, a down outcome passes on to the next device. Slot k < len
        counts trials ending up at device k, the last slot counts trials that
        end down at the final device.
        """
        slots = len(devices) + 1

        def task(rng, size):
            counts = np.zeros(slots, dtype=np.int64)
            alive = np.ones(size, dtype=bool)
            for k, s in enumerate(devices):
                positions = rng.integers(0, s.length, size=size)
                up = alive & (_signs(s, positions) > 0)
                counts[k] = int(np.count_nonzero(up))
                alive &= ~up
            counts[-1] = int(np.count_nonzero(alive))
            return counts

        return self._run(n, task)
