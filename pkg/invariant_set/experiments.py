"""Experiment runner: sequential Stern-Gerlach chains, Bell and GHZ
statistics, granular-time precession, definability checks and the
invariant suite, each returned as an ``ExperimentReport``.

Exact values always come from the module-level operations; Monte-Carlo
estimates are reported next to them with their sample counts.
"""

import logging
import string
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
import sympy as sp

from . import settings
from .celestial import Direction, alpha_from_direction, direction_from_lbit, ket_correspondence, plus_frequency
from .cosequence import (
    EstimatedFrequency,
    MonteCarloSampler,
    agreement,
    binomial_draw_probability,
    frequency,
)
from .exceptions import InvalidOrientation, InvariantSetError
from .indexed import IndexedCoSequence, PowerRecipe, ProductRecipe
from .lbit import decompose_betas, entangle_pair, ghz_triple, ghz_betas, predicted_agreement
from .models import ExperimentReport, ExperimentSpec, format_decimal, format_fraction
from .rationality import (
    Defined,
    RationalAngle,
    RationalValue,
    Surd,
    doubling_orbit,
    niven_classify,
    numeric_cross_check,
    orbit_consistent,
    rational_sine_partner,
    require_lattice_cosine,
    sum_cosine_defined,
    triangle_third_side,
)
from .root_family import CircleCoord, PowerCache, Q2Exponent, as_coord, build_family
from .sign_algebra import I_UNIT, CoSequence, apply, bar_replicate, is_hermitian, is_unitary
from .verification import run_verify

logger = logging.getLogger(__name__)

# Quarter turns apart, in the order the ī powers step through them.
ORIENTATIONS = ("+x", "+z", "-x", "-z")
MAX_CHAIN = 3
TOY_N_TOT = (1, 2)
SHOWN_TRAJECTORIES = 5
PRECESSION_DIGITS = 30


def parse_orientation(token: str) -> str:
    value = token.strip().replace("−", "-").lower()
    if value not in ORIENTATIONS:
        raise InvalidOrientation(f"Orientation {token!r} is not one of {', '.join(ORIENTATIONS)}")
    return value


def opposite(orientation: str) -> str:
    return ORIENTATIONS[(ORIENTATIONS.index(orientation) + 2) % 4]


def grouping_index(incoming: Optional[str], orientation: str) -> int:
    """Power k of ī whose grouping a device of ``orientation`` reads.

    An unpolarized beam reads ī^1. Otherwise k is the number of quarter
    turns from the incoming spin to the device, with 0 read as 4.
    """
    if incoming is None:
        return 1
    k = (ORIENTATIONS.index(orientation) - ORIENTATIONS.index(incoming)) % 4
    return k or 4


def toy_groupings(toy_n_tot: int) -> List[CoSequence]:
    """ī^k|a) for k = 1..4 on a toy universe of length 2^(2^toy_n_tot)"""
    if toy_n_tot not in TOY_N_TOT:
        raise InvariantSetError(f"Toy universe needs n_tot in {TOY_N_TOT}, got {toy_n_tot}")
    length = 2 ** 2 ** toy_n_tot
    i_bar = bar_replicate(I_UNIT, length)
    s = CoSequence.all_plus("a", length)
    groupings = []
    for _ in range(4):
        s = apply(i_bar, s)
        groupings.append(s)
    return groupings


def trajectory_strings(length: int) -> List[str]:
    """Symbolic trajectories of a chain: one per device stopping up, plus all-down"""
    letters = string.ascii_lowercase
    out = []
    for stop in range(length):
        symbols = [f"¬{letters[i]}" for i in range(stop)] + [letters[stop]] * (length - stop)
        out.append("." + " ".join(symbols))
    out.append("." + " ".join([f"¬{letters[i]}" for i in range(length - 1)] + [letters[length]]))
    return out


def evolve_trajectory(trajectory: str, steps: int = 1) -> str:
    """Shift the radix point right, erasing the symbol it passes.

    The final symbol repeats forever, so a one-symbol string is a fixed point.
    """
    if not trajectory.startswith("."):
        raise InvariantSetError(f"Trajectory {trajectory!r} must start at the radix point")
    symbols = trajectory[1:].split()
    for _ in range(steps):
        if len(symbols) > 1:
            symbols = symbols[1:]
    return "." + " ".join(symbols)


def _relabel(s: CoSequence, label: str) -> CoSequence:
    return CoSequence(label, s.signs)


class ExperimentRunner:
    """Runs the experiments of one ExperimentSpec against a shared root family"""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.config = spec.config
        self.family = build_family(self.config)
        self.powers = PowerCache(self.family)
        self.sampler = MonteCarloSampler(spec.seed, spec.workers)
        self.indexed = self.config.N > settings.MATERIALIZE_MAX_N
        logger.info(f"🚀 {spec.kind} at n_tot={self.config.n_tot} (seed={spec.seed}, samples={spec.samples})")

    def _report(self, parameters: dict = None, config: dict = None) -> ExperimentReport:
        return ExperimentReport(
            kind=self.spec.kind,
            seed=self.spec.seed,
            samples=self.spec.samples,
            config=config or self.config.summary(),
            parameters=parameters if parameters is not None else self.spec.parameters,
        )

    def _sampled(self, report, section, quantity, expected, estimate: EstimatedFrequency, as_correlation=False):
        """Monte-Carlo row checked against the exact probability ``expected``"""
        value = estimate.correlation if as_correlation else estimate.estimate
        verdict = "within 3σ" if estimate.within_sigma(expected) else "outside 3σ"
        report.add(
            section,
            quantity,
            empirical=format_decimal(value),
            samples=estimate.samples,
            verdict=verdict,
            detail=f"{estimate.hits} hits",
        )

    def _exact_agreement(self, s1, s2, alpha1, alpha2) -> Fraction:
        if isinstance(s1, IndexedCoSequence):
            return predicted_agreement(alpha1, alpha2)
        return agreement(s1, s2).agreement

    # 1. Sequential Stern-Gerlach

    def run_sg_chain(self, orientations: Sequence[str], toy_n_tot: int = 2) -> ExperimentReport:
        chain = [parse_orientation(o) for o in orientations]
        if not 1 <= len(chain) <= MAX_CHAIN:
            raise InvalidOrientation(f"A chain holds 1..{MAX_CHAIN} devices, got {len(chain)}")
        groupings = toy_groupings(toy_n_tot)
        length = groupings[0].length
        report = self._report(
            parameters={"orientations": chain, "toy_n_tot": toy_n_tot},
            config={"toy_n_tot": toy_n_tot, "N": 2 ** toy_n_tot, "L": length},
        )

        for k, s in enumerate(groupings, start=1):
            report.add("groupings", f"P(a) in ī^{k}|a)", frequency(s).frequency)

        devices, probabilities, incoming = [], [], None
        letters = string.ascii_lowercase
        for position, orientation in enumerate(chain):
            k = grouping_index(incoming, orientation)
            letter = letters[position]
            device = _relabel(groupings[k - 1], letter)
            p = frequency(device).frequency
            devices.append(device)
            probabilities.append(p)
            report.add(
                "devices",
                f"device {position + 1} {orientation}",
                p,
                detail=f"incoming {incoming or 'unpolarized'}, grouping ī^{k}|{letter})",
            )
            # the chain follows the down channel
            incoming = opposite(orientation)

        exact, reach = [], Fraction(1)
        for p in probabilities:
            exact.append(reach * p)
            reach *= 1 - p
        exact.append(reach)

        counts = self.sampler.trajectories(devices, self.spec.samples)
        for trajectory, p, hits in zip(trajectory_strings(len(chain)), exact, counts):
            report.add("trajectories", trajectory, p)
            self._sampled(report, "trajectories", trajectory, p, EstimatedFrequency(self.spec.samples, int(hits)))

        for trajectory in self._draw_trajectories(devices):
            steps = [trajectory]
            while evolve_trajectory(steps[-1]) != steps[-1]:
                steps.append(evolve_trajectory(steps[-1]))
            report.add("evolution", trajectory, detail=" → ".join(steps))

        half = _relabel(groupings[0], "a")
        for draws, successes, label in ((4, 1, "a"), (3, 1, "b")):
            quantity = f"P(one {label} in {draws} draws from a half-half grouping)"
            expected = binomial_draw_probability(frequency(half).frequency, successes, draws)
            report.add("multinomial", quantity, expected)
            estimate = self.sampler.multinomial_hits(half, self.spec.samples, draws, successes)
            self._sampled(report, "multinomial", quantity, expected, estimate)
        return report

    def _draw_trajectories(self, devices: List[CoSequence]) -> List[str]:
        """A few sampled symbol strings, from their own seeded stream"""
        rng = np.random.default_rng(self.spec.seed)
        names = trajectory_strings(len(devices))
        drawn = []
        for _ in range(SHOWN_TRAJECTORIES):
            slot = len(devices)
            for k, s in enumerate(devices):
                if s.signs[rng.integers(0, s.length)] > 0:
                    slot = k
                    break
            drawn.append(names[slot])
        return drawn

    # 2. Bell correlations

    def _pair_for(self, c: Fraction, J: CircleCoord):
        alpha = alpha_from_direction(Direction(c, RationalAngle(0)), self.config)
        pair = entangle_pair(0, alpha, 0, J, J, self.family, indexed=self.indexed, powers=self.powers)
        return alpha, pair

    def run_bell(self, cos_ab, cos_ab_prime) -> ExperimentReport:
        c1 = require_lattice_cosine("cos_ab", cos_ab, self.config)
        c2 = require_lattice_cosine("cos_ab_prime", cos_ab_prime, self.config)
        report = self._report()
        J = CircleCoord(4 * self.config.M)

        correlations = {}
        for name, c in (("θ", c1), ("θ′", c2)):
            alpha, pair = self._pair_for(c, J)
            exact = self._exact_agreement(pair["a"], pair["b"], 0, alpha)
            correlations[name] = 2 * exact - 1
            report.add("correlations", f"C({name})", 2 * exact - 1, detail=f"alpha={alpha}, agreement {format_fraction(exact)}")
            estimate = self.sampler.agreement(pair["a"], pair["b"], self.spec.samples)
            self._sampled(report, "correlations", f"C({name}) sampled", exact, estimate, as_correlation=True)

        third = sum_cosine_defined(c1, c2, self.config, branch="difference")
        if isinstance(third, Defined):
            alpha, pair = self._pair_for(third.value, J)
            exact = self._exact_agreement(pair["a"], pair["b"], 0, alpha)
            c3 = 2 * exact - 1
            report.add("third setting", "C(θ-θ′)", c3, verdict="Defined")
            combination = abs(correlations["θ"] - correlations["θ′"]) - c3
            report.add(
                "bell",
                "|C(θ)-C(θ′)| - C(θ-θ′) <= 1",
                combination,
                verdict="holds" if combination <= 1 else "violated",
            )
        else:
            report.add("third setting", "C(θ-θ′)", verdict="Undefined", detail=f"{third.reason}: {third.detail}")
            report.add(
                "bell",
                "|C(θ)-C(θ′)| - C(θ-θ′) <= 1",
                verdict="NOT EVALUABLE",
                detail="third setting lies off the lattice",
            )
            quantum = float(c1 * c2) + float(Surd.sqrt_of((1 - c1 * c1) * (1 - c2 * c2)))
            report.add(
                "reference",
                "cos θ″ (quantum value, not a correlation)",
                decimal=format_decimal(quantum),
                verdict="reference only",
            )
        logger.info(f"✅ bell: third setting {type(third).__name__}")
        return report

    # 3. GHZ statistics

    def run_ghz(self, betas: Sequence, alpha7=0, J1=None, J7=None) -> ExperimentReport:
        betas = [Q2Exponent(b).require(self.config) for b in betas]
        if len(betas) != 3:
            raise InvariantSetError(f"GHZ needs three β values, got {len(betas)}")
        alpha7 = Q2Exponent(alpha7).require(self.config)
        J1 = as_coord(J1 if J1 is not None else 4 * self.config.M).validate(self.config)
        J7 = as_coord(J7).validate(self.config) if J7 is not None else J1
        alphas = decompose_betas(*betas) + [alpha7]
        state = ghz_triple(alphas, J1, J7, self.family, indexed=self.indexed, powers=self.powers)
        report = self._report()

        report.add("parameters", "alphas", detail=", ".join(f"α{i}={a}" for i, a in enumerate(alphas, start=1)))
        report.add("parameters", "betas", detail=", ".join(str(b) for b in ghz_betas(alphas)))

        # the shared last factor folds into β when it commutes through
        closed_form = alpha7 == 0 or J7 == J1
        effective = {label: b + alpha7 if J7 == J1 else b for label, b in zip("abc", betas)}

        L = self.config.L
        rows = np.arange(L, dtype=np.int64) if not self.indexed else np.random.default_rng(self.spec.seed).integers(0, L, size=4096)
        for label, beta in zip("abc", betas):
            collapsed = IndexedCoSequence(label, ProductRecipe([PowerRecipe(self.family, J1, beta), PowerRecipe(self.family, J7, alpha7)]))
            same = np.array_equal(self._signs(state[label], rows), collapsed.signs_at(rows))
            report.add(
                "collapsed form",
                f"|{label}′) == Ē_{J1.J}^{beta}∘Ē_{J7.J}^{alpha7}|{label})",
                verdict="pass" if same else "fail",
            )

        for label in "abc":
            expected = plus_frequency(effective[label]) if closed_form else None
            if self.indexed:
                estimate = frequency(state[label], self.spec.samples, self.spec.seed)
                report.add("frequencies", f"P({label})", expected, detail="indexed mode")
                if expected is not None:
                    self._sampled(report, "frequencies", f"P({label}) sampled", expected, estimate)
                continue
            measured = frequency(state[label]).frequency
            if expected is None:
                report.add("frequencies", f"P({label})", measured, verdict="note", detail="no closed form: J7 ≠ J1 with α7 ≠ 0")
            else:
                report.add("frequencies", f"P({label})", measured, verdict="pass" if measured == expected else "fail")

        for x, y in (("a", "b"), ("a", "c"), ("b", "c")):
            predicted = predicted_agreement(effective[x], effective[y]) if closed_form else None
            if self.indexed:
                exact = predicted
            else:
                exact = agreement(state[x], state[y]).agreement
            verdict = None
            if predicted is not None and not self.indexed:
                verdict = "pass" if exact == predicted else "fail"
            report.add("correlations", f"C({x},{y})", None if exact is None else 2 * exact - 1, verdict=verdict)
            estimate = self.sampler.agreement(state[x], state[y], self.spec.samples)
            if exact is not None:
                self._sampled(report, "correlations", f"C({x},{y}) sampled", exact, estimate, as_correlation=True)

            pair = entangle_pair(betas["abc".index(x)], betas["abc".index(y)], alpha7, J1, J7, self.family, indexed=self.indexed, powers=self.powers)
            same = np.array_equal(self._signs(pair["a"], rows), self._signs(state[x], rows)) and np.array_equal(
                self._signs(pair["b"], rows), self._signs(state[y], rows)
            )
            report.add("consistency", f"entangle_pair matches rows {x},{y}", verdict="pass" if same else "fail")

        if closed_form:
            for label in "abc":
                report.add("correspondence", label, detail=ket_correspondence(effective[label], J1, self.config, label))
        return report

    @staticmethod
    def _signs(s, rows: np.ndarray) -> np.ndarray:
        return s.signs_at(rows) if isinstance(s, IndexedCoSequence) else s.signs[rows]

    # 4. Granular-time precession

    def run_precession(self, omega, t_max: Optional[float] = None) -> ExperimentReport:
        """Times at which |1 - α(t)/2| = cos²(ωt/π) puts α on the lattice.

        Each lattice α fixes the dyadic cosine c = cos(2ωt/π) of its
        celestial direction. With u = ωt/π, u = acos(c)/2 on the upper
        branch and π - acos(c)/2 on the lower one, repeated with period π.
        Times are kept as sympy expressions and only rendered as decimals.
        """
        omega = Fraction(omega)
        if omega <= 0:
            raise InvariantSetError(f"omega must be positive, got {omega}")
        w = sp.Rational(omega.numerator, omega.denominator)
        period = sp.pi ** 2 / w
        if t_max is None:
            # one full period, half-open
            periods, limit = 1, None
        else:
            if t_max < 0:
                raise InvariantSetError(f"t_max must be non-negative, got {t_max}")
            if isinstance(t_max, (int, Fraction)):
                limit = sp.Rational(Fraction(t_max).numerator, Fraction(t_max).denominator)
            else:
                limit = sp.Float(t_max, PRECESSION_DIGITS)
            periods = int(sp.floor(limit / period)) + 1
        report = self._report()

        pole = CircleCoord(4 * self.config.M)
        times = []
        for n in range(periods):
            for alpha in Q2Exponent.lattice(self.config):
                d = direction_from_lbit(alpha, pole, self.config)
                half_angle = sp.acos(sp.Rational(d.cos_theta.numerator, d.cos_theta.denominator)) / 2
                u = n * sp.pi + (sp.pi - half_angle if d.lower_branch else half_angle)
                t = sp.pi * u / w
                value = sp.N(t, PRECESSION_DIGITS)
                if limit is not None and value > limit:
                    break
                times.append(float(value))
                branch = "π - acos(c)/2" if d.lower_branch else "acos(c)/2"
                report.add(
                    "admissible times",
                    f"t[{len(times) - 1}]",
                    decimal=format_decimal(value),
                    detail=(
                        f"alpha={alpha} frequency={format_fraction(plus_frequency(alpha))} "
                        f"c={format_fraction(d.cos_theta)} t=(π/ω)({n}π + {branch})"
                    ),
                )

        report.add(
            "structure",
            "admissible times per period",
            self.config.lattice_size,
            verdict="note",
            detail="one per lattice exponent",
        )
        report.add("structure", "frequency at α=1 (cos² = 1/2)", plus_frequency(1), verdict="pass" if plus_frequency(1) == Fraction(1, 2) else "fail")
        gaps = np.diff(times)
        if len(gaps):
            uniform = bool(np.allclose(gaps, gaps[0], rtol=1e-9, atol=0))
            report.add(
                "structure",
                "gap spread",
                verdict="uniform" if uniform else "non-uniform",
                detail=f"min {gaps.min():.12f}, max {gaps.max():.12f}",
            )
        logger.info(f"✅ precession: {len(times)} admissible times over {periods} period(s)")
        return report

    # 5. Single operator power

    def run_pow(self, J, alpha) -> ExperimentReport:
        alpha = Q2Exponent(alpha).require(self.config)
        J = as_coord(J).validate(self.config)
        report = self._report()
        R = alpha.resolution
        report.add(
            "operator",
            f"Ē_{J.J}^{alpha}",
            detail=f"{alpha.steps(R)} steps of the {R}-fold root (dim {self.config.N * 2 ** R}) replicated to {self.config.L}",
        )
        expected = plus_frequency(alpha)
        if self.indexed:
            s = IndexedCoSequence("a", PowerRecipe(self.family, J, alpha))
            report.add("frequency", "P(a) predicted", expected)
            self._sampled(report, "frequency", "P(a) sampled", expected, frequency(s, self.spec.samples, self.spec.seed))
            report.add("properties", "unitary / Hermitian", verdict="note", detail="not evaluated in indexed mode")
        else:
            op = self.powers(J, alpha)
            measured = frequency(apply(op, CoSequence.all_plus("a", self.config.L))).frequency
            report.add("frequency", "P(a)", measured, verdict="pass" if measured == expected else "fail", detail=f"predicted {format_fraction(expected)}")
            report.add("properties", "unitary", verdict=str(is_unitary(op)).lower())
            report.add("properties", "Hermitian", verdict=str(is_hermitian(op)).lower())

        d = direction_from_lbit(alpha, J, self.config)
        report.add("direction", "cos θ", d.cos_theta, detail="θ in [π, 2π]" if d.lower_branch else "θ in [0, π]")
        report.add("direction", "φ/π", d.phi.turns)
        report.add("correspondence", "a", detail=ket_correspondence(alpha, J, self.config))
        return report

    # 6. Rationality checks

    def run_niven(self, m: int, n: int, digits: int = 64) -> ExperimentReport:
        theta = RationalAngle(m, n)
        report = self._report()
        verdict = niven_classify(theta)
        quantity = f"cos(pi*{theta.m}/{theta.n})"
        if isinstance(verdict, RationalValue):
            report.add("classification", quantity, verdict.value, verdict="RationalValue")
            orbit = ", ".join(format_fraction(x) for x in doubling_orbit(verdict.value))
            report.add(
                "verification",
                "doubling orbit closes",
                verdict="pass" if orbit_consistent(theta) else "fail",
                detail=f"2cos(2^k θ): {orbit}",
            )
        else:
            report.add("classification", quantity, verdict="Irrational", detail=verdict.detail)
        agrees = numeric_cross_check(theta, digits)
        report.add("verification", f"{digits}-digit numeric check agrees", verdict="pass" if agrees else "fail")
        return report

    def run_defined(self, c1, c2, branch: str = "sum", angle: Optional[RationalAngle] = None) -> ExperimentReport:
        report = self._report()
        if angle is not None:
            verdict = triangle_third_side(c1, c2, angle, self.config)
            quantity = f"cos θ″ with P = {angle}"
        else:
            verdict = sum_cosine_defined(c1, c2, self.config, branch=branch)
            quantity = "cos(θ+θ′)" if branch == "sum" else "cos(θ-θ′)"
        if isinstance(verdict, Defined):
            report.add("definability", quantity, verdict.value, verdict="Defined")
        else:
            report.add("definability", quantity, verdict="Undefined", detail=f"{verdict.reason}: {verdict.detail}")

        for name, c in (("c1", Fraction(c1)), ("c2", Fraction(c2))):
            partner = rational_sine_partner(c)
            if isinstance(partner, RationalValue):
                report.add("pythagorean", f"sin for {name}={format_fraction(c)}", partner.value, verdict="RationalValue")
            else:
                report.add("pythagorean", f"sin for {name}={format_fraction(c)}", verdict="Irrational", detail=partner.detail)
        return report

    # 7. Invariant suites

    def run_verify(self, inject_fault: bool = False) -> ExperimentReport:
        report = self._report()
        return run_verify(self.family, report, seed=self.spec.seed, inject_fault=inject_fault)
