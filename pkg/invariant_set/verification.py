"""Invariant suites behind the ``verify`` experiment.

Each check appends one row with verdict ``pass``, ``fail`` or ``note``.
Failures carry the first few witnesses (indices, rows, exponents) so a
broken construction can be traced without re-running.
"""

import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import settings
from .celestial import J_from_phi, alpha_from_direction, direction_from_lbit
from .cosequence import agreement, dispersion, frequency
from .indexed import DenseRecipe, PowerRecipe, ProductRecipe
from .lbit import (
    EXPLICIT_ASSIGNMENTS,
    LbitConfig,
    ansatz_assignment,
    build_lbit,
    epr_counterexamples,
    ghz_triple,
    decompose_betas,
    predicted_agreement,
    shared_factor_commutes,
)
from .models import ExperimentReport, format_fraction
from .rationality import (
    NIVEN_VALUES,
    Defined,
    RationalAngle,
    RationalValue,
    lattice_hit_rate,
    niven_classify,
    numeric_cross_check,
    orbit_consistent,
    rational_sine_partner,
    rational_sqrt,
    sum_cosine_defined,
)
from .root_family import (
    CircleCoord,
    PowerCache,
    Q2Exponent,
    RootFamily,
    cycle_coordinate,
    quaternion_triple_witness,
)
from .sign_algebra import (
    CoSequence,
    SignedPermOp,
    apply,
    compose,
    is_hermitian,
    is_unitary,
    negate,
)

logger = logging.getLogger(__name__)

WITNESS_LIMIT = 3
NIVEN_MAX_DENOMINATOR = 100
PARITY_MAX_BITS = 12
BELL_SCAN_BITS = 8
SAMPLED_ROWS = 4096


def inject_sign_fault(family: RootFamily) -> RootFamily:
    """Family with the sign of row 0 of the last member flipped"""
    last = family.last
    sign = last.sign.copy()
    sign[0] = -sign[0]
    return family.with_member(len(family), SignedPermOp(last.target, sign, validate=False))


class InvariantSuite:
    """Runs every module-level invariant against one family.

    Checks are exhaustive while N <= 8. Above that exponents and parameter
    sets are drawn from a seeded generator, and operator entries come from
    the indexed recipes (all rows while 2^N fits in memory, sampled rows
    beyond).
    """

    def __init__(self, family: RootFamily, report: ExperimentReport, seed: int = 0, samples: int = None):
        self.family = family
        self.config = family.config
        self.report = report
        self.rng = np.random.default_rng(seed)
        self.samples = samples or settings.VERIFY_SAMPLES
        self.exhaustive = self.config.N <= 8
        self.materialized = self.config.N <= settings.MATERIALIZE_MAX_N
        self.powers = PowerCache(family)
        self.lattice = Q2Exponent.lattice(self.config)
        self.coords = [CircleCoord(J) for J in range(1, 4 * self.config.M + 1)]
        if self.materialized:
            self.rows = np.arange(self.config.L, dtype=np.int64)
        else:
            self.rows = self.rng.integers(0, self.config.L, size=SAMPLED_ROWS, dtype=np.int64)

    def run(self) -> ExperimentReport:
        checks = [
            self.check_family,
            self.check_quaternion_triples,
            self.check_quarter_turn,
            self.check_power_identities,
            self.check_unitary_hermitian,
            self.check_frequency_law,
            self.check_additivity,
            self.check_indexed_recipes,
            self.check_epr,
            self.check_lbit_tables,
            self.check_sub_arrays,
            self.check_ghz,
            self.check_celestial,
            self.check_dispersion,
            self.check_niven,
            self.check_pythagorean_parity,
            self.check_bell_evasion,
            self.note_lattice_cardinality,
        ]
        for check in checks:
            logger.debug(f"Running {check.__name__}")
            check()
        failed = len(self.report.failures)
        logger.info(f"📊 verify: {len(self.report.rows)} rows, {failed} failing")
        return self.report

    # Helpers

    def _record(self, section: str, quantity: str, checked: int, witnesses: List[str], failed: Optional[int] = None):
        failed = len(witnesses) if failed is None else failed
        if failed:
            shown = "; ".join(witnesses[:WITNESS_LIMIT])
            self.report.add(section, quantity, verdict="fail", detail=f"{failed}/{checked} failed: {shown}")
        else:
            self.report.add(section, quantity, verdict="pass", detail=f"{checked} cases")

    def _note(self, section: str, quantity: str, detail: str, exact=None):
        self.report.add(section, quantity, exact, verdict="note", detail=detail)

    def _pick(self, items: Sequence, count: int) -> list:
        """Everything in exhaustive mode, a seeded sample otherwise"""
        if self.exhaustive or count >= len(items):
            return list(items)
        picks = self.rng.choice(len(items), size=count, replace=False)
        return [items[i] for i in sorted(picks)]

    def _entries(self, J, alpha):
        if self.exhaustive:
            op = self.powers(J, alpha)
            return op.target[self.rows], op.sign[self.rows]
        return PowerRecipe(self.family, J, alpha).entries(self.rows)

    def _frequency_of(self, J, alpha) -> Fraction:
        _, signs = self._entries(J, alpha)
        return Fraction(int(np.count_nonzero(signs > 0)), len(signs))

    # Root family

    def check_family(self):
        minus_one = negate(SignedPermOp.identity(self.config.N))
        witnesses = []
        for j, E in enumerate(self.family, start=1):
            row = compose(E, E).first_difference(minus_one)
            if row is not None:
                witnesses.append(f"E[{j}]^2 differs from -1 at row {row}")
        self._record("family", "E[j]∘E[j] == -1", len(self.family), witnesses)

        witnesses = [
            f"E[{j}]" for j, E in enumerate(self.family, start=1)
            if not (is_unitary(E) and is_hermitian(E))
        ]
        self._record("family", "members unitary and Hermitian", len(self.family), witnesses)

    def check_quaternion_triples(self):
        witnesses = []
        for j in range(1, self.config.M + 1):
            witnesses.extend(quaternion_triple_witness(self.family, j))
        self._record("quaternion", "E[j]∘E[j+M] == E[N-1] and cyclic partners", self.config.M, witnesses)

    def check_quarter_turn(self):
        witnesses = []
        for J in self.coords:
            lhs = cycle_coordinate(self.family, J.quarter_turn(self.config))
            rhs = compose(self.family.last, cycle_coordinate(self.family, J))
            row = lhs.first_difference(rhs)
            if row is not None:
                witnesses.append(f"J={J.J} differs at row {row}")
        self._record("quaternion", "E_(J+M) == E[N-1]∘E_J", len(self.coords), witnesses)

    # Powers

    def check_power_identities(self):
        L = self.config.L
        witnesses = []
        for J in self.coords:
            E_bar = DenseRecipe(cycle_coordinate(self.family, J), L).entries(self.rows)
            expected = {
                0: (self.rows, np.ones(len(self.rows), dtype=np.int8)),
                1: E_bar,
                2: (self.rows, -np.ones(len(self.rows), dtype=np.int8)),
            }
            for alpha, (targets, signs) in expected.items():
                t, s = self._entries(J, alpha)
                if not (np.array_equal(t, targets) and np.array_equal(s, signs)):
                    witnesses.append(f"J={J.J}, alpha={alpha}")
        self._record("pow", "pow(J,0) == 1, pow(J,1) == Ē_J, pow(J,2) == -1", 3 * len(self.coords), witnesses)

    def check_unitary_hermitian(self):
        if not self.materialized:
            self._note("pow", "unitary and Hermitian flags", "skipped: operators not materialized above N=16")
            return
        alphas = self._pick(self.lattice, 16)
        alphas += [a for a in (Q2Exponent(1), Q2Exponent(3)) if a not in alphas]
        J = self.coords[0]
        witnesses = []
        for alpha in alphas:
            op = self.powers(J, alpha) if self.exhaustive else PowerRecipe(self.family, J, alpha).materialize()
            if not is_unitary(op):
                witnesses.append(f"alpha={alpha} not unitary")
            odd_integer = alpha.value in (1, 3)
            if is_hermitian(op) != odd_integer:
                witnesses.append(f"alpha={alpha} Hermitian={not odd_integer}")
        self._record("pow", "unitary for all alpha; Hermitian iff alpha in {1, 3}", len(alphas), witnesses)

    def check_frequency_law(self):
        if self.exhaustive:
            cases = [(J, alpha) for J in self.coords for alpha in self.lattice]
        else:
            count = self.samples if self.materialized else 32
            cases = [
                (self.coords[self.rng.integers(len(self.coords))], self.lattice[self.rng.integers(len(self.lattice))])
                for _ in range(count)
            ]
        witnesses = []
        for J, alpha in cases:
            expected = abs(1 - alpha.value / 2)
            measured = self._frequency_of(J, alpha)
            if self.materialized:
                ok = measured == expected
            else:
                # sampled rows: 4 sigma binomial band
                p = float(expected)
                ok = abs(float(measured) - p) <= 4 * math.sqrt(p * (1 - p) / len(self.rows))
            if not ok:
                witnesses.append(f"J={J.J}, alpha={alpha}: {format_fraction(measured)} vs {format_fraction(expected)}")
        mode = "exact" if self.materialized else f"sampled over {len(self.rows)} rows"
        self._record("pow", f"frequency == |1 - alpha/2| ({mode})", len(cases), witnesses)

    def check_additivity(self):
        witnesses = []
        if self.exhaustive:
            checked = 0
            for J in self.coords:
                for a in self.lattice:
                    for b in self.lattice:
                        checked += 1
                        row = compose(self.powers(J, a), self.powers(J, b)).first_difference(self.powers(J, a + b))
                        if row is not None:
                            witnesses.append(f"J={J.J}, alpha={a}, beta={b} at row {row}")
        else:
            checked = self.samples if self.materialized else 64
            for _ in range(checked):
                J = self.coords[self.rng.integers(len(self.coords))]
                a = self.lattice[self.rng.integers(len(self.lattice))]
                b = self.lattice[self.rng.integers(len(self.lattice))]
                product = ProductRecipe([PowerRecipe(self.family, J, a), PowerRecipe(self.family, J, b)])
                t1, s1 = product.entries(self.rows)
                t2, s2 = PowerRecipe(self.family, J, a + b).entries(self.rows)
                if not (np.array_equal(t1, t2) and np.array_equal(s1, s2)):
                    witnesses.append(f"J={J.J}, alpha={a}, beta={b}")
        self._record("pow", "pow(J,α)∘pow(J,β) == pow(J,α+β mod 4)", checked, witnesses)

    def check_indexed_recipes(self):
        if not self.materialized:
            self._note("indexed", "recipe == materialized power", "skipped: operators not materialized above N=16")
            return
        if self.exhaustive:
            cases = [(J, alpha) for J in (self.coords[0], self.coords[-1]) for alpha in self.lattice]
        else:
            cases = [(self.coords[0], alpha) for alpha in self._pick(self.lattice, 4)]
        witnesses = []
        for J, alpha in cases:
            op = self.powers(J, alpha)
            row = PowerRecipe(self.family, J, alpha).materialize().first_difference(op)
            if row is not None:
                witnesses.append(f"J={J.J}, alpha={alpha} at row {row}")
        self._record("indexed", "recipe == materialized power", len(cases), witnesses)

    # Lbits

    def check_epr(self):
        if not self.materialized:
            self._note("epr", "agreement == |1 - (α2-α1)/2|", "skipped: co-sequences not materialized above N=16")
            return
        alphas = None if self.exhaustive else self._pick(self.lattice, 32)
        J1, other = self.coords[0], self.coords[1]
        quarter, half = Q2Exponent(Fraction(1, 4)), Q2Exponent(Fraction(1, 2))
        cases = ((J1, 0), (J1, quarter), (J1, half), (other, 0), (other, 2), (other, half))
        for J3, alpha3 in cases:
            checked, failed, witnesses = epr_counterexamples(
                self.family, J1, J3, alpha3, alphas=alphas, powers=self.powers, limit=WITNESS_LIMIT
            )
            quantity = f"agreement == |1 - (α2-α1)/2| (J1={J1.J}, J3={J3.J}, α3={alpha3})"
            if shared_factor_commutes(J1, J3, alpha3):
                self._record("epr", quantity, checked, witnesses, failed=failed)
            else:
                shown = "; ".join(witnesses)
                self._note(
                    "epr",
                    quantity,
                    f"formula not claimed: Ē_J3^α3 does not commute with E_J1; {failed}/{checked} pairs deviate"
                    + (f": {shown}" if shown else ""),
                )

    def check_lbit_tables(self):
        witnesses = [f"n={n}" for n, table in EXPLICIT_ASSIGNMENTS.items() if ansatz_assignment(n) != table]
        self._record("lbit", "ansatz reproduces explicit n=1..4 tables", len(EXPLICIT_ASSIGNMENTS), witnesses)

    def _random_params(self, count: int):
        return [
            (self.coords[self.rng.integers(len(self.coords))], self.lattice[self.rng.integers(len(self.lattice))])
            for _ in range(count)
        ]

    def check_sub_arrays(self):
        if not self.materialized:
            self._note("lbit", "sub-array property", "skipped: co-sequences not materialized above N=16")
            return
        witnesses, checked = [], 0
        for n in (2, 3, 4):
            for _ in range(3):
                checked += 1
                small = self._random_params(2 ** (n - 1) - 1)
                zeros = [(J, Q2Exponent(0)) for J, _ in self._random_params(2 ** (n - 1))]
                big = build_lbit(LbitConfig(n=n, params=small + zeros, ambient=self.config), self.family, powers=self.powers)
                sub = build_lbit(LbitConfig(n=n - 1, params=small, ambient=self.config), self.family, powers=self.powers)
                for label in sub.labels:
                    if big[label].signs.tolist() != sub[label].signs.tolist():
                        witnesses.append(f"n={n}, label {label}")
        self._record("lbit", "zeroed extra exponents reproduce the (n-1)-lbit", checked, witnesses)

    def check_ghz(self):
        if not self.materialized:
            self._note("ghz", "pairwise agreement from β differences", "skipped above N=16")
            return
        witnesses, checked = [], 0
        for _ in range(4):
            J1 = self.coords[self.rng.integers(len(self.coords))]
            betas = [self.lattice[self.rng.integers(len(self.lattice))] for _ in range(3)]
            state = ghz_triple(decompose_betas(*betas) + [Q2Exponent(0)], J1, J1, self.family, powers=self.powers)
            rows = dict(zip("abc", betas))
            for x, y in (("a", "b"), ("a", "c"), ("b", "c")):
                checked += 1
                measured = agreement(state[x], state[y]).agreement
                if measured != predicted_agreement(rows[x], rows[y]):
                    witnesses.append(f"J1={J1.J}, betas={[str(b) for b in betas]}, pair {x}{y}")
            for x, beta in rows.items():
                checked += 1
                if frequency(state[x]).frequency != abs(1 - beta.value / 2):
                    witnesses.append(f"J1={J1.J}, beta={beta}, frequency of {x}")
        self._record("ghz", "frequencies and pairwise agreement from β", checked, witnesses)

    # Celestial chart

    def check_celestial(self):
        if self.exhaustive:
            cases = [(alpha, J) for alpha in self.lattice for J in self.coords]
        else:
            cases = [(alpha, J) for J, alpha in self._random_params(10_000)]
        witnesses = []
        for alpha, J in cases:
            d = direction_from_lbit(alpha, J, self.config)
            back_alpha = alpha_from_direction(d, self.config)
            back_J = J_from_phi(d.phi, self.config)
            if back_alpha != alpha or back_J != J:
                witnesses.append(f"alpha={alpha}, J={J.J} -> ({back_alpha}, {back_J.J})")
        self._record("celestial", "direction_from_lbit round trip", len(cases), witnesses)

    # Statistics

    def check_dispersion(self):
        if not self.materialized:
            self._note("dispersion", "Δ1Δ2 <= 1/4", "skipped above N=16")
            return
        # alpha in [0, 2] already covers every frequency
        upper = [a for a in self.lattice if a.value <= 2]
        alphas = self._pick(upper, 64)
        J = self.coords[0]
        base = CoSequence.all_plus("a", self.config.L)
        cosequences = [(a, apply(self.powers(J, a), base)) for a in alphas]
        witnesses, checked = [], 0
        for a1, s1 in cosequences:
            for a2, s2 in cosequences:
                checked += 1
                value = dispersion(s1, s2)
                at_half = a1.value == 1 and a2.value == 1
                if not value <= Fraction(1, 4) or (value == Fraction(1, 4)) != at_half:
                    witnesses.append(f"alpha=({a1}, {a2}): {value}")
        self._record("dispersion", "Δ1Δ2 <= 1/4, equality only at frequencies (1/2, 1/2)", checked, witnesses)

    # Rationality

    def check_niven(self):
        witnesses, checked = [], 0
        for n in range(1, NIVEN_MAX_DENOMINATOR + 1):
            for m in range(0, 2 * n + 1):
                if math.gcd(m, n) != 1:
                    continue
                checked += 1
                theta = RationalAngle(m, n)
                verdict = niven_classify(theta)
                if isinstance(verdict, RationalValue) and verdict.value not in NIVEN_VALUES:
                    witnesses.append(f"{theta}: value {verdict.value}")
                if not orbit_consistent(theta):
                    witnesses.append(f"{theta}: doubling orbit")
                if not numeric_cross_check(theta):
                    witnesses.append(f"{theta}: numeric")
        self._record("niven", f"classification, orbit and 64-digit check (n <= {NIVEN_MAX_DENOMINATOR})", checked, witnesses)

    def check_pythagorean_parity(self):
        witnesses, checked = [], 0
        for k in range(1, PARITY_MAX_BITS + 1):
            for p in range(1, 2 ** k, 2):
                for c in (Fraction(p, 2 ** k), Fraction(-p, 2 ** k)):
                    checked += 1
                    if isinstance(rational_sine_partner(c), RationalValue):
                        witnesses.append(f"c={c}")
        checked += 1
        if rational_sine_partner(Fraction(3, 5)) != RationalValue(Fraction(4, 5)):
            witnesses.append("c=3/5 did not give 4/5")
        self._record("pythagorean", "dyadic 0 < |c| < 1 has irrational sine; 3/5 -> 4/5", checked, witnesses)

    def check_bell_evasion(self):
        bits = min(self.config.R_max, BELL_SCAN_BITS)
        scale = 2 ** bits
        cosines = [Fraction(k, scale) for k in range(-scale, scale + 1)]
        witnesses, defined, values = [], 0, []
        for c1 in cosines:
            for c2 in cosines:
                verdict = sum_cosine_defined(c1, c2, self.config)
                root = rational_sqrt((1 - c1 * c1) * (1 - c2 * c2))
                if root is not None:
                    values.append(c1 * c2 - root)
                if isinstance(verdict, Defined):
                    defined += 1
                    if root is None:
                        witnesses.append(f"({c1}, {c2}) Defined without a square sine product")
        checked = len(cosines) ** 2
        self._record("bell", f"Defined only on square sine products (cosines k/{scale})", checked, witnesses)
        self._note("bell", "Defined third settings", f"{defined}/{checked} pairs", exact=Fraction(defined, checked))

        rate = lattice_hit_rate(values, self.config)
        self._note(
            "normality",
            "rational sum cosines landing on the lattice",
            f"{rate['on_lattice']}/{rate['total']}, max excess {rate['max_excess_bits']} bits, "
            f"reference 2^-N = {format_fraction(rate['reference'])}",
            exact=rate["rate"],
        )

    def note_lattice_cardinality(self):
        size = self.config.lattice_size
        self._note(
            "lattice",
            "exponent lattice size",
            f"constructive 4·2^R_max = {size}; the 2^N count ({2 ** self.config.N}) agrees only at n_tot=2",
            exact=size,
        )


def run_verify(family: RootFamily, report: ExperimentReport, seed: int = 0, samples: int = None, inject_fault: bool = False) -> ExperimentReport:
    if inject_fault:
        logger.warning("Injecting a sign fault into the last family member")
        family = inject_sign_fault(family)
    return InvariantSuite(family, report, seed=seed, samples=samples).run()
