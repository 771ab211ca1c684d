#!/usr/bin/env python3
"""
Walkthrough of every experiment the invariant_set package provides.
Runs each one in a small universe and prints its report as a table.
"""

import sys
from fractions import Fraction

from invariant_set import settings
from invariant_set.exceptions import InvariantSetError
from invariant_set.experiments import ExperimentRunner
from invariant_set.models import AmbientConfig, ExperimentSpec
from invariant_set.rationality import RationalAngle
from invariant_set.reporting import render_table


class InvariantSetDemo:
    def __init__(self, n_tot=3, samples=20000, seed=0):
        self.config = AmbientConfig(n_tot=n_tot)
        self.samples = samples
        self.seed = seed

    def print_header(self, title):
        print("\n" + "=" * 80)
        print(f"🧮 {title}")
        print("=" * 80)

    def print_section(self, title):
        print(f"\n🔍 {title}")
        print("-" * 60)

    def runner(self, kind, config=None):
        spec = ExperimentSpec(
            kind=kind,
            seed=self.seed,
            samples=self.samples,
            config=config or self.config,
        )
        return ExperimentRunner(spec)

    def show(self, title, kind, action, config=None):
        self.print_section(title)
        try:
            report = action(self.runner(kind, config))
            print(render_table(report))
        except InvariantSetError as e:
            print(f"❌ Error: {e}")

    def demo_verify(self):
        small = AmbientConfig(n_tot=2)
        self.show("ALGEBRAIC INVARIANTS (n_tot=2, exhaustive)", "verify", lambda r: r.run_verify(), config=small)

    def demo_pow(self):
        self.show("ROOT OPERATOR E_1^(1/4)", "pow", lambda r: r.run_pow(1, Fraction(1, 4)))

    def demo_sg_chain(self):
        self.show("STERN-GERLACH CHAIN +z, +x, +z", "sg-chain", lambda r: r.run_sg_chain(["+z", "+x", "+z"]))

    def demo_bell(self):
        self.show("BELL SETTINGS cos θ=1/2, cos θ′=1/4", "bell", lambda r: r.run_bell(Fraction(1, 2), Fraction(1, 4)))
        self.show("BELL SETTINGS cos θ=1/2, cos θ′=1/2", "bell", lambda r: r.run_bell(Fraction(1, 2), Fraction(1, 2)))

    def demo_ghz(self):
        betas = [Fraction(1, 2), Fraction(1), Fraction(3, 2)]
        self.show("GHZ TRIPLE β=(1/2, 1, 3/2)", "ghz", lambda r: r.run_ghz(betas))

    def demo_precession(self):
        self.show("PRECESSION ω=1 over one period", "precession", lambda r: r.run_precession(Fraction(1)))

    def demo_niven(self):
        for m, n in [(1, 3), (1, 5)]:
            self.show(f"NIVEN CLASSIFICATION θ=π·{m}/{n}", "niven", lambda r, m=m, n=n: r.run_niven(m, n))

    def demo_defined(self):
        half = Fraction(1, 2)
        self.show("SUM OF ANGLES cos θ=cos θ′=1/2", "defined", lambda r: r.run_defined(half, half))
        self.show(
            "TRIANGLE THIRD SIDE with P=π/3",
            "defined",
            lambda r: r.run_defined(half, half, angle=RationalAngle(1, 3)),
        )

    def run_complete_demo(self):
        self.print_header(f"INVARIANT SET EXPERIMENTS  |  n_tot={self.config.n_tot}  N={self.config.N}")

        self.demo_verify()
        self.demo_pow()
        self.demo_sg_chain()
        self.demo_bell()
        self.demo_ghz()
        self.demo_precession()
        self.demo_niven()
        self.demo_defined()

        self.print_header("DEMO COMPLETE")

        print("🎯 EXPERIMENTS DEMONSTRATED:")
        print("   ✅ Quaternion, Hermitian and additivity invariants of the root family")
        print("   ✅ Dyadic root powers and their plus-frequencies")
        print("   ✅ Stern-Gerlach chains with exact and sampled frequencies")
        print("   ✅ Bell settings with a third correlation that may be undefined")
        print("   ✅ GHZ triples built from three β values")
        print("   ✅ Precession sampled only at times with defined cosines")
        print("   ✅ Niven classification and lattice membership checks")

        print("\n🚀 CLI: python -m invariant_set --help")


def main():
    settings.configure_logging()
    n_tot = int(sys.argv[1]) if len(sys.argv) > 1 else settings.DEFAULT_N_TOT
    try:
        demo = InvariantSetDemo(n_tot=n_tot)
    except ValueError as e:
        print(f"❌ Invalid universe size: {e}")
        sys.exit(2)
    demo.run_complete_demo()


if __name__ == "__main__":
    main()
