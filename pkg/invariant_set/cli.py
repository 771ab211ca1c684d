"""Command-line entry point.

    python -m invariant_set --n-tot 3 verify
    python -m invariant_set pow --J 1 --alpha 1/4
    python -m invariant_set --format records bell --cos-ab 1/2 --cos-ab-prime 1/4

Exit codes: 0 success, 2 rejected input, 1 internal failure or failing
invariants in ``verify``.
"""

import logging
import sys
from fractions import Fraction
from typing import Callable

import click
from pydantic import ValidationError

from . import settings
from .exceptions import InvariantSetError
from .experiments import ExperimentRunner
from .models import AmbientConfig, ExperimentSpec
from .rationality import RationalAngle
from .reporting import FORMATS, save_report

logger = logging.getLogger(__name__)


class FractionParam(click.ParamType):
    """Exact rational given as ``p/q``, an integer or a finite decimal"""

    name = "fraction"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value).strip().replace("−", "-"))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not an exact rational", param, ctx)


FRACTION = FractionParam()


def _execute(ctx: click.Context, kind: str, parameters: dict, action: Callable[[ExperimentRunner], object]):
    opts = ctx.obj
    try:
        spec = ExperimentSpec(
            kind=kind,
            parameters=parameters,
            seed=opts["seed"],
            samples=opts["samples"],
            workers=opts["workers"],
            config=AmbientConfig(n_tot=opts["n_tot"]),
        )
        report = action(ExperimentRunner(spec))
    except (InvariantSetError, ValidationError) as e:
        logger.error(f"❌ Rejected input: {e}")
        sys.exit(2)
    except Exception as e:
        logger.exception(f"❌ {kind} failed: {e}")
        sys.exit(1)

    text = save_report(report, opts["fmt"], opts["out"])
    if not opts["out"]:
        click.echo(text, nl=False)

    failures = report.failures
    if failures:
        logger.error(f"❌ {len(failures)} failing checks in {kind}")
        for row in failures:
            logger.error(f"   {row.section}: {row.quantity} ({row.detail})")
        if kind == "verify":
            sys.exit(1)
    else:
        logger.info(f"✅ {kind} finished: {len(report.rows)} rows")


@click.group()
@click.option('--n-tot', type=int, default=settings.DEFAULT_N_TOT, show_default=True, help='Universe bits (N = 2^n_tot)')
@click.option('--seed', type=int, default=settings.DEFAULT_SEED, show_default=True, help='Base RNG seed')
@click.option('--samples', type=int, default=settings.DEFAULT_SAMPLES, show_default=True, help='Monte-Carlo draws')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='table', show_default=True, help='Output format')
@click.option('--out', type=click.Path(dir_okay=False), help='Write the report to this file instead of stdout')
@click.option('--workers', type=int, default=settings.DEFAULT_WORKERS, show_default=True, help='Sampling threads')
@click.option('--log-file', default=settings.LOG_FILE, help='Also log to this file')
@click.option('--verbose', is_flag=True, help='Enable verbose logging')
@click.pass_context
def cli(ctx, **kwargs):
    """Exact laboratory for root families, n-lbits and definability tests"""
    settings.configure_logging(log_file=kwargs["log_file"], verbose=kwargs["verbose"])
    ctx.obj = kwargs


@cli.command()
@click.option('--inject-fault', is_flag=True, help='Flip one sign in E[N-1] to exercise failure reporting')
@click.pass_context
def verify(ctx, inject_fault):
    """Run every invariant suite and report pass/fail per check"""
    _execute(ctx, "verify", {"inject_fault": inject_fault}, lambda r: r.run_verify(inject_fault=inject_fault))


@cli.command("pow")
@click.option('--J', 'J', type=int, required=True, help='Circle coordinate 1..4M')
@click.option('--alpha', type=FRACTION, required=True, help='Dyadic exponent, e.g. 1/4')
@click.pass_context
def pow_(ctx, J, alpha):
    """Frequency, properties and direction of one fractional power"""
    _execute(ctx, "pow", {"J": J, "alpha": str(alpha)}, lambda r: r.run_pow(J, alpha))


@cli.command("sg-chain")
@click.option('--chain', default='+z,+x,+z', show_default=True, help='Comma-separated orientations from +x, -x, +z, -z')
@click.option('--toy-n-tot', type=click.IntRange(1, 2), default=2, show_default=True, help='Toy universe bits')
@click.pass_context
def sg_chain(ctx, chain, toy_n_tot):
    """Sequential Stern-Gerlach devices on the toy universe"""
    tokens = [t for t in chain.split(",") if t.strip()]
    _execute(ctx, "sg-chain", {}, lambda r: r.run_sg_chain(tokens, toy_n_tot=toy_n_tot))


@cli.command()
@click.option('--cos-ab', type=FRACTION, required=True, help='cos θ for the first setting')
@click.option('--cos-ab-prime', type=FRACTION, required=True, help="cos θ' for the second setting")
@click.pass_context
def bell(ctx, cos_ab, cos_ab_prime):
    """Correlations for two settings and definability of their difference"""
    parameters = {"cos_ab": str(cos_ab), "cos_ab_prime": str(cos_ab_prime)}
    _execute(ctx, "bell", parameters, lambda r: r.run_bell(cos_ab, cos_ab_prime))


@cli.command()
@click.option('--beta', type=FRACTION, multiple=True, required=True, help='β value, given three times')
@click.option('--alpha7', type=FRACTION, default='0', show_default=True, help='Exponent of the shared last operator')
@click.option('--j1', type=int, help='Shared circle coordinate (default 4M)')
@click.option('--j7', type=int, help='Coordinate of the last operator (default J1)')
@click.pass_context
def ghz(ctx, beta, alpha7, j1, j7):
    """Three-label frequencies and pairwise correlations"""
    parameters = {"betas": [str(b) for b in beta], "alpha7": str(alpha7), "J1": j1, "J7": j7}
    _execute(ctx, "ghz", parameters, lambda r: r.run_ghz(list(beta), alpha7=alpha7, J1=j1, J7=j7))


@cli.command()
@click.option('--omega', type=FRACTION, default='1', show_default=True, help='Rational frequency scale')
@click.option('--t-max', type=float, help='Last time to list (default: one period)')
@click.pass_context
def precession(ctx, omega, t_max):
    """Discrete times at which the precessing exponent is on the lattice"""
    parameters = {"omega": str(omega), "t_max": t_max}
    _execute(ctx, "precession", parameters, lambda r: r.run_precession(omega, t_max=t_max))


@cli.command()
@click.option('--m', type=int, required=True, help='Angle numerator (θ = π m/n)')
@click.option('--n', type=int, required=True, help='Angle denominator')
@click.option('--digits', type=click.IntRange(16, 1000), default=64, show_default=True, help='Digits for the numeric check')
@click.pass_context
def niven(ctx, m, n, digits):
    """Rationality of cos(π m/n) with orbit and numeric checks"""
    _execute(ctx, "niven", {"m": m, "n": n, "digits": digits}, lambda r: r.run_niven(m, n, digits=digits))


@cli.command()
@click.option('--c1', type=FRACTION, required=True, help='cos θ')
@click.option('--c2', type=FRACTION, required=True, help="cos θ'")
@click.option('--branch', type=click.Choice(['sum', 'difference']), default='sum', show_default=True)
@click.option('--angle', type=FRACTION, help='Triangle angle P as a multiple of π, e.g. 1/3')
@click.pass_context
def defined(ctx, c1, c2, branch, angle):
    """Definability of a composed cosine on the lattice"""
    parameters = {"c1": str(c1), "c2": str(c2), "branch": branch, "angle": None if angle is None else str(angle)}
    P = None if angle is None else RationalAngle(angle.numerator, angle.denominator)
    _execute(ctx, "defined", parameters, lambda r: r.run_defined(c1, c2, branch=branch, angle=P))


def main():
    cli(prog_name="invariant-set")


if __name__ == '__main__':
    main()
