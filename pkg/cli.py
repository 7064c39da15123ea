"""
Command-line front end: reduce, verify, solve, generate and inspect.

Exit codes: 0 PASS, 1 FAIL, 2 BUDGET, 3 INPUT.
"""

import functools
import logging
import sys
from fractions import Fraction
from pathlib import Path

import click

from config import Config
from csp import Csp2Instance, best_assignment, random_cnf, random_csp, threesat_to_2csp
from errors import (BudgetExceeded, IllegalEdge, InstanceFormatError, SizeOverflow, TooLarge,
                    ToolkitError)
from gf2codes import Unknown, mld_exact, snc_min_residual
from instance_files import (digest, emit_dimacs, emit_instance, kind_of, parse_instance, peek_header,
                            read_dimacs, read_instance, write_instance)
from latticecore import LvsInstance, SnvpInstance, SvpInstance, cvp_enum, lvs_no_check, svp_enum
from mdpchain import MdpInstance, mdp_amplify, mdp_exact, pick_gadget_params, snc_to_mdp
from mldchain import MldInstance, SncInstance, amplify, csp_to_mld, mld_to_snc
from scc import coordinate_repetition_gadget, scc_construct
from svpchain import (SvpChainParams, bch_center_sample, bch_lattice, csp_to_lvs, feasibility_report,
                      final_lattice, intermediate_lattice, lvs_amplify, lvs_to_snvp, svp_amplify_l2)
from verification import PIPELINES, Verdict, run_pipeline

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3

KIND_ALIASES = {"csp": "csp2"}
EDGES = {
    ("cnf", "csp2"), ("csp2", "mld"), ("mld", "mld"), ("mld", "snc"), ("snc", "mdp"), ("mdp", "mdp"),
    ("csp2", "lvs"), ("lvs", "lvs"), ("lvs", "snvp"), ("snvp", "svp"), ("svp", "svp"),
}
OVERRIDE_KEYS = ("h", "Q", "D", "rho", "r", "copies", "l")


class RationalType(click.ParamType):
    """Exact rational written as an integer or a/b."""

    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            self.fail(f"'{value}' is not a rational a/b", param, ctx)


RATIONAL = RationalType()


def parse_overrides(values) -> dict:
    overrides = {}
    for item in values:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or key not in OVERRIDE_KEYS:
            raise click.BadParameter(f"expected key=value with key in {', '.join(OVERRIDE_KEYS)}, got '{item}'",
                                     param_hint="--param-override")
        try:
            overrides[key] = int(raw.strip(), 0)
        except ValueError:
            raise click.BadParameter(f"'{raw}' is not an integer", param_hint="--param-override") from None
    return overrides


def ok(text: str, err: bool = False):
    click.secho(f"✓ {text}", fg="green", err=err)


def fail(text: str):
    click.secho(f"✗ {text}", fg="red", err=True)


def exits_with_codes(command):
    """Map toolkit errors to exit codes with a one-line message."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except BudgetExceeded as e:
            if e.report is not None:
                click.echo(e.report.to_text(), nl=False)
            fail(f"Budget exceeded: {e}")
            sys.exit(EXIT_BUDGET)
        except SizeOverflow as e:
            if e.report is not None:
                click.echo("\n".join(e.report.lines()))
            fail(f"Size overflow: {e}")
            sys.exit(EXIT_BUDGET)
        except TooLarge as e:
            fail(f"Too large: {e}")
            sys.exit(EXIT_BUDGET)
        except (ToolkitError, ValueError, OSError, click.BadParameter) as e:
            fail(f"Input error: {e}")
            sys.exit(EXIT_INPUT)

    return wrapper


def seed_option(f):
    return click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None,
                        help="64-bit seed (default: DEFAULT_SEED)")(f)


def budget_option(f):
    return click.option("--budget", type=click.IntRange(min=1), default=None,
                        help="Maximum enumeration candidates (default: ENUMERATION_BUDGET)")(f)


@click.group(context_settings=dict(help_option_names=["-h", "--help"], max_content_width=120))
@click.option("-v", "--verbose", is_flag=True, help="Log per-stage summaries")
@click.option("--debug", is_flag=True, help="Log matrix sizes and enumeration counts")
def cli(verbose, debug):
    """Parameterized hardness reductions with brute-force oracles."""
    level = None
    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    Config.validate()
    Config.configure_logging(level)


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------

def _reduce(kind_from, kind_to, source, opts, overrides, seed):
    if (kind_from, kind_to) == ("cnf", "csp2"):
        return threesat_to_2csp(source, opts["parts"], seed)
    if (kind_from, kind_to) == ("csp2", "mld"):
        return csp_to_mld(source, opts["eps"])[0]
    if (kind_from, kind_to) == ("mld", "mld"):
        return amplify(source, opts["gamma"], opts["target_gamma"], opts["eta"])
    if (kind_from, kind_to) == ("mld", "snc"):
        return mld_to_snc(source, opts["gamma"])
    if (kind_from, kind_to) == ("snc", "mdp"):
        q, t = source.a.cols, source.k
        if opts["gadget"] == "micro":
            g = coordinate_repetition_gadget(q, t, overrides.get("copies", 2 * t + 2), overrides.get("r", t + 1))
        else:
            g = scc_construct(q, t, opts["eps"])
        params = pick_gadget_params(opts["gamma"], opts["target_gamma"], g)
        return snc_to_mdp(source, params, g, seed)
    if (kind_from, kind_to) == ("mdp", "mdp"):
        return mdp_amplify(source, opts["steps"])
    if (kind_from, kind_to) == ("csp2", "lvs"):
        return csp_to_lvs(source, opts["eps"])
    if (kind_from, kind_to) == ("lvs", "lvs"):
        return lvs_amplify(source, opts["c"])
    if (kind_from, kind_to) == ("lvs", "snvp"):
        return lvs_to_snvp(source, opts["eta"], opts["p"])
    if (kind_from, kind_to) == ("snvp", "svp"):
        params = SvpChainParams.create(int(opts["p"]), opts["eta"], source.t, h=overrides.get("h"),
                                       q=overrides.get("Q"), d=overrides.get("D"), rho=overrides.get("rho"),
                                       require_gap=not overrides)
        report = feasibility_report(source, params)
        if opts["report_only"]:
            return report
        if params.h_override is None or not report.materializable:
            raise SizeOverflow("lattices at these parameters cannot be materialized; use --report-only "
                               "or --param-override h=...", report)
        gadget = bch_lattice(params.l, params.h_override, params.q_override)
        center, _ = bch_center_sample(gadget, params.r, seed)
        b_int = intermediate_lattice(source, params, center, gadget)
        return final_lattice(b_int, params, seed)
    if (kind_from, kind_to) == ("svp", "svp"):
        factor = overrides.get("l")
        if factor is None:
            bound = source.no_bound_pp
            factor = int(bound) if bound is not None and bound.denominator == 1 else 1
        return svp_amplify_l2(source, factor)
    raise IllegalEdge(kind_from, kind_to)


@cli.command()
@click.argument("kind_from")
@click.argument("kind_to")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", "output_path", type=click.Path(dir_okay=False, writable=True),
              help="Output instance file (default: stdout)")
@click.option("--eps", type=RATIONAL, default="1/4", show_default=True, help="2CSP soundness or SCC slack")
@click.option("--gamma", type=RATIONAL, default="2", show_default=True, help="Gap of the source instance")
@click.option("--target-gamma", type=RATIONAL, default="1", show_default=True, help="Gap of the target instance")
@click.option("--eta", type=RATIONAL, default="1", show_default=True,
              help="Amplification slack (mld -> mld) or row-deletion parameter")
@click.option("--p", "p", type=RATIONAL, default="2", show_default=True, help="Norm exponent")
@click.option("--c", "c", type=RATIONAL, default="1", show_default=True, help="LVS gap exponent")
@click.option("--steps", type=click.IntRange(min=1), default=1, show_default=True, help="MDP tensoring steps")
@click.option("--parts", type=click.IntRange(min=2), default=3, show_default=True, help="Parts for cnf -> csp2")
@click.option("--gadget", type=click.Choice(["micro", "bch"]), default="micro", show_default=True)
@click.option("--param-override", "param_override", multiple=True, metavar="KEY=VALUE",
              help=f"Override one of {', '.join(OVERRIDE_KEYS)}")
@click.option("--report-only", is_flag=True, help="Print the lattice feasibility report instead of building")
@seed_option
@exits_with_codes
def reduce(kind_from, kind_to, input_path, output_path, eps, gamma, target_gamma, eta, p, c, steps,
           parts, gadget, param_override, report_only, seed):
    """Apply one reduction edge KIND_FROM -> KIND_TO to an instance file."""
    kind_from = KIND_ALIASES.get(kind_from, kind_from)
    kind_to = KIND_ALIASES.get(kind_to, kind_to)
    if (kind_from, kind_to) not in EDGES:
        raise IllegalEdge(kind_from, kind_to)
    overrides = parse_overrides(param_override)
    seed = Config.DEFAULT_SEED if seed is None else seed
    source = read_dimacs(input_path) if kind_from == "cnf" else read_instance(input_path)
    if kind_from != "cnf" and kind_of(source) != kind_from:
        raise InstanceFormatError(f"file holds a '{kind_of(source)}' instance, not '{kind_from}'")
    opts = dict(eps=eps, gamma=gamma, target_gamma=target_gamma, eta=eta, p=p, c=c, steps=steps,
                parts=parts, gadget=gadget, report_only=report_only)
    result = _reduce(kind_from, kind_to, source, opts, overrides, seed)
    if report_only and kind_to == "svp":
        click.echo("\n".join(result.lines()))
        ok("Feasibility report (no lattice materialized)")
        return
    text = emit_instance(result)
    if output_path:
        write_instance(output_path, result)
    else:
        click.echo(text, nl=False)
    input_digest = "-" if kind_from == "cnf" else digest(source)
    ok(f"{kind_from} -> {kind_to}: in={input_digest[:16]} out={digest(result)[:16]}", err=output_path is None)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@cli.command()
@click.argument("pipeline", type=click.Choice(PIPELINES))
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seeds", type=click.IntRange(min=1), default=200, show_default=True, help="Seed sweep size")
@click.option("--eps", type=RATIONAL, default="1/4", show_default=True)
@click.option("--gamma", type=RATIONAL, default=None, help="SNC gap (default 1+eps/3, or 3 for mdp)")
@click.option("--target-gamma", type=RATIONAL, default="1", show_default=True, help="MDP gap")
@click.option("--eta", type=RATIONAL, default=None, help="LVS -> SNVP row-deletion parameter")
@click.option("--svp-eta", type=RATIONAL, default="24", show_default=True, help="SNVP -> SVP parameter η")
@click.option("--p", "p", type=RATIONAL, default="2", show_default=True)
@click.option("--gadget", type=click.Choice(["micro", "bch"]), default="micro", show_default=True)
@click.option("--gadget-eps", type=RATIONAL, default="1/2", show_default=True, help="Slack of the BCH gadget")
@click.option("--param-override", "param_override", multiple=True, metavar="KEY=VALUE")
@click.option("--report-only", is_flag=True)
@click.option("-o", "--output", "output_path", type=click.Path(dir_okay=False, writable=True),
              help="Also write the report to this file")
@seed_option
@budget_option
@exits_with_codes
def verify(pipeline, input_path, seeds, eps, gamma, target_gamma, eta, svp_eta, p, gadget, gadget_eps,
           param_override, report_only, output_path, seed, budget):
    """Run a named pipeline end to end and check every promise it makes."""
    source = read_instance(input_path)
    options = dict(eps=eps, mdp_gamma=target_gamma, gadget=gadget, gadget_eps=gadget_eps, p=p,
                   svp_eta=svp_eta, report_only=report_only)
    if gamma is not None:
        options["gamma"] = gamma
    if eta is not None:
        options["eta"] = eta
    options.update(parse_overrides(param_override))
    report = run_pipeline(pipeline, source, options, seeds, seed, budget)
    text = report.to_text()
    click.echo(text, nl=False)
    if output_path:
        Path(output_path).write_text(text, encoding="utf-8", newline="\n")
    if report.verdict is Verdict.PASS:
        ok(f"{pipeline}: PASS")
        return
    fail(f"{pipeline}: {report.verdict.value}")
    sys.exit(EXIT_BUDGET if report.verdict is Verdict.BUDGET else EXIT_FAIL)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _solve(instance, weight_cap, coeff_bound, budget):
    if isinstance(instance, Csp2Instance):
        psi, value = best_assignment(instance, budget)
        return [f"value: {value}", f"assignment: {' '.join(map(str, psi))}"]
    if isinstance(instance, MldInstance):
        x = mld_exact(instance.a, instance.y, instance.a.cols, budget)
        if x is None:
            return ["value: none (A x = y has no solution)"]
        return [f"value: {x.weight}", f"witness: {x}", f"yes: {x.weight <= instance.k}"]
    if isinstance(instance, SncInstance):
        residual, x = snc_min_residual(instance.a, instance.y, None, budget)
        return [f"value: {residual}", f"witness: {x}", f"yes: {residual <= instance.k}"]
    if isinstance(instance, MdpInstance):
        value, z = mdp_exact(instance, weight_cap, budget)
        if isinstance(value, Unknown):
            return [f"value: > {value.exceeds}"]
        return [f"value: {value}", f"witness: {z}", f"yes: {value <= instance.k}"]
    if isinstance(instance, LvsInstance):
        cap = instance.k if weight_cap is None else weight_cap
        no = lvs_no_check(instance, cap, budget)
        return [f"support cap: {cap}", f"multiple of y reachable: {not no}"]
    if isinstance(instance, SnvpInstance):
        value, x, exact = cvp_enum(instance, coeff_bound, budget)
        return [f"value: {value}", f"witness: {x}", f"exact: {exact}"]
    if isinstance(instance, SvpInstance):
        value, x, exact = svp_enum(instance.b, instance.p, coeff_bound, budget)
        return [f"value: {value}", f"witness: {x}", f"exact: {exact}", f"yes: {value <= instance.k_pp}"]
    raise InstanceFormatError(f"cannot solve {type(instance).__name__}")


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--weight-cap", type=click.IntRange(min=0), default=None, help="Cap for distance searches")
@click.option("--coeff-bound", type=click.IntRange(min=1), default=2, show_default=True,
              help="Coefficient box for lattice enumeration")
@budget_option
@exits_with_codes
def solve(input_path, weight_cap, coeff_bound, budget):
    """Run the exact oracle for the instance in INPUT_PATH."""
    instance = read_instance(input_path)
    click.echo(f"kind: {kind_of(instance)}")
    for line in _solve(instance, weight_cap, coeff_bound, Config.budget(budget)):
        click.echo(line)
    ok("Solved")


# ---------------------------------------------------------------------------
# generate / inspect
# ---------------------------------------------------------------------------

@cli.command()
@click.argument("kind", type=click.Choice(["csp2", "cnf"]))
@click.option("-o", "--output", "output_path", type=click.Path(dir_okay=False, writable=True), required=True)
@click.option("--vertices", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--alphabet", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--edges", type=click.IntRange(min=0), default=3, show_default=True)
@click.option("--density", type=click.FloatRange(0, 1), default=0.5, show_default=True)
@click.option("--vars", "num_vars", type=click.IntRange(min=1), default=6, show_default=True)
@click.option("--clauses", type=click.IntRange(min=0), default=6, show_default=True)
@click.option("--planted", is_flag=True, help="Plant a satisfying assignment")
@seed_option
@exits_with_codes
def generate(kind, output_path, vertices, alphabet, edges, density, num_vars, clauses, planted, seed):
    """Write a seeded random 2CSP instance or 3CNF formula."""
    seed = Config.DEFAULT_SEED if seed is None else seed
    if kind == "csp2":
        plant = tuple([0] * vertices) if planted else None
        instance = random_csp(vertices, alphabet, edges, density, seed, planted=plant)
        write_instance(output_path, instance)
        ok(f"csp2 with {instance.num_edges} edges written to {output_path}")
        return
    plant = tuple([True] * num_vars) if planted else None
    formula = random_cnf(num_vars, clauses, seed, planted=plant)
    Path(output_path).write_text(emit_dimacs(formula, [f"seed {seed}"]), encoding="utf-8", newline="\n")
    ok(f"cnf with {formula.num_clauses} clauses written to {output_path}")


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@exits_with_codes
def inspect(input_path):
    """Print the header and digest of an instance file."""
    text = Path(input_path).read_text(encoding="utf-8")
    instance = parse_instance(text)
    for key, value in peek_header(text).items():
        click.echo(f"{key}: {value}")
    click.echo(f"digest: {digest(instance)}")
    ok(f"{kind_of(instance)} instance is well-formed")
