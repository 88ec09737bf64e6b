"""wfext CLI entrypoint"""

import sys
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import click
import numpy as np
from click.core import ParameterSource
from dotenv import load_dotenv

from wfext.emitters import RunResult
from wfext.enums import OperatorKind, OutputFormat, Subcommand
from wfext.errors import ArgumentError, WfextError
from wfext.extension import global_extension, pathwise_extension
from wfext.factory import EmitterFactory
from wfext.hierarchy import (
    StratifiedFinalCondition,
    resolve_final_condition,
    solve_extended_kbe,
    stationary_solution,
    stem_check,
)
from wfext.logging import logger
from wfext.oracle import MCConfig, mc_backward_estimate, pde_residual
from wfext.polyalg import DEFAULT_MAX_DEGREE, MultiPoly, simplify
from wfext.simplex import MAX_N, Face, PathSpec, SimplexPoint, all_faces, sample_interior
from wfext.spectral import eigenpairs, proper_basis, proper_solution, vertex_solution
from wfext.utils.io import load_config, load_final_condition, write_output

USAGE_EXIT = 1
COMPUTATION_EXIT = 2
Z_FLAG = 3.0
RESIDUAL_MARGIN = 10


class ConfigError(click.UsageError):
    """A configuration value that cannot reach the core modules"""


@dataclass(frozen=True)
class RunConfig:
    """A validated subcommand invocation"""

    subcommand: Subcommand
    n: int
    degree: int
    output_format: OutputFormat = OutputFormat.CSV
    output: str = "-"
    seed: int = 0
    threads: int = 1
    face: Optional[Face] = None
    path: Optional[PathSpec] = None
    final_condition: Optional[StratifiedFinalCondition] = None
    options: dict = field(default_factory=dict)


class WfextGroup(click.Group):
    """Maps usage errors to exit status 1 and computation errors to 2"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            return super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as exc:
            exc.show()
            sys.exit(USAGE_EXIT)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(USAGE_EXIT)
        except WfextError as exc:
            logger.error("Computation failed", error=str(exc), error_type=type(exc).__name__)
            click.echo(f"Error: {exc}", err=True)
            sys.exit(COMPUTATION_EXIT)


@click.group(cls=WfextGroup)
def cli():
    """wfext solves the backward Kolmogorov equation of the n-allele Wright–Fisher
    model on the simplex and all of its boundary faces, and checks the result
    against a discrete Monte Carlo simulation.

    Available subcommands: [eigen, solve, extend, stationary, mc-check, residual]
    """
    load_dotenv()


def common_options(fn: Callable) -> Callable:
    """Options shared by every subcommand"""
    options = [
        click.option(
            "-a",
            "--alleles",
            type=click.IntRange(2, MAX_N + 1),
            help="Number of alleles n + 1 (at least 2)",
        ),
        click.option(
            "-d",
            "--degree",
            type=click.IntRange(0, DEFAULT_MAX_DEGREE),
            default=6,
            show_default=True,
            help="Truncation degree D of the spectral basis",
        ),
        click.option(
            "-c",
            "--config",
            type=click.Path(exists=True, dir_okay=False),
            help="YAML file with option values; command-line flags win",
        ),
        click.option(
            "-f",
            "--format",
            "output_format",
            type=click.Choice([f.value for f in OutputFormat]),
            default=OutputFormat.CSV.value,
            show_default=True,
            help="Output format",
        ),
        click.option("-o", "--output", default="-", show_default=True, help="Output file, '-' for standard output"),
        click.option("--seed", type=click.INT, default=0, envvar="WFEXT_SEED", show_default=True, help="Random seed"),
        click.option(
            "--threads",
            type=click.IntRange(min=1),
            default=1,
            envvar="WFEXT_THREADS",
            show_default=True,
            help="Worker threads for path enumeration and Monte Carlo stream blocks",
        ),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _labels(text: str, name: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"Option '{name}' expects comma-separated integers, got {text!r}.")


def _numbers(text: str, name: str, kind: Callable = float) -> tuple:
    try:
        return tuple(kind(part.strip()) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"Option '{name}' expects comma-separated numbers, got {text!r}.")


def _merge_config_file(ctx: click.Context, params: dict, path: str) -> dict:
    """Fill parameters from a YAML file unless they were set by flag or environment"""
    document = load_config(path)
    if not isinstance(document, dict):
        raise ConfigError(f"Config file {path} must hold a mapping of option names to values.")
    by_name = {param.name: param for param in ctx.command.params}
    for key, value in document.items():
        name = str(key).replace("-", "_")
        if name == "format":
            name = "output_format"
        if name not in by_name or name == "config":
            raise ConfigError(f"Config file {path} sets unknown option '{key}' for '{ctx.info_name}'.")
        source = ctx.get_parameter_source(name)
        if source in (ParameterSource.COMMANDLINE, ParameterSource.ENVIRONMENT):
            logger.warning("Flag overrides config file value", option=name, config_file=path)
            continue
        if isinstance(value, (list, tuple)):
            value = ",".join(str(item) for item in value)
        params[name] = by_name[name].type_cast_value(ctx, value)
    return params


def _require(params: dict, name: str, flag: str):
    value = params.get(name)
    if value is None:
        raise ConfigError(f"Missing option '{flag}'.")
    return value


def _final_condition(params: dict, n: int) -> StratifiedFinalCondition:
    path = _require(params, "final", "--final")
    try:
        return load_final_condition(path, n)
    except (ArgumentError, KeyError, TypeError) as exc:
        raise ConfigError(f"Final condition {path}: {exc}")
    except OSError as exc:
        raise ConfigError(f"Cannot read final condition {path}: {exc.strerror}.")


def build_run_config(ctx: click.Context) -> RunConfig:
    """Merge the config file into the parsed parameters and validate selectors"""
    params = dict(ctx.params)
    config_path = params.pop("config", None)
    if config_path:
        params = _merge_config_file(ctx, params, config_path)
    subcommand = Subcommand(ctx.info_name)
    n = _require(params, "alleles", "--alleles") - 1
    degree = params["degree"]
    face = path = final = None
    options: dict = {}
    try:
        if subcommand is Subcommand.EIGEN:
            face = Face(_labels(params["face"], "--face"), n) if params.get("face") else Face.full(n)
            options["operator"] = OperatorKind(params["operator"])
        elif subcommand is Subcommand.SOLVE:
            final = _final_condition(params, n)
            options["times"] = _numbers(params["times"], "--times")
            if any(t > 0 for t in options["times"]):
                raise ConfigError("Option '--times' takes times t <= 0.")
        elif subcommand is Subcommand.EXTEND:
            face = Face(_labels(params["base"], "--base"), n)
            anchor = params.get("anchor")
            anchor = face.indices[0] if anchor is None else anchor
            if params.get("path") and not params.get("global_"):
                path = PathSpec(face, anchor, _labels(params["path"], "--path"))
            elif params.get("path"):
                raise ConfigError("Options '--path' and '--global' are mutually exclusive.")
            if params.get("poly") is not None:
                options["poly"] = MultiPoly.from_text(face, params["poly"])
            elif params.get("final") is not None:
                options["poly"] = _final_condition(params, n).explicit(face)
            else:
                raise ConfigError("Option '--poly' or '--final' is needed for the base face.")
        elif subcommand is Subcommand.STATIONARY:
            values = _numbers(_require(params, "vertex_values", "--vertex-values"), "--vertex-values", Fraction)
            if len(values) != n + 1:
                raise ConfigError(f"Option '--vertex-values' needs {n + 1} values, got {len(values)}.")
            options["vertex_values"] = values
        elif subcommand is Subcommand.MC_CHECK:
            final = _final_condition(params, n)
            p0 = params.get("p0")
            if p0:
                point = SimplexPoint(Face.full(n), _numbers(p0, "--p0"))
            else:
                point = SimplexPoint.barycenter(Face.full(n))
            options.update(
                p0=point,
                pop_size=params["pop_size"],
                horizon=params["horizon"],
                reps=params["reps"],
                bias_check=params["bias_check"],
            )
        elif subcommand is Subcommand.RESIDUAL:
            final = _final_condition(params, n)
            options.update(t=params["t"], h=params["h"], points=params["points"])
    except ArgumentError as exc:
        raise ConfigError(str(exc))
    return RunConfig(
        subcommand=subcommand,
        n=n,
        degree=degree,
        output_format=OutputFormat(params["output_format"]),
        output=params["output"],
        seed=params["seed"],
        threads=params["threads"],
        face=face,
        path=path,
        final_condition=final,
        options=options,
    )


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse a subcommand invocation without running it"""
    args = list(argv)
    if not args:
        raise ConfigError("No subcommand given.")
    load_dotenv()
    parent = click.Context(cli, info_name="wfext")
    command = cli.get_command(parent, args[0])
    if command is None:
        raise ConfigError(f"No such subcommand '{args[0]}'.")
    with command.make_context(args[0], args[1:], parent=parent) as ctx:
        return build_run_config(ctx)


def _run_eigen(cfg: RunConfig) -> RunResult:
    kind = cfg.options["operator"]
    if kind is OperatorKind.BACKWARD:
        pairs = proper_basis(cfg.face, cfg.degree)
    else:
        pairs = eigenpairs(cfg.face, cfg.degree, kind)
    rows = [(str(cfg.face), pair.kappa, pair.degree, pair.eigenfunction.to_text()) for pair in pairs]
    document = {
        "face": cfg.face.to_json(),
        "operator": kind.value,
        "degree": cfg.degree,
        "eigenpairs": [{"kappa": str(k), "degree": m, "eigenfunction": text} for _, k, m, text in rows],
    }
    return RunResult(document, ("face", "kappa", "degree", "eigenfunction"), rows)


def _run_solve(cfg: RunConfig) -> RunResult:
    solution = solve_extended_kbe(cfg.final_condition, cfg.degree, cfg.threads)
    rows = []
    values = []
    for face in all_faces(cfg.n):
        point = SimplexPoint.barycenter(face)
        text = ";".join(repr(point.coordinate(label)) for label in range(cfg.n + 1))
        for t in cfg.options["times"]:
            value = solution.evaluate(point, t)
            rows.append((str(face), text, t, value))
            values.append({"face": face.to_json(), "point": point.to_json(), "t": t, "value": value})
    document = {"solution": solution.to_document(), "values": values}
    return RunResult(document, ("face", "point", "t", "value"), rows)


def _run_extend(cfg: RunConfig) -> RunResult:
    base = cfg.face
    poly = cfg.options["poly"]
    if base.is_vertex:
        if poly.face != base or not poly.is_constant():
            raise ArgumentError(f"The condition on vertex {base} must be a constant, got {poly.to_text()}.")
        u = vertex_solution(base, poly.constant_term)
    else:
        u = proper_solution(poly, base, cfg.degree)
    if cfg.path is not None:
        extension = pathwise_extension(u, cfg.path)
    else:
        extension = global_extension(u, base, cfg.n, cfg.threads)
    merged = extension.merged()
    rows = [
        (str(face), mode.kappa, mode.coeff, mode.expr.to_text())
        for face in merged.faces()
        for mode in merged.pieces[face]
    ]
    document = {
        "base": base.to_json(),
        "path": list(cfg.path.sequence) if cfg.path is not None else None,
        "pieces": merged.to_document(),
        "mode_defects": [face.to_json() for face in extension.mode_defects()],
    }
    return RunResult(document, ("face", "kappa", "coeff", "expression"), rows)


def _run_stationary(cfg: RunConfig) -> RunResult:
    values = dict(enumerate(cfg.options["vertex_values"]))
    solution = stationary_solution(values, cfg.n)
    report = stem_check(solution)
    total = solution.total
    rows = []
    for face in all_faces(cfg.n):
        text = simplify(total.snapshot(face)).barycentric_text()
        check = "" if face.is_vertex else ("pass" if report.results[face] else "fail")
        rows.append((str(face), text, check))
    document = {
        "solution": [{"face": face, "expression": text} for face, text, _ in rows],
        "stem_check": report.to_document(),
    }
    return RunResult(document, ("face", "solution", "stem_check"), rows)


def _run_mc_check(cfg: RunConfig) -> RunResult:
    options = cfg.options
    solution = solve_extended_kbe(cfg.final_condition, cfg.degree, cfg.threads)
    analytic = solution.evaluate(options["p0"], -options["horizon"])
    target = resolve_final_condition(cfg.final_condition, solution)
    sizes = [options["pop_size"]]
    if options["bias_check"]:
        sizes.append(4 * options["pop_size"])
    rows = []
    absorbed = {}
    for pop_size in sizes:
        mc = MCConfig(pop_size, options["p0"], options["horizon"], options["reps"], cfg.seed)
        estimate = mc_backward_estimate(target, mc, cfg.threads)
        z = estimate.z_score(analytic)
        rows.append((pop_size, mc.generations, estimate.mean, estimate.standard_error, analytic, z, abs(z) > Z_FLAG))
        absorbed[str(pop_size)] = {str(d): fraction for d, fraction in estimate.fraction_by_dimension().items()}
    columns = ("pop_size", "generations", "estimate", "stderr", "analytic", "z_score", "flagged")
    document = {
        "p0": options["p0"].to_json(),
        "horizon": options["horizon"],
        "replicates": options["reps"],
        "rows": [dict(zip(columns, row)) for row in rows],
        "absorbed_fraction_by_dimension": absorbed,
    }
    return RunResult(document, columns, rows)


def _residual_points(face: Face, count: int, margin: float, rng: np.random.Generator) -> list[SimplexPoint]:
    points = []
    for _ in range(100 * count):
        point = sample_interior(face, rng)
        if min(point.coords) > margin:
            points.append(point)
            if len(points) == count:
                return points
    raise ArgumentError(f"Step {margin / RESIDUAL_MARGIN} is too large to probe face {face}.")


def _run_residual(cfg: RunConfig) -> RunResult:
    options = cfg.options
    solution = solve_extended_kbe(cfg.final_condition, cfg.degree, cfg.threads)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for face in all_faces(cfg.n):
        if face.is_vertex:
            continue
        points = _residual_points(face, options["points"], RESIDUAL_MARGIN * options["h"], rng)
        worst = max(abs(pde_residual(solution, point, options["t"], options["h"])) for point in points)
        rows.append((str(face), len(points), worst))
    document = {
        "t": options["t"],
        "h": options["h"],
        "faces": [{"face": face, "points": count, "max_residual": worst} for face, count, worst in rows],
    }
    return RunResult(document, ("face", "points", "max_residual"), rows)


_HANDLERS = {
    Subcommand.EIGEN: _run_eigen,
    Subcommand.SOLVE: _run_solve,
    Subcommand.EXTEND: _run_extend,
    Subcommand.STATIONARY: _run_stationary,
    Subcommand.MC_CHECK: _run_mc_check,
    Subcommand.RESIDUAL: _run_residual,
}


def run(cfg: RunConfig) -> RunResult:
    """Dispatch a validated config to its subcommand"""
    logger.debug("Running subcommand", subcommand=cfg.subcommand.value, n=cfg.n, degree=cfg.degree)
    return _HANDLERS[cfg.subcommand](cfg)


def _execute():
    cfg = build_run_config(click.get_current_context())
    result = run(cfg)
    emitter = EmitterFactory.get_emitter(format=cfg.output_format, logger=logger)
    write_output(emitter.render(result), cfg.output)


@click.command()
@common_options
@click.option("--face", "face", type=click.STRING, help="Face labels, e.g. 0,2 (default: the whole simplex)")
@click.option(
    "--operator",
    type=click.Choice([k.value for k in OperatorKind]),
    default=OperatorKind.BACKWARD.value,
    show_default=True,
    help="backward: proper eigenbasis of L*; forward: eigenpairs of L",
)
def eigen(**_params):
    """Lists the eigenvalues and eigenfunctions on a face up to the truncation degree.

    Ex: wfext eigen --alleles 2 --degree 5
    """
    _execute()


@click.command()
@common_options
@click.option("--final", type=click.Path(exists=True, dir_okay=False), help="Final-condition JSON document")
@click.option("--times", default="-1", show_default=True, help="Comma-separated times t <= 0")
def solve(**_params):
    """Solves the extended backward equation and evaluates it at every face barycenter.

    Ex: wfext solve --alleles 3 --degree 8 --final fc.json
    """
    _execute()


@click.command()
@common_options
@click.option("--base", default="0", show_default=True, help="Base face labels")
@click.option("--anchor", type=click.INT, help="Anchor label in the base face (default: smallest)")
@click.option("--path", "path", help="Labels added along the path, in order; omit for the global extension")
@click.option("--global", "global_", is_flag=True, help="Average over all paths (the default without --path)")
@click.option("--poly", help="Base-face polynomial, e.g. '1' or '1 * p1 + -1 * p1^2'")
@click.option("--final", type=click.Path(exists=True, dir_okay=False), help="Take the base polynomial from a final-condition document")
def extend(**_params):
    """Extends a base-face solution along one path or globally.

    Examples:\n
    1. wfext extend --alleles 3 --base 0 --path 1,2 --poly 1\n
    2. wfext extend --alleles 3 --base 0,1 --global --poly '1 * p1 + -1 * p1^2'\n
    """
    _execute()


@click.command()
@common_options
@click.option("--vertex-values", help="Final values at the vertices e_0, ..., e_n")
def stationary(**_params):
    """Builds the time-independent solution from vertex values and checks L* U = 0 on every face.

    Ex: wfext stationary --alleles 3 --vertex-values 1,0,0
    """
    _execute()


@click.command(name="mc-check")
@common_options
@click.option("--pop-size", type=click.IntRange(min=2), default=500, show_default=True, help="Population size N")
@click.option("--horizon", type=click.FloatRange(min=0), default=1.0, show_default=True, help="Diffusion time |t|")
@click.option("--reps", type=click.IntRange(min=1), default=10000, show_default=True, help="Replicates")
@click.option("--p0", help="Start frequencies p^0, ..., p^n (default: barycenter)")
@click.option("--final", type=click.Path(exists=True, dir_okay=False), help="Final-condition JSON document")
@click.option("--bias-check", is_flag=True, help="Add a second run at population size 4N")
def mc_check(**_params):
    """Compares the solution at (p0, -horizon) with a discrete Wright–Fisher Monte Carlo estimate.
    Rows with |z| > 3 are flagged, the exit status stays 0.

    Ex: wfext mc-check --alleles 2 --final fc.json --pop-size 500 --reps 100000
    """
    _execute()


@click.command()
@common_options
@click.option("--final", type=click.Path(exists=True, dir_okay=False), help="Final-condition JSON document")
@click.option("--t", "t", type=click.FloatRange(max=0), default=-0.5, show_default=True, help="Time t <= 0")
@click.option("--h", "h", type=click.FloatRange(min=0, min_open=True), default=1e-4, show_default=True, help="Stencil width")
@click.option("--points", type=click.IntRange(min=1), default=50, show_default=True, help="Interior points per face")
def residual(**_params):
    """Reports the largest finite-difference residual of the solution on every face.

    Ex: wfext residual --alleles 3 --final fc.json --t -0.5 --h 1e-4
    """
    _execute()


cli.add_command(eigen)
cli.add_command(solve)
cli.add_command(extend)
cli.add_command(stationary)
cli.add_command(mc_check)
cli.add_command(residual)

if __name__ == "__main__":
    cli()
