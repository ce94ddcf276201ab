"""Command-line interface for multicontract.

ARCHITECTURE:
    CLI Commands → load/generate instance → ContractionEngine / harness → JSON on stdout

Five workflows: validate (instance file), certify (classes), iterate (Picard trace),
theorem (single check or sweep), gen (instance from a generator config)

Key Design:
- Typer framework for auto-help and type validation
- asyncio.run() bridges sync CLI → async engine
- Strict JSON on stdout (non-finite constants as "Infinity" strings); decorated
  tables on stderr only when it is a terminal
- Exit codes: 0 ok, 1 I/O or parse error, 2 invariant/precondition failure, 3 counterexample
"""

import asyncio
import json
import logging
import math
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Optional

import typer
from dotenv import load_dotenv
from pydantic import ValidationError

from multicontract.certification import rearranged_inequality_holds
from multicontract.config import get_settings
from multicontract.engine import ContractionEngine
from multicontract.errors import MulticontractError, PreconditionError
from multicontract.generators import generate_instance
from multicontract.iteration import attach_bounds
from multicontract.models.certificate import ChatterjeaDomain, ClassRequest, ContractionClass
from multicontract.models.trace import PolicyKind, SelectionPolicy
from multicontract.models.validation import TheoremId, ValidationOptions, Verdict
from multicontract.validation.harness import TheoremValidator, load_gen_config, load_instance

load_dotenv()

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="multicontract",
    help="Certify multivalued contraction classes on finite metric spaces",
    add_completion=False,
)

EXIT_IO = 1
EXIT_INVALID = 2
EXIT_COUNTEREXAMPLE = 3


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except (OSError, UnicodeDecodeError, json.JSONDecodeError, ValidationError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(EXIT_IO)
    except MulticontractError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(EXIT_INVALID)


def _strict(data: Any) -> Any:
    """Swap non-finite floats for the strings "Infinity", "-Infinity" and "NaN"."""
    if isinstance(data, float) and not math.isfinite(data):
        return "NaN" if math.isnan(data) else ("Infinity" if data > 0 else "-Infinity")
    if isinstance(data, dict):
        return {k: _strict(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [_strict(v) for v in data]
    return data


def _emit(data: Any, report: str | None = None) -> None:
    typer.echo(json.dumps(_strict(data), indent=2, allow_nan=False))
    if report and sys.stderr.isatty():
        typer.echo(report, err=True)


def _workers(workers: Optional[int]) -> int:
    return workers or get_settings().resolved_workers()


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress at INFO level"),
) -> None:
    level = logging.INFO if verbose else get_settings().log_level.upper()
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


@app.command()
def validate(
    path: Path = typer.Argument(..., help="Instance JSON file"),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Comparison slack"),
) -> None:
    """Check that an instance file holds a valid metric space and self-map."""
    with _exit_codes():
        instance = load_instance(path, tolerance)

    space = instance.space
    _emit(
        {
            "valid": True,
            "point_count": space.point_count,
            "map_kind": instance.map_kind,
            "integral": space.is_integral,
        },
        f"{path}: valid {space.point_count}-point instance ({instance.map_kind}-valued map)",
    )


@app.command()
def certify(
    path: Path = typer.Argument(..., help="Instance JSON file"),
    classes: Optional[list[ContractionClass]] = typer.Option(
        None, "--class", "-c", help="Class to certify (repeatable); default all"
    ),
    n: Optional[int] = typer.Option(None, "--n", help="Order n for total_pairwise"),
    chatterjea_domain: ChatterjeaDomain = typer.Option(
        ChatterjeaDomain.RESTRICTED, "--chatterjea-domain", help="Pair domain for chatterjea"
    ),
    include_degenerate: bool = typer.Option(
        False, "--include-degenerate", help="Perimeter scan over triples with repeats"
    ),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Comparison slack"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes"),
) -> None:
    """Certify the instance's map into one or more contraction classes."""
    if not classes:
        classes = [c for c in ContractionClass if c is not ContractionClass.TOTAL_PAIRWISE or n]

    async def run_certify() -> None:
        requests = [
            ClassRequest(
                class_id=c,
                order=n if c is ContractionClass.TOTAL_PAIRWISE else None,
                include_degenerate=include_degenerate and c is ContractionClass.PERIMETER,
                chatterjea_domain=chatterjea_domain,
            )
            for c in classes
        ]
        instance = load_instance(path, tolerance)
        async with ContractionEngine(workers=_workers(workers)) as engine:
            certificates = await engine.certify_many(
                instance.space, instance.multimap, requests, tolerance
            )
        _emit(
            [c.to_json_dict() for c in certificates],
            "\n".join(c.to_report() for c in certificates),
        )

    with _exit_codes():
        asyncio.run(run_certify())


@app.command()
def iterate(
    path: Path = typer.Argument(..., help="Instance JSON file"),
    x0: int = typer.Option(0, "--x0", help="Starting point index"),
    policy: PolicyKind = typer.Option(PolicyKind.FIRST_INDEX, "--policy", "-p"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for seeded_random"),
    max_steps: Optional[int] = typer.Option(None, "--max-steps", help="Step budget"),
    bounds: Optional[ContractionClass] = typer.Option(
        None, "--bounds", help="Attach a priori bounds for this certified class"
    ),
    n: Optional[int] = typer.Option(None, "--n", help="Order n when --bounds total_pairwise"),
    conservative: bool = typer.Option(
        False, "--conservative", help="Use the conservative Kannan rate"
    ),
    chatterjea_domain: ChatterjeaDomain = typer.Option(
        ChatterjeaDomain.RESTRICTED, "--chatterjea-domain"
    ),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Comparison slack"),
) -> None:
    """Run Picard iteration from x0 and report the trace."""

    async def run_iterate() -> None:
        instance = load_instance(path, tolerance)
        space, T = instance.space, instance.multimap
        selection = SelectionPolicy(
            kind=policy, seed=seed if policy is PolicyKind.SEEDED_RANDOM else None
        )
        async with ContractionEngine(workers=1) as engine:
            (trace,) = await engine.iterate_many(space, T, [x0], selection, max_steps)
            if bounds is not None:
                request = ClassRequest(
                    class_id=bounds, order=n, chatterjea_domain=chatterjea_domain
                )
                certificate = await engine.certify(space, T, request, tolerance)
                if not certificate.certified:
                    raise PreconditionError(
                        f"{certificate.label} is not certified (tightest {certificate.tightest})"
                    )
                trace = attach_bounds(
                    space, T, trace, certificate, conservative=conservative, tolerance=tolerance
                )
                if bounds in (ContractionClass.KANNAN, ContractionClass.CHATTERJEA):
                    assert certificate.tightest is not None
                    if not rearranged_inequality_holds(
                        space, T, bounds, certificate.tightest,
                        chatterjea_domain=chatterjea_domain, tolerance=tolerance,
                    ):
                        logger.warning(f"rearranged {bounds.value} inequality fails at the tightest constant")
        _emit(trace.model_dump(mode="json"), trace.to_report())

    with _exit_codes():
        asyncio.run(run_iterate())


@app.command()
def theorem(
    theorem_id: TheoremId = typer.Argument(..., help="Result to validate"),
    instance_path: Optional[Path] = typer.Option(
        None, "--instance", "-i", help="Validate a single instance file"
    ),
    config_path: Optional[Path] = typer.Option(
        None, "--config", help="Generator config JSON for a sweep"
    ),
    count: int = typer.Option(100, "--count", help="Instances in a sweep"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Sweep seed (default: config seed)"),
    n: Optional[int] = typer.Option(None, "--n", help="Total pairwise order for T3_5/P3_3/P3_4"),
    upper: int = typer.Option(4, "--upper", help="Highest order checked by P3_4"),
    chatterjea_domain: ChatterjeaDomain = typer.Option(
        ChatterjeaDomain.RESTRICTED, "--chatterjea-domain"
    ),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Comparison slack"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes"),
    output: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the summary here"),
) -> None:
    """Validate a theorem on one instance or sweep it over generated instances."""
    if (instance_path is None) == (config_path is None):
        typer.echo("Error: pass exactly one of --instance or --config", err=True)
        raise typer.Exit(EXIT_IO)

    with _exit_codes():
        options = ValidationOptions(
            n=n, upper=upper, chatterjea_domain=chatterjea_domain, tolerance=tolerance
        )

    async def run_theorem() -> bool:
        async with ContractionEngine(workers=_workers(workers)) as engine:
            validator = TheoremValidator(engine)

            if instance_path is not None:
                instance = load_instance(instance_path, tolerance)
                report = await validator.validate_instance(instance, theorem_id, options)
                if output:
                    output.write_text(report.model_dump_json(by_alias=True, indent=2))
                _emit(report.to_json_dict(), f"{theorem_id.value}: {report.verdict.value}")
                return report.verdict is Verdict.COUNTEREXAMPLE

            assert config_path is not None
            config = load_gen_config(config_path)
            summary = await validator.sweep(config, theorem_id, count, seed, options)
            if output:
                validator.save_summary(summary, output)
            _emit(summary.to_json_dict(), summary.to_report())
            return summary.counterexamples > 0

    with _exit_codes():
        found = asyncio.run(run_theorem())
    if found:
        raise typer.Exit(EXIT_COUNTEREXAMPLE)


@app.command()
def gen(
    config_path: Path = typer.Argument(..., help="Generator config JSON"),
    output: Path = typer.Option(..., "--out", "-o", help="Instance file to write"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the config seed"),
) -> None:
    """Generate one instance file from a generator config."""
    with _exit_codes():
        config = load_gen_config(config_path)
        instance = generate_instance(config, seed)
        output.write_text(json.dumps(instance.to_json_dict(), indent=2) + "\n", encoding="utf-8")
    typer.echo(str(output))


@app.command()
def version() -> None:
    """Show version information."""
    from multicontract import __version__

    typer.echo(f"multicontract version {__version__}")


if __name__ == "__main__":
    app()
