"""CLI entry point for the GPT circuit workbench."""

from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional

import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .errors import CircuitParseError, GPTCircuitError
from .report import Report, Status
from .utils.config import Config
from .utils.logging import setup_logging
from .workbench import CircuitWorkbench

app = typer.Typer(
    name="gpt-circuits",
    help="GPT circuit workbench - foliate, evaluate and check operational circuits",
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)

USAGE_ERROR = 2

STATUS_STYLE = {
    Status.PASS: "green",
    Status.FAIL: "red",
    Status.NOT_APPLICABLE: "yellow",
}


class Suite(str, Enum):
    FOLIATION = "foliation"
    THEOREMS = "theorems"
    ORACLES = "oracles"
    ALL = "all"


def get_workbench() -> CircuitWorkbench:
    """Get configured CircuitWorkbench instance."""
    with usage_errors():
        config = Config.load()
    setup_logging(config.log_level)
    problems = config.validate()
    if problems:
        for problem in problems:
            err_console.print(f"[red]Config error:[/red] {escape(problem)}")
        raise typer.Exit(USAGE_ERROR)
    return CircuitWorkbench(config)


@contextmanager
def usage_errors(path: Optional[Path] = None) -> Iterator[None]:
    """Turn parse and input errors into diagnostics on stderr and exit code 2."""
    prefix = f"{path}:" if path is not None else ""
    try:
        yield
    except CircuitParseError as exc:
        for diagnostic in exc.diagnostics:
            err_console.print(
                f"{escape(prefix)}{diagnostic.line}:{diagnostic.column}: "
                f"{escape(diagnostic.message)} [dim]\\[{escape(diagnostic.code)}][/dim]"
            )
        raise typer.Exit(USAGE_ERROR)
    except (GPTCircuitError, OSError) as exc:
        message = f"{path}: {exc}" if path is not None else str(exc)
        err_console.print(f"[red]Error:[/red] {escape(message)}")
        raise typer.Exit(USAGE_ERROR)


def finish(report: Report, as_json: bool, timings: bool) -> None:
    """Print the report's checks (or JSON) and exit with its code."""
    if as_json:
        typer.echo(report.to_json(include_runtime=timings))
    elif report.checks:
        table = Table(title="Checks")
        table.add_column("Check", style="cyan")
        table.add_column("Status")
        table.add_column("Details")
        if timings:
            table.add_column("Runtime (s)", justify="right")
        for check in report.checks:
            style = STATUS_STYLE[check.status]
            row = [escape(check.name), f"[{style}]{check.status.value}[/{style}]", escape(check.details)]
            if timings:
                row.append(f"{check.runtime_s:.3f}")
            table.add_row(*row)
        console.print(table)
    raise typer.Exit(report.exit_code)


@app.command()
def validate(
    path: Path = typer.Argument(..., help="Circuit document (.gptc or .json)"),
    as_json: bool = typer.Option(False, "--json", help="Print a JSON report"),
    timings: bool = typer.Option(False, "--timings", help="Include runtimes"),
) -> None:
    """Parse and validate a circuit document."""
    workbench = get_workbench()
    with usage_errors(path):
        report = workbench.validate(path, command=["validate", str(path)])
    if not as_json:
        values = report.values
        kind = "closed circuit" if values["closed"] else "fragment"
        console.print(
            f"[green]Valid:[/green] {escape(str(path))} "
            f"({values['theory']} {kind}, {values['operations']} operations, {values['wires']} wires)"
        )
    finish(report, as_json, timings)


@app.command()
def foliate(
    path: Path = typer.Argument(..., help="Circuit document (.gptc or .json)"),
    all_foliations: bool = typer.Option(False, "--all", help="List every complete foliation"),
    limit: Optional[int] = typer.Option(None, "--limit", min=1, help="Most foliations to list"),
    as_json: bool = typer.Option(False, "--json", help="Print a JSON report"),
    timings: bool = typer.Option(False, "--timings", help="Include runtimes"),
) -> None:
    """Print a complete foliation of a closed circuit, or all of them."""
    command = ["foliate", str(path)] + (["--all"] if all_foliations else [])
    if limit is not None:
        command += ["--limit", str(limit)]
    workbench = get_workbench()
    with usage_errors(path):
        report = workbench.foliate(path, all_foliations, limit, command=command)
    if not as_json:
        table = Table(title=f"{report.values['count']} complete foliation(s)")
        table.add_column("#", style="cyan", justify="right")
        table.add_column("Hypersurfaces", style="green")
        for index, foliation in enumerate(report.values["foliations"]):
            surfaces = " -> ".join("{" + ", ".join(h) + "}" for h in foliation)
            table.add_row(str(index), escape(surfaces))
        console.print(table)
    finish(report, as_json, timings)


@app.command("eval")
def evaluate(
    path: Path = typer.Argument(..., help="Circuit document (.gptc or .json)"),
    outcomes: Optional[str] = typer.Option(None, "--outcomes", help="Outcomes as op=tok,op2=tok|tok"),
    foliation: Optional[int] = typer.Option(None, "--foliation", min=0, help="Evaluate along foliation k"),
    as_json: bool = typer.Option(False, "--json", help="Print a JSON report"),
    timings: bool = typer.Option(False, "--timings", help="Include runtimes"),
) -> None:
    """Evaluate the probability of a closed circuit."""
    command = ["eval", str(path)]
    if outcomes is not None:
        command += ["--outcomes", outcomes]
    if foliation is not None:
        command += ["--foliation", str(foliation)]
    workbench = get_workbench()
    with usage_errors(path):
        report = workbench.evaluate(path, outcomes, foliation, command=command)
    if not as_json:
        console.print(f"{report.values['probability']:.12g}")
        if not report.ok:
            err_console.print(f"[red]Error:[/red] {escape(report.checks[0].details)}")
        raise typer.Exit(report.exit_code)
    finish(report, as_json, timings)


@app.command()
def counting(
    model: str = typer.Option(..., "--model", help="classical, quantum, real or quaternionic"),
    n_a: int = typer.Option(..., "--n-a", min=1, help="N of the first system"),
    n_b: int = typer.Option(..., "--n-b", min=1, help="N of the second system"),
    as_json: bool = typer.Option(False, "--json", help="Print a JSON report"),
    timings: bool = typer.Option(False, "--timings", help="Include runtimes"),
) -> None:
    """Compare K_ab with K_a K_b for a counting model."""
    command = ["counting", "--model", model, "--n-a", str(n_a), "--n-b", str(n_b)]
    workbench = get_workbench()
    with usage_errors():
        report = workbench.counting(model, n_a, n_b, command=command)
    if not as_json:
        check = report.checks[0]
        style = STATUS_STYLE[check.status]
        console.print(f"[{style}]{escape(check.details)}[/{style}]")
        raise typer.Exit(report.exit_code)
    finish(report, as_json, timings)


@app.command()
def check(
    suite: Suite = typer.Option(Suite.ALL, "--suite", help="Suite to run"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (default from config)"),
    size: Optional[int] = typer.Option(None, "--size", min=1, help="Random instances per check"),
    as_json: bool = typer.Option(False, "--json", help="Print a JSON report"),
    timings: bool = typer.Option(False, "--timings", help="Include runtimes"),
) -> None:
    """Run the property and oracle checks."""
    workbench = get_workbench()
    seed = workbench.config.seed if seed is None else seed
    size = workbench.config.check_size if size is None else size
    command = ["check", "--suite", suite.value, "--seed", str(seed), "--size", str(size)]
    with usage_errors():
        report = workbench.check(suite.value, seed, size, command=command)
    if not as_json:
        passed = sum(c.passed for c in report.checks)
        console.print(f"[blue]Suite:[/blue] {suite.value} (seed {seed}, size {size})")
        console.print(f"{passed}/{len(report.checks)} checks passed")
    finish(report, as_json, timings)


@app.command()
def version() -> None:
    """Show version information."""
    from . import __version__

    console.print(f"GPT Circuit Workbench v{__version__}")


if __name__ == "__main__":
    app()
