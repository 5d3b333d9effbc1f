"""Command-line front end.

Every subcommand computes locally by default; with --server URL it posts the
same payload to a running service and prints the returned document, so both
paths emit identical reports.

Exit codes: 0 success, 1 failed scenario assertions, 2 input error,
3 undetermined verdict (geometry, compatibility or loop search).
"""

from __future__ import annotations

import sys

import click

from .compat import UNDETERMINED_VERDICT
from .dist import parse_number
from .errors import ArgumentError, ModelFileError, ResourceError
from .geometry import UNDETERMINED, MinkowskiEvent
from .modelfile import parse_model_text
from .reports import (
    analysis_report,
    compat_report,
    geometry_apex_report,
    geometry_containment_report,
    geometry_future_report,
    geometry_precedes_report,
    loops_report,
    ns_report,
    render_text,
    scenario_report_doc,
    scenario_suite_doc,
    to_json_text,
)

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_UNDETERMINED = 3


def _die(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _local(thunk):
    try:
        return thunk()
    except (ModelFileError, ArgumentError, ResourceError) as exc:
        _die(str(exc), EXIT_INPUT)


def _remote(server: str, method: str, path: str, payload: dict | None = None) -> dict:
    import httpx

    url = server.rstrip("/") + path
    try:
        if method == "GET":
            response = httpx.get(url, timeout=300.0)
        else:
            response = httpx.post(url, json=payload, timeout=300.0)
    except httpx.HTTPError as exc:
        _die(f"service unreachable: {exc}", EXIT_INPUT)
    if response.status_code == 422:
        body = response.json()
        _die(str(body.get("detail", response.text)), EXIT_INPUT)
    if response.status_code != 200:
        _die(f"service returned {response.status_code}: {response.text}", EXIT_INPUT)
    return response.json()


def _dispatch(server, path, payload, thunk) -> dict:
    if server:
        return _remote(server, "POST", path, payload)
    return _local(thunk)


def _emit(report: dict, fmt: str):
    text = to_json_text(report) if fmt == "json" else render_text(report)
    click.echo(text, nl=False)


def _exit_for(report: dict):
    kind = report.get("kind")
    code = EXIT_OK
    if kind == "analysis":
        compat = report.get("compatibility")
        loops = report.get("loops")
        if compat and compat.get("verdict") == UNDETERMINED_VERDICT:
            code = EXIT_UNDETERMINED
        if loops is not None and loops.get("forced_cyclic") is None:
            code = EXIT_UNDETERMINED
    elif kind == "compatibility":
        if report["verdict"] == UNDETERMINED_VERDICT:
            code = EXIT_UNDETERMINED
    elif kind == "loops":
        if report["forced_cyclic"] is None:
            code = EXIT_UNDETERMINED
    elif kind == "geometry":
        if report["result"] == UNDETERMINED:
            code = EXIT_UNDETERMINED
    elif kind in ("scenario", "scenario_suite"):
        if not report["passed"]:
            code = EXIT_ASSERTION
    sys.exit(code)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


_FMT = click.option("--format", "fmt", type=click.Choice(["text", "json"]),
                    default="text", show_default=True)


@click.group()
@click.option("--server", metavar="URL", default=None,
              help="Send the work to a running service instead of computing locally.")
@click.pass_context
def main(ctx, server):
    """Discrete causal models: influence relations, no-signalling checks,
    spacetime compatibility and causal-loop certificates."""
    ctx.obj = {"server": server}


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--conditional", is_flag=True,
              help="Also evaluate relations with a conditioning set.")
@click.option("--max-nodes", type=int, default=None,
              help="Cap on observed nodes entering the enumeration.")
@_FMT
@click.pass_obj
def analyze(obj, file, conditional, max_nodes, fmt):
    """Full report on a model file: every influence verdict, arrows,
    no-signalling, compatibility and loop sections where applicable."""
    text = _read(file)
    report = _dispatch(
        obj["server"], "/analyze",
        {"model_file": text, "conditional": conditional, "max_nodes": max_nodes},
        lambda: analysis_report(parse_model_text(text),
                                include_conditional=conditional,
                                max_nodes=max_nodes))
    _emit(report, fmt)
    _exit_for(report)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@_FMT
@click.pass_obj
def ns(obj, file, fmt):
    """No-signalling equalities (and jamming, for three parties) on the
    observed distribution of a model file with a [roles] section."""
    text = _read(file)
    report = _dispatch(obj["server"], "/ns", {"model_file": text},
                       lambda: ns_report(parse_model_text(text)))
    _emit(report, fmt)
    _exit_for(report)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-nodes", type=int, default=None)
@_FMT
@click.pass_obj
def compat(obj, file, max_nodes, fmt):
    """Compatibility of the holding irreducible relations with the file's
    [embedding] section."""
    text = _read(file)
    report = _dispatch(obj["server"], "/compat",
                       {"model_file": text, "max_nodes": max_nodes},
                       lambda: compat_report(parse_model_text(text),
                                             max_nodes=max_nodes))
    _emit(report, fmt)
    _exit_for(report)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--witness", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Acyclic model file to certify a hidden loop against.")
@click.option("--max-nodes", type=int, default=None)
@_FMT
@click.pass_obj
def loops(obj, file, witness, max_nodes, fmt):
    """Loop classification: is a cyclic explanation forced by the influence
    relations, and does a supplied witness certify a hidden loop?"""
    text = _read(file)
    witness_text = _read(witness) if witness else None

    def local():
        parsed = parse_model_text(text)
        wit = parse_model_text(witness_text) if witness_text else None
        return loops_report(parsed, wit, max_nodes=max_nodes)

    report = _dispatch(obj["server"], "/loops",
                       {"model_file": text, "witness_file": witness_text,
                        "max_nodes": max_nodes}, local)
    _emit(report, fmt)
    _exit_for(report)


# -- geometry ----------------------------------------------------------------

def _event(coords) -> MinkowskiEvent:
    if len(coords) < 2:
        raise ArgumentError("an event needs spatial coordinates and a time")
    nums = [parse_number(str(c)) for c in coords]
    return MinkowskiEvent(nums[:-1], nums[-1])


def _split_events(tokens, count: int) -> list[list[str]]:
    if not tokens or len(tokens) % count:
        raise ArgumentError(
            f"expected {count} events as a flat coordinate list, got {len(tokens)} numbers")
    per = len(tokens) // count
    if per < 2:
        raise ArgumentError("each event needs at least one spatial coordinate and a time")
    return [list(tokens[i * per:(i + 1) * per]) for i in range(count)]


@main.group()
def geometry():
    """Light-cone queries on raw events (coordinates: space..., time)."""


_RAW = {"ignore_unknown_options": True}


@geometry.command(context_settings=_RAW)
@click.argument("coords", nargs=-1)
@_FMT
@click.pass_obj
def precedes(obj, coords, fmt):
    """Causal relation between two events: 'precedes -1 0 -1 1'."""
    def local():
        a, b = _split_events(coords, 2)
        return geometry_precedes_report(_event(a), _event(b))

    report = (_remote(obj["server"], "POST", "/geometry/precedes",
                      {"events": _local(lambda: _split_events(coords, 2))})
              if obj["server"] else _local(local))
    _emit(report, fmt)
    _exit_for(report)


@geometry.command(context_settings=_RAW)
@click.argument("coords", nargs=-1)
@_FMT
@click.pass_obj
def apex(obj, coords, fmt):
    """Earliest event seeing both futures, one spatial dimension:
    'apex -1 0 1 0' prints (0,1)."""
    def local():
        a, c = _split_events(coords, 2)
        return geometry_apex_report(_event(a), _event(c))

    report = (_remote(obj["server"], "POST", "/geometry/apex",
                      {"events": _local(lambda: _split_events(coords, 2))})
              if obj["server"] else _local(local))
    _emit(report, fmt)
    _exit_for(report)


@geometry.command(context_settings=_RAW)
@click.argument("coords", nargs=-1)
@_FMT
@click.pass_obj
def contain(obj, coords, fmt):
    """Does the third event's future cover the joint future of the first
    two?  'contain -1 0 1 0 0 1' prints TRUE."""
    def local():
        a, c, b = _split_events(coords, 3)
        return geometry_containment_report(_event(a), _event(c), _event(b))

    def payload():
        a, c, b = _split_events(coords, 3)
        return {"pair": [a, c], "inside": b}

    report = (_remote(obj["server"], "POST", "/geometry/containment",
                      _local(payload)) if obj["server"] else _local(local))
    _emit(report, fmt)
    _exit_for(report)


@geometry.command(name="contained")
@click.option("--left", "left", multiple=True, required=True,
              help="Event as comma-separated coordinates; repeatable.")
@click.option("--right", "right", multiple=True, required=True,
              help="Event as comma-separated coordinates; repeatable.")
@_FMT
@click.pass_obj
def contained(obj, left, right, fmt):
    """General joint-future containment; may be UNDETERMINED (exit 3)."""
    lefts = [e.split(",") for e in left]
    rights = [e.split(",") for e in right]
    report = (_remote(obj["server"], "POST", "/geometry/future-contained",
                      {"left": lefts, "right": rights})
              if obj["server"] else
              _local(lambda: geometry_future_report(
                  [_event(e) for e in lefts], [_event(e) for e in rights])))
    _emit(report, fmt)
    _exit_for(report)


# -- scenarios ----------------------------------------------------------------

@main.command()
@click.argument("name", required=False)
@click.option("--all", "run_all", is_flag=True,
              help="Run the whole scenario library (CI mode).")
@_FMT
@click.pass_obj
def scenario(obj, name, run_all, fmt):
    """Run one library scenario (or all of them) and check its expected
    assertions; exit 1 on any failure."""
    if run_all == (name is not None):
        raise click.UsageError("give a scenario name or --all (not both)")
    if run_all:
        report = (_remote(obj["server"], "GET", "/scenarios/suite")
                  if obj["server"] else _local(scenario_suite_doc))
    else:
        report = (_remote(obj["server"], "GET", f"/scenario/{name}")
                  if obj["server"] else _local(lambda: scenario_report_doc(name)))
    _emit(report, fmt)
    _exit_for(report)


@main.command()
@click.argument("name")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def export(name, output):
    """Write a library scenario as a model file."""
    from .scenarios import get_scenario, scenario_model_text

    text = _local(lambda: scenario_model_text(get_scenario(name)))
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
