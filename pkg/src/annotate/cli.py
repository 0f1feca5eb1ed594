"""Operator command line: validate, convert, summarize, and serve projects.

stdout carries data, stderr carries diagnostics, and output for identical
inputs is byte-identical.  Exit codes are part of the contract:

  0  success
  1  validation/violation findings
  2  usage error (bad flags, unknown format or attribute)
  3  I/O or parse failure
"""

from __future__ import annotations

import socket
import sys
import warnings
from pathlib import Path

import click

from . import gridview, timeline
from .errors import (
    InvalidProject,
    ParseError,
    SchemaVersionUnsupported,
    UnknownFieldWarning,
)
from .model import Anchor, InputType, Project
from .serialization import export_csv, load_project

EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fail(code: int, message: str) -> None:
    click.echo(message, err=True)
    sys.exit(code)


def _load(path: Path, strict: bool) -> Project:
    """Read and parse a project file, mapping failures to exit codes."""
    try:
        data = path.read_bytes()
    except OSError as e:
        _fail(EXIT_IO, f"cannot read {path}: {e.strerror or e}")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            project = load_project(data)
    except (ParseError, SchemaVersionUnsupported) as e:
        _fail(EXIT_IO, f"{path}: {e}")
    except InvalidProject as e:
        for v in e.violations:
            click.echo(str(v), err=True)
        sys.exit(EXIT_VIOLATIONS)
    unknown = [w for w in caught if issubclass(w.category, UnknownFieldWarning)]
    for w in unknown:
        click.echo(f"warning: {w.message}", err=True)
    if strict and unknown:
        _fail(EXIT_VIOLATIONS, f"{path}: {len(unknown)} unknown-field warning(s) in strict mode")
    return project


@click.group()
def main() -> None:
    """Manage annotation project files and run the sync service."""


@main.command()
@click.argument("project_file", type=click.Path(path_type=Path))
@click.option("--strict", is_flag=True, help="Treat unknown-field warnings as failures.")
def validate(project_file: Path, strict: bool) -> None:
    """Check a project file; print one line per violation."""
    try:
        data = project_file.read_bytes()
    except OSError as e:
        _fail(EXIT_IO, f"cannot read {project_file}: {e.strerror or e}")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            load_project(data)
    except (ParseError, SchemaVersionUnsupported) as e:
        _fail(EXIT_IO, f"{project_file}: {e}")
    except InvalidProject as e:
        for v in e.violations:
            click.echo(str(v))
        sys.exit(EXIT_VIOLATIONS)
    unknown = [w for w in caught if issubclass(w.category, UnknownFieldWarning)]
    for w in unknown:
        click.echo(f"warning: {w.message}", err=True)
    if strict and unknown:
        _fail(EXIT_VIOLATIONS, f"{project_file}: {len(unknown)} unknown-field warning(s) in strict mode")
    click.echo("OK")


@main.command()
@click.argument("project_file", type=click.Path(path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["csv"]), required=True)
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None)
@click.option("--strict", is_flag=True, help="Treat unknown-field warnings as failures.")
def export(project_file: Path, fmt: str, output: Path | None, strict: bool) -> None:
    """Convert a project file; writes to stdout unless -o is given."""
    project = _load(project_file, strict)
    data = export_csv(project)
    if output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        try:
            output.write_bytes(data)
        except OSError as e:
            _fail(EXIT_IO, f"cannot write {output}: {e.strerror or e}")


@main.command()
@click.argument("project_file", type=click.Path(path_type=Path))
@click.option("--by", "by_name", default=None, help="Only this attribute (by name).")
@click.option("--strict", is_flag=True, help="Treat unknown-field warnings as failures.")
def stats(project_file: Path, by_name: str | None, strict: bool) -> None:
    """Per-attribute value counts; temporal attributes add total seconds."""
    project = _load(project_file, strict)
    if by_name is not None:
        aids = [aid for aid, a in project.attributes.items() if a.name == by_name]
        if not aids:
            raise click.UsageError(f"unknown attribute {by_name!r}")
    else:
        aids = list(project.attributes)
    rows = []
    for aid in aids:
        attr = project.attributes[aid]
        for group in gridview.group_by(project, aid):
            row = [attr.name, _display_key(attr, group.key), str(len(group.members))]
            if attr.anchor is Anchor.TEMPORAL_SEGMENT:
                row.append(repr(_group_total_seconds(project, group)))
            rows.append(row)
    if rows:
        click.echo("attribute\tvalue\tcount\tseconds")
        for row in rows:
            click.echo("\t".join(row + [""] * (4 - len(row))))


def _display_key(attr, key) -> str:
    if key is gridview.UNSET:
        return "(unset)"
    if isinstance(key, tuple):
        return "+".join(attr.options.get(k, k) for k in key)
    if attr.input is not InputType.TEXT:
        return attr.options.get(key, key)
    return key


def _group_total_seconds(project: Project, group: gridview.Group) -> float:
    """Merged segment seconds for one group, never double-counting overlaps.

    Segments are merged per file — timestamps on different recordings are
    unrelated — then summed.
    """
    per_file: dict[str, list[timeline.Segment]] = {}
    for mid in group.members:
        e = project.metadata[mid]
        if len(e.z) == 2:
            per_file.setdefault(e.file_id, []).append(timeline.Segment(e.z[0], e.z[1]))
    total = 0.0
    for segs in per_file.values():
        total += sum(s.length for s in timeline.merge_same_label(segs))
    return total


@main.command()
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data",
    "data_dir",
    type=click.Path(path_type=Path),
    envvar="ANNOTATE_DATA_DIR",
    required=True,
    help="Project storage directory (env: ANNOTATE_DATA_DIR).",
)
@click.option("--snapshot-interval", type=int, default=100, show_default=True)
def serve(port: int, host: str, data_dir: Path, snapshot_interval: int) -> None:
    """Run the collaborative sync service until interrupted."""
    import uvicorn

    from .collab import ProjectStore, create_app

    try:
        data_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        _fail(EXIT_IO, f"cannot use data directory {data_dir}: {e.strerror or e}")
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    # REUSEADDR matches the server's own bind: lingering TIME_WAIT connections
    # must not block a restart, an actively listening socket still does.
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as e:
        _fail(EXIT_IO, f"cannot bind {host}:{port}: {e.strerror or e}")
    finally:
        probe.close()

    store = ProjectStore(data_dir, snapshot_interval=snapshot_interval)
    app = create_app(store)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning", access_log=False)
    except OSError as e:
        _fail(EXIT_IO, f"cannot serve on {host}:{port}: {e.strerror or e}")


if __name__ == "__main__":
    main()
