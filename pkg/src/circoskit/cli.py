"""Command-line entry points: serve, import, stats, render."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import uvicorn

from .corpus import Corpus, MalformedStreamError
from .datasets import DatasetStore
from .grammar import parse
from .patterns import distributions, stacked_matrix, synthesized_matrix
from .render import Canvas, PlotSession, TrackBinding, auto_bind, render_svg
from .server import CorruptSnapshotError, build_state, create_app


@click.group()
def main() -> None:
    """Circos-plot authoring engine."""


@main.command()
@click.option("--host", envvar="CIRCOSKIT_HOST", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="CIRCOSKIT_PORT", default=8765, show_default=True, type=int)
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, help="Corpus snapshot (JSONL) to load.")
@click.option("--state-dir", type=click.Path(), default=None, help="Directory for session/corpus/dataset snapshots.")
@click.option("--provider", type=click.Choice(["mock", "remote"]), default="mock", show_default=True)
@click.option("--embed-url", envvar="CIRCOSKIT_EMBED_URL", default=None, help="Remote embedding endpoint.")
@click.option("--generate-url", envvar="CIRCOSKIT_GENERATE_URL", default=None, help="Remote generation endpoint.")
@click.option("--api-key", envvar="CIRCOSKIT_API_KEY", default=None)
@click.option("--timeout", envvar="CIRCOSKIT_TIMEOUT", default=10.0, type=float, show_default=True)
@click.option("--ui-dir", type=click.Path(), default=None, help="Built web UI to serve at /.")
def serve(host, port, corpus_path, state_dir, provider, embed_url, generate_url, api_key, timeout, ui_dir):
    """Run the HTTP API (and optionally the web UI)."""
    try:
        state = build_state(
            corpus_path=corpus_path,
            state_dir=state_dir,
            provider=provider,
            embed_url=embed_url,
            generate_url=generate_url,
            api_key=api_key,
            timeout=timeout,
        )
    except (CorruptSnapshotError, ValueError) as exc:
        raise SystemExit(f"refusing to start: {exc}")
    app = create_app(state, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise SystemExit(f"cannot bind {host}:{port}: {exc}")
    finally:
        state.flush()


@main.command("import")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--store", type=click.Path(dir_okay=False), required=True, help="Corpus snapshot (JSONL) to update.")
@click.option("--fmt", "--format", type=click.Choice(["jsonl", "csv"]), default=None, help="Defaults from the file suffix.")
def import_cmd(source, store, fmt):
    """Import records from SOURCE into a corpus snapshot."""
    corpus = Corpus()
    store_path = Path(store)
    if store_path.exists():
        try:
            corpus.restore(store_path)
        except MalformedStreamError as exc:
            raise SystemExit(f"existing snapshot is corrupt: {exc}")
    data = Path(source).read_bytes()
    fmt = fmt or ("csv" if source.endswith(".csv") else "jsonl")
    try:
        report = corpus.import_csv(data) if fmt == "csv" else corpus.import_jsonl(data)
    except MalformedStreamError as exc:
        raise SystemExit(f"import failed: {exc}")
    corpus.snapshot(store_path)
    click.echo(json.dumps(report.to_json(), indent=2))
    if report.rejected:
        sys.exit(1)


@main.command()
@click.option("--corpus", "corpus_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--fmt", "--format", type=click.Choice(["json", "table"]), default="table", show_default=True)
def stats(corpus_path, fmt):
    """Print track-combination statistics for a corpus snapshot."""
    corpus = Corpus()
    try:
        corpus.restore(corpus_path)
    except MalformedStreamError as exc:
        raise SystemExit(f"cannot read corpus: {exc}")
    records = corpus.records()
    stacked = stacked_matrix(records)
    synthesized = synthesized_matrix(records)
    dists = distributions(records)
    if fmt == "json":
        click.echo(
            json.dumps(
                {
                    "distributions": dists.to_json(),
                    "stacked": stacked.to_json(),
                    "synthesized": synthesized.to_json(),
                },
                indent=2,
            )
        )
        return
    click.echo(f"records: {len(records)}")
    for title, histogram in (
        ("rings per plot", dists.rings_per_plot),
        ("track types per plot", dists.track_types_per_plot),
        ("tracks per ring", dists.tracks_per_ring),
        ("tracks per type", dists.tracks_per_type),
    ):
        click.echo(f"\n{title}:")
        for key in sorted(histogram, key=str):
            click.echo(f"  {key}: {histogram[key]}")
    click.echo("\nstacked P(inner|outer):")
    click.echo(stacked.to_table())
    click.echo("\nsynthesized P(B|A):")
    click.echo(synthesized.to_table())


@main.command()
@click.option("--session-file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="-", show_default=True)
def render(session_file, output):
    """Headless batch render of a self-contained session JSON file.

    Schema: {"config": str, "canvas"?: {...}, "datasets": [{"kind", "name"?,
    "csv"}...], "bindings"?: [...]}. Bindings default to auto-binding.
    """
    payload = json.loads(Path(session_file).read_text(encoding="utf-8"))
    store = DatasetStore()
    for entry in payload.get("datasets", []):
        dataset, rejected = store.ingest_csv(entry["kind"], entry["csv"], name=entry.get("name"))
        for line, error in rejected:
            click.echo(f"warning: {dataset.dataset_id} line {line}: {error}", err=True)
    session = PlotSession(
        id=payload.get("id", "batch"),
        config=parse(payload.get("config", "")),
        datasets=store,
        canvas=Canvas.from_json(payload.get("canvas", {})),
        bindings=[TrackBinding.from_json(b) for b in payload.get("bindings", [])],
    )
    problems = auto_bind(session)
    for problem in problems:
        click.echo(f"warning: {problem}", err=True)
    svg = render_svg(session)
    if output == "-":
        click.echo(svg, nl=False)
    else:
        Path(output).write_text(svg, encoding="utf-8")


if __name__ == "__main__":
    main()
