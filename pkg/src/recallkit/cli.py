"""Command line entry points: serve, ingest, ask, suggest, replay, bench."""

from __future__ import annotations

import json
from pathlib import Path

import click

from .backends import ExtractiveMockBackend
from .config import EngineConfig, load_config
from .embedding import HashedBowEmbedder
from .errors import RecallError
from .harness import bench_store, replay_corpus
from .inference import queryless_answer
from .ingest import events_from_text, read_transcript_file
from .retrieval import answer_query
from .session import Session
from .store import MemoryStore
from .store import load as load_store
from .store import persist as persist_store


@click.group()
def main() -> None:
    """Retrieval-augmented conversational memory engine."""


def _fail(exc: Exception) -> None:
    raise click.ClickException(f"{type(exc).__name__}: {exc}")


def _read_context(context: str, context_file: str | None) -> str:
    if context_file:
        return Path(context_file).read_text("utf-8")
    return context


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="YAML engine config; defaults apply when omitted.",
)
def serve(host: str, port: int, config_path: str | None) -> None:
    """Run the loopback HTTP/WS service."""
    import uvicorn

    from .service import create_app

    cfg = load_config(config_path) if config_path else EngineConfig()
    uvicorn.run(create_app(cfg), host=host, port=port)


@main.command()
@click.option(
    "--file",
    "file_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Transcript: .jsonl events or plain prose.",
)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--session-id", default="ingest", show_default=True)
def ingest(file_path: str, out_path: str, session_id: str) -> None:
    """Encode a transcript into a persisted memory store."""
    try:
        if file_path.endswith(".jsonl"):
            events = read_transcript_file(file_path)
        else:
            events = events_from_text(Path(file_path).read_text("utf-8"))
        embedder = HashedBowEmbedder()
        store = MemoryStore(embedder.spec.dimension)
        session = Session(
            session_id, store=store, embedder=embedder, backend=ExtractiveMockBackend()
        )
        for event in events:
            session.ingest(event)
        session.close()
        persist_store(store, out_path)
    except RecallError as exc:
        _fail(exc)
    click.echo(f"encoded {len(store)} blocks from {len(events)} events into {out_path}")


@main.command()
@click.argument("query")
@click.option("--mode", type=click.Choice(["query", "baseline"]), default="query", show_default=True)
@click.option("--context", default="", help="Current conversation context.")
@click.option("--context-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option(
    "--store",
    "store_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Memory store written by `ingest`.",
)
@click.option("--verbose", is_flag=True, help="Also print retrieval details to stderr.")
def ask(
    query: str,
    mode: str,
    context: str,
    context_file: str | None,
    store_path: str,
    verbose: bool,
) -> None:
    """Answer one voiced query against a persisted store."""
    try:
        store = load_store(store_path)
        ctx = "" if mode == "baseline" else _read_context(context, context_file)
        trace = answer_query(
            query,
            ctx,
            store,
            HashedBowEmbedder(),
            ExtractiveMockBackend(),
            concise=(mode == "query"),
        )
    except RecallError as exc:
        _fail(exc)
    if verbose:
        click.echo(f"hits: {', '.join(trace.hit_ids) or '(none)'}", err=True)
        click.echo(f"raw: {trace.raw_answer}", err=True)
    click.echo(trace.concise_answer)


@main.command()
@click.option("--context", default="", help="Current conversation context.")
@click.option("--context-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option(
    "--store",
    "store_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--verbose", is_flag=True, help="Also print the inferred query to stderr.")
def suggest(context: str, context_file: str | None, store_path: str, verbose: bool) -> None:
    """Queryless trigger: infer the question from context, then answer it."""
    try:
        store = load_store(store_path)
        trace = queryless_answer(
            _read_context(context, context_file),
            store,
            HashedBowEmbedder(),
            ExtractiveMockBackend(),
        )
    except RecallError as exc:
        _fail(exc)
    if verbose:
        click.echo(f"inferred query: {trace.query}", err=True)
        click.echo(f"raw: {trace.raw_answer}", err=True)
    click.echo(trace.concise_answer)


@main.command()
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None)
def replay(json_path: str | None) -> None:
    """Replay the bundled corpus in all three modes; print metrics tables."""
    report = replay_corpus()
    if json_path:
        Path(json_path).write_text(report.to_json(), "utf-8")
    click.echo(report.render_table(), nl=False)


@main.command()
@click.option("--blocks", default=10_000, show_default=True, type=int)
@click.option("--queries", default=50, show_default=True, type=int)
@click.option("--seed", default=7, show_default=True, type=int)
def bench(blocks: int, queries: int, seed: int) -> None:
    """Measure end-to-end answering latency on a synthetic store."""
    click.echo(json.dumps(bench_store(n_blocks=blocks, n_queries=queries, seed=seed), indent=2))


if __name__ == "__main__":
    main()
