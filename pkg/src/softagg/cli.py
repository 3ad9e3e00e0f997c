"""Command-line driver for the full pipeline.

Commands run in order against a workspace directory that caches the
ingested relation, the label catalog, and the built KB between
invocations (the offline phase), so `query` is the only online step:

    softagg ingest people.csv --table employee
    softagg labels catalog.yaml
    softagg build-kb --threshold 0.4
    softagg query "SELECT AVG(Salary) FROM employee WHERE Age IS Young" --watch

Exit codes: 0 success, 2 validation/usage, 3 cancelled, 1 internal.
"""
from __future__ import annotations

import dataclasses
import json
import random
import shutil
import signal
import sys
import threading
from pathlib import Path

import click

from .aggregate import ProgressEvent, exact_answer, run_query
from .errors import EngineError, PipelineOrderError
from .kb import build_kb, load_kb, relation_from_csv, save_kb
from .membership import load_label_catalog
from .query import QuerySyntaxError, parse, rewrite, validate
from .sampling import new_sampler

EXIT_VALIDATION = 2
EXIT_CANCELLED = 3


class Workspace:
    """On-disk cache of the pipeline's intermediate products."""

    def __init__(self, root: Path):
        self.root = root
        self.csv_path = root / "relation.csv"
        self.meta_path = root / "meta.json"
        self.labels_path = root / "labels.yaml"
        self.kb_path = root / "kb.txt"

    def write_meta(self, meta: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")

    def meta(self) -> dict:
        if not self.meta_path.exists():
            raise PipelineOrderError("no ingested dataset here; run `softagg ingest` first")
        return json.loads(self.meta_path.read_text(encoding="utf-8"))

    def relation(self):
        meta = self.meta()
        return relation_from_csv(
            self.csv_path.read_text(encoding="utf-8"),
            name=meta["table"],
            id_column=meta.get("id_column"),
        )

    def labels(self):
        if not self.labels_path.exists():
            raise PipelineOrderError("no label catalog here; run `softagg labels` first")
        return load_label_catalog(self.labels_path.read_text(encoding="utf-8"))

    def kb(self):
        if not self.kb_path.exists():
            raise PipelineOrderError("knowledge base not built; run `softagg build-kb` first")
        return load_kb(self.kb_path)


@click.group()
@click.option("--workspace", "-w", default=".softagg", type=click.Path(path_type=Path),
              help="Directory caching the relation, labels and KB between commands.")
@click.pass_context
def main(ctx, workspace: Path):
    """Approximate aggregate queries with fuzzy predicates."""
    ctx.obj = Workspace(workspace)


def _fail(message: str, code: int = EXIT_VALIDATION):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@main.command()
@click.argument("csv_file", type=click.Path(exists=True, path_type=Path))
@click.option("--table", required=True, help="Table name used in queries' FROM clause.")
@click.option("--id-column", default=None, help="Row-id column (default: first column).")
@click.pass_obj
def ingest(ws: Workspace, csv_file: Path, table: str, id_column: str | None):
    """Load a CSV into the workspace."""
    text = csv_file.read_text(encoding="utf-8")
    try:
        relation = relation_from_csv(text, name=table, id_column=id_column)
    except EngineError as exc:
        _fail(str(exc))
    ws.root.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(csv_file, ws.csv_path)
    ws.write_meta({"table": table, "id_column": id_column})
    # a KB built against the previous relation is stale now
    if ws.kb_path.exists():
        ws.kb_path.unlink()
    numeric = ", ".join(sorted(relation.columns))
    click.echo(f"ingested {len(relation)} rows into table {table!r} (numeric: {numeric})")


@main.command()
@click.argument("config_file", type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def labels(ws: Workspace, config_file: Path):
    """Install a label catalog (YAML) into the workspace."""
    text = config_file.read_text(encoding="utf-8")
    try:
        catalog = load_label_catalog(text)
    except EngineError as exc:
        _fail(str(exc))
    ws.root.mkdir(parents=True, exist_ok=True)
    ws.labels_path.write_text(text, encoding="utf-8")
    if ws.kb_path.exists():
        ws.kb_path.unlink()
    click.echo(f"installed {len(catalog)} labels: " + ", ".join(l.key for l in catalog))


@main.command("build-kb")
@click.option("--threshold", type=float, required=True,
              help="Membership threshold: degrees below it are pruned.")
@click.pass_obj
def build_kb_cmd(ws: Workspace, threshold: float):
    """Evaluate all labels over the relation and persist the pruned KB."""
    try:
        relation = ws.relation()
        catalog = ws.labels()
        kb = build_kb(relation, catalog, threshold)
    except EngineError as exc:
        _fail(str(exc))
    save_kb(kb, ws.kb_path)
    kept = sum(len(row) for row in kb.entries.values())
    click.echo(f"built KB over {kb.m} rows, {kept} stored degrees at threshold {threshold}")


def _format_event(ev: ProgressEvent, state: str) -> str:
    est = "-" if ev.estimate is None else repr(ev.estimate)
    rate = "-" if ev.error_rate is None else repr(ev.error_rate)
    pct = f"{ev.fraction * 100:.2f}"
    return f"{ev.batch}\t{ev.n}\t{est}\t{rate}\t{ev.confidence!r}\t{pct}\t{state}"


@main.command("query")
@click.argument("text")
@click.option("--confidence", type=float, default=None,
              help="Overrides the query's WITH CONFIDENCE clause.")
@click.option("--sample-pct", type=float, default=1.0, show_default=True,
              help="Batch size as a percentage of the KB.")
@click.option("--seed", type=int, default=None, help="Sampler seed (default: random).")
@click.option("--watch", is_flag=True, help="Print one line per batch instead of only the last.")
@click.option("--exact", "want_exact", is_flag=True,
              help="Append the full-scan answer and the estimate's deviation from it.")
@click.pass_obj
def query_cmd(ws: Workspace, text: str, confidence: float | None, sample_pct: float,
              seed: int | None, watch: bool, want_exact: bool):
    """Run a flexible aggregate query against the workspace KB."""
    try:
        relation = ws.relation()
        catalog = ws.labels()
        kb = ws.kb()
    except EngineError as exc:
        _fail(str(exc))
    try:
        q = parse(text)
    except QuerySyntaxError as exc:
        _fail(str(exc))
    if confidence is not None:
        try:
            q = dataclasses.replace(q, confidence=confidence)
        except EngineError as exc:
            _fail(str(exc))
    diags = validate(q, kb, catalog, relation)
    if diags:
        for d in diags:
            click.echo(f"error: {d}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        aq = rewrite(q, sample_pct, kb.value_ranges)
    except EngineError as exc:
        _fail(str(exc))

    if seed is None:
        seed = random.randrange(2**32)
    sampler = new_sampler(relation.ids, aq.sample_pct, seed)

    cancel = threading.Event()
    previous = signal.signal(signal.SIGINT, lambda *_: cancel.set())
    print(f"# seed\t{seed}", flush=True)
    print("# batch\tn\testimate\terror_rate\tconfidence\tpct\tstate", flush=True)
    last: ProgressEvent | None = None
    try:
        for ev in run_query(kb, aq, sampler, relation, catalog, cancel=cancel):
            last = ev
            if watch:
                state = "done" if ev.done else "running"
                print(_format_event(ev, state), flush=True)
    finally:
        signal.signal(signal.SIGINT, previous)

    cancelled = cancel.is_set() and (last is None or not last.done)
    if not watch and last is not None:
        state = "done" if last.done else ("cancelled" if cancelled else "running")
        print(_format_event(last, state), flush=True)
    if last is not None and last.diagnosis is not None:
        relaxations = ", ".join(
            f"{{{' AND '.join(labels_)}}} x{count}" for labels_, count in last.diagnosis
        ) or "none"
        print(f"# no rows satisfy the full conjunction; satisfiable relaxations: {relaxations}",
              flush=True)
    if want_exact:
        value = exact_answer(kb, aq, relation, catalog)
        if value is None or last is None or last.estimate is None:
            print(f"# exact\t{'-' if value is None else repr(value)}\tdeviation\t-", flush=True)
        else:
            print(f"# exact\t{value!r}\tdeviation\t{abs(last.estimate - value)!r}", flush=True)
    if cancelled:
        print("# cancelled", flush=True)
        sys.exit(EXIT_CANCELLED)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Serve a built frontend directory at /ui.")
def serve(host: str, port: int, ui_dir: str | None):
    """Run the HTTP service (datasets, KBs, streaming query sessions)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(ui_dir=ui_dir), host=host, port=port)


if __name__ == "__main__":
    main()
