"""Command-line client.

Every subcommand drives the same HTTP API the browser UI uses: by default an
in-process instance of the service, or a remote one via --server. `bench`
reproduces the strategy comparison (S1/S2/S3 x trials) over one selection
and writes a report plus every prompt and explanation for audit.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import httpx

from .evidence import DEFAULT_TOKEN_BUDGET
from .fixtures import FIXTURES, write_all
from .llm import LlmConfig


def _client(server: str | None, store: str | None, budget: int,
            llm_endpoint: str | None = None, model: str | None = None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service import create_app

    overrides = {}
    if llm_endpoint:
        overrides["endpoint"] = llm_endpoint
    if model:
        overrides["model"] = model
    app = create_app(
        store_dir=store,
        llm_config=LlmConfig(**overrides) if overrides else None,
        default_budget=budget,
    )
    return TestClient(app)


def _fail(response: httpx.Response) -> None:
    try:
        body = response.json()
        message = f"{body.get('code')}: {body.get('message')}"
    except Exception:
        message = response.text[:300]
    raise click.ClickException(f"HTTP {response.status_code} - {message}")


def _upload(client, data: Path, context: Path) -> dict:
    with data.open("rb") as df, context.open("rb") as cf:
        response = client.post(
            "/datasets",
            files={
                "data": (data.name, df, "text/csv"),
                "context": (context.name, cf, "application/json"),
            },
        )
    if response.status_code != 200:
        _fail(response)
    return response.json()


def _wait_for_embedding(client, dataset_id: str, params: dict,
                        poll_s: float = 0.5, echo=click.echo) -> str:
    response = client.post(f"/datasets/{dataset_id}/embedding", json=params)
    if response.status_code != 200:
        _fail(response)
    job_id = response.json()["job_id"]
    last_epoch = -1
    while True:
        status = client.get(f"/embeddings/{job_id}")
        if status.status_code != 200:
            _fail(status)
        body = status.json()
        if body["epoch"] != last_epoch:
            echo(f"  epoch {body['epoch']}/{body['n_epochs']}")
            last_epoch = body["epoch"]
        if body["status"] == "complete":
            return job_id
        if body["status"] == "failed":
            raise click.ClickException(f"embedding failed: {body.get('error')}")
        time.sleep(poll_s)


@click.group()
def main():
    """Explain lasso-selected clusters in 2D projections of tabular data."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--store", default="./lassolens-store", show_default=True,
              help="Session store directory.")
@click.option("--frontend", default="./frontend/dist", show_default=True,
              help="Static UI directory to serve under /ui.")
@click.option("--llm-endpoint", default=None, help="Chat-completions URL.")
@click.option("--model", default=None, help="Model name.")
@click.option("--budget", default=DEFAULT_TOKEN_BUDGET, show_default=True, type=int)
def serve(host, port, store, frontend, llm_endpoint, model, budget):
    """Run the HTTP service (and the UI, when built)."""
    import uvicorn

    from .service import create_app

    overrides = {}
    if llm_endpoint:
        overrides["endpoint"] = llm_endpoint
    if model:
        overrides["model"] = model
    app = create_app(
        store_dir=store,
        llm_config=LlmConfig(**overrides) if overrides else None,
        default_budget=budget,
        frontend_dir=frontend,
    )
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--out", type=click.Path(path_type=Path), default=Path("./data"),
              show_default=True)
@click.option("--only", type=click.Choice(sorted(FIXTURES)), default=None,
              help="Generate a single dataset instead of all four.")
def fixtures(out, only):
    """Write the bundled synthetic evaluation datasets as CSV + context."""
    if only:
        data, context = FIXTURES[only](out)
        click.echo(f"{only}: {data} + {context}")
    else:
        for name, (data, context) in write_all(out).items():
            click.echo(f"{name}: {data} + {context}")


@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--context", "context_path",
              type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="Where to write the row_index,x,y CSV.")
@click.option("--neighbors", default=50, show_default=True, type=int)
@click.option("--epochs", default=500, show_default=True, type=int)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--server", default=None, help="Remote service URL.")
@click.option("--store", default=None, help="Store dir for the in-process service.")
def embed(data_path, context_path, out, neighbors, epochs, seed, server, store):
    """Project a dataset to 2D and export the coordinates."""
    client = _client(server, store, DEFAULT_TOKEN_BUDGET)
    info = _upload(client, data_path, context_path)
    click.echo(f"dataset {info['dataset_id']} ({info['row_count']} rows)")
    job_id = _wait_for_embedding(
        client, info["dataset_id"],
        {"n_neighbors": neighbors, "n_epochs": epochs, "seed": seed},
    )
    csv_text = client.get(f"/embeddings/{job_id}/coords.csv")
    if csv_text.status_code != 200:
        _fail(csv_text)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text.text, encoding="utf-8")
    click.echo(f"coordinates written to {out}")


def _strategy_run(client, mask_id: str, strategy: str, trials: int, mock: bool,
                  budget: int, seed: int) -> dict:
    response = client.post(
        f"/selections/{mask_id}/explanations",
        json={
            "strategy": strategy,
            "trials": trials,
            "use_mock": mock,
            "seed": seed,
            "budget": budget,
        },
    )
    if response.status_code == 422:
        body = response.json()
        if body.get("code") == "budget_exceeded":
            return {"status": "infeasible", "budget": body["detail"], "records": []}
        _fail(response)
    if response.status_code != 201:
        _fail(response)
    ids = response.json()["explanation_ids"]
    records = []
    for explanation_id in ids:
        record = client.get(f"/explanations/{explanation_id}")
        if record.status_code != 200:
            _fail(record)
        records.append(record.json())
    result: dict = {"status": "ok", "records": records}
    if trials >= 2:
        consistency = client.get(
            f"/selections/{mask_id}/trials/{strategy}/consistency"
        )
        if consistency.status_code == 200:
            result["consistency"] = consistency.json()
    return result


def _summarize_run(strategy: str, run: dict) -> dict:
    if run["status"] == "infeasible":
        return {
            "strategy": strategy,
            "status": "infeasible",
            "estimated_tokens": run["budget"]["estimated_tokens"],
            "budget": run["budget"]["budget"],
        }
    reports = [r["validation"] for r in run["records"]]
    n = len(reports)
    row = {
        "strategy": strategy,
        "status": "ok",
        "trials": n,
        "format_rate": sum(r["format_ok"] for r in reports) / n,
        "mention_precision": sum(r["mention_precision"] for r in reports) / n,
        "mention_recall": sum(r["mention_recall"] for r in reports) / n,
        "verified": sum(r["verified"] for r in reports),
        "contradicted": sum(r["contradicted"] for r in reports),
        "unverifiable": sum(r["unverifiable"] for r in reports),
        "hallucinated": sorted(
            {h for r in reports for h in r["hallucinated_features"]}
        ),
    }
    if "consistency" in run:
        row["jaccard"] = run["consistency"]["jaccard"]
        row["values_consistent"] = run["consistency"]["all_values_consistent"]
    return row


def _report_markdown(rows: list[dict], header: dict) -> str:
    lines = [
        f"# Strategy comparison: {header['dataset']} / {header['selection']}",
        "",
        f"- rows selected: {header['selected_count']} of {header['row_count']}",
        f"- trials per strategy: {header['trials']}, "
        f"mode: {'mock' if header['mock'] else 'live'}, "
        f"token budget: {header['budget']}",
        "",
        "| strategy | status | format ok | precision | recall | verified "
        "| contradicted | unverifiable | jaccard | values consistent |",
        "|---|---|---|---|---|---|---|---|---|---|",
    ]
    for row in rows:
        if row["status"] == "infeasible":
            lines.append(
                f"| {row['strategy']} | infeasible "
                f"({row['estimated_tokens']} tokens > {row['budget']}) "
                "| - | - | - | - | - | - | - | - |"
            )
            continue
        lines.append(
            "| {strategy} | ok | {format_rate:.0%} | {mention_precision:.2f} "
            "| {mention_recall:.2f} | {verified} | {contradicted} "
            "| {unverifiable} | {jaccard} | {values_consistent} |".format(
                jaccard=f"{row['jaccard']:.2f}" if "jaccard" in row else "-",
                values_consistent=row.get("values_consistent", "-"),
                **{k: row[k] for k in (
                    "strategy", "format_rate", "mention_precision",
                    "mention_recall", "verified", "contradicted", "unverifiable",
                )},
            )
        )
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--data", "data_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--context", "context_path",
              type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--select", "predicate", default=None,
              help='Label predicate, e.g. "deposit=yes".')
@click.option("--polygon", "polygon_file",
              type=click.Path(exists=True, path_type=Path), default=None,
              help="JSON file with [[x, y], ...] lasso vertices.")
@click.option("--strategies", default="S1,S2,S3", show_default=True)
@click.option("--trials", default=1, show_default=True, type=int)
@click.option("--mock/--live", default=False,
              help="Use the deterministic template explainer instead of the LLM.")
@click.option("--budget", default=DEFAULT_TOKEN_BUDGET, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--neighbors", default=50, show_default=True, type=int)
@click.option("--epochs", default=500, show_default=True, type=int)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--server", default=None, help="Remote service URL.")
@click.option("--store", default=None, help="Store dir for the in-process service.")
@click.option("--llm-endpoint", default=None)
@click.option("--model", default=None)
def bench(data_path, context_path, predicate, polygon_file, strategies, trials,
          mock, budget, seed, neighbors, epochs, out, server, store,
          llm_endpoint, model):
    """Run the full pipeline per strategy x trial and write a comparison report."""
    if (predicate is None) == (polygon_file is None):
        raise click.UsageError("pass exactly one of --select or --polygon")
    strategy_list = [s.strip() for s in strategies.split(",") if s.strip()]
    for s in strategy_list:
        if s not in ("S1", "S2", "S3"):
            raise click.UsageError(f"unknown strategy {s!r}")

    client = _client(server, store, budget, llm_endpoint, model)
    info = _upload(client, data_path, context_path)
    click.echo(f"dataset {info['dataset_id']} ({info['row_count']} rows)")

    if predicate is not None:
        column, _, value = predicate.partition("=")
        if not value:
            raise click.UsageError('--select must look like "column=value"')
        body = {"predicate": {"column": column.strip(), "value": value.strip()}}
        selection_label = f"{column.strip()}={value.strip()}"
    else:
        click.echo("computing embedding for the lasso selection...")
        job_id = _wait_for_embedding(
            client, info["dataset_id"],
            {"n_neighbors": neighbors, "n_epochs": epochs},
        )
        polygon = json.loads(Path(polygon_file).read_text(encoding="utf-8"))
        body = {"polygon": polygon, "job_id": job_id}
        selection_label = f"lasso({len(polygon)} vertices)"

    response = client.post(f"/datasets/{info['dataset_id']}/selections", json=body)
    if response.status_code != 200:
        _fail(response)
    selection = response.json()
    click.echo(
        f"selection {selection['mask_id']}: {selection['selected_count']} of "
        f"{info['row_count']} rows"
    )

    out.mkdir(parents=True, exist_ok=True)
    (out / "prompts").mkdir(exist_ok=True)
    (out / "explanations").mkdir(exist_ok=True)

    rows = []
    for strategy in strategy_list:
        click.echo(f"running {strategy} x {trials}...")
        run = _strategy_run(
            client, selection["mask_id"], strategy, trials, mock, budget, seed
        )
        rows.append(_summarize_run(strategy, run))
        for record in run["records"]:
            stem = f"{strategy}_trial{record['trial_index']}"
            prompt = record["prompt"]
            (out / "prompts" / f"{stem}.txt").write_text(
                "\n\n".join(
                    [prompt["instruction"], prompt["context"],
                     prompt["evidence"], prompt["task_format"]]
                ),
                encoding="utf-8",
            )
            (out / "explanations" / f"{stem}.txt").write_text(
                record["raw_text"] + "\n\n--- validation ---\n"
                + json.dumps(record["validation"], indent=2),
                encoding="utf-8",
            )

    header = {
        "dataset": info["name"],
        "selection": selection_label,
        "selected_count": selection["selected_count"],
        "row_count": info["row_count"],
        "trials": trials,
        "mock": mock,
        "budget": budget,
    }
    (out / "report.json").write_text(
        json.dumps({"header": header, "strategies": rows}, indent=2, sort_keys=True),
        encoding="utf-8",
    )
    report_md = _report_markdown(rows, header)
    (out / "report.md").write_text(report_md, encoding="utf-8")
    click.echo(report_md)
    click.echo(f"report written to {out}/report.md")


if __name__ == "__main__":
    sys.exit(main())
