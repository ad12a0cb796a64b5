"""Command-line entry point: one subcommand per pipeline stage.

Every stage writes into its own directory under the output directory together
with a ``manifest.json`` (config hash, seed, package version, counts and the
SHA-256 of each file written).  Exit codes: 0 success, 1 usage or config
error, 2 data validation error, 3 endpoint failure.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from collections.abc import Iterable
from pathlib import Path

import click

from . import __version__
from .annotation import AnnotationRecord, NamePool
from .clustering import ClusterSet, cluster_graph, cluster_stats
from .config import RunConfig, file_digest, load_config
from .curation import (
    build_skill_generation_prompt,
    match_occupation,
    merge_generated_batch,
    parse_generated_skills,
    plan_from_distribution,
    reference_skill_fallback,
    write_plans,
)
from .errors import ConfigError, DataError, EndpointError, EndpointFailure
from .graph import compute_stats, dumps_graph, ingest_graph, merge_graphs
from .metrics import eval_editing, eval_extraction, eval_matching, explanation_hit_rate
from .pipeline import assess, plan_triples, render_all
from .quality import aggregate_scores, score_table
from .rendering.endpoint import EndpointClient
from .rendering.triple import Triple
from .rng import Rng
from .sampling import TripleSpec
from .tasks import (
    TASKS,
    CategoryMap,
    TaskRecord,
    annotation_table,
    assign_splits,
    category_table,
    compute_corpus_stats,
    document_table,
    export_task,
    scaled_split_sizes,
    split,
)

logger = logging.getLogger("resumegen")


class StageInputMissing(ConfigError):
    kind = "stage-input-missing"


# ------------------------------------------------------------------ helpers


def _dump_jsonl(path: Path, rows: Iterable[dict]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
            n += 1
    return n


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        raise StageInputMissing(f"missing stage input {path}; run the previous stage first")
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _write_manifest(stage_dir: Path, stage: str, cfg: RunConfig, counts: dict, inputs: dict[str, Path]) -> None:
    outputs = {
        str(p.relative_to(stage_dir)): file_digest(p)
        for p in sorted(stage_dir.rglob("*"))
        if p.is_file() and p.name != "manifest.json"
    }
    _write_json(
        stage_dir / "manifest.json",
        {
            "stage": stage,
            "config_hash": cfg.digest(),
            "seed": cfg.seed,
            "version": __version__,
            "counts": counts,
            "inputs": {k: file_digest(v) for k, v in sorted(inputs.items())},
            "outputs": outputs,
        },
    )


def _stage_dir(cfg: RunConfig, name: str) -> Path:
    d = Path(cfg.output_dir) / name
    d.mkdir(parents=True, exist_ok=True)
    return d


def _client(cfg: RunConfig, model: str | None = None) -> EndpointClient:
    ep = cfg.endpoint
    out = Path(cfg.output_dir)
    return EndpointClient(
        base_url=ep.base_url,
        model=model or ep.model,
        temperature=float(ep.temperature),
        max_retries=int(ep.max_retries),
        backoff=tuple(float(b) for b in ep.backoff),
        api_key_env=ep.api_key_env,
        timeout=float(ep.timeout),
        cache_dir=out / "cache",
        log_path=out / "logs" / "requests.jsonl",
        max_concurrency=int(ep.max_concurrency),
        min_interval=float(ep.min_interval),
    )


def _working_graph(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    for candidate in (out / "curate" / "graph.json", out / "graph" / "graph.json"):
        if candidate.exists():
            return candidate
    raise StageInputMissing("no graph found; run `ingest` (and optionally `curate`) first")


def _load_triples(cfg: RunConfig) -> tuple[list[Triple], Path]:
    path = Path(cfg.output_dir) / "triples" / "triples.jsonl"
    triples = []
    for row in _read_jsonl(path):
        try:
            triples.append(Triple.from_dict(row))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: malformed triple record ({exc})") from exc
    return triples, path


def common(fn):
    @click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML run config.")
    @click.option("--output-dir", "-o", type=click.Path(file_okay=False), help="Root directory for artifacts.")
    @click.option("--seed", type=int, help="Root seed.")
    @click.option("--jobs", type=int, help="Parallel jobs within a stage.")
    @functools.wraps(fn)
    def wrapper(config_path, output_dir, seed, jobs, **kwargs):
        overrides = {"output_dir": output_dir, "seed": seed, "jobs": jobs}
        for key in list(kwargs):
            if key.startswith("cfg_"):
                overrides[key[4:]] = kwargs.pop(key)
        cfg = load_config(config_path, overrides).validate()
        return fn(cfg, **kwargs)

    return wrapper


def echo_table(title: str, table: str) -> None:
    click.echo(f"{title}\n{table}")


# ----------------------------------------------------------------- commands


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.version_option(__version__)
def cli(verbose):
    """Graph-guided generation of job description / resume triples."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.argument("graphs", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["edge-tsv", "graph-json"]), help="Force input format.")
@common
def ingest(cfg: RunConfig, graphs, fmt):
    """Validate and merge graph files into graph/graph.json."""
    paths = [Path(p) for p in (graphs or cfg.graphs)]
    if not paths:
        raise ConfigError("no graph files given (arguments or `graphs` in the config)")
    loaded = [ingest_graph(p, fmt) for p in paths]
    g = merge_graphs(loaded)
    stats = compute_stats(g)
    d = _stage_dir(cfg, "graph")
    (d / "graph.json").write_text(dumps_graph(g), encoding="utf-8")
    _write_json(d / "stats.json", stats.__dict__)
    (d / "stats.txt").write_text(stats.table(), encoding="utf-8")
    dupes = sum(x.duplicates_collapsed for x in loaded)
    _write_manifest(
        d,
        "ingest",
        cfg,
        {"occupations": stats.occupation_count, "skills": stats.skill_count, "edges": stats.edge_count, "duplicate_edges": dupes},
        {f"input[{i}]": p for i, p in enumerate(paths)},
    )
    echo_table("Skill-occupation graph", stats.table())


@cli.command()
@click.option("--occupations", "cfg_occupations", type=click.Path(exists=True, dir_okay=False), help="Titles to add, one per line.")
@click.option("--reference-graph", "cfg_reference_graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--renderer", "cfg_renderer", type=click.Choice(["template", "endpoint"]))
@common
def curate(cfg: RunConfig):
    """Add occupations with generated skills to the ingested graph."""
    if not cfg.occupations:
        raise ConfigError("curate needs an occupations file")
    base_path = Path(cfg.output_dir) / "graph" / "graph.json"
    if not base_path.exists():
        raise StageInputMissing("run `ingest` before `curate`")
    g = ingest_graph(base_path, "graph-json")
    titles = [t.strip() for t in Path(cfg.occupations).read_text(encoding="utf-8").splitlines() if t.strip()]
    reference = ingest_graph(cfg.reference_graph) if cfg.reference_graph else None
    if reference is None and cfg.renderer != "endpoint":
        raise ConfigError("template-mode curation borrows skills from a reference graph; supply one or use the endpoint")

    if reference is not None:
        plans = [match_occupation(t, reference) for t in titles]
    else:
        plans = [plan_from_distribution(t, Rng.derived(cfg.seed, "curate", i)) for i, t in enumerate(titles)]

    d = _stage_dir(cfg, "curate")
    write_plans(plans, d / "plans.jsonl")
    prompts = [build_skill_generation_prompt(p) for p in plans]
    (d / "prompts.txt").write_text("\n".join(prompts) + "\n", encoding="utf-8")

    client = _client(cfg) if cfg.renderer == "endpoint" else None
    rejects, accepted = [], []
    for i, (plan, prompt) in enumerate(zip(plans, prompts)):
        if client is not None:
            skills = parse_generated_skills(client.complete(prompt, f"curate:{i}"))
        else:
            skills = reference_skill_fallback(plan, reference)
        if not skills:
            rejects.append({"title": plan.occupation_title, "error": "empty-skill-list"})
            continue
        accepted.append((plan.occupation_title, skills))
    g = merge_generated_batch(g, accepted)
    _dump_jsonl(d / "rejects.jsonl", rejects)
    (d / "graph.json").write_text(dumps_graph(g), encoding="utf-8")
    stats = compute_stats(g)
    (d / "stats.txt").write_text(stats.table(), encoding="utf-8")
    _write_manifest(d, "curate", cfg, {"plans": len(plans), "rejected": len(rejects), "occupations": stats.occupation_count}, {"graph": base_path})
    echo_table(f"Curated graph ({len(plans)} plans, {len(rejects)} rejected)", stats.table())


@cli.command()
@click.option("--min-size", "cfg_min_cluster_size", type=int, help="Smallest cluster kept (default 10).")
@common
def cluster(cfg: RunConfig):
    """Partition occupations into clusters (clusters/clusters.json)."""
    gpath = _working_graph(cfg)
    g = ingest_graph(gpath, "graph-json")
    cs = cluster_graph(g, cfg.min_cluster_size)
    summary = cluster_stats(cs)
    d = _stage_dir(cfg, "clusters")
    cs.write(d / "clusters.json")
    (d / "stats.txt").write_text(summary.table(), encoding="utf-8")
    _write_manifest(d, "cluster", cfg, summary.__dict__, {"graph": gpath})
    echo_table("Clusters", summary.table())


@cli.command()
@click.option("--count", "cfg_triple_count", type=int, help="Number of triples to plan.")
@click.option("--renderer", "cfg_renderer", type=click.Choice(["template", "endpoint"]))
@common
def sample(cfg: RunConfig):
    """Plan triples: subgraph walk, ordering, time spans, names, perturbation."""
    gpath = _working_graph(cfg)
    cpath = Path(cfg.output_dir) / "clusters" / "clusters.json"
    if not cpath.exists():
        raise StageInputMissing("run `cluster` before `sample`")
    g = ingest_graph(gpath, "graph-json")
    cs = ClusterSet.read(cpath)
    if not cs.clusters:
        raise DataError("no clusters survived filtering; lower min_cluster_size")
    names = NamePool.from_files(cfg.names.get("female"), cfg.names.get("male"))
    oracle = None
    if cfg.use_oracles:
        client = _client(cfg)
        oracle = client.oracle
    planned = plan_triples(g, cs, cfg.triple_count, cfg.seed, names, oracle, oracle, jobs=cfg.jobs)
    d = _stage_dir(cfg, "specs")
    _dump_jsonl(d / "specs.jsonl", ({"spec": s.to_dict(), "annotation": a.to_dict()} for s, a in planned))
    shortfalls = sum(s.skill_shortfall or s.experience_shortfall for s, _ in planned)
    _write_manifest(d, "sample", cfg, {"specs": len(planned), "shortfalls": shortfalls}, {"graph": gpath, "clusters": cpath})
    click.echo(f"planned {len(planned)} triples ({shortfalls} with shortfall)")


@cli.command()
@click.option("--renderer", "cfg_renderer", type=click.Choice(["template", "endpoint"]))
@common
def generate(cfg: RunConfig):
    """Render planned triples (template or endpoint) into triples/triples.jsonl."""
    spath = Path(cfg.output_dir) / "specs" / "specs.jsonl"
    planned = [(TripleSpec.from_dict(r["spec"]), AnnotationRecord.from_dict(r["annotation"])) for r in _read_jsonl(spath)]
    client = _client(cfg) if cfg.renderer == "endpoint" else None
    outcome = render_all(planned, cfg.renderer, client, jobs=cfg.jobs)
    d = _stage_dir(cfg, "triples")
    _dump_jsonl(d / "triples.jsonl", (t.to_dict() for t in outcome.triples))
    _dump_jsonl(d / "rejects.jsonl", outcome.rejects)
    counts = {"triples": len(outcome.triples), "rejected": len(outcome.rejects), "endpoint_failures": len(outcome.failures)}
    _write_manifest(d, "generate", cfg, counts, {"specs": spath})
    click.echo(f"rendered {len(outcome.triples)} triples, {len(outcome.rejects)} rejected")
    if outcome.failures:
        ids = ", ".join(f.triple_id or "?" for f in outcome.failures[:10])
        raise EndpointFailure(f"{len(outcome.failures)} triple(s) hit endpoint failures ({ids}); rerun to resume")


@cli.command("assess")
@click.option("--sample-size", "cfg_quality_sample", type=int, help="Documents to score (default 100).")
@click.option("--judge-model", "cfg_judge_model", help="Judge model name.")
@common
def assess_cmd(cfg: RunConfig):
    """Score a sample of documents for consistency and factuality."""
    triples, tpath = _load_triples(cfg)
    client = _client(cfg, cfg.judge_model)
    outcome = assess(triples, client, cfg.quality_sample, cfg.seed, jobs=cfg.jobs)
    d = _stage_dir(cfg, "quality")
    _dump_jsonl(d / "scores.jsonl", (s.to_dict() for s in outcome.scores))
    _dump_jsonl(d / "rejects.jsonl", outcome.unparseable)
    if not outcome.scores:
        raise DataError("no judge reply contained a usable score")
    summary = aggregate_scores(outcome.scores, by_kind=True)
    table = score_table(summary)
    (d / "report.txt").write_text(table, encoding="utf-8")
    _write_json(d / "report.json", {f"{k[0]}/{k[1]}": v.__dict__ for k, v in summary.items()})
    _write_manifest(d, "assess", cfg, {"scores": len(outcome.scores), "unparseable": len(outcome.unparseable)}, {"triples": tpath})
    echo_table("Quality (mean ± std)", table)


@cli.command("export")
@click.option("--split-sizes", "cfg_split_sizes", nargs=3, type=int, help="train test dev triple counts.")
@click.option("--noise/--no-noise", "cfg_noise", default=None, help="Also write the noise-augmented matching set.")
@common
def export_cmd(cfg: RunConfig):
    """Write per-task JSON Lines files for each split."""
    triples, tpath = _load_triples(cfg)
    sizes = tuple(cfg.split_sizes) if cfg.split_sizes else scaled_split_sizes(len(triples))
    assignment = assign_splits((t.id for t in triples), sizes, cfg.seed)
    d = _stage_dir(cfg, "export")
    _write_json(d / "splits.json", {"sizes": list(sizes), "assignment": assignment})
    counts = {}
    jobs = [(task, False) for task in TASKS] + ([("matching", True)] if cfg.noise else [])
    for task, noise in jobs:
        result = export_task(triples, task, noise=noise, seed=cfg.seed)
        name = "matching-noise" if noise else task
        (d / name).mkdir(exist_ok=True)
        for split_name, records in split(result.records, assignment).items():
            counts[f"{name}/{split_name}"] = _dump_jsonl(d / name / f"{split_name}.jsonl", (r.to_dict() for r in records))
        counts[f"{name}/skipped"] = result.skipped
    _write_manifest(d, "export", cfg, counts, {"triples": tpath})
    for key, n in counts.items():
        click.echo(f"{key:<28}{n:>8}")


@cli.command()
@common
def stats(cfg: RunConfig):
    """Corpus statistics: document word counts, sampled/removed means, categories."""
    triples, tpath = _load_triples(cfg)
    cmap = CategoryMap.load(cfg.category_map)
    s = compute_corpus_stats(triples, cmap)
    d = _stage_dir(cfg, "stats")
    _write_json(d / "stats.json", s.to_dict())
    report = (
        "Documents\n" + document_table(s) + "\nAnnotations\n" + annotation_table(s) + "\nCategories\n" + category_table(s)
    )
    (d / "report.txt").write_text(report, encoding="utf-8")
    _write_manifest(d, "stats", cfg, {"triples": s.triples}, {"triples": tpath})
    click.echo(report, nl=False)


def _predictions(path: Path) -> dict[str, object]:
    out = {}
    for row in _read_jsonl(path):
        if "id" not in row or "prediction" not in row:
            raise DataError(f"{path}: every line needs 'id' and 'prediction'")
        out[row["id"]] = row["prediction"]
    return out


def _aligned(records: list[TaskRecord], preds: dict) -> list:
    missing = [r.id for r in records if r.id not in preds]
    if missing:
        raise DataError(f"{len(missing)} record(s) have no prediction (first: {missing[0]})")
    return [preds[r.id] for r in records]


def _label(p) -> int:
    return int(p["label"] if isinstance(p, dict) else p)


def evaluate_task(task: str, records: list[TaskRecord], preds: dict) -> tuple[dict, str]:
    """Scores for one task plus a text table shaped like the published ones."""
    got = _aligned(records, preds)
    if task in ("matching", "explanation"):
        m = eval_matching([_label(p) for p in got], [r.target["label"] for r in records])
        result = {"matching": m.to_dict()}
        hit = "-"
        if task == "explanation":
            neg = [(r, p) for r, p in zip(records, got) if r.target["label"] == 0]
            rate = explanation_hit_rate(
                [p.get("explanation", "") if isinstance(p, dict) else "" for _, p in neg],
                [r.target["explanation"] for r, _ in neg],
            )
            result["explaining"] = {"hit_rate": rate}
            hit = f"{100 * rate:.1f}"
        table = (
            f"{'':<8}{'Matching':>16}{'Explaining':>12}\n{'':<8}{'Acc':>8}{'F1':>8}{'Acc':>12}\n"
            f"{'model':<8}{100 * m.accuracy:>8.1f}{100 * m.f1:>8.1f}{hit:>12}\n"
        )
        return result, table
    if task == "extraction":
        result: dict = {}
        rows = []
        for label, kinds in (("Res", ("resume-matched", "resume-unmatched")), ("JD", ("job-description",))):
            cells = []
            for fld in ("skills", "experiences"):
                pairs = [(r, p) for r, p in zip(records, got) if r.input["document_kind"] in kinds and r.input["field"] == fld]
                e = eval_extraction(
                    [p["items"] if isinstance(p, dict) else p for _, p in pairs],
                    [r.target["items"] for r, _ in pairs],
                )
                result[f"{label}/{fld}"] = e.to_dict()
                cells += [100 * e.accuracy, 100 * e.f1]
            rows.append(f"{label:<5}" + "".join(f"{c:>8.1f}" for c in cells))
        head = f"{'':<5}{'Skill':>16}{'Experience':>16}\n{'':<5}{'Acc':>8}{'F1':>8}{'Acc':>8}{'F1':>8}\n"
        return result, head + "\n".join(rows) + "\n"
    if task == "editing":
        result = {}
        lines = [f"{'':<7}{'ROUGE':>8}{'F_add':>8}"]
        for label, fld in (("Skill", "skills"), ("Exp", "experience")):
            e = eval_editing(
                [p[fld] for p in got],
                [r.target[fld] for r in records],
                [r.input["resume"] for r in records],
            )
            result[label] = e.to_dict()
            lines.append(f"{label:<7}{e.rouge2_f1:>8.3f}{e.f_add:>8.3f}")
        return result, "\n".join(lines) + "\n"
    raise ConfigError(f"unknown task {task!r}")


@cli.command("eval")
@click.option("--task", type=click.Choice(TASKS), required=True)
@click.option("--predictions", type=click.Path(exists=True, dir_okay=False), required=True, help="JSONL of {id, prediction}.")
@click.option("--split", "split_name", type=click.Choice(["train", "test", "dev"]), default="test", show_default=True)
@common
def eval_cmd(cfg: RunConfig, task, predictions, split_name):
    """Score predictions against an exported split."""
    gold_path = Path(cfg.output_dir) / "export" / task / f"{split_name}.jsonl"
    records = [TaskRecord.from_dict(r) for r in _read_jsonl(gold_path)]
    try:
        result, table = evaluate_task(task, records, _predictions(Path(predictions)))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"predictions do not fit the {task} task: {exc!r}") from exc
    d = _stage_dir(cfg, "eval")
    _write_json(d / f"{task}-{split_name}.json", result)
    (d / f"{task}-{split_name}.txt").write_text(table, encoding="utf-8")
    _write_manifest(d, "eval", cfg, {f"{task}-{split_name}": len(records)}, {"gold": gold_path, "predictions": Path(predictions)})
    echo_table(f"{task} ({split_name})", table)


@cli.command()
@click.argument("graphs", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--count", "cfg_triple_count", type=int, help="Number of triples.")
@click.option("--min-size", "cfg_min_cluster_size", type=int, help="Smallest cluster kept.")
@common
def run(cfg: RunConfig, graphs):
    """Template-mode pipeline: ingest, cluster, sample, generate, export, stats."""
    if cfg.renderer != "template":
        raise ConfigError("`run` is template-only; call the stages individually for endpoint mode")
    ctx = click.get_current_context()
    shared = {"config_path": ctx.params.get("config_path"), "output_dir": cfg.output_dir, "seed": cfg.seed, "jobs": cfg.jobs}
    ctx.invoke(ingest, graphs=graphs, fmt=None, **shared)
    ctx.invoke(cluster, cfg_min_cluster_size=cfg.min_cluster_size, **shared)
    ctx.invoke(sample, cfg_triple_count=cfg.triple_count, cfg_renderer="template", **shared)
    ctx.invoke(generate, cfg_renderer="template", **shared)
    split_sizes = tuple(cfg.split_sizes) if cfg.split_sizes else None
    ctx.invoke(export_cmd, cfg_split_sizes=split_sizes, cfg_noise=cfg.noise, **shared)
    ctx.invoke(stats, **shared)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, prog_name="resumegen", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"data error ({exc.kind}): {exc}", err=True)
        return 2
    except EndpointError as exc:
        click.echo(f"endpoint error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
