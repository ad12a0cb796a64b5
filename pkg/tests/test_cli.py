import json
from pathlib import Path

import pytest
import yaml

from resumegen.cli import main
from resumegen.graph import write_graph

from factories import build_graph, clustered_graph
from mockgen import generation_replies, oracle_responder


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "graph.json"
    write_graph(clustered_graph(n_clusters=3, per_cluster=15, seed=1), path)
    return path


def _config(tmp_path, **values):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(values), encoding="utf-8")
    return str(path)


def _tree(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_cluster_twice_is_byte_identical(tmp_path, graph_file):
    out = str(tmp_path / "out")
    assert main(["ingest", str(graph_file), "-o", out]) == 0
    assert main(["cluster", "-o", out]) == 0
    first = _tree(Path(out) / "clusters")
    assert main(["cluster", "-o", out]) == 0
    assert _tree(Path(out) / "clusters") == first
    manifest = json.loads(first["manifest.json"])
    assert manifest["stage"] == "cluster" and manifest["counts"]["count"] == 3
    assert set(manifest) >= {"config_hash", "seed", "version", "counts", "outputs"}
    assert "clusters.json" in manifest["outputs"]


def test_run_counts(tmp_path, graph_file, capsys):
    out = tmp_path / "out"
    assert main(["run", str(graph_file), "-o", str(out), "--count", "100"]) == 0
    exp = out / "export"
    n = lambda task: sum(len((exp / task / f"{s}.jsonl").read_text().splitlines()) for s in ("train", "test", "dev"))
    assert n("matching") == 200 and n("editing") == 100 and n("extraction") == 600
    report = capsys.readouterr().out
    assert "R-U" in report and "Removed" in report
    assert not (out / "cache").exists() and not (out / "logs").exists()


def test_exit_codes(tmp_path, graph_file, monkeypatch, capsys):
    out = str(tmp_path / "out")
    assert main(["cluster", "-o", out]) == 1  # stage input missing
    assert main(["ingest", "-o", out]) == 1  # nothing to ingest
    assert main(["nonsense"]) == 1
    assert main(["ingest", str(graph_file), "--config", _config(tmp_path, renderer="magic")]) == 1
    assert main(["ingest", str(graph_file), "--config", _config(tmp_path, unknown_key=1)]) == 1
    bad = tmp_path / "bad.tsv"
    bad.write_text("occupation_id\toccupation_title\tskill_id\tskill_name\nA\tNurse\n", encoding="utf-8")
    assert main(["ingest", str(bad), "-o", out]) == 2
    assert "malformed-row" in capsys.readouterr().err
    assert main(["ingest", str(graph_file), "-o", out]) == 0
    assert main(["cluster", "-o", out]) == 0
    assert main(["sample", "-o", out, "--count", "5"]) == 0
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    assert main(["generate", "-o", out, "--renderer", "endpoint"]) == 3
    assert main(["--help"]) == 0


def test_curate_template_mode(tmp_path, graph_file):
    ref = tmp_path / "ref.tsv"
    write_graph(build_graph([("r1", "k1"), ("r1", "k2"), ("r1", "k3")], titles={"r1": "Registered Nurse"}, skill_names={"k1": "CPR", "k2": "Triage", "k3": "Charting"}), ref)
    titles = tmp_path / "titles.txt"
    titles.write_text("Nurse Practitioner\nNursing Assistant\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["ingest", str(graph_file), "-o", str(out)]) == 0
    assert main(["curate", "-o", str(out), "--occupations", str(titles)]) == 1  # no reference, template mode
    assert main(["curate", "-o", str(out), "--occupations", str(titles), "--reference-graph", str(ref)]) == 0
    g = json.loads((out / "curate" / "graph.json").read_text())
    added = [o for o in g["occupations"] if o["source"] == "bls-generated"]
    assert sorted(o["title"] for o in added) == ["Nurse Practitioner", "Nursing Assistant"]
    assert len((out / "curate" / "plans.jsonl").read_text().splitlines()) == 2
    assert main(["cluster", "-o", str(out), "--min-size", "2"]) == 0
    assert json.loads((out / "clusters" / "manifest.json").read_text())["inputs"]["graph"]


def test_curate_endpoint_mode(tmp_path, graph_file, mock_endpoint, api_key):
    mock_endpoint.responder = oracle_responder
    titles = tmp_path / "titles.txt"
    titles.write_text("Baker\n", encoding="utf-8")
    cfg = _config(tmp_path, renderer="endpoint", endpoint={"base_url": mock_endpoint.url, "backoff": [0]})
    out = str(tmp_path / "out")
    assert main(["ingest", str(graph_file), "-o", out]) == 0
    assert main(["curate", "--config", cfg, "-o", out, "--occupations", str(titles)]) == 0
    g = json.loads((Path(out) / "curate" / "graph.json").read_text())
    baker = next(o for o in g["occupations"] if o["title"] == "Baker")
    names = {s["id"]: s["name"] for s in g["skills"]}
    assert sorted(names[s] for o, s in g["edges"] if o == baker["id"]) == ["Communication", "Planning", "Teamwork"]
    assert mock_endpoint.prompts[0].startswith("Generate ") and " number of required skills necessary for the occupation Baker." in mock_endpoint.prompts[0]


def test_interrupted_endpoint_run_resumes_without_duplicates(tmp_path, graph_file, mock_endpoint, api_key):
    mock_endpoint.responder = oracle_responder
    cfg = _config(
        tmp_path,
        renderer="endpoint",
        triple_count=12,
        endpoint={"base_url": mock_endpoint.url, "backoff": [0], "max_retries": 1},
    )
    out = tmp_path / "out"
    args = ["--config", cfg, "-o", str(out)]
    assert main(["ingest", str(graph_file), *args]) == 0
    assert main(["cluster", *args]) == 0
    assert main(["sample", *args]) == 0
    mock_endpoint.replies = generation_replies(out)
    mock_endpoint.fail_after = mock_endpoint.served + 5
    assert main(["generate", *args]) == 3
    mock_endpoint.fail_after = None
    assert main(["generate", *args]) == 0
    assert len((out / "triples" / "triples.jsonl").read_text().splitlines()) == 12
    events = [json.loads(l) for l in (out / "logs" / "requests.jsonl").read_text().splitlines()]
    ok = [e["key"] for e in events if e["event"] == "request" and e["status"] == 200]
    assert len(ok) == len(set(ok))
    assert any(e["event"] == "cache-hit" for e in events)
    spec_rows = [json.loads(l) for l in (out / "specs" / "specs.jsonl").read_text().splitlines()]
    assert {r["spec"]["ordering_source"] for r in spec_rows} <= {"oracle", "trivial"}
    assert {r["spec"]["targets"]["source"] for r in spec_rows} == {"oracle"}
