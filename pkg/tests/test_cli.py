from __future__ import annotations

import json
from pathlib import Path

from click.testing import CliRunner

from circoskit.cli import main

CORPUS_JSONL = "\n".join(
    [
        '{"id": "r1", "annotation": "one", "config": "<ideogram><split><chord>"}',
        '{"id": "r2", "annotation": "two", "config": "<ideogram><highlight><split><histogram>"}',
    ]
)

SESSION_FILE = {
    "config": "<ideogram><split><histogram>",
    "datasets": [
        {"kind": "karyotype", "csv": "id,label,length,color\nchr1,Chr 1,100,#f00\n"},
        {"kind": "attachment", "csv": "block,start,end,value\nchr1,0,50,1\nchr1,50,100,2\n"},
    ],
}


def test_import_then_stats(tmp_path):
    runner = CliRunner()
    source = tmp_path / "rows.jsonl"
    source.write_text(CORPUS_JSONL, encoding="utf-8")
    store = tmp_path / "corpus.jsonl"

    result = runner.invoke(main, ["import", str(source), "--store", str(store)])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["accepted"] == 2
    assert store.exists()

    result = runner.invoke(main, ["stats", "--corpus", str(store), "--fmt", "json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["distributions"]["ringsPerPlot"] == {"2": 2}
    assert payload["stacked"]["labels"][0] == "start"

    result = runner.invoke(main, ["stats", "--corpus", str(store)])
    assert result.exit_code == 0
    assert "stacked P(inner|outer):" in result.output


def test_import_csv_source(tmp_path):
    runner = CliRunner()
    source = tmp_path / "rows.csv"
    source.write_text("id,annotation,config\nr1,hello,<chord>\n", encoding="utf-8")
    store = tmp_path / "corpus.jsonl"
    result = runner.invoke(main, ["import", str(source), "--store", str(store)])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["accepted"] == 1


def test_import_reports_rejects_with_nonzero_exit(tmp_path):
    runner = CliRunner()
    source = tmp_path / "rows.jsonl"
    source.write_text('{"id": "bad", "annotation": "x", "config": "<foo>"}', encoding="utf-8")
    store = tmp_path / "corpus.jsonl"
    result = runner.invoke(main, ["import", str(source), "--store", str(store)])
    assert result.exit_code == 1
    assert json.loads(result.output)["accepted"] == 0


def test_headless_render(tmp_path):
    runner = CliRunner()
    session = tmp_path / "session.json"
    session.write_text(json.dumps(SESSION_FILE), encoding="utf-8")
    output = tmp_path / "plot.svg"
    result = runner.invoke(main, ["render", "--session-file", str(session), "-o", str(output)])
    assert result.exit_code == 0, result.output
    svg = output.read_text(encoding="utf-8")
    assert svg.startswith("<?xml")
    assert 'class="track track-histogram"' in svg


def test_headless_render_to_stdout(tmp_path):
    runner = CliRunner()
    session = tmp_path / "session.json"
    session.write_text(json.dumps(SESSION_FILE), encoding="utf-8")
    result = runner.invoke(main, ["render", "--session-file", str(session)])
    assert result.exit_code == 0
    assert result.output.startswith("<?xml")


def test_bundled_demo_imports_and_renders(tmp_path):
    demo = Path(__file__).resolve().parent.parent / "demo"
    runner = CliRunner()
    store = tmp_path / "corpus.jsonl"
    result = runner.invoke(main, ["import", str(demo / "corpus.jsonl"), "--store", str(store)])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["rejected"] == []

    result = runner.invoke(main, ["stats", "--corpus", str(store), "--fmt", "json"])
    assert result.exit_code == 0, result.output

    output = tmp_path / "demo.svg"
    result = runner.invoke(main, ["render", "--session-file", str(demo / "session.json"), "-o", str(output)])
    assert result.exit_code == 0, result.output
    svg = output.read_text(encoding="utf-8")
    for kind in ("ideogram", "highlight", "histogram", "tile", "chord"):
        assert f'class="track track-{kind}"' in svg
