import io
import json
from fractions import Fraction

import pandas as pd

import harness
import report_tables
from adversaries import adversary_zero3
from harness import ExperimentSpec, RandomInstanceParams, RatioSource, cmd_ratio, random_instances, report_header
from online_algorithms import BalancedPseudo, run
from packing_core import parse_instance


def _instance():
    return parse_instance("R 1/4\nR 1/2\nB 1/4\nR 0")


def test_packing_frame():
    packing, _ = run(BalancedPseudo(), _instance())
    df = report_tables.packing_frame(packing)
    assert list(df.columns) == ["bin", "items", "colors", "load", "last_color"]
    assert df["items"].tolist() == ["1 3 4", "2"]
    assert df["load"].tolist() == ["1/2", "1/2"]
    assert df["last_color"].tolist() == ["R", "R"]


def test_trace_frame_includes_item_columns():
    instance = _instance()
    _, trace = run(BalancedPseudo(), instance)
    df = report_tables.trace_frame(trace, instance)
    assert df["color"].tolist() == ["R", "R", "B", "R"]
    assert df["size"].tolist() == ["1/4", "1/2", "1/4", "0"]
    assert df["pseudo_bin"].tolist() == [1, 2, 1, 1]


def test_empty_trace_frame():
    assert report_tables.trace_frame([]).empty


def _ratio_report():
    spec = ExperimentSpec("ratio", ("ff", "bap"), "random:5")
    sources = [RatioSource(f"r{i}", inst) for i, inst in
               enumerate(random_instances(5, 15, RandomInstanceParams(1, 12, 3, "rational")))]
    return spec, cmd_ratio(spec, sources, "oracle")


def test_ratio_csv_rederives_exactly():
    spec, report = _ratio_report()
    df = report_tables.ratio_frame(report.rows)
    text = report_tables.render(df, "csv", report_header(spec))
    assert text.splitlines()[1] == f"# version: {harness.__version__}"
    assert json.loads(text.splitlines()[0][len("# spec: "):])["algorithms"] == ["ff", "bap"]
    parsed = report_tables.read_ratio_csv(io.StringIO(text))
    assert len(parsed) == 30
    assert report_tables.rederive_ratios(parsed) == parsed["ratio"].tolist()
    assert parsed["ratio"].tolist() == df["ratio"].tolist()


def test_ratio_json_embeds_spec_and_summary():
    spec, report = _ratio_report()
    df = report_tables.ratio_frame(report.rows)
    header = {**report_header(spec), "summary": report_tables.ratio_summary(df)}
    payload = json.loads(report_tables.render(df, "json", header))
    assert payload["spec"]["algorithms"] == ["ff", "bap"]
    assert len(payload["rows"]) == 30
    assert payload["summary"]["runs"] == 30
    assert payload["summary"]["max_ratio"] == max(df["ratio"], key=Fraction)


def test_ratio_summary_empty():
    assert report_tables.ratio_summary(pd.DataFrame({"ratio": []})) == {
        "runs": 0, "max_ratio": None, "mean_ratio": None,
    }


def test_table_and_lemma_frames():
    transcript = adversary_zero3(BalancedPseudo(), 3, 2)
    df = report_tables.lemma_frame(transcript.lemma_checks)
    assert df["passed"].all()
    assert "recurrence" in df["name"].tolist()
    text = report_tables.render(df, "table")
    assert text.endswith("\n") and "certificate-valid" in text


def test_table_header_lines():
    df = report_tables.suite_frame([])
    text = report_tables.render(df, "table", {"version": "0.1.0", "summary": {"runs": 0}})
    assert text.splitlines()[:2] == ["# version: 0.1.0", '# summary: {"runs": 0}']
    assert report_tables.render(df, "csv") == "criterion,status,detail,elapsed_s\n"
