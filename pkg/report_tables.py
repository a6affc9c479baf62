"""
pandas frames for everything the harness prints: packings, traces, ratio
reports and suite results, plus the csv/json/table renderers.
"""
import json
from fractions import Fraction

import pandas as pd

from packing_core import format_size

FORMATS = ("json", "csv", "table")


# =========================
# Frames
# =========================
def packing_frame(packing):
    rows = []
    for number, bin_ in enumerate(packing.bins, start=1):
        rows.append({
            "bin": number,
            "items": " ".join(str(item.index) for item in bin_.contents),
            "colors": " ".join(item.color for item in bin_.contents),
            "load": format_size(bin_.load),
            "last_color": bin_.last_color,
        })
    return pd.DataFrame(rows, columns=["bin", "items", "colors", "load", "last_color"])


def trace_frame(trace, instance=None):
    df = pd.DataFrame([step.to_dict() for step in trace],
                      columns=["item", "bin", "new_bin", "pseudo_bin", "new_pseudo_bin"])
    if instance is not None and not df.empty:
        df.insert(1, "color", [instance.item(i).color for i in df["item"]])
        df.insert(2, "size", [format_size(instance.item(i).size) for i in df["item"]])
    return df


def ratio_frame(rows):
    columns = ["run", "algorithm", "source", "n", "bins_alg", "denominator",
               "denominator_kind", "ratio", "ratio_claim", "ratio_decimal", "checks_passed"]
    df = pd.DataFrame([row.to_dict() for row in rows], columns=columns)
    return df.sort_values("run").reset_index(drop=True)


def suite_frame(results):
    return pd.DataFrame(
        [result.to_dict() for result in results],
        columns=["criterion", "status", "detail", "elapsed_s"],
    )


def lemma_frame(checks):
    return pd.DataFrame([check.to_dict() for check in checks], columns=["name", "passed", "detail"])


# =========================
# Ratios
# =========================
def ratio_summary(df):
    """Max and mean of the exact ratio column, kept as p/q strings."""
    if df.empty:
        return {"runs": 0, "max_ratio": None, "mean_ratio": None}
    ratios = [Fraction(value) for value in df["ratio"]]
    return {
        "runs": len(ratios),
        "max_ratio": format_size(max(ratios)),
        "mean_ratio": format_size(sum(ratios, Fraction(0)) / len(ratios)),
    }


def rederive_ratios(df):
    """Recompute bins_alg / denominator from the raw columns of a ratio frame."""
    return [format_size(Fraction(int(b), int(d))) for b, d in zip(df["bins_alg"], df["denominator"])]


def read_ratio_csv(path_or_buffer):
    return pd.read_csv(path_or_buffer, dtype={"ratio": str}, comment="#")


# =========================
# Rendering
# =========================
def header_lines(header):
    """One `# key: value` comment line per header entry; dict values as compact json."""
    lines = []
    for key, value in (header or {}).items():
        text = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
        lines.append(f"# {key}: {text}\n")
    return "".join(lines)


def render(df, fmt, header=None):
    """csv and table lead with `header` as comment lines; json wraps the rows with it."""
    if fmt == "csv":
        return header_lines(header) + df.to_csv(index=False)
    if fmt == "table":
        return header_lines(header) + df.to_string(index=False) + "\n"
    payload = dict(header or {})
    payload["rows"] = json.loads(df.to_json(orient="records"))
    return json.dumps(payload, indent=2) + "\n"
