import random
from fractions import Fraction

import pandas as pd
import streamlit as st

import harness
import report_tables
from adversaries import ZERO3_DEFAULT_PHASES, bap_zero_phase_counts
from offline_oracle import DEFAULT_BUDGET_MS, OracleLimits, opt
from online_algorithms import ALGORITHMS, COLOR_RULES, INDEX_RULES, TieBreak
from packing_core import ColorfulPackingError, format_size, parse_instance

SOURCES = ["Upload", "Generator family", "Random"]
FAMILY_DEFAULTS = {
    "prop1-eps": {"M": 4, "N": 2},
    "prop1-wf": {"M": 4, "N": 2},
    "bap-zero": {"M": None, "N": 2},
    "bap-general": {"M": None, "N": 2},
    "bap-3color": {"M": None, "N": 2},
}


# ------------------------------------------------------------------
# Cached helpers
# ------------------------------------------------------------------
@st.cache_data(show_spinner=False)
def load_uploaded_instance(text):
    return parse_instance(text)


@st.cache_data(show_spinner="Generating instance…")
def load_family(name, M, N):
    family = harness.build_family(name, M, N)
    return family.instance, family.certificate, family.claim


@st.cache_data(show_spinner=False)
def load_random_instance(seed, n_max, colors, sizes):
    params = harness.RandomInstanceParams(1, n_max, colors, sizes)
    return harness.random_instance(random.Random(seed), params)


@st.cache_data(show_spinner="Solving offline OPT…")
def solve_opt(instance, budget_ms):
    return opt(instance, OracleLimits(budget_ms=budget_ms))


@st.cache_data(show_spinner="Running adversary…")
def run_duel(alg, adversary, index_rule, color_rule, N, M, phases):
    return harness.cmd_duel(alg, adversary, TieBreak(index_rule, color_rule), N, M, phases)


# ------------------------------------------------------------------
# Renderers
# ------------------------------------------------------------------
def show_packing(alg, instance, tiebreak):
    summary, packing, trace = harness.cmd_pack(alg, instance, tiebreak)
    c1, c2, c3 = st.columns(3)
    c1.metric("Items", summary["n"])
    c2.metric("Bins", summary["bins"])
    c3.metric("Pseudo-bins", "-" if summary["pseudo_bins"] is None else summary["pseudo_bins"])

    tab_bins, tab_trace = st.tabs(["Bins", "Trace"])
    with tab_bins:
        st.dataframe(report_tables.packing_frame(packing), use_container_width=True, hide_index=True)
    with tab_trace:
        st.dataframe(report_tables.trace_frame(trace, instance), use_container_width=True,
                     hide_index=True)


def show_bounds_and_opt(alg, instance, tiebreak, budget_ms):
    report = harness.cmd_bounds(instance)
    st.subheader("Lower bounds")
    bounds_df = pd.DataFrame([{**report, "witness": str(report["witness"])}])
    st.dataframe(bounds_df, use_container_width=True, hide_index=True)

    st.subheader("Offline OPT")
    result = solve_opt(instance, budget_ms)
    if not result.exact:
        st.warning(f"Oracle inexact: {result.reason}. {result.bins} bins is an upper bound only.")
    summary, _, _ = harness.cmd_pack(alg, instance, tiebreak)
    c1, c2, c3 = st.columns(3)
    c1.metric("OPT" if result.exact else "OPT ≤", result.bins)
    c2.metric(f"{alg} bins", summary["bins"])
    if result.bins:
        c3.metric("Ratio", format_size(Fraction(summary["bins"], result.bins)))
    st.dataframe(report_tables.packing_frame(result.certificate), use_container_width=True,
                 hide_index=True)


def show_duel(alg, tiebreak):
    adversary = st.selectbox("Adversary", ["lb2", "zero3"])
    if adversary == "lb2":
        N = st.number_input("N", min_value=4, max_value=30, value=10)
        M, phases = None, ZERO3_DEFAULT_PHASES
    else:
        N = None
        M = st.number_input("M", min_value=2, max_value=200, value=9)
        phases = st.number_input("Phases", min_value=1, max_value=12, value=6)
    transcript = run_duel(alg, adversary, tiebreak.index_rule, tiebreak.color_rule, N, M, phases)

    c1, c2, c3 = st.columns(3)
    c1.metric(f"{alg} bins", transcript.bins_alg)
    c2.metric("OPT ≤", transcript.opt_upper_bound)
    c3.metric("Ratio ≥", format_size(transcript.ratio_lower_bound))
    if transcript.passed:
        st.success("Every structural check holds.")
    else:
        st.error("Some structural checks fail.")

    tab_checks, tab_vars, tab_cert = st.tabs(["Checks", "Variables", "Certificate"])
    with tab_checks:
        st.dataframe(report_tables.lemma_frame(transcript.lemma_checks), use_container_width=True,
                     hide_index=True)
    with tab_vars:
        st.json(transcript.variables)
    with tab_cert:
        st.dataframe(report_tables.packing_frame(transcript.certificate), use_container_width=True,
                     hide_index=True)


def show_bap_zero_phases(N, tiebreak):
    rows = bap_zero_phase_counts(N, tiebreak)
    df = pd.DataFrame(rows, columns=["phase", "pseudo_bins", "expected"])
    df["matches"] = df["pseudo_bins"] == df["expected"]
    st.dataframe(df, use_container_width=True, hide_index=True)


# ------------------------------------------------------------------
# Sidebar
# ------------------------------------------------------------------
st.sidebar.header("Configuration")

page = st.sidebar.selectbox("Page", ["Packing", "Bounds and OPT", "Adversary duel"])
alg = st.sidebar.selectbox("Algorithm", sorted(ALGORITHMS), index=sorted(ALGORITHMS).index("bap"))
index_rule = st.sidebar.selectbox("Index tie-break", INDEX_RULES)
color_rule = st.sidebar.selectbox("Color tie-break", COLOR_RULES)
budget_ms = st.sidebar.number_input("Oracle budget (ms)", min_value=1, value=DEFAULT_BUDGET_MS)
tiebreak = TieBreak(index_rule, color_rule)

st.title("Colorful bin packing explorer")

if page == "Adversary duel":
    show_duel(alg, tiebreak)
    st.stop()

source = st.sidebar.selectbox("Instance source", SOURCES)
instance = None
family = None
try:
    if source == "Upload":
        uploaded = st.sidebar.file_uploader("Instance file", type=["cbp", "txt"])
        if uploaded is None:
            st.info("Upload a file with one `<color> <size>` line per item.")
            st.stop()
        instance = load_uploaded_instance(uploaded.getvalue().decode("utf-8"))
    elif source == "Generator family":
        family = st.sidebar.selectbox("Family", harness.FAMILIES)
        defaults = FAMILY_DEFAULTS[family]
        M = None
        if defaults["M"] is not None:
            M = st.sidebar.number_input("M", min_value=2, value=defaults["M"])
        N = st.sidebar.number_input("N", min_value=1, max_value=4, value=defaults["N"])
        instance, certificate, claim = load_family(family, M, N)
        st.sidebar.json(claim)
        st.sidebar.caption(f"Certificate: {certificate.bin_count} bins")
    else:
        seed = st.sidebar.number_input("Seed", min_value=0, value=0)
        n_max = st.sidebar.slider("Max items", 1, 40, 14)
        colors = st.sidebar.slider("Colors", 1, 5, 3)
        sizes = st.sidebar.selectbox("Sizes", ["rational", "zero", "mixed"])
        instance = load_random_instance(seed, n_max, colors, sizes)
except ColorfulPackingError as exc:
    st.error(f"Could not build instance: {exc}")
    st.stop()

if page == "Packing":
    show_packing(alg, instance, tiebreak)
    if family == "bap-zero":
        st.subheader("Pseudo-bins after each phase")
        show_bap_zero_phases(N, tiebreak)
else:
    show_bounds_and_opt(alg, instance, tiebreak, budget_ms)
