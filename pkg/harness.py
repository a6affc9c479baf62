"""
Experiment orchestration: the commands behind the CLI, labelled
competitive-ratio reports, seeded random instances and the acceptance suite.
"""
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from adversaries import (
    ZERO3_DEFAULT_PHASES,
    adversary_lb2,
    adversary_zero3,
    bap_3color_claim,
    bap_a,
    bap_general_claim,
    bap_zero_certificate,
    bap_zero_schedule,
    gen_bap_3color,
    gen_bap_general,
    gen_bap_zero,
    gen_prop1,
    prop1_certificate,
)
from lower_bounds import bounds_report, lb0, lb1, lb1_bruteforce, lb1_of_colors, witness_value
from offline_oracle import DEFAULT_BUDGET_MS, OracleLimits, exhaustive_opt, opt
from online_algorithms import (
    ALGORITHMS,
    DEFAULT_TIEBREAK,
    BalancedPseudo,
    Pseudo,
    TieBreak,
    make_algorithm,
    run,
)
from packing_core import (
    BLACK,
    BLUE,
    RED,
    WHITE,
    Instance,
    ParameterError,
    format_size,
    validate_packing,
)

__version__ = "0.1.0"

LOG = logging.getLogger(__name__)

FAMILIES = ("prop1-eps", "prop1-wf", "bap-zero", "bap-general", "bap-3color")
DENOMINATORS = ("oracle", "certificate", "bounds")
PALETTE = (WHITE, BLACK, RED, BLUE, "green")


# =========================
# Experiment description
# =========================
@dataclass(frozen=True)
class ExperimentSpec:
    command: str
    algorithms: tuple = ()
    source: str = ""
    params: tuple = ()
    tiebreak: TieBreak = DEFAULT_TIEBREAK
    budget_ms: int = DEFAULT_BUDGET_MS
    output_format: str = "json"
    seed: int = None

    def to_dict(self):
        return {
            "command": self.command,
            "algorithms": list(self.algorithms),
            "source": self.source,
            "params": {key: value for key, value in self.params},
            "tiebreak": self.tiebreak.to_dict(),
            "budget_ms": self.budget_ms,
            "format": self.output_format,
            "seed": self.seed,
        }


def report_header(spec):
    return {"spec": spec.to_dict(), "version": __version__}


# =========================
# Random instances
# =========================
@dataclass(frozen=True)
class RandomInstanceParams:
    n_min: int = 1
    n_max: int = 14
    colors: int = 3
    sizes: str = "mixed"  # zero | rational | mixed
    max_denominator: int = 10

    def __post_init__(self):
        if self.sizes not in ("zero", "rational", "mixed"):
            raise ParameterError(f"unknown size mode {self.sizes!r}")
        if not 1 <= self.colors <= len(PALETTE):
            raise ParameterError(f"colors must lie in 1..{len(PALETTE)}")
        if not 0 <= self.n_min <= self.n_max:
            raise ParameterError("need 0 <= n_min <= n_max")


def random_size(rng, max_denominator):
    q = rng.randint(1, max_denominator)
    return Fraction(rng.randint(0, q), q)


def random_instance(rng, params=RandomInstanceParams()):
    """Uniform item count, uniform colors from the palette, sizes per `params.sizes`."""
    n = rng.randint(params.n_min, params.n_max)
    palette = PALETTE[:params.colors]
    zero = params.sizes == "zero" or (params.sizes == "mixed" and rng.random() < 0.5)
    pairs = []
    for _ in range(n):
        size = 0 if zero else random_size(rng, params.max_denominator)
        pairs.append((rng.choice(palette), size))
    return Instance.from_pairs(pairs)


def random_instances(seed, count, params=RandomInstanceParams()):
    rng = random.Random(seed)
    return [random_instance(rng, params) for _ in range(count)]


# =========================
# Families
# =========================
@dataclass
class FamilyInstance:
    name: str
    instance: Instance
    certificate: object
    claim: dict = field(default_factory=dict)


def build_family(name, M=None, N=None, eps=None):
    """Generate a named family with its OPT certificate and the bin count claimed for it."""
    if name in ("prop1-eps", "prop1-wf"):
        if M is None or N is None:
            raise ParameterError(f"{name} needs --M and --N")
        instance = gen_prop1(name.split("-")[1], M, N)
        return FamilyInstance(name, instance, prop1_certificate(instance, M, N),
                              {"alg_bins": N * M - N + 1, "opt": M})
    if N is None:
        raise ParameterError(f"{name} needs --N")
    if name == "bap-zero":
        instance = gen_bap_zero(N)
        M, _ = bap_zero_schedule(N)
        return FamilyInstance(name, instance, bap_zero_certificate(instance, N),
                              {"bap_pseudo_bins": int(bap_a(N + 1) * M), "opt": M})
    if name == "bap-general":
        instance, certificate = gen_bap_general(N, eps)
        return FamilyInstance(name, instance, certificate,
                              {"bap_bins_at_least": bap_general_claim(N), "opt_at_most": 4 ** (N + 1)})
    if name == "bap-3color":
        instance, certificate = gen_bap_3color(N, eps)
        return FamilyInstance(name, instance, certificate,
                              {"bap_bins": bap_3color_claim(N), "opt_at_most": 4 ** (N + 1) + 2})
    raise ParameterError(f"unknown family {name!r}; choose from {FAMILIES}")


# =========================
# Property checks on runs
# =========================
def bap_bound_checks(instance, packing, algorithm):
    """bins <= 2 LB0 + k and k <= 2 LB1 - 1; zero sizes give bins == k."""
    bins = packing.bin_count
    k = algorithm.state.k
    total = lb0(instance)
    value, _ = lb1(instance)
    failures = []
    if bins > 2 * total + k:
        failures.append(f"bins {bins} > 2*LB0 + k = {format_size(2 * total + k)}")
    if k > 2 * value - 1:
        failures.append(f"k {k} > 2*LB1 - 1 = {2 * value - 1}")
    if instance.is_zero_size() and bins != k:
        failures.append(f"zero-size input but bins {bins} != k {k}")
    return failures


def bap_opening_checks(instance, trace):
    """When P_m receives its first item, LB1 of the prefix is at least (m+1)/2."""
    colors = instance.colors
    failures = []
    for step in trace:
        if not step.new_pseudo_bin:
            continue
        m = step.pseudo_bin + 1
        value, _ = lb1_of_colors(colors[:step.item_index])
        if 2 * value < m + 1:
            failures.append(f"P_{m} opened at item {step.item_index} with prefix LB1 {value}")
    return failures


# =========================
# Commands
# =========================
def cmd_pack(alg, instance, tiebreak=DEFAULT_TIEBREAK):
    algorithm = make_algorithm(alg, tiebreak)
    packing, trace = run(algorithm, instance)
    validate_packing(instance, packing).raise_for_violation()
    state = getattr(algorithm, "state", None)
    return {
        **algorithm.describe(),
        "n": len(instance),
        "bins": packing.bin_count,
        "pseudo_bins": None if state is None else state.k,
        "new_bins_opened": sum(1 for step in trace if step.new_bin),
        "packing": packing.to_dict(),
    }, packing, trace


def cmd_bounds(instance):
    return bounds_report(instance).to_dict()


def cmd_opt(instance, budget_ms=DEFAULT_BUDGET_MS, limits=None):
    limits = limits or OracleLimits(budget_ms=budget_ms)
    return opt(instance, limits)


def cmd_duel(alg, adversary, tiebreak=DEFAULT_TIEBREAK, N=None, M=None, phases=ZERO3_DEFAULT_PHASES):
    algorithm = make_algorithm(alg, tiebreak)
    if adversary == "lb2":
        if N is None:
            raise ParameterError("lb2 needs --N")
        return adversary_lb2(algorithm, N)
    if adversary == "zero3":
        if M is None:
            raise ParameterError("zero3 needs --M")
        return adversary_zero3(algorithm, M, phases)
    raise ParameterError(f"unknown adversary {adversary!r}; choose lb2 or zero3")


@dataclass(frozen=True)
class RatioSource:
    label: str
    instance: Instance
    certificate: object = None


@dataclass(frozen=True)
class RatioRow:
    run: int
    algorithm: str
    source: str
    n: int
    bins_alg: int
    denominator: int
    denominator_kind: str  # opt | certificate-upper | bounds-lower
    ratio: Fraction
    ratio_claim: str  # exact | at-least | at-most
    checks_passed: bool = True

    def to_dict(self):
        return {
            "run": self.run,
            "algorithm": self.algorithm,
            "source": self.source,
            "n": self.n,
            "bins_alg": self.bins_alg,
            "denominator": self.denominator,
            "denominator_kind": self.denominator_kind,
            "ratio": format_size(self.ratio),
            "ratio_claim": self.ratio_claim,
            "ratio_decimal": round(float(self.ratio), 6),
            "checks_passed": self.checks_passed,
        }


@dataclass
class RatioReport:
    spec: ExperimentSpec
    rows: list

    @property
    def max_ratio(self):
        return max((row.ratio for row in self.rows), default=None)

    @property
    def mean_ratio(self):
        if not self.rows:
            return None
        return sum((row.ratio for row in self.rows), Fraction(0)) / len(self.rows)


def _denominator(source, denominator, limits):
    """Return (value, kind, claim); a certificate bound makes the ratio a lower bound."""
    if denominator == "oracle":
        result = opt(source.instance, limits)
        if result.exact:
            return result.bins, "opt", "exact"
        LOG.warning("oracle inexact on %s (%s); falling back to bounds", source.label, result.reason)
        denominator = "bounds"
    if denominator == "certificate":
        certificate = source.certificate
        if certificate is None:
            certificate = opt(source.instance, limits).certificate
        validate_packing(source.instance, certificate).raise_for_violation()
        return certificate.bin_count, "certificate-upper", "at-least"
    if denominator == "bounds":
        return max(bounds_report(source.instance).combined, 1), "bounds-lower", "at-most"
    raise ParameterError(f"unknown denominator {denominator!r}; choose from {DENOMINATORS}")


def _ratio_row(run_index, alg, source, denominator, tiebreak, limits):
    algorithm = make_algorithm(alg, tiebreak)
    packing, trace = run(algorithm, source.instance)
    validate_packing(source.instance, packing).raise_for_violation()
    checks_passed = True
    if isinstance(algorithm, BalancedPseudo):
        checks_passed = not bap_bound_checks(source.instance, packing, algorithm)
    value, kind, claim = _denominator(source, denominator, limits)
    bins = packing.bin_count
    ratio = Fraction(bins, value)
    return RatioRow(run_index, alg, source.label, len(source.instance), bins, value, kind, ratio,
                    claim, checks_passed)


def cmd_ratio(spec, sources, denominator="oracle", workers=1):
    """Every algorithm of the experiment on every source; rows come back in run order."""
    empty = [source.label for source in sources if not len(source.instance)]
    if empty:
        raise ParameterError(f"no ratio is defined for an empty instance: {', '.join(empty)}")
    limits = OracleLimits(budget_ms=spec.budget_ms)
    jobs = [(alg, source) for source in sources for alg in spec.algorithms]

    def one(job_index):
        alg, source = jobs[job_index]
        return _ratio_row(job_index, alg, source, denominator, spec.tiebreak, limits)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(len(jobs))))
    else:
        rows = [one(j) for j in range(len(jobs))]
    report = RatioReport(spec, rows)
    LOG.info("ratio: %d runs, max %s", len(rows),
             None if report.max_ratio is None else format_size(report.max_ratio))
    return report


# =========================
# Acceptance suite
# =========================
@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    status: str  # pass | fail | skipped
    detail: str = ""
    elapsed_s: float = 0.0

    def to_dict(self):
        return {"criterion": self.criterion, "status": self.status, "detail": self.detail,
                "elapsed_s": round(self.elapsed_s, 3)}


@dataclass
class SuiteContext:
    seed: int = 0
    budget_ms: int = DEFAULT_BUDGET_MS
    scale: float = 1.0
    tiebreak: TieBreak = DEFAULT_TIEBREAK
    solved: list = field(default_factory=list)

    def rng(self, number):
        return random.Random(self.seed * 1000 + number)

    def count(self, full):
        return max(1, int(full * self.scale))

    def limits(self, **overrides):
        return OracleLimits(budget_ms=self.budget_ms, **overrides)

    def solve(self, instance, **overrides):
        result = opt(instance, self.limits(**overrides))
        if result.exact:
            self.solved.append((instance, result.bins))
        return result


def _verdict(failures, skipped=0, checked=0, what="instances"):
    if failures:
        return "fail", f"{len(failures)} failure(s); first: {failures[0]}"
    if skipped:
        return "skipped", f"oracle budget exhausted on {skipped} of {checked} {what}"
    return "pass", f"{checked} {what} checked"


def criterion_prop1(ctx):
    failures = []
    for M, N in ((4, 2), (8, 4), (16, 4)):
        expected = N * M - N + 1
        eps_family = build_family("prop1-eps", M, N)
        wf_family = build_family("prop1-wf", M, N)
        for alg, family in (("ff", eps_family), ("bf", eps_family), ("pseudo", eps_family),
                            ("wf", wf_family)):
            packing, _ = run(make_algorithm(alg, ctx.tiebreak), family.instance)
            if packing.bin_count != expected:
                failures.append(f"{alg} on {family.name}({M},{N}): {packing.bin_count} != {expected}")
        for family in (eps_family, wf_family):
            if not validate_packing(family.instance, family.certificate) \
                    or family.certificate.bin_count != M:
                failures.append(f"{family.name}({M},{N}) certificate invalid")
    result = ctx.solve(build_family("prop1-eps", 4, 2).instance, max_items=24)
    if not result.exact:
        return _verdict(failures, skipped=1, checked=1, what="oracle confirmations")
    if result.bins != 4:
        failures.append(f"oracle on prop1-eps(4,2) gives {result.bins}")
    return _verdict(failures, checked=3, what="parameter pairs")


def criterion_bap_upper(ctx):
    rng = ctx.rng(2)
    failures, skipped = [], 0
    total = ctx.count(1000)
    for run_index in range(total):
        params = RandomInstanceParams(1, 60, rng.randint(2, 5), "mixed")
        instance = random_instance(rng, params)
        algorithm = BalancedPseudo(ctx.tiebreak)
        packing, trace = run(algorithm, instance)
        bins = packing.bin_count
        if bins > 2 * lb0(instance) + 2 * lb1(instance)[0] - 1:
            failures.append(f"run {run_index}: {bins} bins exceed 2 LB0 + 2 LB1 - 1")
        failures += bap_bound_checks(instance, packing, algorithm)
        failures += bap_opening_checks(instance, trace)
        if len(instance) <= 14:
            result = ctx.solve(instance)
            if not result.exact:
                skipped += 1
            else:
                if not bins < 4 * result.bins:
                    failures.append(f"run {run_index}: {bins} bins vs OPT {result.bins}")
    return _verdict(failures, skipped, total)


def criterion_bap_zero_bound(ctx):
    rng = ctx.rng(3)
    failures, skipped = [], 0
    total = ctx.count(1000)
    for run_index in range(total):
        instance = random_instance(rng, RandomInstanceParams(1, 48, 3, "zero"))
        packing, _ = run(BalancedPseudo(ctx.tiebreak), instance)
        result = ctx.solve(instance)
        if not result.exact:
            skipped += 1
        elif packing.bin_count > 2 * result.bins - 1:
            failures.append(f"run {run_index}: {packing.bin_count} bins vs OPT {result.bins}")
    return _verdict(failures, skipped, total)


def criterion_bap_zero_trace(ctx):
    failures = []
    for N in (2, 3, 4):
        family = build_family("bap-zero", N=N)
        algorithm = BalancedPseudo(TieBreak("min-index", ctx.tiebreak.color_rule))
        packing, _ = run(algorithm, family.instance)
        expected = family.claim["bap_pseudo_bins"]
        if algorithm.state.k != expected or packing.bin_count != expected:
            failures.append(f"N={N}: k={algorithm.state.k}, bins={packing.bin_count}, expected {expected}")
        if not validate_packing(family.instance, family.certificate) \
                or family.certificate.bin_count != family.claim["opt"]:
            failures.append(f"N={N}: certificate invalid")
    return _verdict(failures, checked=3, what="values of N")


def criterion_bap_general(ctx):
    failures = []
    for name in ("bap-general", "bap-3color"):
        family = build_family(name, N=2)
        algorithm = BalancedPseudo(TieBreak("min-index", ctx.tiebreak.color_rule))
        packing, _ = run(algorithm, family.instance)
        claim = bap_general_claim(2) if name == "bap-general" else bap_3color_claim(2)
        limit = 64 if name == "bap-general" else 66
        if packing.bin_count < claim:
            failures.append(f"{name}: BaP used {packing.bin_count} < {claim} bins")
        if not validate_packing(family.instance, family.certificate) \
                or family.certificate.bin_count > limit:
            failures.append(f"{name}: certificate invalid or above {limit}")
    return _verdict(failures, checked=2, what="families")


def criterion_lb1(ctx):
    rng = ctx.rng(6)
    failures = []
    total = ctx.count(2000)
    for run_index in range(total):
        n = rng.randint(1, 200)
        palette = PALETTE[:rng.randint(1, 5)]
        instance = Instance.from_pairs((rng.choice(palette), 0) for _ in range(n))
        value, witness = lb1(instance)
        if value != lb1_bruteforce(instance):
            failures.append(f"run {run_index}: fast {value} != brute force")
        elif witness_value(instance, witness) != value:
            failures.append(f"run {run_index}: witness {witness} does not attain {value}")
    return _verdict(failures, checked=total, what="sequences")


def criterion_opt_lower_bounds(ctx):
    failures = []
    for instance, bins in ctx.solved:
        report = bounds_report(instance)
        if bins < report.lb1 or bins < report.lb0_bins:
            failures.append(f"OPT {bins} below LB1 {report.lb1} or LB0 {report.lb0_bins}")
    if not ctx.solved:
        return "skipped", "no oracle-solved instances in this run"
    return _verdict(failures, checked=len(ctx.solved), what="oracle-solved instances")


def criterion_lb2(ctx):
    failures = []
    N = 10
    for alg in ALGORITHMS:
        transcript = adversary_lb2(make_algorithm(alg, ctx.tiebreak), N)
        failed = [check.name for check in transcript.lemma_checks if not check.passed]
        if failed:
            failures.append(f"{alg}: {failed}")
        if transcript.opt_upper_bound > N + 1:
            failures.append(f"{alg}: certificate {transcript.opt_upper_bound} > {N + 1}")
        if transcript.variables["j"] == N:
            floor = 2 - Fraction(1, N + 1)
        else:
            floor = Fraction(N * N + 1, N + 1)
        if transcript.ratio_lower_bound < floor:
            failures.append(f"{alg}: ratio {format_size(transcript.ratio_lower_bound)} < {format_size(floor)}")
    return _verdict(failures, checked=len(ALGORITHMS), what="algorithms")


def criterion_zero3(ctx):
    failures = []
    for M, phases, floor in ((9, 6, None), (99, 6, Fraction(7, 5))):
        for alg in ALGORITHMS:
            transcript = adversary_zero3(make_algorithm(alg, ctx.tiebreak), M, phases)
            failed = [check.name for check in transcript.lemma_checks if not check.passed]
            if failed:
                failures.append(f"{alg} M={M}: {failed}")
            expected = floor
            if expected is None:
                expected = Fraction(M, M + 3) * Fraction(3 ** (phases + 1) - 1, 2 * 3 ** phases)
            if transcript.ratio_lower_bound < expected:
                failures.append(f"{alg} M={M}: ratio {format_size(transcript.ratio_lower_bound)} "
                                f"< {format_size(expected)}")
    return _verdict(failures, checked=2 * len(ALGORITHMS), what="duels")


def criterion_pseudo_optimal(ctx):
    rng = ctx.rng(10)
    failures, skipped = [], 0
    total = ctx.count(500)
    for run_index in range(total):
        n = rng.randint(1, 40)
        instance = Instance.from_pairs((rng.choice((BLACK, WHITE)), 0) for _ in range(n))
        packing, _ = run(Pseudo(ctx.tiebreak), instance)
        result = ctx.solve(instance)
        if not result.exact:
            skipped += 1
        elif packing.bin_count != result.bins:
            failures.append(f"run {run_index}: Pseudo {packing.bin_count} vs OPT {result.bins}")
    return _verdict(failures, skipped, total)


def criterion_oracle_consistency(ctx):
    rng = ctx.rng(11)
    failures, skipped = [], 0
    total = ctx.count(300)
    for run_index in range(total):
        params = RandomInstanceParams(1, 10, rng.choice((2, 3, 5)), "mixed")
        instance = random_instance(rng, params)
        result = ctx.solve(instance)
        if not result.exact:
            skipped += 1
            continue
        reference = exhaustive_opt(instance)
        if result.bins != reference:
            failures.append(f"run {run_index}: branch and bound {result.bins} vs enumeration {reference}")
        elif not validate_packing(instance, result.certificate) \
                or result.certificate.bin_count != result.bins:
            failures.append(f"run {run_index}: certificate does not match {result.bins}")
    return _verdict(failures, skipped, total)


CRITERIA = (
    ("1 prop1 reproduction", criterion_prop1),
    ("2 BaP upper bound", criterion_bap_upper),
    ("3 BaP zero-size bound", criterion_bap_zero_bound),
    ("4 BaP zero-size tightness", criterion_bap_zero_trace),
    ("5 BaP general tightness", criterion_bap_general),
    ("6 LB1 correctness", criterion_lb1),
    ("8 lb2 adversary", criterion_lb2),
    ("9 zero3 adversary", criterion_zero3),
    ("10 Pseudo optimal on two colors", criterion_pseudo_optimal),
    ("11 oracle self-consistency", criterion_oracle_consistency),
    # runs last: it audits every instance the oracle solved above
    ("7 lower bounds vs oracle", criterion_opt_lower_bounds),
)


def cmd_suite(seed=0, budget_ms=DEFAULT_BUDGET_MS, scale=1.0, tiebreak=DEFAULT_TIEBREAK, only=None):
    ctx = SuiteContext(seed=seed, budget_ms=budget_ms, scale=scale, tiebreak=tiebreak)
    results = []
    for name, criterion in CRITERIA:
        if only and name.split()[0] not in only:
            continue
        started = time.perf_counter()
        status, detail = criterion(ctx)
        elapsed = time.perf_counter() - started
        if status == "skipped":
            LOG.warning("criterion %s skipped: %s", name, detail)
        else:
            LOG.info("criterion %s: %s (%.2f s)", name, status, elapsed)
        results.append(CriterionResult(name, status, detail, elapsed))
    return results


def suite_exit_code(results):
    return 1 if any(result.status == "fail" for result in results) else 0
