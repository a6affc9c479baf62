"""
Bad inputs for colorful bin packing.

Static families (prop1, bap-zero, bap-general, bap-3color) come with an
explicit offline packing that bounds OPT from above. The interactive
adversaries (lb2, zero3) build their input item by item from the decisions an
online algorithm has already made, and assemble their certificate packing as
they go or once the interaction ends.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from online_algorithms import DEFAULT_TIEBREAK, BalancedPseudo, OnlineRunner
from packing_core import (
    BLACK,
    BLUE,
    RED,
    WHITE,
    Instance,
    InstanceBuilder,
    Packing,
    ParameterError,
    format_size,
    serialize_instance,
    validate_packing,
)

LOG = logging.getLogger(__name__)

ZERO3_COLORS = (WHITE, RED, BLUE)  # also the argmax preference order
ZERO3_DEFAULT_PHASES = 12


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _check(name, passed, detail=""):
    return LemmaCheck(name, bool(passed), detail)


def _certificate(instance, bins_by_index):
    return Packing.from_bins([[instance.item(i) for i in bin_] for bin_ in bins_by_index])


# =========================
# prop1 families: Any Fit traps
# =========================
def gen_prop1(variant, M, N):
    """
    N phases of M white items followed by 2M red/blue items alternating from
    red. 'eps': every size is 1/(N^2 M^2). 'wf': the last M-1 whites of each
    phase have that size, everything else its square.
    """
    if variant not in ("eps", "wf"):
        raise ParameterError(f"unknown prop1 variant {variant!r}")
    if M < 4 or N < 2:
        raise ParameterError(f"prop1 needs M >= 4 and N >= 2, got M={M}, N={N}")
    eps = Fraction(1, N * N * M * M)
    delta = eps * eps
    pairs = []
    for _ in range(N):
        for t in range(M):
            large = variant == "eps" or t > 0
            pairs.append((WHITE, eps if large else delta))
        for t in range(2 * M):
            pairs.append((RED if t % 2 == 0 else BLUE, eps if variant == "eps" else delta))
    return Instance.from_pairs(pairs)


def prop1_certificate(instance, M, N):
    """M bins; every phase adds one white, one red and one blue item to each."""
    bins = [[] for _ in range(M)]
    phase_length = 3 * M
    for phase in range(N):
        base = phase * phase_length
        for t in range(M):
            bins[t].append(base + t + 1)
            bins[t].append(base + M + 2 * t + 1)
            bins[t].append(base + M + 2 * t + 2)
    return _certificate(instance, bins)


# =========================
# Balanced-Pseudo tightness families
# =========================
def bap_a(i):
    """a_1 = 1, a_i = (3 a_{i-1} + 2) / 4, in closed form 2 - (3/4)^(i-1)."""
    return 2 - Fraction(3, 4) ** (i - 1)


def bap_zero_schedule(N):
    """M and the (red, blue) counts of phases 1..N."""
    if N < 2:
        raise ParameterError(f"bap-zero needs N >= 2, got {N}")
    M = 4 ** (N + 1)
    schedule = []
    for i in range(1, N + 1):
        red = bap_a(i) * M / 2
        blue = (1 - bap_a(i) / 2) * M
        assert red.denominator == 1 and blue.denominator == 1
        schedule.append((int(red), int(blue)))
    return M, schedule


def gen_bap_zero(N):
    M, schedule = bap_zero_schedule(N)
    pairs = [(WHITE, 0)] * M
    for red, blue in schedule:
        pairs += [(RED, 0)] * red + [(BLUE, 0)] * blue + [(WHITE, 0)] * M
    return Instance.from_pairs(pairs)


def _bap_zero_bins(N):
    """The M-bin packing of the zero-size prefix, as lists of item indices."""
    M, schedule = bap_zero_schedule(N)
    bins = [[t + 1] for t in range(M)]
    index = M
    for red, blue in schedule:
        for t in range(red + blue):
            bins[t].append(index + t + 1)
        index += red + blue
        for t in range(M):
            bins[t].append(index + t + 1)
        index += M
    return bins, index


def bap_zero_certificate(instance, N):
    bins, _ = _bap_zero_bins(N)
    return _certificate(instance, bins)


def bap_zero_phase_counts(N, tiebreak=None):
    """
    Pseudo-bin counts of Balanced-Pseudo after each phase of bap-zero(N),
    next to the closed-form a_{i+1} * M.
    """
    M, schedule = bap_zero_schedule(N)
    runner = OnlineRunner(BalancedPseudo(tiebreak or DEFAULT_TIEBREAK))
    instance = gen_bap_zero(N)
    ends = [M]
    for red, blue in schedule:
        ends.append(ends[-1] + red + blue + M)
    rows = []
    position = 0
    for phase, end in enumerate(ends):
        while position < end:
            runner.feed(instance.items[position])
            position += 1
        rows.append((phase, runner.pseudo_bin_count, int(bap_a(phase + 1) * M)))
    return rows


def _eps_guard(N, eps):
    M = 4 ** (N + 1)
    if eps is None:
        eps = Fraction(1, 16 * M)
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 8 * M):
        raise ParameterError(f"eps must lie in (0, 1/{8 * M}), got {format_size(eps)}")
    return M, eps


def gen_bap_general(N, eps=None):
    """
    bap-zero(N), then 2M-m-1 items of distinct fresh colors and size 2*eps,
    M-1 black items of size 1-eps, and M-2 more fresh-color items of size
    2*eps. Returns (instance, certificate with M bins).
    """
    M, eps = _eps_guard(N, eps)
    m = int(Fraction(3, 4) ** N * M)
    zero = gen_bap_zero(N)
    pairs = [(item.color, item.size) for item in zero]
    fresh = 0

    def fresh_color():
        nonlocal fresh
        fresh += 1
        return f"fresh-{fresh}"

    first_batch = range(len(pairs) + 1, len(pairs) + 2 * M - m)
    pairs += [(fresh_color(), 2 * eps) for _ in first_batch]
    blacks = range(len(pairs) + 1, len(pairs) + M)
    pairs += [(BLACK, 1 - eps) for _ in blacks]
    second_batch = range(len(pairs) + 1, len(pairs) + M - 1)
    pairs += [(fresh_color(), 2 * eps) for _ in second_batch]
    instance = Instance.from_pairs(pairs)

    bins, _ = _bap_zero_bins(N)
    bins[0] += list(first_batch)
    for t, index in enumerate(blacks, start=1):
        bins[t].append(index)
    bins[0] += list(second_batch)
    return instance, _certificate(instance, bins)


def bap_general_claim(N):
    """
    Balanced-Pseudo uses at least 2M - m + (M - 2) + (M - 3) bins on
    bap-general(N): the zero-size prefix leaves 2M - m pseudo-bins, the
    black items add M - 2 more and the trailing fresh items M - 3.
    """
    M = 4 ** (N + 1)
    m = int(Fraction(3, 4) ** N * M)
    return 2 * M - m + (M - 2) + (M - 3)


def gen_bap_3color(N, eps=None):
    """
    bap-zero(N), then M blue items of sizes d_t, M white items of sizes
    1 - 3 d_{t+1} and M blue items of sizes d_t, where d_t = eps / 4^t.
    Returns (instance, certificate with M+2 bins).
    """
    M, eps = _eps_guard(N, eps)
    delta = [None] + [eps / 4 ** t for t in range(1, M + 2)]
    zero = gen_bap_zero(N)
    pairs = [(item.color, item.size) for item in zero]
    start = len(pairs)
    pairs += [(BLUE, delta[t]) for t in range(1, M + 1)]
    pairs += [(WHITE, 1 - 3 * delta[t + 1]) for t in range(1, M + 1)]
    pairs += [(BLUE, delta[t]) for t in range(1, M + 1)]
    instance = Instance.from_pairs(pairs)

    def blue1(t):
        return start + t

    def white(t):
        return start + M + t

    def blue3(t):
        return start + 2 * M + t

    bins, _ = _bap_zero_bins(N)
    # bin t takes the (t+1)-th blues around the t-th white: sizes sum to 1 - d_{t+1}
    for t in range(1, M):
        bins[t - 1] += [blue1(t + 1), white(t), blue3(t + 1)]
    bins[M - 1].append(blue1(1))
    bins.append([white(M)])
    bins.append([blue3(1)])
    return instance, _certificate(instance, bins)


def bap_3color_claim(N):
    """Balanced-Pseudo with min-index ties ends with a_{N+1} M + 2M bins."""
    M = 4 ** (N + 1)
    return int(bap_a(N + 1) * M) + 2 * M


# =========================
# Interaction plumbing
# =========================
@dataclass(frozen=True)
class Observation:
    item_index: int
    bin_index: int
    new_bin: bool
    color_counts: dict
    # the receiving bin right after placement
    bin_contents: tuple
    bin_load: Fraction


@dataclass
class AdversaryTranscript:
    adversary: str
    algorithm: str
    instance: Instance
    observations: list
    variables: dict
    certificate: Packing
    opt_upper_bound: int
    bins_alg: int
    lemma_checks: list = field(default_factory=list)

    @property
    def ratio_lower_bound(self):
        return Fraction(self.bins_alg, self.opt_upper_bound)

    @property
    def passed(self):
        return all(check.passed for check in self.lemma_checks)

    def to_dict(self):
        return {
            "adversary": self.adversary,
            "algorithm": self.algorithm,
            "instance": serialize_instance(self.instance),
            "variables": self.variables,
            "bins_alg": self.bins_alg,
            "opt_upper_bound": self.opt_upper_bound,
            "ratio_lower_bound": format_size(self.ratio_lower_bound),
            "certificate": self.certificate.as_index_lists(),
            "lemma_checks": [check.to_dict() for check in self.lemma_checks],
        }


class _Interaction:
    """Presents items to the algorithm and hands back only what it did."""

    def __init__(self, algorithm):
        self.runner = OnlineRunner(algorithm)
        self.builder = InstanceBuilder()
        self.observations = []

    def present(self, color, size):
        item = self.builder.add(color, size)
        step = self.runner.feed(item)
        packing = self.runner.packing
        bin_ = packing.bins[step.bin_index]
        observation = Observation(
            item.index, step.bin_index, step.new_bin, dict(packing.color_counts),
            tuple(bin_.contents), bin_.load,
        )
        self.observations.append(observation)
        return item, observation

    @property
    def bins(self):
        return self.runner.packing.bin_count

    def color_count(self, color):
        return self.runner.packing.color_counts.get(color, 0)


# =========================
# Lower bound 2 (black and white)
# =========================
def adversary_lb2(algorithm, N):
    """
    Phases of (regular white eps, regular black d_i). When the black joins the
    white, a special black 3 d_i, a huge white 1 - 2 d_i and another regular
    black d_i follow. Stops at N huge whites, or after N^2 phases with the
    missing huge whites of size 1.
    """
    if N <= 3:
        raise ParameterError(f"lb2 needs N > 3, got {N}")
    eps = Fraction(1, N ** 3)

    def delta(i):
        return Fraction(1, 5 ** i * N ** 3)

    play = _Interaction(algorithm)
    checks = []
    roles = {}  # item index -> (role, phase)
    triples = []
    i = j = 0
    while True:
        if j == N:
            break
        if i == N * N:
            for _ in range(N - j):
                item, _ = play.present(WHITE, 1)
                roles[item.index] = ("unit-white", i)
            break
        i += 1
        white, _ = play.present(WHITE, eps)
        roles[white.index] = ("regular-white", i)
        black, observation = play.present(BLACK, delta(i))
        roles[black.index] = ("regular-black", i)
        if not observation.new_bin:
            contents = observation.bin_contents
            joined_white = len(contents) >= 2 and contents[-2].color == WHITE
            checks.append(_check(
                "black-joins-white-bin", joined_white, f"phase {i}, item #{black.index}"
            ))
            j += 1
            special, _ = play.present(BLACK, 3 * delta(i))
            roles[special.index] = ("special-black", i)
            huge, _ = play.present(WHITE, 1 - 2 * delta(i))
            roles[huge.index] = ("huge-white", i)
            closing, _ = play.present(BLACK, delta(i))
            roles[closing.index] = ("regular-black", i)
            triples.append((black.index, huge.index, closing.index))
        checks.append(_check("bins-at-least-i", play.bins >= i, f"i={i}: {play.bins} bins"))
        checks.append(_check(
            "black-bins-at-least-2j+1", play.color_count(BLACK) >= 2 * j + 1,
            f"j={j}: {play.color_count(BLACK)} black bins",
        ))

    instance = play.builder.build()
    checks += _lb2_size_checks(instance, roles, eps)

    # certificate: unit whites alone, each huge white between its two regular
    # blacks, and every remaining item in one alternating bin
    bins = [[index] for index, (role, _) in roles.items() if role == "unit-white"]
    used = {index for triple in triples for index in triple}
    bins += [list(triple) for triple in triples]
    residue = [index for index, (role, _) in sorted(roles.items())
               if index not in used and role != "unit-white"]
    if residue:
        bins.append(residue)
    certificate = _certificate(instance, bins)
    upper = certificate.bin_count
    bins_alg = play.bins
    checks.append(_check("certificate-valid", validate_packing(instance, certificate)))
    checks.append(_check("certificate-at-most-N+1", upper <= N + 1, f"{upper} bins"))
    if j == N:
        checks.append(_check("alg-at-least-2N+1", bins_alg >= 2 * N + 1, f"{bins_alg} bins"))
    else:
        checks.append(_check("alg-at-least-N^2+N-j", bins_alg >= N * N + N - j, f"{bins_alg} bins"))

    LOG.info("lb2 vs %s, N=%d: i=%d j=%d, %d bins vs certificate %d",
             algorithm.name, N, i, j, bins_alg, upper)
    return AdversaryTranscript(
        adversary="lb2",
        algorithm=algorithm.name,
        instance=instance,
        observations=play.observations,
        variables={"N": N, "i": i, "j": j, "terminated_by": "j=N" if j == N else "i=N^2"},
        certificate=certificate,
        opt_upper_bound=upper,
        bins_alg=bins_alg,
        lemma_checks=checks,
    )


def _lb2_size_checks(instance, roles, eps):
    huge = [(instance.item(index), phase) for index, (role, phase) in roles.items()
            if role in ("huge-white", "unit-white")]
    blacks = [(instance.item(index), phase) for index, (role, phase) in roles.items()
              if role in ("regular-black", "special-black")]
    checks = [
        _check("huge-white-above-1-eps", all(item.size > 1 - eps for item, _ in huge)),
        _check("black-below-eps", all(item.size < eps for item, _ in blacks)),
    ]
    crossing = all(
        white.size + black.size > 1
        for white, later in huge
        for black, earlier in blacks
        if earlier < later
    )
    checks.append(_check("earlier-black-plus-huge-white-above-1", crossing))
    return checks


# =========================
# Zero sizes, three colors
# =========================
def _argmax_color(counts):
    largest = max(counts.get(color, 0) for color in ZERO3_COLORS)
    return next(color for color in ZERO3_COLORS if counts.get(color, 0) == largest)


def adversary_zero3(algorithm, M, phases=ZERO3_DEFAULT_PHASES):
    """
    Phase 0 is M white items. Each later phase alternates 2M items of the two
    colors other than the previous phase color, then sends M items of the
    color the algorithm currently has most bins of.
    """
    if M < 2 or phases < 1:
        raise ParameterError(f"zero3 needs M >= 2 and at least one phase, got M={M}, P={phases}")
    play = _Interaction(algorithm)
    checks = []

    regular = []
    special = {color: [] for color in ZERO3_COLORS}
    for _ in range(M):
        item, _ = play.present(WHITE, 0)
        regular.append([item.index])
    totals = [play.bins]
    colors = [WHITE]

    for phase in range(1, phases + 1):
        previous = colors[-1]
        c, c2 = [color for color in ZERO3_COLORS if color != previous]
        alternating = []
        for t in range(2 * M):
            item, _ = play.present(c if t % 2 == 0 else c2, 0)
            alternating.append(item.index)

        counts = dict(play.runner.packing.color_counts)
        chosen = _argmax_color(counts)
        checks.append(_check(
            "argmax-at-least-third", 3 * counts.get(chosen, 0) >= totals[-1],
            f"phase {phase}: {chosen} has {counts.get(chosen, 0)} of {totals[-1]}",
        ))
        closing = []
        for _ in range(M):
            item, _ = play.present(chosen, 0)
            closing.append(item.index)
        totals.append(play.bins)
        checks.append(_check(
            "recurrence", 3 * totals[-1] >= totals[-2] + 3 * M,
            f"N_{phase}={totals[-1]}, N_{phase - 1}={totals[-2]}",
        ))

        if chosen != previous:
            special[c2] += alternating
        else:
            for t in range(M):
                regular[t] += alternating[2 * t:2 * t + 2]
        for t in range(M):
            regular[t].append(closing[t])
        colors.append(chosen)

    instance = play.builder.build()
    bins = regular + [special[color] for color in ZERO3_COLORS if special[color]]
    certificate = _certificate(instance, bins)
    upper = certificate.bin_count
    bins_alg = play.bins
    # N_P >= M (3^(P+1) - 1) / (2 * 3^P)
    floor = Fraction(M * (3 ** (phases + 1) - 1), 2 * 3 ** phases)
    checks.append(_check("final-bins-bound", bins_alg >= floor,
                         f"{bins_alg} >= {format_size(floor)}"))
    checks.append(_check("certificate-valid", validate_packing(instance, certificate)))
    checks.append(_check("certificate-at-most-M+3", upper <= M + 3, f"{upper} bins"))

    LOG.info("zero3 vs %s, M=%d P=%d: %d bins vs certificate %d",
             algorithm.name, M, phases, bins_alg, upper)
    return AdversaryTranscript(
        adversary="zero3",
        algorithm=algorithm.name,
        instance=instance,
        observations=play.observations,
        variables={"M": M, "phases": phases, "G": colors, "N": totals},
        certificate=certificate,
        opt_upper_bound=upper,
        bins_alg=bins_alg,
        lemma_checks=checks,
    )
