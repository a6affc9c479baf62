"""
Exact offline ordered OPT for desk-scale instances.

`opt` is a depth-first branch and bound over placements. A state is the next
item position plus the multiset of open bins as (residual, last color); two
states with the same canonical form have the same completions, and since every
bin stays open the bin count is part of the state, so a state is expanded at
most once. All-zero-size inputs go through a counting DP instead.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from lower_bounds import combined_lower_bound, suffix_lb1
from online_algorithms import FirstFit, run
from packing_core import ONE, Packing, ParameterError, validate_packing

LOG = logging.getLogger(__name__)

DEFAULT_MAX_ITEMS = 20
DEFAULT_MAX_ZERO_ITEMS = 48
DEFAULT_BUDGET_MS = 10_000
EXHAUSTIVE_MAX_ITEMS = 12

_CLOCK_EVERY = 512


@dataclass(frozen=True)
class OracleLimits:
    max_items: int = DEFAULT_MAX_ITEMS
    max_zero_items: int = DEFAULT_MAX_ZERO_ITEMS
    budget_ms: int = DEFAULT_BUDGET_MS


@dataclass
class OracleResult:
    bins: int
    exact: bool
    certificate: Packing
    nodes: int = 0
    elapsed_ms: float = 0.0
    reason: str = ""
    lower_bound: int = 0

    def to_dict(self):
        return {
            "bins": self.bins,
            "exact": self.exact,
            "certificate": self.certificate.as_index_lists(),
            "nodes": self.nodes,
            "lower_bound": self.lower_bound,
            "reason": self.reason,
        }


class _BudgetExceeded(Exception):
    pass


class _Deadline:
    def __init__(self, budget_ms):
        self.at = None if budget_ms is None else time.monotonic() + budget_ms / 1000
        self.ticks = 0

    def tick(self):
        self.ticks += 1
        if self.at is not None and self.ticks % _CLOCK_EVERY == 0 and time.monotonic() > self.at:
            raise _BudgetExceeded


# =========================
# General sizes: branch and bound
# =========================
class _BranchAndBound:

    def __init__(self, instance, deadline):
        self.items = instance.items
        self.n = len(instance)
        self.deadline = deadline
        sizes = [item.size for item in self.items]
        self.suffix_size = [sum(sizes[p:], Fraction(0)) for p in range(self.n + 1)]
        self.suffix_lb1 = suffix_lb1(instance.colors)
        self.seen = set()
        self.bins = []  # item indices per open bin
        self.loads = []
        self.last = []
        packing, _ = run(FirstFit(), instance)
        self.best = packing.bin_count
        self.best_bins = packing.as_index_lists()

    def lower_bound(self, pos):
        open_bins = len(self.bins)
        residual = open_bins - sum(self.loads, Fraction(0))
        by_size = math.ceil(self.suffix_size[pos] - residual)
        by_color = self.suffix_lb1[pos] - open_bins
        return open_bins + max(0, by_size, by_color)

    def search(self, pos=0):
        self.deadline.tick()
        if pos == self.n:
            if len(self.bins) < self.best:
                self.best = len(self.bins)
                self.best_bins = [list(b) for b in self.bins]
                LOG.debug("incumbent improved to %d bins", self.best)
            return
        if self.lower_bound(pos) >= self.best:
            return
        key = (pos, tuple(sorted(zip((ONE - load for load in self.loads), self.last))))
        if key in self.seen:
            return
        self.seen.add(key)

        item = self.items[pos]
        tried = set()
        order = sorted(range(len(self.bins)), key=lambda b: (self.loads[b], self.last[b], b))
        for b in order:
            bin_class = (self.loads[b], self.last[b])
            if bin_class in tried:
                continue
            tried.add(bin_class)
            if self.last[b] == item.color or self.loads[b] + item.size > 1:
                continue
            previous = self.last[b]
            self.bins[b].append(item.index)
            self.loads[b] += item.size
            self.last[b] = item.color
            self.search(pos + 1)
            self.bins[b].pop()
            self.loads[b] -= item.size
            self.last[b] = previous

        if len(self.bins) + 1 < self.best:
            self.bins.append([item.index])
            self.loads.append(item.size)
            self.last.append(item.color)
            self.search(pos + 1)
            self.bins.pop()
            self.loads.pop()
            self.last.pop()


def _packing_from_lists(instance, index_lists):
    return Packing.from_bins([[instance.item(i) for i in bin_] for bin_ in index_lists])


def opt(instance, limits=OracleLimits()):
    """
    Minimum number of bins over all order-preserving packings, with a
    certificate. When a limit is hit, the best packing found is returned with
    exact=False.
    """
    started = time.monotonic()
    n = len(instance)
    if n == 0:
        return OracleResult(0, True, Packing())
    if instance.is_zero_size():
        return _opt_zero_size_result(instance, limits, started)

    bound = combined_lower_bound(instance)
    deadline = _Deadline(limits.budget_ms)
    search = _BranchAndBound(instance, deadline)
    exact, reason = True, ""
    if n > limits.max_items:
        exact, reason = False, f"{n} items exceed the limit of {limits.max_items}"
    else:
        try:
            search.search()
        except _BudgetExceeded:
            exact, reason = False, f"budget of {limits.budget_ms} ms exhausted"
    if not exact and search.best == bound:
        exact, reason = True, ""
    elapsed = (time.monotonic() - started) * 1000
    if not exact:
        LOG.warning("oracle inexact on %d items: %s (best %d, lower bound %d)",
                    n, reason, search.best, bound)
    else:
        LOG.info("oracle solved %d items: %d bins, %d nodes, %.1f ms",
                 n, search.best, deadline.ticks, elapsed)
    certificate = _packing_from_lists(instance, search.best_bins)
    return OracleResult(search.best, exact, certificate, deadline.ticks, elapsed, reason, bound)


# =========================
# Zero sizes: counting DP
# =========================
class _ZeroSizeTable:
    """
    With zero sizes a bin is just its last color, so a state is (position,
    open-bin count per color). Reusing a bin never costs more than opening
    one: the extra bin could save at most the one bin it cost. So a new bin
    is opened only when every open bin has the item's color.
    """

    def __init__(self, colors, deadline):
        self.palette = sorted(set(colors))
        self.codes = [self.palette.index(c) for c in colors]
        self.deadline = deadline
        self.memo = {}

    def extra(self, pos, counts):
        if pos == len(self.codes):
            return 0
        key = (pos, counts)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        self.deadline.tick()
        c = self.codes[pos]
        best = None
        for g, count in enumerate(counts):
            if g == c or not count:
                continue
            moved = list(counts)
            moved[g] -= 1
            moved[c] += 1
            value = self.extra(pos + 1, tuple(moved))
            if best is None or value < best:
                best = value
        if best is None:
            moved = list(counts)
            moved[c] += 1
            best = 1 + self.extra(pos + 1, tuple(moved))
        self.memo[key] = best
        return best

    def certificate(self, instance):
        """Follow optimal choices and materialize them as bins."""
        counts = tuple(0 for _ in self.palette)
        by_color = {g: [] for g in range(len(self.palette))}
        bins = []
        for pos, item in enumerate(instance):
            c = self.codes[pos]
            target = self.extra(pos, counts)
            chosen = None
            for g, count in enumerate(counts):
                if g == c or not count:
                    continue
                moved = list(counts)
                moved[g] -= 1
                moved[c] += 1
                if self.extra(pos + 1, tuple(moved)) == target:
                    chosen, counts = g, tuple(moved)
                    break
            if chosen is None:
                bins.append([item])
                by_color[c].append(len(bins) - 1)
                moved = list(counts)
                moved[c] += 1
                counts = tuple(moved)
            else:
                b = by_color[chosen].pop(0)
                bins[b].append(item)
                by_color[c].append(b)
        return Packing.from_bins(bins)


def _check_zero_size(instance):
    if not instance.is_zero_size():
        raise ParameterError("opt_zero_size needs every item size to be zero")


def opt_zero_size(instance, max_items=DEFAULT_MAX_ZERO_ITEMS):
    _check_zero_size(instance)
    if len(instance) > max_items:
        raise ParameterError(f"{len(instance)} items exceed the zero-size limit of {max_items}")
    table = _ZeroSizeTable(instance.colors, _Deadline(None))
    return table.extra(0, tuple(0 for _ in table.palette))


def _opt_zero_size_result(instance, limits, started):
    _check_zero_size(instance)
    n = len(instance)
    if n > limits.max_zero_items:
        packing, _ = run(FirstFit(), instance)
        reason = f"{n} zero-size items exceed the limit of {limits.max_zero_items}"
        LOG.warning("oracle inexact: %s", reason)
        return OracleResult(packing.bin_count, False, packing, reason=reason,
                            lower_bound=combined_lower_bound(instance))
    deadline = _Deadline(limits.budget_ms)
    table = _ZeroSizeTable(instance.colors, deadline)
    try:
        bins = table.extra(0, tuple(0 for _ in table.palette))
        certificate = table.certificate(instance)
    except _BudgetExceeded:
        packing, _ = run(FirstFit(), instance)
        reason = f"budget of {limits.budget_ms} ms exhausted"
        LOG.warning("oracle inexact on %d zero-size items: %s", n, reason)
        return OracleResult(packing.bin_count, False, packing, deadline.ticks, reason=reason,
                            lower_bound=combined_lower_bound(instance))
    elapsed = (time.monotonic() - started) * 1000
    return OracleResult(bins, True, certificate, deadline.ticks, elapsed,
                        lower_bound=combined_lower_bound(instance))


# =========================
# Reference enumeration
# =========================
def exhaustive_opt(instance, max_items=EXHAUSTIVE_MAX_ITEMS):
    """Every order-preserving packing, no memo and no pruning. Tiny inputs only."""
    n = len(instance)
    if n > max_items:
        raise ParameterError(f"exhaustive enumeration is limited to {max_items} items, got {n}")
    loads, last = [], []
    best = [n]

    def enumerate_from(pos):
        if pos == n:
            best[0] = min(best[0], len(loads))
            return
        item = instance.items[pos]
        for b in range(len(loads)):
            if last[b] != item.color and loads[b] + item.size <= 1:
                previous = last[b]
                loads[b] += item.size
                last[b] = item.color
                enumerate_from(pos + 1)
                loads[b] -= item.size
                last[b] = previous
        loads.append(item.size)
        last.append(item.color)
        enumerate_from(pos + 1)
        loads.pop()
        last.pop()

    enumerate_from(0)
    return best[0]


def check_certificate(instance, result):
    """The certificate validates and uses exactly `result.bins` bins."""
    return bool(validate_packing(instance, result.certificate)) and \
        result.certificate.bin_count == result.bins
