"""
Lower bounds on the optimal ordered packing.

LB0 is the total size. LB1 is the largest color discrepancy of an interval,
max over i <= j and colors c of 2*C(i, j, c) - (j - i + 1), where C counts
the items of color c among items i..j.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from packing_core import ParameterError, format_size

BRUTEFORCE_MAX_ITEMS = 2000


@dataclass(frozen=True)
class Witness:
    i: int
    j: int
    color: str

    def to_dict(self):
        return {"i": self.i, "j": self.j, "color": self.color}


@dataclass(frozen=True)
class BoundsReport:
    lb0: Fraction
    lb0_bins: int
    lb1: int
    witness: Witness
    combined: int

    def to_dict(self):
        return {
            "lb0": format_size(self.lb0),
            "lb0_bins": self.lb0_bins,
            "lb1": self.lb1,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "combined": self.combined,
        }


def lb0(instance):
    return sum((item.size for item in instance), Fraction(0))


def lb1_of_colors(colors):
    """
    LB1 for a color sequence, as (value, Witness) with 1-based positions.

    For each color the +1/-1 sequence is scanned once, keeping the earliest
    minimum prefix sum, so the best interval ending at j starts as early as
    possible. Ties overall go to the smallest (i, j, color).
    """
    if not colors:
        return 0, None
    best = None
    for color in sorted(set(colors)):
        prefix = 0
        min_prefix, min_at = 0, 0
        for j, c in enumerate(colors, start=1):
            prefix += 1 if c == color else -1
            key = (-(prefix - min_prefix), min_at + 1, j, color)
            if best is None or key < best:
                best = key
            if prefix < min_prefix:
                min_prefix, min_at = prefix, j
    value, i, j, color = best
    return -value, Witness(i, j, color)


def lb1(instance):
    return lb1_of_colors(instance.colors)


def lb1_bruteforce(instance):
    """Reference LB1 by direct enumeration of every interval."""
    n = len(instance)
    if n > BRUTEFORCE_MAX_ITEMS:
        raise ParameterError(f"brute-force LB1 is limited to {BRUTEFORCE_MAX_ITEMS} items, got {n}")
    colors = instance.colors
    best = 0
    for i in range(n):
        counts = {}
        top = 0
        for j in range(i, n):
            c = colors[j]
            counts[c] = counts.get(c, 0) + 1
            top = max(top, counts[c])
            best = max(best, 2 * top - (j - i + 1))
    return best


def witness_value(instance, witness):
    """2*C(i, j, c) - (j - i + 1) evaluated directly."""
    span = instance.items[witness.i - 1:witness.j]
    count = sum(1 for item in span if item.color == witness.color)
    return 2 * count - len(span)


def bounds_report(instance):
    total = lb0(instance)
    value, witness = lb1(instance)
    lb0_bins = math.ceil(total)
    return BoundsReport(
        lb0=total,
        lb0_bins=lb0_bins,
        lb1=value,
        witness=witness,
        combined=max(lb0_bins, value, 1 if len(instance) else 0),
    )


def combined_lower_bound(instance):
    return bounds_report(instance).combined


def suffix_lb1(colors):
    """LB1 of every suffix colors[p:], for p = 0..n (last entry is 0)."""
    return [lb1_of_colors(colors[p:])[0] for p in range(len(colors) + 1)]
