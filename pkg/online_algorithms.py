"""
Online colorful bin packing: the stepping engine and the algorithms
NF, Any Fit (FF, BF, WF and user selectors), Pseudo and Balanced-Pseudo.

Every algorithm sees one item at a time together with read access to the
packing built so far, and answers with a Decision. The engine applies it.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field

from packing_core import Packing, PackingValidationError, ParameterError, ValidationResult, Violation, can_accept

LOG = logging.getLogger(__name__)

INDEX_RULES = ("min-index", "max-index")
COLOR_RULES = ("min-color", "max-color")


# =========================
# Tie-breaking
# =========================
@dataclass(frozen=True)
class TieBreak:
    """Which bin/pseudo-bin index and which color win when several qualify."""
    index_rule: str = "min-index"
    color_rule: str = "min-color"

    def __post_init__(self):
        if self.index_rule not in INDEX_RULES:
            raise ParameterError(f"unknown index tie-break {self.index_rule!r}")
        if self.color_rule not in COLOR_RULES:
            raise ParameterError(f"unknown color tie-break {self.color_rule!r}")

    @classmethod
    def parse(cls, *tokens):
        """Build from CLI tokens such as 'max-index' or 'min-color'."""
        index_rule, color_rule = "min-index", "min-color"
        for token in tokens:
            if token is None:
                continue
            if token in INDEX_RULES:
                index_rule = token
            elif token in COLOR_RULES:
                color_rule = token
            else:
                raise ParameterError(
                    f"unknown tie-break {token!r}; expected one of {INDEX_RULES + COLOR_RULES}"
                )
        return cls(index_rule, color_rule)

    def pick_index(self, indices):
        return min(indices) if self.index_rule == "min-index" else max(indices)

    def pick_color(self, colors):
        return min(colors) if self.color_rule == "min-color" else max(colors)

    def index_order(self, indices):
        return sorted(indices, reverse=self.index_rule == "max-index")

    def to_dict(self):
        return {"index": self.index_rule, "color": self.color_rule}


DEFAULT_TIEBREAK = TieBreak()


# =========================
# Decisions and traces
# =========================
NEW_BIN = None


@dataclass(frozen=True)
class Decision:
    bin_index: int = NEW_BIN
    pseudo_bin: int = None
    new_pseudo_bin: bool = False

    @property
    def new_bin(self):
        return self.bin_index is NEW_BIN


@dataclass(frozen=True)
class TraceStep:
    item_index: int
    bin_index: int
    new_bin: bool
    pseudo_bin: int = None
    new_pseudo_bin: bool = False

    def to_dict(self):
        return {
            "item": self.item_index,
            "bin": self.bin_index + 1,
            "new_bin": self.new_bin,
            "pseudo_bin": None if self.pseudo_bin is None else self.pseudo_bin + 1,
            "new_pseudo_bin": self.new_pseudo_bin,
        }


# =========================
# Algorithms
# =========================
class OnlineAlgorithm:
    name = "online"

    def __init__(self, tiebreak=DEFAULT_TIEBREAK):
        self.tiebreak = tiebreak
        self.reset()

    def reset(self):
        pass

    def step(self, item, packing):
        raise NotImplementedError

    def describe(self):
        return {"algorithm": self.name, "tiebreak": self.tiebreak.to_dict()}


class NextFit(OnlineAlgorithm):
    name = "nf"

    def reset(self):
        self.active = None

    def step(self, item, packing):
        if self.active is not None and can_accept(packing.bins[self.active], item):
            return Decision(self.active)
        self.active = len(packing.bins)
        return Decision(NEW_BIN)


def first_fit_selector(candidates, packing, item, tiebreak):
    return min(candidates)


def last_fit_selector(candidates, packing, item, tiebreak):
    return max(candidates)


def best_fit_selector(candidates, packing, item, tiebreak):
    smallest = min(packing.bins[b].residual for b in candidates)
    return tiebreak.pick_index([b for b in candidates if packing.bins[b].residual == smallest])


def worst_fit_selector(candidates, packing, item, tiebreak):
    largest = max(packing.bins[b].residual for b in candidates)
    return tiebreak.pick_index([b for b in candidates if packing.bins[b].residual == largest])


class AnyFit(OnlineAlgorithm):
    """
    Opens a new bin only when no existing bin can take the item; otherwise the
    selector chooses among the feasible bins.
    """
    name = "af"

    def __init__(self, selector, name=None, tiebreak=DEFAULT_TIEBREAK):
        self.selector = selector
        if name:
            self.name = name
        super().__init__(tiebreak)

    def step(self, item, packing):
        candidates = [b for b, bin_ in enumerate(packing.bins) if can_accept(bin_, item)]
        if not candidates:
            return Decision(NEW_BIN)
        choice = self.selector(candidates, packing, item, self.tiebreak)
        if choice not in candidates:
            if not isinstance(choice, int) or not 0 <= choice < len(packing.bins):
                raise ParameterError(f"{self.name} selector returned {choice!r}, not one of {len(packing.bins)} bins")
            bin_ = packing.bins[choice]
            raise PackingValidationError(ValidationResult.violation(
                Violation.COLOR_ADJACENCY if bin_.last_color == item.color else Violation.CAPACITY,
                choice, len(bin_), f"{self.name} selector chose bin {choice + 1}, which cannot take item {item}",
            ))
        return Decision(choice)


def FirstFit(tiebreak=DEFAULT_TIEBREAK):
    return AnyFit(first_fit_selector, "ff", tiebreak)


def BestFit(tiebreak=DEFAULT_TIEBREAK):
    return AnyFit(best_fit_selector, "bf", tiebreak)


def WorstFit(tiebreak=DEFAULT_TIEBREAK):
    return AnyFit(worst_fit_selector, "wf", tiebreak)


# =========================
# Pseudo-bin algorithms
# =========================
@dataclass
class PseudoBin:
    bins: list = field(default_factory=list)
    color: str = None

    @property
    def n_bins(self):
        return len(self.bins)


class BaPState:
    """Pseudo-bins P_1..P_k with their colors, plus a color -> members index."""

    def __init__(self):
        self.pseudo_bins = []
        self.members = {}

    @property
    def k(self):
        return len(self.pseudo_bins)

    def count(self, color):
        return len(self.members.get(color, ()))

    def color_counts(self):
        return Counter({color: len(members) for color, members in self.members.items()})

    def open(self):
        self.pseudo_bins.append(PseudoBin())
        return len(self.pseudo_bins) - 1

    def recolor(self, j, color):
        previous = self.pseudo_bins[j].color
        if previous is not None:
            members = self.members[previous]
            members.discard(j)
            if not members:
                del self.members[previous]
        self.members.setdefault(color, set()).add(j)
        self.pseudo_bins[j].color = color


class PseudoBinAlgorithm(OnlineAlgorithm):
    """
    Assigns each item to a pseudo-bin (`choose`), then packs it Next-Fit style
    into that pseudo-bin's last bin, opening a bin for the pseudo-bin when the
    item does not fit by size.
    """

    def reset(self):
        self.state = BaPState()

    def choose(self, item):
        raise NotImplementedError

    def step(self, item, packing):
        state = self.state
        j = self.choose(item)
        opened = j is None
        if opened:
            j = state.open()
        pseudo = state.pseudo_bins[j]
        if pseudo.bins and packing.bins[pseudo.bins[-1]].load + item.size <= 1:
            target = pseudo.bins[-1]
            decision = Decision(target, j, opened)
        else:
            pseudo.bins.append(len(packing.bins))
            decision = Decision(NEW_BIN, j, opened)
        state.recolor(j, item.color)
        return decision


class Pseudo(PseudoBinAlgorithm):
    name = "pseudo"

    def choose(self, item):
        qualifying = [
            j for j, pseudo in enumerate(self.state.pseudo_bins) if pseudo.color != item.color
        ]
        if not qualifying:
            return None
        return self.tiebreak.pick_index(qualifying)


class BalancedPseudo(PseudoBinAlgorithm):
    """Prefers pseudo-bins of the most frequent color other than the item's."""
    name = "bap"

    def choose(self, item):
        state = self.state
        if state.k == state.count(item.color):
            return None
        counts = {color: len(m) for color, m in state.members.items() if color != item.color}
        largest = max(counts.values())
        g = self.tiebreak.pick_color([color for color, n in counts.items() if n == largest])
        return self.tiebreak.pick_index(state.members[g])


ALGORITHMS = {
    "nf": NextFit,
    "ff": FirstFit,
    "bf": BestFit,
    "wf": WorstFit,
    "pseudo": Pseudo,
    "bap": BalancedPseudo,
}


def make_algorithm(token, tiebreak=DEFAULT_TIEBREAK):
    try:
        factory = ALGORITHMS[token]
    except KeyError:
        raise ParameterError(f"unknown algorithm {token!r}; choose from {sorted(ALGORITHMS)}")
    return factory(tiebreak=tiebreak)


# =========================
# Engine
# =========================
class OnlineRunner:
    """
    Feeds items to an algorithm one at a time and applies its decisions.
    Interactive adversaries drive this directly, one item per call.
    """

    def __init__(self, algorithm):
        self.algorithm = algorithm
        algorithm.reset()
        self.packing = Packing()
        self.trace = []

    def feed(self, item):
        decision = self.algorithm.step(item, self.packing)
        bin_index = self.packing.place(item, decision.bin_index)
        step = TraceStep(
            item.index, bin_index, decision.new_bin, decision.pseudo_bin, decision.new_pseudo_bin
        )
        self.trace.append(step)
        LOG.debug("%s: item %s -> bin %d%s", self.algorithm.name, item, bin_index + 1,
                  " (new)" if decision.new_bin else "")
        return step

    @property
    def pseudo_bin_count(self):
        state = getattr(self.algorithm, "state", None)
        return None if state is None else state.k


def run(algorithm, instance):
    """Run `algorithm` over the whole instance; returns (packing, trace)."""
    runner = OnlineRunner(algorithm)
    for item in instance:
        runner.feed(item)
    LOG.info("%s packed %d items into %d bins", algorithm.name, len(instance),
             runner.packing.bin_count)
    return runner.packing, runner.trace


def replay_trace(instance, trace):
    """Rebuild the packing a trace describes."""
    packing = Packing()
    for step in trace:
        item = instance.item(step.item_index)
        packing.place(item, None if step.new_bin else step.bin_index)
    return packing


def pseudo_bin_groups(trace):
    """Pseudo-bin index -> ordered list of real bin indices, from a pseudo-bin trace."""
    groups = {}
    for step in trace:
        bins = groups.setdefault(step.pseudo_bin, [])
        if not bins or bins[-1] != step.bin_index:
            bins.append(step.bin_index)
    return groups
