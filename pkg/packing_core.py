"""
Exact domain model for colorful bin packing: items, instances, bins,
packings, validity checking and the line-oriented instance file format.

Sizes are fractions.Fraction throughout; a float never enters this module.
"""
import logging
from dataclasses import dataclass, field
from collections import Counter
from fractions import Fraction

LOG = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

WHITE = "white"
BLACK = "black"
RED = "red"
BLUE = "blue"


# =========================
# Errors
# =========================
class ColorfulPackingError(Exception):
    """Base class for every error raised by this package."""


class InstanceFormatError(ColorfulPackingError, ValueError):
    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ParameterError(ColorfulPackingError, ValueError):
    """A generator, adversary or solver was called outside its guard."""


class PackingValidationError(ColorfulPackingError):
    def __init__(self, result):
        self.result = result
        super().__init__(str(result))


# =========================
# Sizes
# =========================
def as_size(value):
    """Coerce an int, Fraction or rational string into an exact size in [0, 1]."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted as item sizes")
    size = Fraction(value)
    if size < 0 or size > 1:
        raise ParameterError(f"size {format_size(size)} is outside [0, 1]")
    return size


def format_size(size):
    size = Fraction(size)
    if size.denominator == 1:
        return str(size.numerator)
    return f"{size.numerator}/{size.denominator}"


def parse_size(token):
    try:
        return Fraction(token.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"non-rational size {token!r}") from exc


# =========================
# Items and instances
# =========================
@dataclass(frozen=True)
class Item:
    size: Fraction
    color: str
    index: int

    def __str__(self):
        return f"#{self.index} {self.color} {format_size(self.size)}"


@dataclass(frozen=True)
class Instance:
    items: tuple = ()

    def __post_init__(self):
        for position, item in enumerate(self.items, start=1):
            if item.index != position:
                raise ParameterError(
                    f"item at position {position} carries index {item.index}"
                )

    @classmethod
    def from_pairs(cls, pairs):
        """Build an instance from (color, size) pairs, numbering items from 1."""
        return cls(tuple(
            Item(as_size(size), str(color), index)
            for index, (color, size) in enumerate(pairs, start=1)
        ))

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, position):
        return self.items[position]

    @property
    def colors(self):
        return [item.color for item in self.items]

    @property
    def palette(self):
        return sorted(set(self.colors))

    def is_zero_size(self):
        return all(item.size == 0 for item in self.items)

    def item(self, index):
        """Item by its 1-based index."""
        return self.items[index - 1]


class InstanceBuilder:
    """Appends items one at a time; used by the interactive adversaries."""

    def __init__(self):
        self._items = []

    def add(self, color, size):
        item = Item(as_size(size), color, len(self._items) + 1)
        self._items.append(item)
        return item

    def __len__(self):
        return len(self._items)

    def build(self):
        return Instance(tuple(self._items))


# =========================
# Bins and packings
# =========================
@dataclass
class Bin:
    contents: list = field(default_factory=list)
    load: Fraction = ZERO

    @property
    def last_color(self):
        return self.contents[-1].color if self.contents else None

    @property
    def residual(self):
        return ONE - self.load

    def __len__(self):
        return len(self.contents)


def can_accept(bin_, item):
    """True iff `item` may be appended to `bin_` (color and capacity rules)."""
    if not bin_.contents:
        return True
    return bin_.last_color != item.color and bin_.load + item.size <= 1


class Packing:
    """
    Bins in opening order plus the item -> (bin, position) assignment.

    `place` is the only mutator; it refuses infeasible placements, so a packing
    built through it is valid by construction. `from_bins` builds a packing
    without checks (for certificates and hand-written fixtures) and must be
    passed through `validate_packing`.
    """

    def __init__(self):
        self.bins = []
        self.assignment = {}
        self.color_counts = Counter()

    @classmethod
    def from_bins(cls, bins):
        packing = cls()
        for contents in bins:
            bin_ = Bin(list(contents), sum((item.size for item in contents), ZERO))
            packing.bins.append(bin_)
            for position, item in enumerate(bin_.contents):
                packing.assignment.setdefault(item.index, (len(packing.bins) - 1, position))
            if bin_.contents:
                packing.color_counts[bin_.last_color] += 1
        return packing

    def __len__(self):
        return len(self.bins)

    @property
    def bin_count(self):
        return sum(1 for bin_ in self.bins if bin_.contents)

    def open_bin(self):
        self.bins.append(Bin())
        return len(self.bins) - 1

    def place(self, item, bin_index=None):
        """Append `item` to an existing bin, or to a new bin when bin_index is None."""
        if bin_index is None:
            bin_index = self.open_bin()
        bin_ = self.bins[bin_index]
        if not can_accept(bin_, item):
            raise PackingValidationError(ValidationResult.violation(
                Violation.COLOR_ADJACENCY if bin_.last_color == item.color else Violation.CAPACITY,
                bin_index, len(bin_.contents),
                f"item {item} does not fit bin {bin_index + 1}",
            ))
        previous = bin_.last_color
        if previous is not None:
            self.color_counts[previous] -= 1
            if not self.color_counts[previous]:
                del self.color_counts[previous]
        self.color_counts[item.color] += 1
        bin_.contents.append(item)
        bin_.load += item.size
        self.assignment[item.index] = (bin_index, len(bin_.contents) - 1)
        return bin_index

    def as_index_lists(self):
        return [[item.index for item in bin_.contents] for bin_ in self.bins]

    def to_dict(self):
        return {
            "bins": self.bin_count,
            "contents": self.as_index_lists(),
            "loads": [format_size(bin_.load) for bin_ in self.bins],
        }


# =========================
# Validation
# =========================
class Violation:
    CAPACITY = "capacity"
    COLOR_ADJACENCY = "color-adjacency"
    ORDER = "order"
    MISSING_ITEM = "missing-item"
    DUPLICATE_ITEM = "duplicate-item"
    UNKNOWN_ITEM = "unknown-item"
    EMPTY_BIN = "empty-bin"


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    kind: str = None
    bin_number: int = None
    position: int = None
    message: str = ""

    @classmethod
    def success(cls):
        return cls(True)

    @classmethod
    def violation(cls, kind, bin_index, position, message):
        # stored 1-based, as printed
        return cls(False, kind, bin_index + 1, None if position is None else position + 1, message)

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        where = f" at bin {self.bin_number}" if self.bin_number else ""
        if self.position:
            where += f" position {self.position}"
        return f"{self.kind} violation{where}: {self.message}"

    def raise_for_violation(self):
        if not self.ok:
            raise PackingValidationError(self)
        return self


def validate_packing(instance, packing):
    """Check a packing against an instance; returns the first violation found."""
    seen = set()
    for bin_index, bin_ in enumerate(packing.bins):
        if not bin_.contents:
            return ValidationResult.violation(Violation.EMPTY_BIN, bin_index, None, "bin holds no items")
        load = ZERO
        previous = None
        for position, item in enumerate(bin_.contents):
            if not 1 <= item.index <= len(instance) or instance.item(item.index) != item:
                return ValidationResult.violation(
                    Violation.UNKNOWN_ITEM, bin_index, position,
                    f"item {item} is not part of the instance",
                )
            if item.index in seen:
                return ValidationResult.violation(
                    Violation.DUPLICATE_ITEM, bin_index, position,
                    f"item #{item.index} is packed more than once",
                )
            seen.add(item.index)
            if previous is not None:
                if item.index < previous.index:
                    return ValidationResult.violation(
                        Violation.ORDER, bin_index, position,
                        f"item #{item.index} follows item #{previous.index}",
                    )
                if item.color == previous.color:
                    return ValidationResult.violation(
                        Violation.COLOR_ADJACENCY, bin_index, position,
                        f"items #{previous.index} and #{item.index} are both {item.color}",
                    )
            load += item.size
            if load > 1:
                return ValidationResult.violation(
                    Violation.CAPACITY, bin_index, position,
                    f"load reaches {format_size(load)}",
                )
            previous = item
    missing = [item.index for item in instance if item.index not in seen]
    if missing:
        return ValidationResult(
            False, Violation.MISSING_ITEM, None, None,
            f"{len(missing)} item(s) unpacked, first #{missing[0]}",
        )
    return ValidationResult.success()


# =========================
# Instance file format
# =========================
def parse_instance(text):
    """Parse `<color> <size>` lines; `#` starts a comment line, blank lines are skipped."""
    pairs = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"expected '<color> <size>', got {line!r}", line_number)
        color, token = parts
        try:
            size = parse_size(token)
        except InstanceFormatError as exc:
            raise InstanceFormatError(str(exc), line_number) from exc
        if size < 0 or size > 1:
            raise InstanceFormatError(f"size {token} is outside [0, 1]", line_number)
        pairs.append((color, size))
    return Instance.from_pairs(pairs)


def serialize_instance(instance):
    return "".join(f"{item.color} {format_size(item.size)}\n" for item in instance)


def load_instance(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except UnicodeDecodeError as exc:
        line_number = exc.object[:exc.start].count(b"\n") + 1
        raise InstanceFormatError(f"not valid UTF-8 ({exc.reason})", line_number) from exc
    instance = parse_instance(text)
    LOG.debug("loaded %d items from %s", len(instance), path)
    return instance


def save_instance(instance, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_instance(instance))
