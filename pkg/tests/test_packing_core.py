from fractions import Fraction

import pytest

from harness import RandomInstanceParams, random_instance
from packing_core import (
    BLACK,
    WHITE,
    Bin,
    Instance,
    InstanceFormatError,
    Item,
    Packing,
    PackingValidationError,
    ParameterError,
    Violation,
    can_accept,
    format_size,
    load_instance,
    parse_instance,
    save_instance,
    serialize_instance,
    validate_packing,
)


def _bin(*items):
    return Bin(list(items), sum((item.size for item in items), Fraction(0)))


# =========================
# can_accept
# =========================
def test_empty_bin_accepts_anything():
    assert can_accept(Bin(), Item(Fraction(1), WHITE, 1))


def test_same_color_rejected_even_at_zero_size():
    bin_ = _bin(Item(Fraction(0), WHITE, 1))
    assert not can_accept(bin_, Item(Fraction(0), WHITE, 2))


def test_exact_fit_is_allowed():
    bin_ = _bin(Item(Fraction(3, 5), BLACK, 1))
    assert can_accept(bin_, Item(Fraction(2, 5), WHITE, 2))


def test_overflow_rejected():
    bin_ = _bin(Item(Fraction(3, 5), BLACK, 1))
    assert not can_accept(bin_, Item(Fraction(3, 5), WHITE, 2))


# =========================
# Sizes and instances
# =========================
def test_floats_never_accepted():
    with pytest.raises(TypeError):
        Instance.from_pairs([(WHITE, 0.5)])


def test_size_out_of_range():
    with pytest.raises(ParameterError):
        Instance.from_pairs([(WHITE, Fraction(3, 2))])


def test_format_size():
    assert format_size(Fraction(1, 2)) == "1/2"
    assert format_size(Fraction(4, 4)) == "1"
    assert format_size(0) == "0"


def test_indices_must_run_from_one():
    with pytest.raises(ParameterError):
        Instance((Item(Fraction(0), WHITE, 2),))


# =========================
# validate_packing
# =========================
def test_valid_single_bin():
    instance = parse_instance("white 1/2\nblack 1/2")
    packing = Packing.from_bins([list(instance)])
    assert validate_packing(instance, packing).ok


def test_color_adjacency_location():
    instance = parse_instance("white 0\nwhite 0")
    result = validate_packing(instance, Packing.from_bins([list(instance)]))
    assert not result
    assert result.kind == Violation.COLOR_ADJACENCY
    assert (result.bin_number, result.position) == (1, 2)


def test_order_violation():
    instance = parse_instance("white 0\nblack 0")
    packing = Packing.from_bins([[instance.item(2), instance.item(1)]])
    assert validate_packing(instance, packing).kind == Violation.ORDER


def test_capacity_violation():
    instance = parse_instance("white 3/4\nblack 1/2")
    result = validate_packing(instance, Packing.from_bins([list(instance)]))
    assert result.kind == Violation.CAPACITY
    assert result.position == 2


def test_missing_and_duplicate_items():
    instance = parse_instance("white 0\nblack 0\nwhite 0")
    missing = Packing.from_bins([[instance.item(1), instance.item(2)]])
    assert validate_packing(instance, missing).kind == Violation.MISSING_ITEM
    twice = Packing.from_bins([[instance.item(1)], [instance.item(1), instance.item(2), instance.item(3)]])
    assert validate_packing(instance, twice).kind == Violation.DUPLICATE_ITEM


def test_unknown_item_and_empty_bin():
    instance = parse_instance("white 0")
    stranger = Packing.from_bins([[Item(Fraction(0), BLACK, 1)]])
    assert validate_packing(instance, stranger).kind == Violation.UNKNOWN_ITEM
    hollow = Packing.from_bins([[instance.item(1)], []])
    assert validate_packing(instance, hollow).kind == Violation.EMPTY_BIN


def test_raise_for_violation():
    instance = parse_instance("white 0\nwhite 0")
    result = validate_packing(instance, Packing.from_bins([list(instance)]))
    with pytest.raises(PackingValidationError) as excinfo:
        result.raise_for_violation()
    assert excinfo.value.result is result


def test_place_refuses_infeasible():
    instance = parse_instance("white 0\nwhite 0")
    packing = Packing()
    packing.place(instance.item(1))
    with pytest.raises(PackingValidationError):
        packing.place(instance.item(2), 0)


def test_place_tracks_last_colors():
    instance = parse_instance("white 0\nblack 0\nwhite 0")
    packing = Packing()
    packing.place(instance.item(1))
    packing.place(instance.item(2), 0)
    packing.place(instance.item(3))
    assert packing.color_counts == {BLACK: 1, WHITE: 1}
    assert packing.assignment[2] == (0, 1)
    assert validate_packing(instance, packing)


# =========================
# File format
# =========================
def test_parse_and_serialize():
    text = "white 1/2\nblack 1/2\n"
    instance = parse_instance(text)
    assert [(item.color, item.size) for item in instance] == [
        (WHITE, Fraction(1, 2)), (BLACK, Fraction(1, 2)),
    ]
    assert serialize_instance(instance) == text


def test_parse_zero_sizes_comments_and_blanks():
    instance = parse_instance("# three reds\nred 0\n\nred 0\nred 0\n")
    assert len(instance) == 3
    assert instance.is_zero_size()
    assert instance.palette == ["red"]


def test_parse_decimal_is_exact():
    instance = parse_instance("white 0.1\nblack 0.25")
    assert instance.item(1).size == Fraction(1, 10)
    assert instance.item(2).size == Fraction(1, 4)


@pytest.mark.parametrize("text,line", [
    ("white 3/2", 1),
    ("white 1/2\nblack", 2),
    ("white 1/2\nblack half", 2),
    ("white -1/4", 1),
])
def test_parse_errors_carry_line_number(text, line):
    with pytest.raises(InstanceFormatError) as excinfo:
        parse_instance(text)
    assert excinfo.value.line_number == line


def test_file_helpers(tmp_path):
    instance = parse_instance("white 1/3\nblack 0\nred 1")
    path = tmp_path / "ex.cbp"
    save_instance(instance, path)
    assert load_instance(path) == instance


def test_undecodable_file_is_a_format_error(tmp_path):
    path = tmp_path / "latin.cbp"
    path.write_bytes(b"black 0\nwhite \xff1/2\n")
    with pytest.raises(InstanceFormatError) as excinfo:
        load_instance(path)
    assert excinfo.value.line_number == 2
    assert "UTF-8" in str(excinfo.value)


def _random_assignment(rng, instance):
    bins = []
    for item in instance:
        choice = rng.randint(0, len(bins))
        if choice == len(bins):
            bins.append([])
        bins[choice].append(item)
    if rng.random() < 0.2:
        rng.shuffle(rng.choice(bins))
    return bins


def _online_replay(instance, bins):
    """Place items in arrival order into their assigned bins; None if a placement is refused."""
    owner = {item.index: b for b, contents in enumerate(bins) for item in contents}
    opened = {}
    packing = Packing()
    try:
        for item in instance:
            b = owner[item.index]
            opened[b] = packing.place(item, opened.get(b))
    except PackingValidationError:
        return None
    return [packing.bins[opened[b]].contents for b in range(len(bins))]


def test_validation_accepts_exactly_the_online_reachable_packings(rng):
    outcomes = set()
    for _ in range(400):
        instance = random_instance(rng, RandomInstanceParams(1, 8, rng.randint(1, 3), "mixed", 4))
        bins = _random_assignment(rng, instance)
        reachable = _online_replay(instance, bins) == bins
        assert bool(validate_packing(instance, Packing.from_bins(bins))) == reachable
        outcomes.add(reachable)
    assert outcomes == {True, False}
