from fractions import Fraction

import pytest

from adversaries import gen_prop1
from harness import RandomInstanceParams, random_instance
from lower_bounds import bounds_report
from offline_oracle import (
    OracleLimits,
    check_certificate,
    exhaustive_opt,
    opt,
    opt_zero_size,
)
from packing_core import BLACK, WHITE, Instance, ParameterError


def test_three_reds(make_zero_size):
    result = opt(make_zero_size("R", "R", "R"))
    assert result.bins == 3
    assert result.exact
    assert check_certificate(make_zero_size("R", "R", "R"), result)


def test_alternating_quarters():
    instance = Instance.from_pairs([(WHITE if t % 2 == 0 else BLACK, Fraction(1, 4)) for t in range(4)])
    assert opt(instance).bins == 1


def test_rrbr(make_zero_size):
    instance = make_zero_size("R", "R", "B", "R")
    result = opt(instance)
    assert result.bins == 2
    assert check_certificate(instance, result)


def test_empty_instance():
    result = opt(Instance())
    assert (result.bins, result.exact) == (0, True)


def test_prop1_eps_small():
    instance = gen_prop1("eps", 4, 2)
    result = opt(instance, OracleLimits(max_items=24))
    assert result.exact
    assert result.bins == 4
    assert check_certificate(instance, result)


def test_capacity_and_color_interact():
    # the two halves of white cannot share a bin, and neither can the two blacks
    instance = Instance.from_pairs([
        (WHITE, Fraction(1, 2)), (BLACK, Fraction(1, 2)), (WHITE, Fraction(1, 2)), (BLACK, Fraction(1, 2)),
    ])
    assert opt(instance).bins == 2


def test_too_many_items_is_inexact_not_an_error(rng):
    params = RandomInstanceParams(30, 30, 3, "rational", 7)
    instance = random_instance(rng, params)
    result = opt(instance, OracleLimits(max_items=10))
    assert result.bins >= result.lower_bound
    assert check_certificate(instance, result)
    if not result.exact:
        assert "exceed" in result.reason


def test_zero_size_counting():
    blocks = Instance.from_pairs([("red", 0)] * 5 + [("blue", 0)] * 5)
    assert opt_zero_size(blocks) == 5
    rotating = Instance.from_pairs([(("a", "b", "c")[t % 3], 0) for t in range(30)])
    assert opt_zero_size(rotating) == 1


def test_zero_size_small_cascade():
    # four whites, two reds, two blues, four whites
    colors = [WHITE] * 4 + ["red"] * 2 + ["blue"] * 2 + [WHITE] * 4
    instance = Instance.from_pairs((color, 0) for color in colors)
    assert opt_zero_size(instance) == 4
    result = opt(instance)
    assert result.bins == 4
    assert check_certificate(instance, result)


def test_zero_size_guards():
    with pytest.raises(ParameterError):
        opt_zero_size(Instance.from_pairs([(WHITE, Fraction(1, 2))]))
    with pytest.raises(ParameterError):
        opt_zero_size(Instance.from_pairs([(WHITE, 0)] * 49))


def test_exhaustive_guard():
    with pytest.raises(ParameterError):
        exhaustive_opt(Instance.from_pairs([(WHITE, 0)] * 13))


def test_branch_and_bound_matches_enumeration(rng):
    for _ in range(60):
        params = RandomInstanceParams(1, 9, rng.choice((2, 3, 5)), "mixed", 6)
        instance = random_instance(rng, params)
        result = opt(instance)
        assert result.exact
        assert result.bins == exhaustive_opt(instance)
        assert check_certificate(instance, result)


def test_opt_dominates_lower_bounds(rng):
    for _ in range(60):
        instance = random_instance(rng, RandomInstanceParams(1, 14, 3, "rational", 8))
        result = opt(instance)
        if not result.exact:
            continue
        report = bounds_report(instance)
        assert result.bins >= report.lb1
        assert result.bins >= report.lb0_bins


def test_zero_size_dp_matches_enumeration(rng):
    for _ in range(60):
        instance = random_instance(rng, RandomInstanceParams(1, 10, 3, "zero"))
        assert opt_zero_size(instance) == exhaustive_opt(instance)


def test_result_to_dict(make_zero_size):
    payload = opt(make_zero_size("R", "R", "B", "R")).to_dict()
    assert payload["bins"] == 2
    assert payload["exact"] is True
    assert sorted(i for bin_ in payload["certificate"] for i in bin_) == [1, 2, 3, 4]
