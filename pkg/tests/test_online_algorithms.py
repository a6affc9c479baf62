from fractions import Fraction

import pytest

from adversaries import bap_zero_phase_counts, gen_prop1
from harness import RandomInstanceParams, random_instance
from online_algorithms import (
    ALGORITHMS,
    AnyFit,
    BalancedPseudo,
    BestFit,
    FirstFit,
    NextFit,
    OnlineRunner,
    Pseudo,
    TieBreak,
    WorstFit,
    last_fit_selector,
    make_algorithm,
    pseudo_bin_groups,
    replay_trace,
    run,
)
from packing_core import (
    BLACK,
    WHITE,
    Instance,
    Packing,
    PackingValidationError,
    ParameterError,
    Violation,
    can_accept,
    parse_instance,
    validate_packing,
)


# =========================
# Worked examples
# =========================
def test_next_fit_capacity_forces_second_bin():
    instance = Instance.from_pairs([(WHITE, Fraction(1, 2)), (BLACK, Fraction(1, 2)), (WHITE, Fraction(1, 2))])
    packing, _ = run(NextFit(), instance)
    assert packing.as_index_lists() == [[1, 2], [3]]


def test_next_fit_two_whites(make_zero_size):
    packing, _ = run(NextFit(), make_zero_size(WHITE, WHITE))
    assert packing.bin_count == 2


def test_best_fit_prefers_smallest_residual():
    instance = Instance.from_pairs([(BLACK, Fraction(3, 10)), (BLACK, Fraction(7, 10)), (WHITE, Fraction(1, 5))])
    _, trace = run(BestFit(), instance)
    assert trace[-1].bin_index == 1


def test_worst_fit_prefers_largest_residual():
    instance = Instance.from_pairs([(BLACK, Fraction(3, 10)), (BLACK, Fraction(7, 10)), (WHITE, Fraction(1, 5))])
    _, trace = run(WorstFit(), instance)
    assert trace[-1].bin_index == 0


def test_first_fit_skips_color_infeasible_bin(make_zero_size):
    instance = make_zero_size(WHITE, BLACK, WHITE)
    packing = Packing.from_bins([[instance.item(1)], [instance.item(2)]])
    decision = FirstFit().step(instance.item(3), packing)
    assert decision.bin_index == 1


@pytest.mark.parametrize("alg,variant", [("ff", "eps"), ("bf", "eps"), ("pseudo", "eps"), ("wf", "wf")])
def test_prop1_small(alg, variant):
    packing, _ = run(make_algorithm(alg), gen_prop1(variant, 4, 2))
    assert packing.bin_count == 7


def test_pseudo_zero_size(make_zero_size):
    packing, _ = run(Pseudo(), make_zero_size(BLACK, WHITE, BLACK, WHITE))
    assert packing.bin_count == 1
    algorithm = Pseudo()
    packing, _ = run(algorithm, make_zero_size(BLACK, BLACK))
    assert algorithm.state.k == 2


def test_bap_worked_example(make_zero_size):
    algorithm = BalancedPseudo()
    packing, trace = run(algorithm, make_zero_size("R", "R", "B", "R"))
    assert algorithm.state.k == 2
    assert packing.bin_count == 2
    assert [step.pseudo_bin for step in trace] == [0, 1, 0, 0]
    assert [step.new_pseudo_bin for step in trace] == [True, True, False, False]


def test_bap_max_index_ties(make_zero_size):
    algorithm = BalancedPseudo(TieBreak("max-index"))
    _, trace = run(algorithm, make_zero_size("R", "R", "B"))
    assert trace[-1].pseudo_bin == 1


def test_bap_prefers_most_frequent_color(make_zero_size):
    # after R, R, R, B the pseudo-bins are (B, R, R); a G item joins an R one
    algorithm = BalancedPseudo()
    _, trace = run(algorithm, make_zero_size("R", "R", "R", "B", "G"))
    assert trace[-1].pseudo_bin == 1


def test_bap_zero_cascade_snapshots():
    assert bap_zero_phase_counts(2) == [(0, 64, 64), (1, 80, 80), (2, 92, 92)]


def test_bap_general_sizes_stay_in_pseudo_bin():
    instance = Instance.from_pairs([
        (WHITE, Fraction(2, 3)), (BLACK, Fraction(2, 3)), (WHITE, Fraction(1, 3)),
    ])
    algorithm = BalancedPseudo()
    packing, trace = run(algorithm, instance)
    # item 2 joins P_1 but overflows into a second bin of the same pseudo-bin
    assert algorithm.state.k == 1
    assert pseudo_bin_groups(trace) == {0: [0, 1]}
    assert packing.as_index_lists() == [[1], [2, 3]]


# =========================
# Tie-break parsing
# =========================
def test_tiebreak_parse():
    assert TieBreak.parse("max-index") == TieBreak("max-index", "min-color")
    assert TieBreak.parse("min-index", "max-color") == TieBreak("min-index", "max-color")
    assert TieBreak.parse(None, None) == TieBreak()
    with pytest.raises(ParameterError):
        TieBreak.parse("middle-index")


def test_unknown_algorithm():
    with pytest.raises(ParameterError):
        make_algorithm("xf")


# =========================
# Properties over random instances
# =========================
def _instances(rng, count=150):
    params = RandomInstanceParams(1, 30, 3, "mixed", 6)
    return [random_instance(rng, params) for _ in range(count)]


@pytest.mark.parametrize("factory", [
    FirstFit, BestFit, WorstFit, lambda: AnyFit(last_fit_selector, "lf"),
])
def test_any_fit_opens_only_when_forced(rng, factory):
    for instance in _instances(rng):
        runner = OnlineRunner(factory())
        for item in instance:
            feasible = [b for b in runner.packing.bins if can_accept(b, item)]
            step = runner.feed(item)
            assert step.new_bin == (not feasible)
        assert validate_packing(instance, runner.packing)


def _newest_bin(candidates, packing, item, tiebreak):
    return len(packing.bins) - 1


def test_infeasible_selector_choice_is_reported():
    instance = parse_instance("white 0\nwhite 0\nblack 0\nblack 0")
    with pytest.raises(PackingValidationError) as excinfo:
        run(AnyFit(_newest_bin, "newest"), instance)
    result = excinfo.value.result
    assert (result.kind, result.bin_number, result.position) == (Violation.COLOR_ADJACENCY, 2, 3)
    with pytest.raises(ParameterError):
        run(AnyFit(lambda candidates, packing, item, tiebreak: 7, "off"), instance)


def test_next_fit_uses_only_active_bin(rng):
    for instance in _instances(rng):
        runner = OnlineRunner(NextFit())
        for item in instance:
            step = runner.feed(item)
            assert step.bin_index == len(runner.packing.bins) - 1


@pytest.mark.parametrize("alg", sorted(ALGORITHMS))
def test_every_algorithm_is_valid_and_replayable(rng, alg):
    for instance in _instances(rng, 80):
        packing, trace = run(make_algorithm(alg), instance)
        assert validate_packing(instance, packing)
        assert replay_trace(instance, trace).as_index_lists() == packing.as_index_lists()


def test_pseudo_bin_colors_follow_last_item(rng):
    for instance in _instances(rng, 80):
        algorithm = BalancedPseudo()
        packing, trace = run(algorithm, instance)
        for j, bins in pseudo_bin_groups(trace).items():
            assert algorithm.state.pseudo_bins[j].bins == bins
            assert packing.bins[bins[-1]].last_color == algorithm.state.pseudo_bins[j].color


def test_bap_zero_size_bins_equal_pseudo_bins(rng):
    params = RandomInstanceParams(1, 40, 4, "zero")
    for _ in range(100):
        instance = random_instance(rng, params)
        algorithm = BalancedPseudo()
        packing, _ = run(algorithm, instance)
        assert packing.bin_count == algorithm.state.k


# =========================
# Pseudo-bin invariants
# =========================
@pytest.mark.parametrize("factory", [Pseudo, BalancedPseudo])
def test_consecutive_bins_of_a_pseudo_bin_overflow(rng, factory):
    for instance in _instances(rng, 300):
        runner = OnlineRunner(factory())
        for item in instance:
            loads = [bin_.load for bin_ in runner.packing.bins]
            step = runner.feed(item)
            bins = runner.algorithm.state.pseudo_bins[step.pseudo_bin].bins
            if step.new_bin and len(bins) > 1:
                assert loads[bins[-2]] + item.size > 1


@pytest.mark.parametrize("factory", [Pseudo, BalancedPseudo])
@pytest.mark.parametrize("sizes", ["zero", "mixed"])
def test_pseudo_assignment_respects_colors(rng, factory, sizes):
    for _ in range(200):
        instance = random_instance(rng, RandomInstanceParams(1, 40, rng.randint(2, 5), sizes))
        runner = OnlineRunner(factory())
        for item in instance:
            colors = [pseudo.color for pseudo in runner.algorithm.state.pseudo_bins]
            step = runner.feed(item)
            if step.new_pseudo_bin:
                # a pseudo-bin opens only when every existing one ends with this color
                assert step.pseudo_bin == len(colors)
                assert all(color == item.color for color in colors)
            else:
                assert colors[step.pseudo_bin] != item.color


@pytest.mark.parametrize("alg", sorted(ALGORITHMS))
@pytest.mark.parametrize("tiebreak", [TieBreak(), TieBreak("max-index", "max-color")])
def test_runs_are_deterministic(rng, alg, tiebreak):
    for instance in _instances(rng, 40):
        first_packing, first_trace = run(make_algorithm(alg, tiebreak), instance)
        second_packing, second_trace = run(make_algorithm(alg, tiebreak), instance)
        assert first_trace == second_trace
        assert first_packing.as_index_lists() == second_packing.as_index_lists()
