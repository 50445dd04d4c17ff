"""Greedy solver: goldens on the fixture games, tie contracts, oracle parity."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings

from leadcon.greedy import NotMonotonic, NotSymmetric, solve_greedy
from leadcon.model import (
    GameInstance,
    ValidationError,
    is_full_game_nash,
    is_nash_config,
    leader_cost,
)
from leadcon.oracle import brute_force_ose, brute_force_pure
from leadcon.report import OPTIMISTIC, PESSIMISTIC

from tests.conftest import game_instances

relaxed = settings(
    max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)


def expand_config(config):
    """Some follower profile with the given loads (lowest resources first)."""
    prof = []
    for i, v in enumerate(config):
        prof.extend([i] * v)
    return tuple(prof)


def with_aligned_costs(inst: GameInstance) -> GameInstance:
    """Copy of a symmetric instance where the leader pays follower prices."""
    tables = {
        rid: list(inst.follower_costs[k].values)
        for k, rid in enumerate(inst.resources)
    }
    return GameInstance.build(
        resources=list(inst.resources),
        follower_count=inst.follower_count,
        leader_actions=list(inst.leader_actions),
        follower_actions=["ALL"] * inst.follower_count,
        leader_costs=tables,
        follower_costs=tables,
    )


# -- fixture goldens -------------------------------------------------------


def test_three_road_optimistic(three_road_game):
    rep = solve_greedy(three_road_game, OPTIMISTIC)
    assert rep.leader_cost == 2
    assert rep.leader_strategy.support == (0,)
    assert rep.outcome == (1, 0, 2)
    assert rep.optimal and rep.guarantee
    assert rep.solver == "greedy"


def test_three_road_pessimistic(three_road_game):
    rep = solve_greedy(three_road_game, PESSIMISTIC)
    assert rep.guarantee  # strictly increasing follower costs
    assert rep.leader_cost == brute_force_pure(three_road_game, PESSIMISTIC).leader_cost


def test_single_resource_forced():
    g = GameInstance.build(
        resources=["only"],
        follower_count=2,
        leader_actions="ALL",
        follower_actions=["ALL"] * 2,
        leader_costs={"only": [5, 6, 7]},
        follower_costs={"only": [1, 2, 3]},
    )
    for sense in (OPTIMISTIC, PESSIMISTIC):
        rep = solve_greedy(g, sense)
        assert rep.outcome == (2,)
        assert rep.leader_cost == 7
        assert rep.guarantee


def test_mirror_pessimistic_flags_weak_ties(mirror_game):
    rep = solve_greedy(mirror_game, PESSIMISTIC)
    assert rep.leader_cost == 2  # best pure commitment; mixing would beat it
    assert not rep.guarantee  # follower costs only weakly increasing
    assert not rep.optimal


def test_two_road_optimistic_no_guarantee(two_road_game):
    rep = solve_greedy(two_road_game, OPTIMISTIC)
    assert rep.leader_cost == 2
    assert not rep.guarantee  # leader costs decrease with congestion
    # the pure-commitment oracle agrees here, but the mixed optimum is 1
    assert brute_force_pure(two_road_game, OPTIMISTIC).leader_cost == 2
    assert brute_force_ose(two_road_game).leader_cost == 1


def test_restricted_followers_rejected(fork_game):
    with pytest.raises(NotSymmetric):
        solve_greedy(fork_game, OPTIMISTIC)


def test_enforce_monotone_hard_error(two_road_game, mirror_game, three_road_game):
    with pytest.raises(NotMonotonic):
        solve_greedy(two_road_game, OPTIMISTIC, enforce_monotone=True)
    with pytest.raises(NotMonotonic):
        solve_greedy(mirror_game, PESSIMISTIC, enforce_monotone=True)
    rep = solve_greedy(three_road_game, PESSIMISTIC, enforce_monotone=True)
    assert rep.guarantee


def test_unknown_sense(three_road_game):
    with pytest.raises(ValidationError):
        solve_greedy(three_road_game, "median")


def test_stats_and_trace(three_road_game):
    rep = solve_greedy(three_road_game, OPTIMISTIC)
    assert rep.stats["commitments"] == 3
    assert rep.stats["steps"] == 3 * 3
    trace = rep.stats["_trace"]
    assert len(trace.runs) == 3
    for run in trace.runs:
        assert sum(run.config) == three_road_game.follower_count
        assert len(run.picks) == three_road_game.follower_count
    # private trace never leaks into the serialized report
    doc = rep.to_json_dict(three_road_game)
    assert "_trace" not in doc["stats"]
    assert doc["leader_cost"] == "2"


def test_trace_picks_minimize_marginal_cost(three_road_game):
    rep = solve_greedy(three_road_game, OPTIMISTIC)
    for run in rep.stats["_trace"].runs:
        loads = [0] * three_road_game.num_resources

        def marginal(j):
            shift = 1 if j == run.committed else 0
            return three_road_game.follower_costs[j].at(loads[j] + 1 + shift)

        for _, chosen in run.picks:
            best = min(marginal(j) for j in range(three_road_game.num_resources))
            assert marginal(chosen) == best
            loads[chosen] += 1


# -- randomized parity with the oracles ------------------------------------


@relaxed
@given(game_instances(max_followers=4, max_resources=3,
                      follower_mono="weak", leader_mono="weak"))
def test_optimistic_matches_mixed_oracle_when_monotone(inst):
    rep = solve_greedy(inst, OPTIMISTIC)
    assert rep.guarantee and rep.optimal
    assert rep.leader_cost == brute_force_ose(inst).leader_cost


@relaxed
@given(game_instances(max_followers=4, max_resources=3,
                      follower_mono="strict", leader_mono="weak"))
def test_pessimistic_matches_pure_oracle_when_strict(inst):
    rep = solve_greedy(inst, PESSIMISTIC)
    assert rep.guarantee
    assert rep.leader_cost == brute_force_pure(inst, PESSIMISTIC).leader_cost


@relaxed
@given(game_instances(max_followers=5, max_resources=4, follower_mono="weak"))
def test_fill_is_stable_under_monotone_followers(inst):
    for sense in (OPTIMISTIC, PESSIMISTIC):
        rep = solve_greedy(inst, sense)
        assert is_nash_config(inst, rep.leader_strategy, rep.outcome)


@relaxed
@given(game_instances(max_followers=5, max_resources=4))
def test_report_bookkeeping_any_costs(inst):
    for sense in (OPTIMISTIC, PESSIMISTIC):
        rep = solve_greedy(inst, sense)
        assert sum(rep.outcome) == inst.follower_count
        assert rep.leader_cost == leader_cost(inst, rep.leader_strategy, rep.outcome)
        again = solve_greedy(inst, sense)
        assert again.outcome == rep.outcome
        assert again.leader_strategy.probs == rep.leader_strategy.probs


@relaxed
@given(game_instances(max_followers=5, max_resources=4, follower_mono="weak"))
def test_aligned_costs_make_the_leader_a_stable_player(inst):
    g = with_aligned_costs(inst)
    rep = solve_greedy(g, OPTIMISTIC)
    committed = rep.leader_strategy.support[0]
    assert is_full_game_nash(g, committed, expand_config(rep.outcome))


@relaxed
@given(game_instances(max_followers=5, max_resources=4, follower_mono="strict"))
def test_aligned_costs_full_game_stability_pessimistic(inst):
    g = with_aligned_costs(inst)
    rep = solve_greedy(g, PESSIMISTIC)
    committed = rep.leader_strategy.support[0]
    assert is_full_game_nash(g, committed, expand_config(rep.outcome))
