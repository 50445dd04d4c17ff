"""Best-response dynamics: convergence, determinism, and dominance."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from leadcon.dynamics import SAMPLE, run_best_response
from leadcon.model import (
    GameInstance,
    ValidationError,
    config_of,
    is_full_game_nash,
    is_nash,
)
from leadcon.oracle import brute_force_ose

from tests.conftest import game_instances

relaxed = settings(
    max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)


def test_three_road_rest_points(three_road_game):
    seen = set()
    for seed in range(12):
        rep = run_best_response(three_road_game, seed)
        assert rep.converged and rep.guarantee
        assert rep.solver == "dynamics" and rep.sense == SAMPLE
        assert rep.stats["heuristic"] is True
        seen.add(rep.leader_cost)
        leader_seat = rep.leader_strategy.support[0]
        assert is_full_game_nash(three_road_game, leader_seat, rep.outcome)
    assert seen <= {2, 3}  # the only full-game rest-point values


def test_single_resource_needs_no_moves():
    g = GameInstance.build(
        resources=["only"],
        follower_count=3,
        leader_actions="ALL",
        follower_actions=["ALL"] * 3,
        leader_costs={"only": [1, 1, 1, 1]},
        follower_costs={"only": [2, 2, 2, 2]},
    )
    rep = run_best_response(g, seed=7)
    assert rep.converged
    assert rep.stats["moves"] == 0
    assert rep.outcome == (0, 0, 0)


def test_general_instance_converges(fork_game):
    for seed in (0, 1, 2, 3):
        rep = run_best_response(fork_game, seed)
        assert rep.converged
        assert rep.outcome_kind == "profile"
        verdict = is_nash(fork_game, rep.leader_strategy, rep.outcome)
        assert verdict.is_equilibrium


def test_budget_cuts_off(three_road_game):
    reps = [
        run_best_response(three_road_game, seed)
        for seed in range(30)
    ]
    longest = max(rep.stats["moves"] for rep in reps)
    assert longest >= 2  # some start needs a couple of hops
    seed = next(s for s, rep in enumerate(reps) if rep.stats["moves"] == longest)
    cut = run_best_response(three_road_game, seed, max_deviations=1)
    assert not cut.converged and not cut.guarantee
    assert cut.stats["moves"] == 1


def test_potential_flag():
    table = {"r1": [1, 2], "r2": [3, 4]}
    aligned = GameInstance.build(
        resources=["r1", "r2"],
        follower_count=1,
        leader_actions="ALL",
        follower_actions=["ALL"],
        leader_costs=table,
        follower_costs=table,
    )
    assert run_best_response(aligned, 0).stats["potential_checked"] is True


def test_potential_flag_off(three_road_game):
    rep = run_best_response(three_road_game, 0)
    assert rep.stats["potential_checked"] is False


def test_parameter_validation(three_road_game):
    with pytest.raises(ValidationError):
        run_best_response(three_road_game, 0, max_deviations=0)
    with pytest.raises(ValidationError):
        run_best_response(three_road_game, 0, time_limit=0)


@relaxed
@given(game_instances(max_followers=5, max_resources=4), st.integers(0, 2**63 - 1))
def test_converges_and_dominates_the_optimum(inst, seed):
    rep = run_best_response(inst, seed)
    assert rep.converged
    assert rep.leader_cost >= brute_force_ose(inst).leader_cost
    again = run_best_response(inst, seed)
    assert again.outcome == rep.outcome
    assert again.stats["moves"] == rep.stats["moves"]
    assert rep.leader_cost == again.leader_cost


@relaxed
@given(
    game_instances(max_followers=4, max_resources=3, symmetric=False),
    st.integers(0, 2**31),
)
def test_general_runs_stay_inside_action_sets(inst, seed):
    rep = run_best_response(inst, seed)
    assert rep.converged
    for p, i in enumerate(rep.outcome):
        assert i in inst.follower_actions[p]
    assert rep.leader_strategy.support[0] in inst.leader_actions
    config_of(inst, rep.outcome)  # validates shape
