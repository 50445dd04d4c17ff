"""Dynamic-program solver: goldens, exhaustive parity, and state-space bounds."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings

from leadcon.dp import (
    MAXIMIZE,
    MINIMIZE,
    DpObjective,
    dp_optimal_ne,
    solve_pure_commitment,
)
from leadcon.greedy import NotSymmetric, solve_greedy
from leadcon.model import (
    CostTable,
    GameInstance,
    ValidationError,
    is_nash_config,
    leader_cost,
)
from leadcon.oracle import _compositions, brute_force_pure
from leadcon.report import OPTIMISTIC, PESSIMISTIC

from tests.conftest import game_instances

relaxed = settings(
    max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)


# -- reference enumeration over follower-only games -------------------------


def stable_configs(costs, followers):
    """All equilibrium load vectors of a leaderless game, by enumeration."""
    r = len(costs)
    for cfg in _compositions(followers, r):
        ok = True
        for i in range(r):
            if cfg[i] == 0:
                continue
            cur = costs[i].at(cfg[i])
            for j in range(r):
                if j != i and costs[j].at(cfg[j] + 1) < cur:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield cfg


def objective_value(objective, cfg):
    return sum(objective.terms[h][x] for h, x in enumerate(cfg))


def shifted_tables(inst, committed):
    n = inst.players
    out = []
    for h in range(inst.num_resources):
        t = inst.follower_costs[h]
        if h == committed:
            out.append(CostTable.from_values([t.at(x + 1) for x in range(1, n + 1)], n))
        else:
            out.append(t)
    return out


# -- goldens ----------------------------------------------------------------


def test_commitment_objective_golden(three_road_game):
    costs = shifted_tables(three_road_game, 0)
    for sense in (MINIMIZE, MAXIMIZE):
        obj = DpObjective.leader_commitment(three_road_game, 0, sense)
        value, cfg = dp_optimal_ne(costs, 3, obj)
        assert value == 2
        assert cfg == (1, 0, 2)  # the unique equilibrium under that commitment


def test_single_resource_social():
    table = CostTable.from_values([2, 3, 7], 3)
    for budget in range(3):
        obj = DpObjective.social([table], budget)
        value, cfg = dp_optimal_ne([table], budget, obj)
        assert cfg == (budget,)
        assert value == budget * table.at(budget)


def test_empty_resource_set():
    empty = DpObjective(terms=(), sense=MINIMIZE)
    assert dp_optimal_ne([], 0, empty) == (0, ())
    assert dp_optimal_ne([], 2, empty) is None


def test_zero_followers_takes_cheapest_seat():
    g = GameInstance.build(
        resources=["r1", "r2"],
        follower_count=0,
        leader_actions="ALL",
        follower_actions=[],
        leader_costs={"r1": [7], "r2": [4]},
        follower_costs={"r1": [1], "r2": [1]},
    )
    for sense in (OPTIMISTIC, PESSIMISTIC):
        rep = solve_pure_commitment(g, sense)
        assert rep.leader_cost == 4
        assert rep.leader_strategy.support == (1,)
        assert rep.outcome == (0, 0)
        assert rep.optimal and rep.guarantee


def test_fixture_parity_with_pure_oracle(
    two_road_game, three_road_game, mirror_game, valley_game
):
    games = {
        "two_road": two_road_game,
        "three_road": three_road_game,
        "mirror": mirror_game,
        "valley": valley_game,
    }
    expected = {
        ("two_road", OPTIMISTIC): Fraction(2),
        ("two_road", PESSIMISTIC): Fraction(2),
        ("three_road", OPTIMISTIC): Fraction(2),
        ("three_road", PESSIMISTIC): Fraction(2),
        ("mirror", OPTIMISTIC): Fraction(1),
        ("mirror", PESSIMISTIC): Fraction(2),
        ("valley", OPTIMISTIC): Fraction(2),
        ("valley", PESSIMISTIC): Fraction(2),
    }
    for (name, sense), value in expected.items():
        g = games[name]
        rep = solve_pure_commitment(g, sense)
        assert rep.leader_cost == value, (name, sense)
        assert rep.leader_cost == brute_force_pure(g, sense).leader_cost
        assert is_nash_config(g, rep.leader_strategy, rep.outcome)
        assert rep.solver == "dp"


def test_greedy_agreement_on_monotone_fixture(three_road_game):
    for sense in (OPTIMISTIC, PESSIMISTIC):
        assert (
            solve_pure_commitment(three_road_game, sense).leader_cost
            == solve_greedy(three_road_game, sense).leader_cost
        )


def test_restricted_followers_rejected(fork_game):
    with pytest.raises(NotSymmetric):
        solve_pure_commitment(fork_game, OPTIMISTIC)


def test_validation_errors(three_road_game):
    with pytest.raises(ValidationError):
        solve_pure_commitment(three_road_game, "upbeat")
    table = CostTable.from_values([1, 2], 2)
    with pytest.raises(ValidationError):
        dp_optimal_ne([table], 1, DpObjective(terms=((Fraction(0),) * 2,), sense="most"))
    with pytest.raises(ValidationError):
        dp_optimal_ne([table], 1, DpObjective(terms=(), sense=MINIMIZE))
    with pytest.raises(ValidationError):
        dp_optimal_ne([table], 3, DpObjective(terms=((Fraction(0),) * 2,), sense=MINIMIZE))
    with pytest.raises(ValidationError):
        dp_optimal_ne([table], -1, DpObjective(terms=((Fraction(0),) * 2,), sense=MINIMIZE))


# -- exhaustive parity ------------------------------------------------------


@relaxed
@given(game_instances(max_followers=5, max_resources=4))
def test_matches_enumeration_on_shifted_games(inst):
    f = inst.follower_count
    for committed in inst.leader_actions:
        costs = shifted_tables(inst, committed)
        equilibria = list(stable_configs(costs, f))
        assert equilibria, "a symmetric congestion game always has an equilibrium"
        for sense, pick in ((MINIMIZE, min), (MAXIMIZE, max)):
            obj = DpObjective.leader_commitment(inst, committed, sense)
            value, cfg = dp_optimal_ne(costs, f, obj)
            assert value == pick(objective_value(obj, e) for e in equilibria)
            assert cfg in equilibria
            assert objective_value(obj, cfg) == value


@relaxed
@given(game_instances(max_followers=5, max_resources=4))
def test_social_preset_matches_enumeration(inst):
    f = inst.follower_count
    costs = list(inst.follower_costs)
    equilibria = list(stable_configs(costs, f))
    for sense, pick in ((MINIMIZE, min), (MAXIMIZE, max)):
        obj = DpObjective.social(costs, f, sense)
        value, cfg = dp_optimal_ne(costs, f, obj)
        assert value == pick(objective_value(obj, e) for e in equilibria)
        assert cfg in equilibria


@relaxed
@given(game_instances(max_followers=5, max_resources=4))
def test_solver_matches_pure_oracle_both_senses(inst):
    for sense in (OPTIMISTIC, PESSIMISTIC):
        rep = solve_pure_commitment(inst, sense)
        oracle = brute_force_pure(inst, sense)
        assert rep.leader_cost == oracle.leader_cost
        assert is_nash_config(inst, rep.leader_strategy, rep.outcome)
        assert leader_cost(inst, rep.leader_strategy, rep.outcome) == rep.leader_cost
        assert rep.optimal and rep.guarantee


# -- state-space size -------------------------------------------------------


@relaxed
@given(game_instances(max_followers=6, max_resources=4))
def test_state_count_stays_polynomial(inst):
    f = inst.follower_count
    r = inst.num_resources
    n = inst.players
    for committed in inst.leader_actions:
        stats: dict = {}
        dp_optimal_ne(
            shifted_tables(inst, committed),
            f,
            DpObjective.leader_commitment(inst, committed, MINIMIZE),
            stats_out=stats,
        )
        domain = stats["value_domain"]
        assert domain <= n * r + 1
        assert stats["states"] <= r * (f + 1) * (domain + 1) ** 2


def test_dominance_of_relaxed_bounds():
    """Loosening the entry cap or the stay floor never hurts the optimum."""
    rng = random.Random(20260818)
    for _ in range(25):
        r = rng.randint(1, 3)
        f = rng.randint(1, 4)
        n = f + 1
        costs = [
            CostTable.from_values([rng.randint(0, 6) for _ in range(n)], n)
            for _ in range(r)
        ]
        values = sorted(
            {Fraction(0)} | {t.at(x) for t in costs for x in range(1, n + 1)}
        )
        obj = DpObjective.social(costs, f)

        def brute(cap, floor):
            best = None
            for cfg in stable_configs(costs, f):
                if any(costs[i].at(cfg[i]) > cap for i in range(r) if cfg[i]):
                    continue
                if any(costs[i].at(cfg[i] + 1) < floor for i in range(r)):
                    continue
                val = objective_value(obj, cfg)
                if best is None or val < best:
                    best = val
            return best

        for _ in range(8):
            cap, floor = rng.choice(values), rng.choice(values)
            tight = brute(cap, floor)
            if tight is None:
                continue
            loose_cap = rng.choice([v for v in values if v >= cap])
            loose_floor = rng.choice([v for v in values if v <= floor])
            assert brute(loose_cap, floor) <= tight
            assert brute(cap, loose_floor) <= tight
            assert brute(loose_cap, loose_floor) <= tight
