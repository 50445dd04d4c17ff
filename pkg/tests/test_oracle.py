"""The exhaustive reference solvers, pinned against hand-computed values."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

from leadcon.model import (
    GameInstance,
    LeaderStrategy,
    ValidationError,
    classify,
    config_of,
    is_nash,
    is_nash_config,
    leader_cost,
)
from leadcon.oracle import (
    SizeGuardExceeded,
    brute_force_ose,
    brute_force_pure,
    enumerate_ne_outcomes,
    min_cost_alpha_for_outcome,
    outcome_space_size,
    pessimistic_grid_scan,
    sup_cost_at,
)
from tests.conftest import game_instances

Q = Fraction


class TestEnumeration:
    def test_pure_commitment_leaves_one_outcome(self, three_road_game):
        sigma = LeaderStrategy.pure(three_road_game, "r1")
        assert enumerate_ne_outcomes(three_road_game, sigma) == [(1, 0, 2)]

    def test_indifferent_follower_keeps_both(self, two_road_game):
        half = LeaderStrategy.uniform(two_road_game)
        assert enumerate_ne_outcomes(two_road_game, half) == [(0, 1), (1, 0)]

    def test_constant_costs_keep_every_outcome(self, mirror_game):
        sigma = LeaderStrategy.pure(mirror_game, "r1")
        assert enumerate_ne_outcomes(mirror_game, sigma) == [(0, 1), (1, 0)]

    def test_general_instances_enumerate_profiles(self, fork_game):
        sigma = LeaderStrategy.uniform(fork_game, ["r1", "r2"])
        outcomes = enumerate_ne_outcomes(fork_game, sigma)
        assert (1, 2) in outcomes  # p1 on r2, p2 on r3
        for prof in outcomes:
            assert is_nash(fork_game, sigma, prof).is_equilibrium

    def test_size_guard_refuses_big_spaces(self, three_road_game):
        sigma = LeaderStrategy.pure(three_road_game, "r1")
        with pytest.raises(SizeGuardExceeded) as exc:
            enumerate_ne_outcomes(three_road_game, sigma, size_guard=5)
        assert exc.value.count == 10

    def test_outcome_space_size_matches_enumeration(self, fork_game):
        assert outcome_space_size(fork_game) == 4
        assert outcome_space_size(fork_game) == len(
            list(itertools.product(*fork_game.follower_actions))
        )

    @settings(max_examples=40, deadline=None)
    @given(inst=game_instances(max_followers=4, max_resources=3))
    def test_enumeration_is_exactly_the_stable_subset(self, inst):
        sigma = LeaderStrategy.uniform(inst)
        stable = set(enumerate_ne_outcomes(inst, sigma))
        total = 0
        for cfg in itertools.product(
            range(inst.follower_count + 1), repeat=inst.num_resources
        ):
            if sum(cfg) != inst.follower_count:
                continue
            total += 1
            assert (cfg in stable) == is_nash_config(inst, sigma, cfg)
        assert total == outcome_space_size(inst)


class TestPricing:
    def test_fork_game_split_outcome(self, fork_game):
        pricing = min_cost_alpha_for_outcome(fork_game, (1, 2))
        assert pricing.feasible
        assert pricing.value == Q(1, 2)
        assert pricing.alpha == (Q(1, 2), Q(1, 2), 0)

    def test_fork_game_unstabilizable_outcome(self, fork_game):
        # keeping p2 on r3 while p1 sits on r1 would need the deviation to
        # r2 to cost at least 3, but it never exceeds 2
        pricing = min_cost_alpha_for_outcome(fork_game, (0, 2))
        assert not pricing.feasible

    def test_single_resource_degenerates(self):
        inst = GameInstance.build(
            resources=["only"],
            follower_count=2,
            leader_actions="ALL",
            follower_actions=["ALL"] * 2,
            leader_costs={"only": [5, 6, 7]},
            follower_costs={"only": [1, 1, 1]},
        )
        pricing = min_cost_alpha_for_outcome(inst, (2,))
        assert pricing.feasible
        assert pricing.value == 7
        assert pricing.alpha == (1,)

    @settings(max_examples=30, deadline=None)
    @given(inst=game_instances(max_followers=3, max_resources=3, symmetric=False))
    def test_feasibility_only_improves_with_more_leader_actions(self, inst):
        widened = GameInstance.build(
            resources=inst.resources,
            follower_count=inst.follower_count,
            leader_actions="ALL",
            follower_actions=[
                [inst.resources[i] for i in acts] for acts in inst.follower_actions
            ],
            leader_costs={
                rid: list(inst.leader_costs[k].values)
                for k, rid in enumerate(inst.resources)
            },
            follower_costs={
                rid: list(inst.follower_costs[k].values)
                for k, rid in enumerate(inst.resources)
            },
        )
        def price(g, prof):
            out = config_of(g, prof) if classify(g).symmetric else prof
            return min_cost_alpha_for_outcome(g, out)

        for outcome in itertools.product(*inst.follower_actions):
            narrow = price(inst, outcome)
            wide = price(widened, outcome)
            if narrow.feasible:
                assert wide.feasible
                assert wide.value <= narrow.value


class TestBruteForce:
    def test_two_road_game_optimum(self, two_road_game):
        rep = brute_force_ose(two_road_game)
        assert rep.leader_cost == 1
        assert rep.leader_strategy.probs == (Q(1, 2), Q(1, 2))
        assert rep.outcome == (1, 0)
        assert rep.optimal
        assert rep.stats["oracle"] is True

    def test_three_road_game_optimum(self, three_road_game):
        rep = brute_force_ose(three_road_game)
        assert rep.leader_cost == 2

    def test_valley_game_needs_the_uniform_mix(self, valley_game):
        rep = brute_force_ose(valley_game)
        assert rep.leader_cost == Q(3, 2)
        assert rep.leader_strategy.probs == (Q(1, 2), Q(1, 2))

    def test_fork_game_beats_every_pure_commitment(self, fork_game):
        rep = brute_force_ose(fork_game)
        assert rep.leader_cost == Q(1, 2)
        assert rep.outcome_kind == "profile"
        assert rep.outcome == (1, 2)
        assert brute_force_pure(fork_game, "optimistic").leader_cost == 1

    def test_report_recomputes(self, fork_game):
        rep = brute_force_ose(fork_game)
        cfg = config_of(fork_game, rep.outcome)
        assert leader_cost(fork_game, rep.leader_strategy, cfg) == rep.leader_cost
        assert is_nash(fork_game, rep.leader_strategy, rep.outcome).is_equilibrium

    def test_pure_senses_on_fixtures(self, three_road_game, mirror_game):
        assert brute_force_pure(three_road_game, "optimistic").leader_cost == 2
        assert brute_force_pure(three_road_game, "pessimistic").leader_cost == 2
        assert brute_force_pure(mirror_game, "pessimistic").leader_cost == 2
        assert brute_force_pure(mirror_game, "optimistic").leader_cost == 1

    def test_unknown_sense_rejected(self, mirror_game):
        with pytest.raises(ValidationError):
            brute_force_pure(mirror_game, "wishful")

    @settings(max_examples=25, deadline=None)
    @given(inst=game_instances(max_followers=4, max_resources=3))
    def test_mixed_never_loses_to_pure(self, inst):
        mixed = brute_force_ose(inst)
        pure = brute_force_pure(inst, "optimistic")
        assert mixed.leader_cost <= pure.leader_cost

    @settings(max_examples=25, deadline=None)
    @given(inst=game_instances(max_followers=4, max_resources=3))
    def test_witness_strategy_reproduces_the_value(self, inst):
        rep = brute_force_ose(inst)
        cfg = rep.outcome if rep.outcome_kind == "config" else config_of(
            inst, rep.outcome
        )
        assert classify(inst).symmetric == (rep.outcome_kind == "config")
        assert leader_cost(inst, rep.leader_strategy, cfg) == rep.leader_cost


class TestGridScan:
    def test_two_road_game_unattained_infimum(self, two_road_game):
        scan = pessimistic_grid_scan(two_road_game, 1000)
        assert Q(1) < scan.value <= Q(1) + Q(2, 1000)
        assert not scan.attained
        assert scan.samples == 1001
        # at the exact midpoint the worst stable outcome costs 2
        assert sup_cost_at(two_road_game, LeaderStrategy.uniform(two_road_game)) == 2

    def test_mirror_game_attains_at_uniform(self, mirror_game):
        scan = pessimistic_grid_scan(mirror_game, 200)
        assert scan.value == Q(3, 2)
        assert scan.attained
        assert scan.strategy.probs == (Q(1, 2), Q(1, 2))

    def test_single_action_degenerates_to_one_sample(self):
        inst = GameInstance.build(
            resources=["a", "b"],
            follower_count=1,
            leader_actions=["a"],
            follower_actions=[["a", "b"]],
            leader_costs={"a": [1, 1], "b": [1, 1]},
            follower_costs={"a": [1, 1], "b": [2, 2]},
        )
        scan = pessimistic_grid_scan(inst, 50)
        assert scan.samples == 1
        assert scan.attained

    def test_more_than_three_actions_refused(self):
        inst = GameInstance.build(
            resources=["a", "b", "c", "d"],
            follower_count=1,
            leader_actions="ALL",
            follower_actions=["ALL"],
            leader_costs={rid: [1, 1] for rid in "abcd"},
            follower_costs={rid: [1, 1] for rid in "abcd"},
        )
        with pytest.raises(ValidationError):
            pessimistic_grid_scan(inst, 10)

    def test_scan_never_beats_the_true_infimum(self, two_road_game):
        # grid values are genuine sup-over-stable-outcomes evaluations, so
        # they upper-bound the infimum at every resolution
        for res in (3, 10, 47):
            assert pessimistic_grid_scan(two_road_game, res).value >= 1
