"""Best-response dynamics over the full player set, leader included.

A baseline heuristic: scatter every player uniformly at random over her
own action set, then repeatedly let the first player who is not already
best-responding hop to her cheapest resource, until nobody wants to move.
Singleton congestion games always admit such a rest point, so the run
converges; the deviation budget is only a safety valve.  The leader takes
part as an ordinary myopic player, priced by her own cost table, which
makes every converged assignment a pure Nash equilibrium of the whole
game — and its leader cost an upper bound on the optimal commitment value.

Player order is the leader first, then the followers by index; target
ties break to the lowest resource index.  Runs are deterministic in
(instance, seed).
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

from .model import (
    GameInstance,
    LeaderStrategy,
    ValidationError,
    config_of,
    is_full_game_nash,
    leader_cost,
)
from .report import SolveReport

SAMPLE = "sample"  # dynamics picks whatever equilibrium it falls into

DEFAULT_MOVE_BUDGET = 200_000


class DivergenceError(AssertionError):
    """An accepted move failed to improve its mover (or the potential rose)."""


def _aligned_tables(inst: GameInstance) -> bool:
    return all(
        lt.values == ft.values
        for lt, ft in zip(inst.leader_costs, inst.follower_costs)
    )


def run_best_response(
    inst: GameInstance,
    seed: int,
    max_deviations: int | None = None,
    time_limit: float | None = None,
) -> SolveReport:
    """Sample one pure equilibrium of the full game by myopic improvement."""
    if max_deviations is not None and max_deviations <= 0:
        raise ValidationError("deviation budget must be positive")
    if time_limit is not None and time_limit <= 0:
        raise ValidationError("time limit must be positive")
    budget = DEFAULT_MOVE_BUDGET if max_deviations is None else max_deviations
    deadline = None if time_limit is None else time.monotonic() + time_limit

    rng = random.Random(seed)
    # seats[0] is the leader; seats[1 + p] is follower p
    seats = [rng.choice(inst.leader_actions)]
    seats += [rng.choice(inst.follower_actions[p]) for p in range(inst.follower_count)]
    loads = [0] * inst.num_resources
    for i in seats:
        loads[i] += 1

    tables = [inst.leader_costs] + [inst.follower_costs] * inst.follower_count
    menus = [inst.leader_actions] + list(inst.follower_actions)
    track_potential = _aligned_tables(inst)

    def potential() -> Fraction:
        total = Fraction(0)
        for i, v in enumerate(loads):
            table = inst.follower_costs[i]
            for x in range(1, v + 1):
                total += table.at(x)
        return total

    phi = potential() if track_potential else None
    moves = 0
    converged = False
    while True:
        if deadline is not None and time.monotonic() > deadline:
            break
        mover = -1
        target = -1
        for player, here in enumerate(seats):
            cost = tables[player][here].at(loads[here])
            best_cost, best_to = cost, here
            for j in menus[player]:
                if j == here:
                    continue
                dev = tables[player][j].at(loads[j] + 1)
                # menus ascend, so the first strict improvement at each cost
                # level is also the lowest-index one
                if dev < best_cost:
                    best_cost, best_to = dev, j
            if best_cost < cost:
                mover, target = player, best_to
                break
        if mover < 0:
            converged = True
            break
        if moves >= budget:
            break
        here = seats[mover]
        before = tables[mover][here].at(loads[here])
        loads[here] -= 1
        loads[target] += 1
        seats[mover] = target
        after = tables[mover][target].at(loads[target])
        if after >= before:
            raise DivergenceError(
                f"move {moves}: player {mover} paid {before} and now pays {after}"
            )
        if track_potential:
            phi_now = potential()
            if phi_now >= phi:
                raise DivergenceError(
                    f"move {moves}: potential went {phi} -> {phi_now}"
                )
            phi = phi_now
        moves += 1

    leader_seat = seats[0]
    profile = tuple(seats[1:])
    sigma = LeaderStrategy.pure(inst, leader_seat)
    if converged:
        assert is_full_game_nash(inst, leader_seat, profile)
    return SolveReport(
        solver="dynamics",
        sense=SAMPLE,
        leader_strategy=sigma,
        outcome_kind="profile",
        outcome=profile,
        leader_cost=leader_cost(inst, sigma, config_of(inst, profile)),
        optimal=False,
        guarantee=converged,
        converged=converged,
        stats={
            "heuristic": True,
            "moves": moves,
            "seed": seed,
            "potential_checked": track_potential,
        },
    )
