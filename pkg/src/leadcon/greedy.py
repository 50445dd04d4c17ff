"""Greedy equilibrium filling for symmetric games with monotone costs.

For each pure commitment the followers are placed one at a time on a
cheapest resource, with ties steered toward (pessimistic) or away from
(optimistic) the committed resource; the cheapest commitment wins.  Each
placement is a heap pop plus one push, so a full solve costs
O(r * n * log r).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .model import GameInstance, LeaderStrategy, ValidationError, classify
from .report import OPTIMISTIC, SENSES, SolveReport


class NotSymmetric(ValidationError):
    """The instance has restricted action sets; the greedy fill does not apply."""


class NotMonotonic(ValidationError):
    """Cost tables violate the monotonicity this solver's guarantee needs."""


@dataclass(frozen=True)
class ResourceRun:
    """One inner loop: commit to ``committed``, then fill followers greedily."""

    committed: int
    config: tuple[int, ...]
    leader_value: Fraction
    picks: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class GreedyTrace:
    runs: tuple[ResourceRun, ...]


def _fill(inst: GameInstance, committed: int, prefer_committed: bool) -> ResourceRun:
    r = inst.num_resources
    loads = [0] * r
    picks: list[tuple[int, int]] = []

    def marginal(j: int) -> Fraction:
        # cost the next follower would pay on j, leader presence included
        return inst.follower_costs[j].at(loads[j] + 1 + (j == committed))

    def rank(j: int) -> int:
        if prefer_committed:
            return 0 if j == committed else 1
        return 1 if j == committed else 0

    heap = [(marginal(j), rank(j), j) for j in range(r)]
    heapq.heapify(heap)
    for step in range(inst.follower_count):
        _, _, j = heapq.heappop(heap)
        loads[j] += 1
        picks.append((step, j))
        heapq.heappush(heap, (marginal(j), rank(j), j))
    return ResourceRun(
        committed=committed,
        config=tuple(loads),
        leader_value=inst.leader_costs[committed].at(loads[committed] + 1),
        picks=tuple(picks),
    )


def solve_greedy(
    inst: GameInstance, sense: str, enforce_monotone: bool = False
) -> SolveReport:
    """Best pure commitment by greedy equilibrium filling.

    Requires a symmetric instance.  The optimality guarantee additionally
    needs weakly increasing costs (and strictly increasing follower costs in
    the pessimistic sense); when those fail the solve still runs and the
    report carries ``guarantee=False``, unless ``enforce_monotone`` asks for
    a hard error.  Under the guarantee the value is the exact optimum and
    the filled configuration is an equilibrium; without it the report is
    only the best greedy fill, which may not even be stable.
    """
    if sense not in SENSES:
        raise ValidationError(f"unknown sense {sense!r}")
    flags = classify(inst)
    if not flags.symmetric:
        raise NotSymmetric("greedy filling needs every action set equal to R")
    guarantee = flags.follower_weak_mono and flags.leader_weak_mono
    if sense != OPTIMISTIC:
        guarantee = guarantee and flags.follower_strict_mono
    if enforce_monotone and not guarantee:
        raise NotMonotonic(
            "cost tables are not monotone enough for a guaranteed solve"
        )

    prefer_committed = sense != OPTIMISTIC
    runs = [_fill(inst, i, prefer_committed) for i in inst.leader_actions]
    best = min(runs, key=lambda run: run.leader_value)
    return SolveReport(
        solver="greedy",
        sense=sense,
        leader_strategy=LeaderStrategy.pure(inst, best.committed),
        outcome_kind="config",
        outcome=best.config,
        leader_cost=best.leader_value,
        optimal=guarantee,
        guarantee=guarantee,
        stats={
            "steps": inst.follower_count * len(runs),
            "commitments": len(runs),
            "_trace": GreedyTrace(runs=tuple(runs)),
        },
    )
