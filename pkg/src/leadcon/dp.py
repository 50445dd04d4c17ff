"""Exact pure-commitment solver via dynamic programming over load states.

Once the leader parks on one resource, the followers of a symmetric
instance play a singleton congestion game among themselves whose cost
tables are the original ones shifted by the leader's presence.  This
module optimises an arbitrary separable objective over the pure Nash
equilibria of such a follower game, and stacks an outer loop over the
leader's actions on top of it to get the best pure commitment in either
sense, whatever the cost tables look like.

The recursion places resources one at a time and keeps, besides the
follower budget, just two summaries of the part already placed: the
cheapest cost at which a future follower could still enter it, and the
most expensive stay any placed follower tolerates.  A new resource's
load is feasible exactly when its stay cost does not beat the recorded
entry cap and its entry cost does not undercut the recorded stay floor,
so completed placements correspond one-to-one with equilibrium load
configurations.  Both summaries range over the finite set of table
values, which keeps the state space polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .greedy import NotSymmetric
from .model import (
    ZERO,
    CostTable,
    GameInstance,
    LeaderStrategy,
    ValidationError,
    classify,
)
from .report import OPTIMISTIC, SENSES, SolveReport

MINIMIZE = "min"
MAXIMIZE = "max"


@dataclass(frozen=True)
class DpObjective:
    """Separable objective over load configurations, plus a direction.

    ``terms[h][x]`` is what resource ``h`` contributes when ``x`` followers
    use it; a configuration's objective is the sum over resources.
    """

    terms: tuple[tuple[Fraction, ...], ...]
    sense: str = MINIMIZE

    @staticmethod
    def leader_commitment(
        inst: GameInstance, committed: int, sense: str = MINIMIZE
    ) -> "DpObjective":
        """Leader's own cost on the committed resource; zero elsewhere."""
        f = inst.follower_count
        rows = []
        for h in range(inst.num_resources):
            if h == committed:
                table = inst.leader_costs[h]
                rows.append(tuple(table.at(x + 1) for x in range(f + 1)))
            else:
                rows.append((ZERO,) * (f + 1))
        return DpObjective(terms=tuple(rows), sense=sense)

    @staticmethod
    def social(
        costs: Sequence[CostTable], followers: int, sense: str = MINIMIZE
    ) -> "DpObjective":
        """Total cost paid by the followers: sum of x * cost(x)."""
        rows = tuple(
            tuple(x * t.at(x) for x in range(followers + 1)) for t in costs
        )
        return DpObjective(terms=rows, sense=sense)


def dp_optimal_ne(
    costs: Sequence[CostTable],
    followers: int,
    objective: DpObjective,
    *,
    stats_out: dict | None = None,
) -> tuple[Fraction, tuple[int, ...]] | None:
    """Optimal objective over the pure equilibria of a follower-only game.

    ``costs`` are the effective per-resource tables (already shifted when a
    leader occupies one of them).  Returns the optimal value and one load
    configuration attaining it, or ``None`` when no equilibrium exists —
    which can only happen with followers but no resources.
    """
    if followers < 0:
        raise ValidationError("follower count must be nonnegative")
    if objective.sense not in (MINIMIZE, MAXIMIZE):
        raise ValidationError(f"unknown objective sense {objective.sense!r}")
    r = len(costs)
    f = followers
    if len(objective.terms) != r:
        raise ValidationError("objective must cover every resource")
    for row in objective.terms:
        if len(row) < f + 1:
            raise ValidationError("objective terms must cover loads 0..followers")
    if r == 0:
        if stats_out is not None:
            stats_out.update(states=0, value_domain=0)
        return (ZERO, ()) if f == 0 else None

    terms = objective.terms
    stay = [[t.at(x) for x in range(f + 1)] for t in costs]
    entry = [[t.at(x + 1) for x in range(f + 1)] for t in costs]
    domain = sorted(
        {v for row in stay for v in row} | {v for row in entry for v in row}
    )
    index = {v: k for k, v in enumerate(domain)}
    top = len(domain)  # entry-cost cap meaning "unconstrained"
    minimizing = objective.sense == MINIMIZE

    memo: dict[tuple[int, int, int, int], tuple[Optional[Fraction], int]] = {}

    def best(h: int, budget: int, cap: int, floor: int):
        # Resources 0..h-1 still unplaced; cap/floor index the cheapest
        # entry and costliest stay among the resources placed so far.
        if h == 0:
            return (ZERO, -1) if budget == 0 else (None, -1)
        key = (h, budget, cap, floor)
        hit = memo.get(key)
        if hit is not None:
            return hit
        cap_value = domain[cap] if cap < top else None
        floor_value = domain[floor]
        res = h - 1
        choice: tuple[Optional[Fraction], int] = (None, -1)
        for load in range(budget + 1):
            stay_cost = stay[res][load]
            if cap_value is not None and stay_cost > cap_value:
                continue
            entry_cost = entry[res][load]
            if entry_cost < floor_value:
                continue
            sub, _ = best(
                h - 1,
                budget - load,
                min(cap, index[entry_cost]),
                max(floor, index[stay_cost]),
            )
            if sub is None:
                continue
            value = sub + terms[res][load]
            held = choice[0]
            if held is None or (value < held if minimizing else value > held):
                choice = (value, load)
        memo[key] = choice
        return choice

    value, _ = best(r, f, top, 0)
    if stats_out is not None:
        stats_out["states"] = len(memo)
        stats_out["value_domain"] = len(domain)
    if value is None:
        return None

    loads = [0] * r
    h, budget, cap, floor = r, f, top, 0
    while h > 0:
        load = memo[(h, budget, cap, floor)][1]
        res = h - 1
        loads[res] = load
        cap = min(cap, index[entry[res][load]])
        floor = max(floor, index[stay[res][load]])
        budget -= load
        h -= 1
    return value, tuple(loads)


def _shifted_tables(inst: GameInstance, committed: int) -> list[CostTable]:
    """Follower tables as seen with the leader sitting on ``committed``."""
    n = inst.players
    out = []
    for h in range(inst.num_resources):
        table = inst.follower_costs[h]
        if h == committed:
            out.append(
                CostTable.from_values([table.at(x + 1) for x in range(1, n + 1)], n)
            )
        else:
            out.append(table)
    return out


def solve_pure_commitment(inst: GameInstance, sense: str) -> SolveReport:
    """Exact best pure leader commitment, any cost tables.

    For every leader action the follower equilibria of the shifted game are
    optimised by :func:`dp_optimal_ne` — minimising the leader's cost in the
    optimistic sense, maximising it in the pessimistic one — and the
    cheapest commitment wins, lowest resource index first on ties.
    """
    if sense not in SENSES:
        raise ValidationError(f"unknown sense {sense!r}")
    if not classify(inst).symmetric:
        raise NotSymmetric(
            "the pure-commitment dynamic program needs a symmetric instance"
        )
    inner = MINIMIZE if sense == OPTIMISTIC else MAXIMIZE
    total_states = 0
    best_value: Fraction | None = None
    best_committed = -1
    best_config: tuple[int, ...] = ()
    for committed in inst.leader_actions:
        objective = DpObjective.leader_commitment(inst, committed, inner)
        run_stats: dict = {}
        solved = dp_optimal_ne(
            _shifted_tables(inst, committed),
            inst.follower_count,
            objective,
            stats_out=run_stats,
        )
        total_states += run_stats.get("states", 0)
        assert solved is not None, "a follower equilibrium always exists"
        value, config = solved
        if best_value is None or value < best_value:
            best_value, best_committed, best_config = value, committed, config
    assert best_value is not None
    return SolveReport(
        solver="dp",
        sense=sense,
        leader_strategy=LeaderStrategy.pure(inst, best_committed),
        outcome_kind="config",
        outcome=best_config,
        leader_cost=best_value,
        optimal=True,
        guarantee=True,
        stats={
            "states": total_states,
            "commitments": len(inst.leader_actions),
        },
    )
