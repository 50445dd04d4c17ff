"""Exhaustive reference solvers.

Slow but trusted: every routine here enumerates follower outcomes outright,
prices each one with a small exact linear program, and takes the best.  The
faster solvers in this package are tested against these.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .lp import EQ, LE, MIN, LinearProgram, solve_lp
from .model import (
    GameInstance,
    LeaderStrategy,
    ValidationError,
    classify,
    config_of,
    is_nash,
    is_nash_config,
    leader_cost,
)
from .report import OPTIMISTIC, SENSES, SolveReport

DEFAULT_SIZE_GUARD = 200_000

ZERO = Fraction(0)


class SizeGuardExceeded(RuntimeError):
    """Refusal to start an enumeration that is too large to finish."""

    def __init__(self, count: int, guard: int) -> None:
        super().__init__(
            f"outcome space has {count} elements, over the guard of {guard};"
            " raise size_guard explicitly to force the enumeration"
        )
        self.count = count
        self.guard = guard


# ---------------------------------------------------------------------------
# outcome enumeration
# ---------------------------------------------------------------------------


def outcome_kind(inst: GameInstance) -> str:
    """"config" when followers are interchangeable, else "profile"."""
    return "config" if classify(inst).symmetric else "profile"


def outcome_space_size(inst: GameInstance) -> int:
    """How many follower outcomes enumeration would visit."""
    if classify(inst).symmetric:
        return math.comb(inst.follower_count + inst.num_resources - 1,
                         inst.num_resources - 1)
    return math.prod(len(acts) for acts in inst.follower_actions)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head, *rest)


def _outcomes(inst: GameInstance, symmetric: bool) -> Iterator[tuple[int, ...]]:
    if symmetric:
        yield from _compositions(inst.follower_count, inst.num_resources)
    else:
        yield from itertools.product(*inst.follower_actions)


def _guard(inst: GameInstance, size_guard: int) -> bool:
    symmetric = classify(inst).symmetric
    count = outcome_space_size(inst)
    if count > size_guard:
        raise SizeGuardExceeded(count, size_guard)
    return symmetric


def enumerate_ne_outcomes(
    inst: GameInstance, sigma: LeaderStrategy, size_guard: int = DEFAULT_SIZE_GUARD
) -> list[tuple[int, ...]]:
    """All follower outcomes stable under the commitment, in lexicographic order.

    Outcomes are load configurations for symmetric instances and per-follower
    resource assignments otherwise.  Raises SizeGuardExceeded instead of
    attempting an enumeration larger than ``size_guard``.
    """
    symmetric = _guard(inst, size_guard)
    if symmetric:
        return [
            cfg
            for cfg in _compositions(inst.follower_count, inst.num_resources)
            if is_nash_config(inst, sigma, cfg)
        ]
    return [
        prof
        for prof in itertools.product(*inst.follower_actions)
        if is_nash(inst, sigma, prof).is_equilibrium
    ]


# ---------------------------------------------------------------------------
# pricing one outcome over all commitments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutcomePricing:
    """Cheapest commitment that makes one outcome stable, if any exists."""

    feasible: bool
    value: Fraction | None = None
    alpha: tuple[Fraction, ...] | None = None


def alpha_program(inst: GameInstance, outcome: Sequence[int]) -> LinearProgram:
    """Linear program over commitment probabilities for a fixed outcome.

    Variables are the probabilities on the leader's own resources.  Rows say
    every follower weakly prefers staying put, in expectation over where the
    leader lands; the objective is the leader's expected cost.  Feasible iff
    some commitment makes the outcome stable.
    """
    symmetric = classify(inst).symmetric
    if symmetric:
        cfg = tuple(outcome)
        if len(cfg) != inst.num_resources or sum(cfg) != inst.follower_count:
            raise ValidationError("expected a load configuration")
        pairs = {
            (i, j)
            for i in range(inst.num_resources)
            if cfg[i] > 0
            for j in range(inst.num_resources)
            if j != i
        }
    else:
        prof = tuple(outcome)
        cfg = config_of(inst, prof)
        pairs = {
            (i, j)
            for p, i in enumerate(prof)
            for j in inst.follower_actions[p]
            if j != i
        }

    acts = inst.leader_actions
    var_of = {i: t for t, i in enumerate(acts)}
    names = [f"p_{inst.resources[i]}" for i in acts]
    lp = LinearProgram(num_vars=len(acts), sense=MIN, names=names)
    for t, i in enumerate(acts):
        lp.set_bounds(t, ZERO, Fraction(1))
    lp.set_objective(
        {t: inst.leader_costs[i].at(cfg[i] + 1) for t, i in enumerate(acts)}
    )
    lp.add_row({t: 1 for t in range(len(acts))}, EQ, 1, name="total_prob")

    ft = inst.follower_costs
    for i, j in sorted(pairs):
        stay_base = ft[i].at(cfg[i])
        stay_bump = ft[i].at(cfg[i] + 1) - stay_base
        dev_base = ft[j].at(cfg[j] + 1)
        dev_bump = ft[j].at(cfg[j] + 2) - dev_base
        coeffs: dict[int, Fraction] = {}
        if i in var_of:
            coeffs[var_of[i]] = stay_bump
        if j in var_of:
            coeffs[var_of[j]] = coeffs.get(var_of[j], ZERO) - dev_bump
        lp.add_row(
            coeffs, LE, dev_base - stay_base,
            name=f"stay_{inst.resources[i]}_vs_{inst.resources[j]}",
        )
    return lp


def min_cost_alpha_for_outcome(
    inst: GameInstance, outcome: Sequence[int], method: str = "auto"
) -> OutcomePricing:
    """Price an outcome: the cheapest commitment keeping it stable.

    ``outcome`` follows the convention of enumerate_ne_outcomes (configuration
    when symmetric, assignment otherwise).  Infeasible means no commitment at
    all stabilizes this outcome.
    """
    lp = alpha_program(inst, outcome)
    res = solve_lp(lp, method=method)
    if res.status == "infeasible":
        return OutcomePricing(feasible=False)
    if res.status != "optimal":
        raise RuntimeError(
            f"pricing program ended {res.status}, impossible with boxed variables"
        )
    probs = [ZERO] * inst.num_resources
    for t, i in enumerate(inst.leader_actions):
        probs[i] = res.point[t]
    return OutcomePricing(feasible=True, value=res.value, alpha=tuple(probs))


# ---------------------------------------------------------------------------
# exhaustive solves
# ---------------------------------------------------------------------------


def brute_force_ose(
    inst: GameInstance,
    size_guard: int = DEFAULT_SIZE_GUARD,
    method: str = "auto",
) -> SolveReport:
    """Exact optimistic solve by pricing every outcome.

    Ties in value keep the lexicographically first outcome, so the result is
    deterministic.
    """
    symmetric = _guard(inst, size_guard)
    best: tuple[Fraction, tuple[Fraction, ...], tuple[int, ...]] | None = None
    checked = feasible = 0
    for outcome in _outcomes(inst, symmetric):
        checked += 1
        pricing = min_cost_alpha_for_outcome(inst, outcome, method=method)
        if not pricing.feasible:
            continue
        feasible += 1
        if best is None or pricing.value < best[0]:
            best = (pricing.value, pricing.alpha, outcome)
    if best is None:
        raise RuntimeError("no outcome can be stabilized; this cannot happen")
    value, alpha, outcome = best
    return SolveReport(
        solver="brute-force",
        sense=OPTIMISTIC,
        leader_strategy=LeaderStrategy(alpha),
        outcome_kind="config" if symmetric else "profile",
        outcome=outcome,
        leader_cost=value,
        optimal=True,
        stats={"oracle": True, "outcomes": checked, "stabilizable": feasible},
    )


def brute_force_pure(
    inst: GameInstance, sense: str, size_guard: int = DEFAULT_SIZE_GUARD
) -> SolveReport:
    """Best pure commitment by full enumeration, in either sense.

    Optimistic reads the cheapest stable outcome per commitment, pessimistic
    the costliest; the commitment minimizing that value wins, ties going to
    the lowest resource index.
    """
    if sense not in SENSES:
        raise ValidationError(f"unknown sense {sense!r}")
    symmetric = classify(inst).symmetric
    pick_worst = sense != OPTIMISTIC
    best: tuple[Fraction, LeaderStrategy, tuple[int, ...]] | None = None
    for i_star in inst.leader_actions:
        sigma = LeaderStrategy.pure(inst, i_star)
        stable = enumerate_ne_outcomes(inst, sigma, size_guard=size_guard)
        if not stable:
            raise RuntimeError("a pure commitment always leaves a stable outcome")
        cur: tuple[Fraction, tuple[int, ...]] | None = None
        for out in stable:
            cfg = out if symmetric else config_of(inst, out)
            v = leader_cost(inst, sigma, cfg)
            if cur is None or (v > cur[0] if pick_worst else v < cur[0]):
                cur = (v, out)
        if best is None or cur[0] < best[0]:
            best = (cur[0], sigma, cur[1])
    value, sigma, outcome = best
    return SolveReport(
        solver="brute-force-pure",
        sense=sense,
        leader_strategy=sigma,
        outcome_kind="config" if symmetric else "profile",
        outcome=outcome,
        leader_cost=value,
        optimal=True,
        stats={"oracle": True, "commitments": len(inst.leader_actions)},
    )


def sup_cost_at(
    inst: GameInstance, sigma: LeaderStrategy, size_guard: int = DEFAULT_SIZE_GUARD
) -> Fraction:
    """Worst-case leader cost over all outcomes stable under the commitment."""
    symmetric = classify(inst).symmetric
    worst: Fraction | None = None
    for out in enumerate_ne_outcomes(inst, sigma, size_guard=size_guard):
        cfg = out if symmetric else config_of(inst, out)
        v = leader_cost(inst, sigma, cfg)
        if worst is None or v > worst:
            worst = v
    if worst is None:
        raise RuntimeError("no stable outcome under the commitment")
    return worst


# ---------------------------------------------------------------------------
# pessimistic grid scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridScanResult:
    """Approximate pessimistic solve; ``value`` only bounds the true optimum.

    ``attained`` reports whether a refinement probe around the best grid
    point failed to improve on it; False suggests the optimum is an infimum
    the grid can approach but never reach.
    """

    value: Fraction
    strategy: LeaderStrategy
    attained: bool
    resolution: int
    samples: int
    probes: int = 0


def _weight_grid(parts: int, resolution: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (resolution,)
    elif parts == 2:
        for k in range(resolution + 1):
            yield (k, resolution - k)
    else:
        for k1 in range(resolution + 1):
            for k2 in range(resolution + 1 - k1):
                yield (k1, k2, resolution - k1 - k2)


def pessimistic_grid_scan(
    inst: GameInstance,
    resolution: int,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> GridScanResult:
    """Scan commitments on a simplex grid, scoring each by worst stable outcome.

    Supports up to three leader resources (the grid blows up beyond that).
    The step is 1/resolution; after the scan, midpoints toward each grid
    neighbor of the winner are probed at twice the resolution, and a strictly
    better midpoint marks the result as not attained.
    """
    if resolution < 1:
        raise ValidationError("resolution must be at least 1")
    acts = inst.leader_actions
    if len(acts) > 3:
        raise ValidationError(
            "grid scan handles at most three leader resources; "
            f"this instance allows {len(acts)}"
        )

    def sigma_of(weights: Sequence[int], denom: int) -> LeaderStrategy:
        probs = [ZERO] * inst.num_resources
        for t, w in enumerate(weights):
            probs[acts[t]] = Fraction(w, denom)
        return LeaderStrategy(tuple(probs))

    best: tuple[Fraction, tuple[int, ...], LeaderStrategy] | None = None
    samples = 0
    for weights in _weight_grid(len(acts), resolution):
        sigma = sigma_of(weights, resolution)
        v = sup_cost_at(inst, sigma, size_guard=size_guard)
        samples += 1
        if best is None or v < best[0]:
            best = (v, weights, sigma)
    value, weights, sigma = best

    attained = True
    probes = 0
    for d in itertools.permutations(range(len(acts)), 2):
        step = [0] * len(acts)
        step[d[0]], step[d[1]] = 1, -1
        probe = tuple(2 * w + s for w, s in zip(weights, step))
        if any(w < 0 for w in probe):
            continue
        probes += 1
        if sup_cost_at(inst, sigma_of(probe, 2 * resolution), size_guard=size_guard) < value:
            attained = False
            break
    return GridScanResult(
        value=value,
        strategy=sigma,
        attained=attained,
        resolution=resolution,
        samples=samples,
        probes=probes,
    )
