"""Exact mixed-integer solver for optimal mixed leader commitments.

The bilevel problem — commit to a distribution over resources, then let
the followers settle into a best-case equilibrium — is flattened into a
single mixed-integer program: binaries pick each resource's follower
load (and, with restricted action sets, each follower's resource),
continuous variables carry the commitment probabilities, and McCormick
envelopes linearize their products exactly.  Branch-and-bound over the
exact rational LP relaxation proves optimality with zero tolerance.

Two build modes exist.  ``corrected`` (the solving default) models empty
resources explicitly: a load-zero indicator per resource prices both
deviations toward an empty resource and the leader's own mass parked on
one, so feasible integral points correspond exactly to stable outcomes.
``paper_faithful`` omits those empty-resource terms and keeps the
constraint set verbatim from the classical presentation — useful for
size parity checks and audits, but its value can differ from the true
optimum whenever some resource is empty in the solution, and the model
can even be infeasible outright.
"""

from __future__ import annotations

import heapq
import io
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .lp import (
    EQ,
    GE,
    LE,
    MIN,
    LinearProgram,
    LpOutcome,
    StdCache,
    _check_point,
    extend_warm_token,
    gomory_cuts,
    solve_lp,
)
from .model import (
    ONE,
    ZERO,
    GameInstance,
    LeaderStrategy,
    ValidationError,
    classify,
    config_of,
    is_nash,
    is_nash_config,
    leader_cost,
)
from .report import OPTIMISTIC, SolveReport

PAPER_FAITHFUL = "paper_faithful"
CORRECTED = "corrected"
BUILD_MODES = (PAPER_FAITHFUL, CORRECTED)

SYMMETRIC = "symmetric"
GENERAL = "general"

# root cutting-plane budgets: rounds of cut generation and total rows kept
_CUT_ROUND_LIMIT = 12
_CUT_TOTAL_LIMIT = 140


# ---------------------------------------------------------------------------
# model construction
# ---------------------------------------------------------------------------


@dataclass
class MilpModel:
    """A built commitment model plus the bookkeeping to read answers back."""

    lp: LinearProgram
    mode: str
    variant: str
    binaries: tuple[int, ...]
    alpha: tuple[int, ...]  # variable index of each resource's probability
    y: dict[tuple[int, int], int]  # (resource, load) -> load indicator
    z: dict[tuple[int, int], int]  # (resource, load) -> probability * indicator
    x: dict[tuple[int, int], int]  # (follower, resource) -> assignment
    levels: tuple[tuple[int, ...], ...]  # load levels modeled per resource
    total_load: int = 0  # follower count; every follower sits somewhere

    @property
    def num_variables(self) -> int:
        return self.lp.num_vars

    @property
    def num_binaries(self) -> int:
        return len(self.binaries)

    @property
    def num_constraints(self) -> int:
        return len(self.lp.rows)


def _access_counts(inst: GameInstance) -> list[int]:
    counts = [0] * inst.num_resources
    for acts in inst.follower_actions:
        for i in acts:
            counts[i] += 1
    return counts


def build_milp(inst: GameInstance, mode: str = CORRECTED) -> MilpModel:
    """Assemble the commitment program for one instance.

    The symmetric variant is chosen automatically when every follower may
    use every resource; otherwise per-follower assignment binaries are
    added and equilibrium rows are instantiated per follower.
    """
    if mode not in BUILD_MODES:
        raise ValidationError(f"unknown build mode {mode!r}")
    flags = classify(inst)
    variant = SYMMETRIC if flags.symmetric else GENERAL
    r = inst.num_resources
    f = inst.follower_count
    vbar = [f] * r if variant == SYMMETRIC else _access_counts(inst)
    first_level = 0 if mode == CORRECTED else 1
    levels = tuple(tuple(range(first_level, vbar[i] + 1)) for i in range(r))

    names: list[str] = []
    alpha: list[int] = []
    y: dict[tuple[int, int], int] = {}
    z: dict[tuple[int, int], int] = {}
    x: dict[tuple[int, int], int] = {}
    for i in range(r):
        alpha.append(len(names))
        names.append(f"a{i}")
    for i in range(r):
        for v in levels[i]:
            y[(i, v)] = len(names)
            names.append(f"y{i}_{v}")
    for i in range(r):
        for v in levels[i]:
            z[(i, v)] = len(names)
            names.append(f"z{i}_{v}")
    if variant == GENERAL:
        for p in range(f):
            for i in inst.follower_actions[p]:
                x[(p, i)] = len(names)
                names.append(f"x{p}_{i}")

    lp = LinearProgram(num_vars=len(names), sense=MIN, names=names)
    allowed = set(inst.leader_actions)
    for i in range(r):
        if i in allowed:
            lp.set_bounds(alpha[i], 0, 1)
        else:
            lp.set_bounds(alpha[i], 0, 0)
    for var in list(y.values()) + list(z.values()) + list(x.values()):
        lp.set_bounds(var, 0, 1)

    ft = inst.follower_costs
    lt = inst.leader_costs
    lp.set_objective(
        {z[(i, v)]: lt[i].at(v + 1) for i in range(r) for v in levels[i]}
    )

    # each resource carries exactly one modeled load level (at most one in
    # paper_faithful mode, where level zero is simply "no indicator set")
    for i in range(r):
        rel = EQ if mode == CORRECTED else LE
        lp.add_row({y[(i, v)]: 1 for v in levels[i]}, rel, 1, name=f"occupy{i}")

    # total follower mass
    if variant == SYMMETRIC:
        lp.add_row(
            {y[(i, v)]: v for i in range(r) for v in levels[i] if v},
            EQ,
            f,
            name="load",
        )
    else:
        for p in range(f):
            lp.add_row(
                {x[(p, i)]: 1 for i in inst.follower_actions[p]},
                EQ,
                1,
                name=f"assign{p}",
            )
        for i in range(r):
            coeffs: dict[int, Fraction] = {y[(i, v)]: v for v in levels[i] if v}
            row = {k: Fraction(c) for k, c in coeffs.items()}
            for p in range(f):
                if (p, i) in x:
                    row[x[(p, i)]] = row.get(x[(p, i)], ZERO) - 1
            lp.add_row(row, EQ, 0, name=f"link{i}")

    def stay_terms(i: int) -> dict[int, Fraction]:
        terms: dict[int, Fraction] = {}
        for v in levels[i]:
            if v == 0:
                continue  # an empty resource has nobody to keep happy
            terms[y[(i, v)]] = ft[i].at(v)
            terms[z[(i, v)]] = ft[i].at(v + 1) - ft[i].at(v)
        return terms

    def deviation_terms(j: int, level_set: Iterable[int]) -> dict[int, Fraction]:
        terms: dict[int, Fraction] = {}
        for v in level_set:
            if (j, v) not in y:
                continue
            terms[y[(j, v)]] = ft[j].at(v + 1)
            terms[z[(j, v)]] = ft[j].at(v + 2) - ft[j].at(v + 1)
        return terms

    if variant == SYMMETRIC:
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                row = dict(stay_terms(i))
                for var, q in deviation_terms(j, levels[j]).items():
                    row[var] = row.get(var, ZERO) - q
                lp.add_row(row, LE, 0, name=f"ne{i}_{j}")
    else:
        big_m = ONE + max(max(t.values) for t in ft)
        for p in range(f):
            for i in inst.follower_actions[p]:
                for j in inst.follower_actions[p]:
                    if i == j:
                        continue
                    # paper_faithful mirrors the printed index set: the
                    # deviation side runs over the staying resource's levels
                    dev_levels = levels[j] if mode == CORRECTED else levels[i]
                    row = dict(stay_terms(i))
                    for var, q in deviation_terms(j, dev_levels).items():
                        row[var] = row.get(var, ZERO) - q
                    rhs = ZERO
                    if mode == CORRECTED:
                        row[x[(p, i)]] = row.get(x[(p, i)], ZERO) + big_m
                        rhs = big_m
                    lp.add_row(row, LE, rhs, name=f"ne{p}_{i}_{j}")

    for i in range(r):
        for v in levels[i]:
            zv, yv, av = z[(i, v)], y[(i, v)], alpha[i]
            if mode == PAPER_FAITHFUL:
                lp.add_row({zv: 1, av: -1}, LE, 0, name=f"mcA{i}_{v}")
            lp.add_row({zv: 1, yv: -1}, LE, 0, name=f"mcB{i}_{v}")
            if mode == PAPER_FAITHFUL:
                lp.add_row({zv: 1, av: -1, yv: -1}, GE, -1, name=f"mcC{i}_{v}")
        if mode == CORRECTED:
            # every integral point has z = probability * indicator with the
            # indicators summing to one, so the products sum to the
            # probability itself; together with z >= 0 and z <= y this
            # implies both dropped McCormick rows and hardens the relaxation
            row = {z[(i, v)]: Fraction(1) for v in levels[i]}
            row[alpha[i]] = Fraction(-1)
            lp.add_row(row, EQ, 0, name=f"zsum{i}")

    lp.add_row({alpha[i]: 1 for i in range(r)}, EQ, 1, name="simplex")

    binaries = tuple(sorted(y.values())) + tuple(sorted(x.values()))
    return MilpModel(
        lp=lp,
        mode=mode,
        variant=variant,
        binaries=binaries,
        alpha=tuple(alpha),
        y=dict(y),
        z=dict(z),
        x=dict(x),
        levels=levels,
        total_load=inst.follower_count,
    )


# ---------------------------------------------------------------------------
# branch and bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BnBParams:
    """Search budgets and knobs for the exact solver."""

    node_limit: int | None = None
    time_limit: float | None = None
    branch_rule: str = "most_fractional"
    incumbent_source: str = "heuristic"  # or "none"

    def __post_init__(self) -> None:
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValidationError("node limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValidationError("time limit must be positive")
        if self.branch_rule != "most_fractional":
            raise ValidationError(f"unknown branch rule {self.branch_rule!r}")
        if self.incumbent_source not in ("heuristic", "none"):
            raise ValidationError(
                f"unknown incumbent source {self.incumbent_source!r}"
            )


@dataclass
class _Incumbent:
    value: Fraction
    alpha: tuple[Fraction, ...]
    outcome: tuple[int, ...]
    source: str


def _pure_seat_incumbent(inst: GameInstance) -> tuple[Fraction, int, tuple[int, ...]] | None:
    """Best (leader cost, seat, follower profile) over pure commitments
    reachable by followers-only better-response play.

    With the leader parked on one resource the followers share common
    per-resource costs, so their improvement dynamics descends a potential
    and always settles; the settled profile is stable under the pure
    commitment by construction.  Deterministic and fast — used only to
    seed branch-and-bound with a feasible upper bound.
    """
    ft = inst.follower_costs
    best: tuple[Fraction, int, tuple[int, ...]] | None = None
    for seat in inst.leader_actions:

        def fc(i: int, x: int) -> Fraction:
            return ft[i].at(x + 1) if i == seat else ft[i].at(x)

        loads = [0] * inst.num_resources
        assign: list[int] = []
        for p in range(inst.follower_count):
            j = min(inst.follower_actions[p], key=lambda i: (fc(i, loads[i] + 1), i))
            assign.append(j)
            loads[j] += 1
        moved = True
        guard = 0
        while moved:
            moved = False
            for p in range(inst.follower_count):
                i = assign[p]
                cur = fc(i, loads[i])
                to, cheapest = i, cur
                for j in inst.follower_actions[p]:
                    if j != i and fc(j, loads[j] + 1) < cheapest:
                        to, cheapest = j, fc(j, loads[j] + 1)
                if to != i:
                    loads[i] -= 1
                    loads[to] += 1
                    assign[p] = to
                    moved = True
                    guard += 1
                    assert guard <= 1_000_000, "improvement play failed to settle"
        value = inst.leader_costs[seat].at(loads[seat] + 1)
        if best is None or value < best[0]:
            best = (value, seat, tuple(assign))
    return best


def _config_alpha(
    inst: GameInstance, config: Sequence[int]
) -> tuple[Fraction, tuple[Fraction, ...]] | None:
    """Cheapest leader mixture that makes ``config`` a stable profile.

    In a symmetric game the stability conditions of a fixed load profile
    are affine in the leader's per-resource probabilities, so the best
    supporting mixture is a small LP over those probabilities alone.
    Returns ``(leader cost, mixture)`` or None when no mixture keeps the
    profile stable.
    """
    r = inst.num_resources
    ft = inst.follower_costs
    lt = inst.leader_costs
    lp = LinearProgram(num_vars=r, sense=MIN)
    allowed = set(inst.leader_actions)
    for i in range(r):
        lp.set_bounds(i, 0, 1 if i in allowed else 0)
    lp.set_objective({i: lt[i].at(config[i] + 1) for i in range(r)})
    lp.add_row({i: ONE for i in range(r)}, EQ, 1, name="mix")
    for i in range(r):
        if config[i] == 0:
            continue
        stay_base = ft[i].at(config[i])
        stay_gain = ft[i].at(config[i] + 1) - stay_base
        for j in range(r):
            if j == i:
                continue
            dev_base = ft[j].at(config[j] + 1)
            dev_gain = ft[j].at(config[j] + 2) - dev_base
            # staying must not cost more than moving, for every target
            lp.add_row(
                {i: stay_gain, j: -dev_gain},
                LE,
                dev_base - stay_base,
                name=f"hold{i}_{j}",
            )
    out = solve_lp(lp)
    if out.status != "optimal":
        return None
    return out.value, tuple(out.point[i] for i in range(r))


def _config_descent(
    inst: GameInstance,
    seeds: Iterable[Sequence[int]],
    deadline: float | None,
    cache: dict | None = None,
    max_steps: int = 64,
) -> tuple[Fraction, tuple[Fraction, ...], tuple[int, ...]] | None:
    """Local search over load profiles scored by their cheapest mixture.

    Repeatedly moves one unit of load between resources, following the
    first strictly improving move (profiles no mixture can stabilise are
    skipped).  Purely a primal heuristic: it seeds the exact search with
    an incumbent, so soundness never depends on it.
    """
    r = inst.num_resources
    total = inst.follower_count
    scores = cache if cache is not None else {}

    def score(cfg: tuple[int, ...]):
        if cfg not in scores:
            scores[cfg] = _config_alpha(inst, cfg)
        return scores[cfg]

    best: tuple[Fraction, tuple[Fraction, ...], tuple[int, ...]] | None = None

    def note(cfg: tuple[int, ...]):
        nonlocal best
        got = score(cfg)
        if got is not None and (best is None or got[0] < best[0]):
            best = (got[0], got[1], cfg)
        return got

    for seed in seeds:
        base = tuple(seed)
        if len(base) != r or sum(base) != total or min(base) < 0:
            continue
        got = note(base)
        base_val = None if got is None else got[0]
        for _ in range(max_steps):
            if deadline is not None and time.monotonic() > deadline:
                return best
            moved = False
            for i in range(r):
                if base[i] == 0:
                    continue
                for j in range(r):
                    if j == i:
                        continue
                    cand = list(base)
                    cand[i] -= 1
                    cand[j] += 1
                    got = note(tuple(cand))
                    if got is None:
                        continue
                    if base_val is None or got[0] < base_val:
                        base = tuple(cand)
                        base_val = got[0]
                        moved = True
                        break
                if moved:
                    break
            if not moved:
                break  # no unit move improves: local minimum
    return best


def _round_config(model: MilpModel, point: Sequence[Fraction]) -> tuple[int, ...]:
    """Integer load profile nearest the point's expected per-resource loads.

    Floors the expectations, then hands the leftover units to the largest
    fractional remainders so the profile sums to the follower count.
    """
    exp = []
    for i, lev in enumerate(model.levels):
        e = ZERO
        for v in lev:
            if v:
                e += v * point[model.y[(i, v)]]
        exp.append(e)
    floors = [int(e) for e in exp]
    leftover = model.total_load - sum(floors)
    order = sorted(range(len(exp)), key=lambda k: exp[k] - floors[k], reverse=True)
    cfg = list(floors)
    for k in range(max(0, leftover)):
        cfg[order[k % len(order)]] += 1
    return tuple(cfg)


def _propagate_windows(model: MilpModel, fixes: dict) -> dict | None:
    """Tighten level bans against the shared load total.

    With one load level selected per resource (the occupancy equality of the
    corrected model) and levels summing to the follower count, each
    resource's open window [lo, hi] caps the others: a level a resource
    could only reach by pushing the rest outside their windows can be banned
    outright.  Returns the extended fix set, or None when the windows
    already contradict the total.  Paper-mode models may leave resources
    unoccupied, so they pass through untouched.
    """
    if model.mode != CORRECTED:
        return fixes
    total = model.total_load
    out = dict(fixes)
    while True:
        lo: list[int] = []
        hi: list[int] = []
        for i, lvls in enumerate(model.levels):
            free = [v for v in lvls if out.get(model.y[(i, v)], (0, 1))[1] != 0]
            pinned = [v for v in lvls if out.get(model.y[(i, v)], (0, 1))[0] >= 1]
            if not free or len(pinned) > 1:
                return None
            if pinned:
                if pinned[0] not in free:
                    return None
                lo.append(pinned[0])
                hi.append(pinned[0])
            else:
                lo.append(free[0])
                hi.append(free[-1])
        sum_lo = sum(lo)
        sum_hi = sum(hi)
        if sum_lo > total or sum_hi < total:
            return None
        changed = False
        for i, lvls in enumerate(model.levels):
            cap = total - (sum_lo - lo[i])
            floor = total - (sum_hi - hi[i])
            if floor <= lvls[0] and lvls[-1] <= cap:
                continue
            for v in lvls:
                if floor <= v <= cap:
                    continue
                var = model.y[(i, v)]
                prior = out.get(var)
                if prior == (0, 0):
                    continue
                if prior is not None and prior[0] >= 1:
                    return None
                out[var] = (0, 0)
                changed = True
        if not changed:
            return out


def _is_binary_value(q: Fraction) -> bool:
    return q == 0 or q == 1


def _branch_children(
    model: MilpModel, point: Sequence[Fraction], fixes: Mapping[int, tuple]
) -> tuple[dict, dict] | None:
    """Two child bound-fix sets splitting off the fractional mass, or None.

    Preferred split: pick the resource whose load-level indicators carry
    the most fractional mass and zero out the levels on either side of
    the mass median — far more balanced than flipping one indicator.
    Only levels still free at this node participate, so every child pins
    at least one new variable and the tree depth stays bounded.
    """
    best_i = None
    best_frac = ZERO
    for i, lev in enumerate(model.levels):
        free = [v for v in lev if model.y[(i, v)] not in fixes]
        if len(free) < 2:
            continue
        frac = sum(
            min(point[model.y[(i, v)]], 1 - point[model.y[(i, v)]]) for v in free
        )
        if frac > best_frac:
            best_frac, best_i = frac, i
    if best_i is not None:
        free = [v for v in model.levels[best_i] if model.y[(best_i, v)] not in fixes]
        beta = [point[model.y[(best_i, v)]] for v in free]
        half = sum(beta) / 2
        cum = ZERO
        cut = len(free) - 2
        for k, q in enumerate(beta):
            cum += q
            if cum >= half:
                cut = min(k, len(free) - 2)
                break
        low = {model.y[(best_i, v)]: (0, 0) for v in free[cut + 1 :]}
        high = {model.y[(best_i, v)]: (0, 0) for v in free[: cut + 1]}
        return low, high

    best_var = None
    best_dist = ZERO
    for var_map in (model.y, model.x):
        for key in sorted(var_map):
            q = point[var_map[key]]
            if _is_binary_value(q):
                continue
            dist = min(q, 1 - q)
            if dist > best_dist:
                best_dist, best_var = dist, var_map[key]
        if best_var is not None:
            break
    if best_var is None:
        return None
    return {best_var: (0, 0)}, {best_var: (1, 1)}


def _extract(model: MilpModel, inst: GameInstance, point: Sequence[Fraction]):
    """Read (alpha, outcome) off an integral LP point."""
    alpha = tuple(point[j] for j in model.alpha)
    if model.variant == SYMMETRIC:
        loads = [0] * inst.num_resources
        for (i, v), var in model.y.items():
            if v and point[var] == 1:
                loads[i] = v
        return alpha, tuple(loads)
    profile = [-1] * inst.follower_count
    for (p, i), var in model.x.items():
        if point[var] == 1:
            profile[p] = i
    return alpha, tuple(profile)


def solve_ose_milp(
    inst: GameInstance,
    params: BnBParams | None = None,
    mode: str = CORRECTED,
) -> SolveReport:
    """Prove the optimal mixed commitment value by branch-and-bound.

    The report's ``optimal`` flag is True only when the search closed the
    tree; hitting a budget instead leaves the best incumbent, the tightest
    outstanding bound, and ``stats["limit_hit"]``.  paper_faithful mode
    solves the verbatim model (``guarantee=False``: its value need not be
    the true optimum, and no heuristic incumbent is used since equilibria
    may be infeasible for it).
    """
    params = params or BnBParams()
    model = build_milp(inst, mode)
    deadline = (
        None if params.time_limit is None else time.monotonic() + params.time_limit
    )

    incumbent: _Incumbent | None = None
    use_heuristics = params.incumbent_source == "heuristic" and mode == CORRECTED
    if use_heuristics:
        seed = _pure_seat_incumbent(inst)
        if seed is not None:
            value, seat, profile = seed
            sigma = LeaderStrategy.pure(inst, seat)
            assert is_nash(inst, sigma, profile).is_equilibrium
            assert leader_cost(inst, sigma, config_of(inst, profile)) == value
            outcome = (
                config_of(inst, profile) if model.variant == SYMMETRIC else profile
            )
            incumbent = _Incumbent(
                value=value,
                alpha=sigma.probs,
                outcome=outcome,
                source="heuristic",
            )

    config_scores: dict = {}
    mix_search = use_heuristics and model.variant == SYMMETRIC

    def install_config_incumbent(found, source: str) -> bool:
        """Certify a (value, mixture, profile) candidate and adopt it."""
        nonlocal incumbent
        if found is None:
            return False
        value, alpha, cfg = found
        if incumbent is not None and value >= incumbent.value:
            return False
        sigma = LeaderStrategy(alpha)
        assert is_nash_config(inst, sigma, cfg)
        assert leader_cost(inst, sigma, cfg) == value
        incumbent = _Incumbent(
            value=value, alpha=alpha, outcome=cfg, source=source
        )
        return True

    def slice_until(share: float, cap: float) -> float:
        now = time.monotonic()
        if deadline is None:
            return now + cap
        return now + min(cap, max(0.0, deadline - now) * share)

    if mix_search:
        seeds: list[Sequence[int]] = []
        if incumbent is not None:
            seeds.append(incumbent.outcome)
        r = inst.num_resources
        share, extra = divmod(inst.follower_count, r)
        seeds.append(
            tuple(share + (1 if i < extra else 0) for i in range(r))
        )
        install_config_incumbent(
            _config_descent(
                inst, seeds, slice_until(0.15, 12.0), cache=config_scores
            ),
            "heuristic",
        )

    nodes = 0
    lp_calls = 0
    bounds_seen: list[Fraction] = []
    limit_hit: str | None = None
    counter = 0
    heap: list[tuple[Fraction, int, dict, tuple | None]] = []

    work_lp = model.lp
    cache = StdCache(work_lp)

    def solve_node(fixes: dict, warm) -> LpOutcome:
        nonlocal lp_calls
        lp_calls += 1
        node_lp = work_lp.clone_with_bounds(fixes)
        # interior nodes skip the per-solve certificate re-check; integral
        # leaves are re-verified below before they may become incumbents
        return solve_lp(node_lp, warm=warm, std=cache.std_for(node_lp), check=False)

    root = solve_node({}, None)
    nodes += 1

    # rounds of exact Gomory cuts tighten the root before branching; each
    # cut is valid for every integral point, so the tree inherits them
    cut_rounds = 0
    total_cuts = 0
    if mode == CORRECTED:
        stalls = 0
        while (
            root.status == "optimal"
            and cut_rounds < _CUT_ROUND_LIMIT
            and total_cuts < _CUT_TOTAL_LIMIT
            and not (deadline is not None and time.monotonic() > deadline)
        ):
            if all(_is_binary_value(root.point[j]) for j in model.binaries):
                break
            warm_root = root.stats.get("warm")
            if warm_root is None:
                break
            new_cuts = gomory_cuts(
                work_lp, warm_root, model.binaries,
                std=cache.std_for(work_lp), max_cuts=20,
            )
            if not new_cuts:
                break
            strengthened = LinearProgram(
                num_vars=work_lp.num_vars,
                sense=work_lp.sense,
                objective=work_lp.objective,
                rows=list(work_lp.rows),
                lower=list(work_lp.lower),
                upper=list(work_lp.upper),
                names=work_lp.names,
            )
            for coeffs, rhs in new_cuts:
                strengthened.add_row(coeffs, GE, rhs, name=f"cut{total_cuts}")
                total_cuts += 1
            old_std = cache.std
            work_lp = strengthened
            cache = StdCache(work_lp)
            prev_value = root.value
            root = solve_node({}, extend_warm_token(warm_root, old_std, cache.std))
            cut_rounds += 1
            if root.status != "optimal":
                break
            gain = root.value - prev_value
            floor_gain = max(abs(prev_value), Fraction(1)) / 1000
            if gain < floor_gain:
                stalls += 1
                if stalls >= 2:
                    break
            else:
                stalls = 0
    if mix_search and root.status == "optimal":
        # one more descent, now aimed by the (cut-tightened) relaxation
        install_config_incumbent(
            _config_descent(
                inst,
                [_round_config(model, root.point)],
                slice_until(0.12, 8.0),
                cache=config_scores,
            ),
            "heuristic",
        )

    if root.status == "optimal":
        heapq.heappush(heap, (root.value, counter, {}, root))
        counter += 1
    best_open: Fraction | None = root.value if root.status == "optimal" else None
    dive_tick = 0

    while heap:
        bound, _, fixes, outcome = heapq.heappop(heap)
        best_open = bound
        if incumbent is not None and bound >= incumbent.value:
            best_open = bound
            heap.clear()
            break
        point = outcome.point
        if mix_search:
            dive_tick += 1
            if dive_tick >= 32:
                # cheap primal dive: score the nearest load profile
                dive_tick = 0
                cfg = _round_config(model, point)
                if cfg not in config_scores:
                    config_scores[cfg] = _config_alpha(inst, cfg)
                got = config_scores[cfg]
                if got is not None and install_config_incumbent(
                    (got[0], got[1], cfg), "dive"
                ):
                    if bound >= incumbent.value:
                        heap.clear()
                        break
        if len(bounds_seen) < 4096:
            bounds_seen.append(bound)
        children = _branch_children(model, point, fixes)
        if children is None:
            assert all(_is_binary_value(point[j]) for j in model.binaries)
            _check_point(work_lp.clone_with_bounds(fixes), point)
            alpha, extracted = _extract(model, inst, point)
            if mode == CORRECTED:
                sigma = LeaderStrategy(alpha)
                if model.variant == SYMMETRIC:
                    assert is_nash_config(inst, sigma, extracted)
                    assert (
                        leader_cost(inst, sigma, extracted) == outcome.value
                    )
                else:
                    assert is_nash(inst, sigma, extracted).is_equilibrium
                    assert (
                        leader_cost(inst, sigma, config_of(inst, extracted))
                        == outcome.value
                    )
            if incumbent is None or outcome.value < incumbent.value:
                incumbent = _Incumbent(
                    value=outcome.value,
                    alpha=alpha,
                    outcome=extracted,
                    source="node",
                )
            continue
        warm = outcome.stats.get("warm")
        for delta in children:
            if deadline is not None and time.monotonic() > deadline:
                limit_hit = "time"
                break
            if params.node_limit is not None and nodes >= params.node_limit:
                limit_hit = "nodes"
                break
            child_fixes = dict(fixes)
            child_fixes.update(delta)
            child_fixes = _propagate_windows(model, child_fixes)
            if child_fixes is None:
                continue  # level windows cannot reach the follower total
            child = solve_node(child_fixes, warm)
            nodes += 1
            if child.status != "optimal":
                continue
            assert child.value >= bound  # tightening bounds cannot relax
            if incumbent is not None and child.value >= incumbent.value:
                continue  # subtree cannot beat what we already hold
            heapq.heappush(heap, (child.value, counter, child_fixes, child))
            counter += 1
        if limit_hit:
            break

    open_bound = None
    if limit_hit:
        candidates = [entry[0] for entry in heap]
        if best_open is not None:
            candidates.append(best_open)
        open_bound = min(candidates) if candidates else None

    stats = {
        "mode": mode,
        "variant": model.variant,
        "lp_solves": lp_calls,
        "incumbent": incumbent.source if incumbent else "none",
        "cuts": total_cuts,
        "_bounds": tuple(bounds_seen),
    }
    if limit_hit:
        stats["limit_hit"] = limit_hit

    if incumbent is None:
        if limit_hit is None:
            # tree exhausted without a single integral point: proven that
            # no stable outcome satisfies this model variant
            stats["infeasible"] = True
        return SolveReport(
            solver="milp",
            sense=OPTIMISTIC,
            leader_strategy=None,
            outcome=None,
            leader_cost=None,
            optimal=False,
            guarantee=False,
            bound=open_bound,
            nodes=nodes,
            stats=stats,
        )

    proven = limit_hit is None
    gap = None
    if proven:
        gap = ZERO
        bound_out = incumbent.value
    else:
        bound_out = open_bound if open_bound is not None else incumbent.value
        gap = incumbent.value - bound_out
    return SolveReport(
        solver="milp",
        sense=OPTIMISTIC,
        leader_strategy=LeaderStrategy(incumbent.alpha),
        outcome_kind="config" if model.variant == SYMMETRIC else "profile",
        outcome=incumbent.outcome,
        leader_cost=incumbent.value,
        optimal=proven,
        guarantee=proven and mode == CORRECTED,
        bound=bound_out,
        gap=gap,
        nodes=nodes,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# LP-format export and its reader
# ---------------------------------------------------------------------------


def _terminating(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def _decimal_str(q: Fraction) -> str:
    """Plain decimal text, never exponent notation.

    Exact when the denominator divides a power of ten; otherwise an
    18-fractional-digit rounding (the writer adds an exactness patch).
    """
    if q.denominator == 1:
        return str(q.numerator)
    if _terminating(q):
        d = q.denominator
        twos = fives = 0
        while d % 2 == 0:
            d //= 2
            twos += 1
        while d % 5 == 0:
            d //= 5
            fives += 1
        k = max(twos, fives)
    else:
        k = 18
    scaled = round(Fraction(abs(q.numerator), q.denominator) * 10**k)
    text = str(scaled).rjust(k + 1, "0")
    out = f"{text[:-k]}.{text[-k:]}" if k else text
    return f"-{out}" if q < 0 else out


def _term_chunks(row_terms, names):
    parts = []
    for var, q in sorted(row_terms.items()):
        sign = "-" if q < 0 else "+"
        parts.append(f"{sign} {_decimal_str(abs(q))} {names[var]}")
    if not parts:
        return ["+ 0 " + names[0]]
    return parts


def _wrapped(prefix: str, chunks: Sequence[str], width: int = 200) -> list[str]:
    """Join chunks after the prefix, continuing on indented lines."""
    lines = [prefix]
    for chunk in chunks:
        if len(lines[-1]) + 1 + len(chunk) > width and lines[-1].strip():
            lines.append("   ")
        lines[-1] += " " + chunk
    return lines


def export_lp_file(model: MilpModel, sink) -> None:
    """Write the model in LP text format.

    Values whose decimal form would be inexact are written approximately
    and restored exactly by trailing ``\\ exact`` comments, which this
    module's own reader applies; external tools simply ignore them.
    """
    lp = model.lp
    names = lp.names
    text = io.StringIO()
    patches: list[str] = []

    def emit_value(q: Fraction, target: str) -> None:
        if not _terminating(q):
            patches.append(f"\\ exact {target} {q.numerator}/{q.denominator}")

    text.write("\\ singleton congestion commitment model\n")
    text.write(f"\\ mode={model.mode} variant={model.variant}\n")
    text.write("\\ vars: " + " ".join(names) + "\n")
    text.write("Minimize\n")
    obj_terms = {j: q for j, q in enumerate(lp.objective) if q != 0}
    chunks = _term_chunks(obj_terms, names)
    chunks[0] = chunks[0].lstrip("+ ")
    for line in _wrapped(" obj:", chunks):
        text.write(line + "\n")
    for j, q in sorted(obj_terms.items()):
        emit_value(q, f"obj {names[j]}")
    text.write("Subject To\n")
    for idx, row in enumerate(lp.rows):
        rel = {LE: "<=", GE: ">=", EQ: "="}[row.rel]
        label = row.name or f"c{idx}"
        chunks = _term_chunks(row.coeffs, names)
        chunks[0] = chunks[0].lstrip("+ ")
        chunks.append(f"{rel} {_decimal_str(row.rhs)}")
        for line in _wrapped(f" {label}:", chunks):
            text.write(line + "\n")
        for var, q in sorted(row.coeffs.items()):
            emit_value(q, f"row {idx} {names[var]}")
        emit_value(row.rhs, f"rhs {idx}")
    text.write("Bounds\n")
    for j, name in enumerate(names):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None and hi is not None and lo == hi:
            text.write(f" {name} = {_decimal_str(lo)}\n")
            emit_value(lo, f"bound {name} both")
        else:
            left = "-inf" if lo is None else _decimal_str(lo)
            if hi is None:
                text.write(f" {name} >= {left}\n")
            else:
                text.write(f" {left} <= {name} <= {_decimal_str(hi)}\n")
                emit_value(hi, f"bound {name} upper")
            if lo is not None:
                emit_value(lo, f"bound {name} lower")
    if model.binaries:
        text.write("Binaries\n")
        for line in _wrapped("", [names[j] for j in model.binaries]):
            text.write(line + "\n")
    text.write("End\n")
    for line in patches:
        text.write(line + "\n")

    payload = text.getvalue().encode("utf-8")
    if hasattr(sink, "write"):
        written = sink.write(payload)
        if written is None or isinstance(written, int):
            return
    else:
        with open(sink, "wb") as handle:
            handle.write(payload)


def read_lp_file(source) -> tuple[LinearProgram, list[str]]:
    """Parse a file produced by :func:`export_lp_file`.

    Returns the program and the binary variable names.  ``\\ exact``
    comments emitted by the writer are applied, so round-trips are exact.
    """
    if hasattr(source, "read"):
        raw = source.read()
    else:
        with open(source, "rb") as handle:
            raw = handle.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")

    var_order: list[str] = []
    patches: list[str] = []
    body_lines: list[str] = []
    for line in raw.splitlines():
        stripped = line.strip()
        if stripped.startswith("\\ vars:"):
            var_order = stripped.split(":", 1)[1].split()
        elif stripped.startswith("\\ exact "):
            patches.append(stripped[len("\\ exact ") :])
        elif stripped.startswith("\\") or not stripped:
            continue
        else:
            body_lines.append(stripped)

    section = None
    objective_text: list[str] = []
    row_texts: list[str] = []
    bound_texts: list[str] = []
    binary_names: list[str] = []
    for line in body_lines:
        lowered = line.lower()
        if lowered in ("minimize", "maximize"):
            section = "objective"
            continue
        if lowered in ("subject to", "st", "s.t."):
            section = "rows"
            continue
        if lowered == "bounds":
            section = "bounds"
            continue
        if lowered in ("binaries", "binary"):
            section = "binaries"
            continue
        if lowered == "end":
            section = None
            continue
        if section == "objective":
            objective_text.append(line)
        elif section == "rows":
            if ":" in line:
                row_texts.append(line)
            else:
                row_texts[-1] += " " + line
        elif section == "bounds":
            bound_texts.append(line)
        elif section == "binaries":
            binary_names.extend(line.split())

    if not var_order:
        raise ValidationError("missing vars header; not a file this module wrote")
    index = {name: j for j, name in enumerate(var_order)}
    lp = LinearProgram(num_vars=len(var_order), sense=MIN, names=list(var_order))
    for j in range(lp.num_vars):
        lp.set_bounds(j, 0, None)

    def parse_terms(body: str) -> dict[int, Fraction]:
        tokens = body.replace("+", " + ").replace("-", " - ").split()
        terms: dict[int, Fraction] = {}
        sign = 1
        pending: Fraction | None = None
        for tok in tokens:
            if tok == "+":
                sign = 1
            elif tok == "-":
                sign = -1
            elif tok in index:
                coeff = pending if pending is not None else Fraction(1)
                terms[index[tok]] = terms.get(index[tok], ZERO) + sign * coeff
                pending = None
                sign = 1
            else:
                pending = Fraction(tok)
        return terms

    label, body = objective_text[0].split(":", 1) if objective_text else ("obj", "")
    body = " ".join([body] + objective_text[1:])
    lp.set_objective(parse_terms(body))

    for text_row in row_texts:
        label, rest = text_row.split(":", 1)
        rel = None
        for cand in ("<=", ">=", "="):
            if cand in rest:
                rel = cand
                break
        if rel is None:
            raise ValidationError(f"row without relation: {text_row!r}")
        body, rhs_text = rest.rsplit(rel, 1)
        rel_norm = {"<=": LE, ">=": GE, "=": EQ}[rel]
        lp.add_row(parse_terms(body), rel_norm, Fraction(rhs_text.strip()), label.strip())

    for text_bound in bound_texts:
        if "<=" in text_bound:
            left, rest = text_bound.split("<=", 1)
            mid, right = rest.split("<=", 1)
            name = mid.strip()
            lo = None if left.strip() == "-inf" else Fraction(left.strip())
            hi = Fraction(right.strip())
            lp.set_bounds(index[name], lo, hi)
        elif ">=" in text_bound:
            name, lo_text = text_bound.split(">=", 1)
            lo_text = lo_text.strip()
            lo = None if lo_text == "-inf" else Fraction(lo_text)
            lp.set_bounds(index[name.strip()], lo, None)
        elif "=" in text_bound:
            name, val = text_bound.split("=", 1)
            q = Fraction(val.strip())
            lp.set_bounds(index[name.strip()], q, q)

    for patch in patches:
        parts = patch.split()
        value = Fraction(parts[-1])
        if parts[0] == "obj":
            lp.objective[index[parts[1]]] = value
        elif parts[0] == "row":
            lp.rows[int(parts[1])].coeffs[index[parts[2]]] = value
        elif parts[0] == "rhs":
            row = lp.rows[int(parts[1])]
            lp.rows[int(parts[1])] = type(row)(row.coeffs, row.rel, value, row.name)
        elif parts[0] == "bound":
            j = index[parts[1]]
            if parts[2] == "both":
                lp.lower[j] = value
                lp.upper[j] = value
            elif parts[2] == "upper":
                lp.upper[j] = value
            else:
                lp.lower[j] = value
    return lp, binary_names
