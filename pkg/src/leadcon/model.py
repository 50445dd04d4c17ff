"""Core data model: games, strategies, cost tables, equilibrium checks.

A game instance has one leader and ``follower_count`` followers, each picking
a single resource.  Everything numeric is an exact ``fractions.Fraction``:
costs, commitment probabilities, expected values.  Floats are rejected at the
boundary so rounding can never decide an equilibrium question.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "ValidationError",
    "as_rational",
    "rat_str",
    "CostTable",
    "GameInstance",
    "ClassFlags",
    "LeaderStrategy",
    "DeviationWitness",
    "VerifyReport",
    "classify",
    "config_of",
    "expected_follower_cost",
    "leader_cost",
    "is_nash",
    "is_nash_config",
    "is_full_game_nash",
    "instance_to_json_dict",
    "instance_from_json_dict",
    "dump_instance",
    "load_instance",
    "strategy_to_json_dict",
    "strategy_from_json_dict",
    "profile_to_json_list",
    "profile_from_json_list",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class ValidationError(ValueError):
    """An instance, strategy, profile or parameter failed validation."""


def as_rational(value, *, what: str = "value") -> Fraction:
    """Coerce an int, Fraction, exact-rational object or 'p/q' string.

    Floats (and bools) are rejected on purpose; every quantity in this
    package is exact.
    """
    if isinstance(value, bool):
        raise ValidationError(f"{what}: got a boolean, expected a number")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValidationError(
            f"{what}: floats are not accepted, pass an int or a 'p/q' string"
        )
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"{what}: cannot parse rational {value!r}") from exc
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise ValidationError(
        f"{what}: unsupported numeric type {type(value).__name__}"
    )


def rat_str(q: Fraction) -> str:
    """Render a rational as 'p/q', or plain 'p' when the denominator is 1."""
    return str(q)


@dataclass(frozen=True)
class CostTable:
    """Cost lookup c(x) for one resource, x being the number of its users.

    ``values[k]`` is the cost at congestion x = k + 1; c(0) is 0 by
    definition.  Tables are stored at the game size n (total players): a
    shorter source is padded by repeating its last entry, a longer one is
    truncated.  ``specified`` remembers how many leading entries the source
    actually provided, because strict monotonicity is judged on that prefix
    only (the pad would otherwise void it for every short table).
    """

    values: tuple[Fraction, ...]
    specified: int

    @staticmethod
    def from_values(raw: Sequence, size: int) -> "CostTable":
        vals = [as_rational(v, what="cost entry") for v in raw]
        if not vals:
            raise ValidationError("a cost table needs at least one entry")
        if size < 1:
            raise ValidationError("cost table size must be at least 1")
        for v in vals:
            if v < 0:
                raise ValidationError(f"costs must be nonnegative, got {v}")
        specified = min(len(vals), size)
        if len(vals) >= size:
            vals = vals[:size]
        else:
            vals = vals + [vals[-1]] * (size - len(vals))
        return CostTable(tuple(vals), specified)

    def at(self, x: int) -> Fraction:
        """Cost with x users.  x = 0 is free; x past the table repeats the tail."""
        if x < 0:
            raise ValidationError(f"congestion {x} is negative")
        if x == 0:
            return ZERO
        if x > len(self.values):
            return self.values[-1]
        return self.values[x - 1]

    @property
    def weakly_increasing(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    @property
    def strictly_increasing(self) -> bool:
        prefix = self.values[: self.specified]
        if prefix[0] <= 0:          # c(0) = 0 must be strictly below c(1)
            return False
        return all(a < b for a, b in zip(prefix, prefix[1:]))


@dataclass(frozen=True)
class GameInstance:
    """A singleton congestion game with a leader and ``follower_count`` followers.

    Resources are addressed by index internally; ``resources`` maps indices to
    the external string ids.  Action sets are sorted tuples of resource
    indices.  Both cost families carry one table per resource, all of length
    ``players`` (= follower_count + 1).
    """

    resources: tuple[str, ...]
    follower_count: int
    leader_actions: tuple[int, ...]
    follower_actions: tuple[tuple[int, ...], ...]
    leader_costs: tuple[CostTable, ...]
    follower_costs: tuple[CostTable, ...]
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        r = len(self.resources)
        if r == 0:
            raise ValidationError("a game needs at least one resource")
        if len(set(self.resources)) != r:
            raise ValidationError("resource ids must be unique")
        for rid in self.resources:
            if not isinstance(rid, str) or not rid:
                raise ValidationError("resource ids must be nonempty strings")
        if self.follower_count < 0:
            raise ValidationError("follower count cannot be negative")
        if len(self.follower_actions) != self.follower_count:
            raise ValidationError(
                f"expected {self.follower_count} follower action sets, "
                f"got {len(self.follower_actions)}"
            )
        self._check_action_set(self.leader_actions, "leader")
        for p, acts in enumerate(self.follower_actions):
            self._check_action_set(acts, f"follower {p}")
        for name, tables in (
            ("leader", self.leader_costs),
            ("follower", self.follower_costs),
        ):
            if len(tables) != r:
                raise ValidationError(f"{name} costs must cover every resource")
            for t in tables:
                if len(t.values) != self.players:
                    raise ValidationError(
                        f"{name} cost table has length {len(t.values)}, "
                        f"expected {self.players}"
                    )

    def _check_action_set(self, acts: tuple[int, ...], who: str) -> None:
        if not acts:
            raise ValidationError(f"{who} has an empty action set")
        r = len(self.resources)
        if any(not isinstance(i, int) or i < 0 or i >= r for i in acts):
            raise ValidationError(f"{who} action set has an out-of-range index")
        if any(a >= b for a, b in zip(acts, acts[1:])):
            raise ValidationError(f"{who} action set must be sorted and duplicate-free")

    # -- convenience ----------------------------------------------------

    @property
    def players(self) -> int:
        return self.follower_count + 1

    @property
    def num_resources(self) -> int:
        return len(self.resources)

    def index_of(self, rid: str) -> int:
        try:
            return self.resources.index(rid)
        except ValueError:
            raise ValidationError(f"unknown resource id {rid!r}") from None

    @staticmethod
    def build(
        resources: Sequence[str],
        follower_count: int,
        leader_actions: Iterable,
        follower_actions: Sequence[Iterable],
        leader_costs: Mapping[str, Sequence],
        follower_costs: Mapping[str, Sequence],
        metadata: Mapping | None = None,
    ) -> "GameInstance":
        """Assemble an instance from id-keyed pieces, normalizing as it goes.

        Action entries may be resource ids or indices; "ALL" stands for the
        full resource set.  Cost tables shorter than the player count are
        padded with their last entry, longer ones truncated.
        """
        res = tuple(resources)
        index = {rid: k for k, rid in enumerate(res)}
        size = follower_count + 1

        def resolve(acts) -> tuple[int, ...]:
            if isinstance(acts, str):
                if acts == "ALL":
                    return tuple(range(len(res)))
                raise ValidationError(f"bad action set {acts!r} (only 'ALL' is special)")
            out = []
            for a in acts:
                if isinstance(a, str):
                    if a not in index:
                        raise ValidationError(f"unknown resource id {a!r} in action set")
                    out.append(index[a])
                elif isinstance(a, int) and not isinstance(a, bool):
                    out.append(a)
                else:
                    raise ValidationError(f"bad action entry {a!r}")
            return tuple(sorted(set(out)))

        def tables(mapping: Mapping[str, Sequence], name: str) -> tuple[CostTable, ...]:
            missing = [rid for rid in res if rid not in mapping]
            if missing:
                raise ValidationError(f"{name} costs missing for {missing}")
            extra = [rid for rid in mapping if rid not in index]
            if extra:
                raise ValidationError(f"{name} costs given for unknown resources {extra}")
            return tuple(CostTable.from_values(mapping[rid], size) for rid in res)

        return GameInstance(
            resources=res,
            follower_count=follower_count,
            leader_actions=resolve(leader_actions),
            follower_actions=tuple(resolve(a) for a in follower_actions),
            leader_costs=tables(leader_costs, "leader"),
            follower_costs=tables(follower_costs, "follower"),
            metadata=dict(metadata or {}),
        )


@dataclass(frozen=True)
class ClassFlags:
    """Structural classification used to route instances to solvers."""

    symmetric: bool
    leader_weak_mono: bool
    follower_weak_mono: bool
    follower_strict_mono: bool


def classify(inst: GameInstance) -> ClassFlags:
    """Classify an instance: symmetry and cost monotonicity.

    Symmetric means every player, leader included, may use every resource.
    Weak monotonicity is judged on the stored (padded) tables; strictness on
    each table's specified prefix, see CostTable.
    """
    full = tuple(range(inst.num_resources))
    symmetric = inst.leader_actions == full and all(
        acts == full for acts in inst.follower_actions
    )
    return ClassFlags(
        symmetric=symmetric,
        leader_weak_mono=all(t.weakly_increasing for t in inst.leader_costs),
        follower_weak_mono=all(t.weakly_increasing for t in inst.follower_costs),
        follower_strict_mono=all(t.strictly_increasing for t in inst.follower_costs),
    )


@dataclass(frozen=True)
class LeaderStrategy:
    """A mixed commitment: one probability per resource (zeros off-support)."""

    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.probs:
            raise ValidationError("strategy over an empty resource set")
        total = ZERO
        for q in self.probs:
            if not isinstance(q, Fraction):
                raise ValidationError("strategy probabilities must be Fractions")
            if q < 0 or q > 1:
                raise ValidationError(f"probability {q} outside [0, 1]")
            total += q
        if total != 1:
            raise ValidationError(f"probabilities sum to {total}, expected 1")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, q in enumerate(self.probs) if q > 0)

    @staticmethod
    def pure(inst: GameInstance, resource) -> "LeaderStrategy":
        i = inst.index_of(resource) if isinstance(resource, str) else resource
        probs = [ZERO] * inst.num_resources
        if not 0 <= i < inst.num_resources:
            raise ValidationError(f"resource index {i} out of range")
        probs[i] = ONE
        return LeaderStrategy(tuple(probs))

    @staticmethod
    def uniform(inst: GameInstance, resources=None) -> "LeaderStrategy":
        idxs = (
            inst.leader_actions
            if resources is None
            else tuple(
                inst.index_of(x) if isinstance(x, str) else x for x in resources
            )
        )
        if not idxs:
            raise ValidationError("uniform strategy over an empty set")
        share = Fraction(1, len(idxs))
        probs = [ZERO] * inst.num_resources
        for i in idxs:
            probs[i] = share
        return LeaderStrategy(tuple(probs))

    @staticmethod
    def from_probs(inst: GameInstance, mapping: Mapping) -> "LeaderStrategy":
        probs = [ZERO] * inst.num_resources
        for key, q in mapping.items():
            i = inst.index_of(key) if isinstance(key, str) else key
            probs[i] = as_rational(q, what=f"probability of {key!r}")
        return LeaderStrategy(tuple(probs))


def check_strategy(inst: GameInstance, sigma: LeaderStrategy) -> None:
    if len(sigma.probs) != inst.num_resources:
        raise ValidationError("strategy length does not match the resource count")
    allowed = set(inst.leader_actions)
    for i in sigma.support:
        if i not in allowed:
            raise ValidationError(
                f"strategy puts weight on {inst.resources[i]!r}, "
                "which is outside the leader's action set"
            )


@dataclass(frozen=True)
class DeviationWitness:
    """A profitable follower deviation: proof that a profile is not stable."""

    follower: int
    from_resource: str
    to_resource: str
    current_cost: Fraction
    deviation_cost: Fraction


@dataclass(frozen=True)
class VerifyReport:
    is_equilibrium: bool
    witness: DeviationWitness | None = None


# -- profiles and configurations ----------------------------------------


def _check_profile(inst: GameInstance, profile: Sequence[int]) -> tuple[int, ...]:
    prof = tuple(profile)
    if len(prof) != inst.follower_count:
        raise ValidationError(
            f"profile has {len(prof)} entries, expected {inst.follower_count}"
        )
    for p, i in enumerate(prof):
        if not isinstance(i, int) or isinstance(i, bool):
            raise ValidationError(f"profile entry for follower {p} is not an index")
        if i not in inst.follower_actions[p]:
            raise ValidationError(
                f"follower {p} assigned to "
                f"{inst.resources[i] if 0 <= i < inst.num_resources else i!r}, "
                "which is outside their action set"
            )
    return prof


def config_of(inst: GameInstance, profile: Sequence[int]) -> tuple[int, ...]:
    """Collapse a follower profile into per-resource load counts."""
    prof = _check_profile(inst, profile)
    loads = [0] * inst.num_resources
    for i in prof:
        loads[i] += 1
    return tuple(loads)


def _check_config(inst: GameInstance, config: Sequence[int]) -> tuple[int, ...]:
    cfg = tuple(config)
    if len(cfg) != inst.num_resources:
        raise ValidationError("configuration length does not match resource count")
    if any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in cfg):
        raise ValidationError("configuration entries must be nonnegative ints")
    if sum(cfg) != inst.follower_count:
        raise ValidationError(
            f"configuration sums to {sum(cfg)}, expected {inst.follower_count}"
        )
    return cfg


# -- expected costs and equilibrium checks -------------------------------


def expected_follower_cost(
    inst: GameInstance, sigma: LeaderStrategy, resource: int, x: int
) -> Fraction:
    """Expected cost of a follower on ``resource`` when x followers use it.

    The leader lands on the same resource with probability sigma(resource),
    adding one user; x counts followers only, so x must stay within
    0..follower_count.
    """
    check_strategy(inst, sigma)
    if not 0 <= resource < inst.num_resources:
        raise ValidationError(f"resource index {resource} out of range")
    if not 0 <= x <= inst.follower_count:
        raise ValidationError(
            f"follower load {x} outside 0..{inst.follower_count}"
        )
    q = sigma.probs[resource]
    table = inst.follower_costs[resource]
    if q == 0:
        return table.at(x)
    return q * table.at(x + 1) + (1 - q) * table.at(x)


def leader_cost(
    inst: GameInstance, sigma: LeaderStrategy, config: Sequence[int]
) -> Fraction:
    """Leader's expected cost against a follower configuration.

    Each supported resource contributes sigma(i) times the leader's cost at
    load nu_i + 1 (the followers there plus the leader herself).
    """
    check_strategy(inst, sigma)
    cfg = _check_config(inst, config)
    total = ZERO
    for i in sigma.support:
        total += sigma.probs[i] * inst.leader_costs[i].at(cfg[i] + 1)
    return total


def is_nash(
    inst: GameInstance, sigma: LeaderStrategy, profile: Sequence[int]
) -> VerifyReport:
    """Check whether a follower profile is stable under the commitment.

    Stability is in expectation against sigma: a follower on i with load
    nu_i compares her cost at load nu_i to the cost on j at load nu_j + 1,
    for every j in her own action set.  Ties stay put.  On failure the
    report carries the first profitable deviation in (follower, resource)
    order, with both costs.
    """
    check_strategy(inst, sigma)
    prof = _check_profile(inst, profile)
    loads = [0] * inst.num_resources
    for i in prof:
        loads[i] += 1
    cost_at: dict[tuple[int, int], Fraction] = {}

    def ecf(i: int, x: int) -> Fraction:
        key = (i, x)
        if key not in cost_at:
            q = sigma.probs[i]
            t = inst.follower_costs[i]
            cost_at[key] = t.at(x) if q == 0 else q * t.at(x + 1) + (1 - q) * t.at(x)
        return cost_at[key]

    for p, i in enumerate(prof):
        cur = ecf(i, loads[i])
        for j in inst.follower_actions[p]:
            if j == i:
                continue
            dev = ecf(j, loads[j] + 1)
            if dev < cur:
                return VerifyReport(
                    is_equilibrium=False,
                    witness=DeviationWitness(
                        follower=p,
                        from_resource=inst.resources[i],
                        to_resource=inst.resources[j],
                        current_cost=cur,
                        deviation_cost=dev,
                    ),
                )
    return VerifyReport(is_equilibrium=True, witness=None)


def is_nash_config(
    inst: GameInstance, sigma: LeaderStrategy, config: Sequence[int]
) -> bool:
    """Configuration-level stability check for symmetric games.

    When every follower may use every resource, stability depends on the
    profile only through its load vector, so configurations can be checked
    directly (and much faster than materializing a profile).
    """
    full = tuple(range(inst.num_resources))
    if any(acts != full for acts in inst.follower_actions):
        raise ValidationError("config-level check requires symmetric followers")
    check_strategy(inst, sigma)
    cfg = _check_config(inst, config)
    ft = inst.follower_costs
    probs = sigma.probs

    def ecf(i: int, x: int) -> Fraction:
        q = probs[i]
        if q == 0:
            return ft[i].at(x)
        return q * ft[i].at(x + 1) + (1 - q) * ft[i].at(x)

    occupied = [i for i, v in enumerate(cfg) if v > 0]
    for i in occupied:
        cur = ecf(i, cfg[i])
        for j in range(inst.num_resources):
            if j != i and ecf(j, cfg[j] + 1) < cur:
                return False
    return True


def is_full_game_nash(
    inst: GameInstance, leader_resource: int, profile: Sequence[int]
) -> bool:
    """Pure Nash check for the whole game, leader included.

    Used to audit converged best-response runs and the aligned-costs
    property of the greedy solver.  Loads here count all players.
    """
    prof = _check_profile(inst, profile)
    if leader_resource not in inst.leader_actions:
        raise ValidationError("leader resource outside the leader's action set")
    loads = [0] * inst.num_resources
    loads[leader_resource] += 1
    for i in prof:
        loads[i] += 1
    for p, i in enumerate(prof):
        cur = inst.follower_costs[i].at(loads[i])
        for j in inst.follower_actions[p]:
            if j != i and inst.follower_costs[j].at(loads[j] + 1) < cur:
                return False
    cur = inst.leader_costs[leader_resource].at(loads[leader_resource])
    for j in inst.leader_actions:
        if j != leader_resource and inst.leader_costs[j].at(loads[j] + 1) < cur:
            return False
    return True


# -- JSON I/O -------------------------------------------------------------

FORMAT_TAG = "leadcon-game"


def instance_to_json_dict(inst: GameInstance) -> dict:
    """Serialize; rationals become 'p/q' strings, integer values plain ints."""
    full = tuple(range(inst.num_resources))

    def actset(acts: tuple[int, ...]):
        if acts == full:
            return "ALL"
        return [inst.resources[i] for i in acts]

    def table(t: CostTable) -> list:
        out = []
        for v in t.values[: t.specified]:
            out.append(int(v) if v.denominator == 1 else rat_str(v))
        return out

    doc = {
        "format": FORMAT_TAG,
        "version": 1,
        "resources": list(inst.resources),
        "followers": inst.follower_count,
        "leader_actions": actset(inst.leader_actions),
        "follower_actions": [actset(a) for a in inst.follower_actions],
        "leader_costs": {
            rid: table(inst.leader_costs[k]) for k, rid in enumerate(inst.resources)
        },
        "follower_costs": {
            rid: table(inst.follower_costs[k]) for k, rid in enumerate(inst.resources)
        },
    }
    if inst.metadata:
        doc["metadata"] = inst.metadata
    return doc


def instance_from_json_dict(doc: Mapping) -> GameInstance:
    if not isinstance(doc, Mapping):
        raise ValidationError("instance JSON must be an object")
    if doc.get("format", FORMAT_TAG) != FORMAT_TAG:
        raise ValidationError(f"unrecognized format tag {doc.get('format')!r}")
    try:
        resources = doc["resources"]
        followers = doc["followers"]
        leader_actions = doc["leader_actions"]
        follower_actions = doc["follower_actions"]
        leader_costs = doc["leader_costs"]
        follower_costs = doc["follower_costs"]
    except KeyError as exc:
        raise ValidationError(f"instance JSON is missing {exc.args[0]!r}") from None
    if not isinstance(followers, int) or isinstance(followers, bool):
        raise ValidationError("'followers' must be an integer")
    if follower_actions == "ALL":
        follower_actions = ["ALL"] * followers
    if not isinstance(follower_actions, Sequence) or isinstance(follower_actions, str):
        raise ValidationError("'follower_actions' must be a list or 'ALL'")
    return GameInstance.build(
        resources=resources,
        follower_count=followers,
        leader_actions=leader_actions,
        follower_actions=follower_actions,
        leader_costs=leader_costs,
        follower_costs=follower_costs,
        metadata=doc.get("metadata"),
    )


def dump_instance(inst: GameInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_json_dict(inst), fh, indent=2, sort_keys=False)
        fh.write("\n")


def load_instance(path) -> GameInstance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_json_dict(doc)


def strategy_to_json_dict(inst: GameInstance, sigma: LeaderStrategy) -> dict:
    return {
        inst.resources[i]: rat_str(sigma.probs[i]) for i in sigma.support
    }


def strategy_from_json_dict(inst: GameInstance, doc: Mapping) -> LeaderStrategy:
    if not isinstance(doc, Mapping):
        raise ValidationError("strategy JSON must be an object of resource: weight")
    sigma = LeaderStrategy.from_probs(inst, doc)
    check_strategy(inst, sigma)
    return sigma


def profile_to_json_list(inst: GameInstance, profile: Sequence[int]) -> list[str]:
    return [inst.resources[i] for i in _check_profile(inst, profile)]


def profile_from_json_list(inst: GameInstance, doc: Sequence) -> tuple[int, ...]:
    if isinstance(doc, str) or not isinstance(doc, Sequence):
        raise ValidationError("profile JSON must be a list of resource ids")
    out = []
    for p, rid in enumerate(doc):
        if isinstance(rid, str):
            out.append(inst.index_of(rid))
        elif isinstance(rid, int) and not isinstance(rid, bool):
            out.append(rid)
        else:
            raise ValidationError(f"profile entry {p} must be a resource id")
    return _check_profile(inst, tuple(out))
