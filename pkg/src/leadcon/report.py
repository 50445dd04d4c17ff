"""Solver result container shared by every solver in the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .model import GameInstance, LeaderStrategy, rat_str, strategy_to_json_dict

OPTIMISTIC = "optimistic"
PESSIMISTIC = "pessimistic"

SENSES = (OPTIMISTIC, PESSIMISTIC)


@dataclass
class SolveReport:
    """What a solver concluded.

    ``outcome`` is the follower side of the solution: a load vector when
    ``outcome_kind`` is "config", a per-follower resource assignment when it
    is "profile".  ``optimal`` says the value is proven optimal for the
    problem the solver claims to solve; ``guarantee`` says the solver's
    preconditions actually held for this instance.  Branch-and-bound fills
    ``bound``/``gap``/``nodes``; best-response dynamics fills ``converged``.
    """

    solver: str
    sense: str
    leader_strategy: LeaderStrategy | None = None
    outcome_kind: str = "config"
    outcome: tuple | None = None
    leader_cost: Fraction | None = None
    optimal: bool = False
    guarantee: bool = True
    converged: bool | None = None
    bound: Fraction | None = None
    gap: Fraction | None = None
    nodes: int | None = None
    stats: dict = field(default_factory=dict)

    def to_json_dict(self, inst: GameInstance) -> dict:
        doc: dict = {
            "solver": self.solver,
            "sense": self.sense,
            "optimal": self.optimal,
            "guarantee": self.guarantee,
        }
        if self.leader_strategy is not None:
            doc["leader_strategy"] = strategy_to_json_dict(inst, self.leader_strategy)
        if self.outcome is not None:
            if self.outcome_kind == "config":
                doc["outcome"] = {"config": list(self.outcome)}
            else:
                doc["outcome"] = {
                    "profile": [inst.resources[i] for i in self.outcome]
                }
        if self.leader_cost is not None:
            doc["leader_cost"] = rat_str(self.leader_cost)
        if self.converged is not None:
            doc["converged"] = self.converged
        if self.bound is not None:
            doc["bound"] = rat_str(self.bound)
        if self.gap is not None:
            doc["gap"] = rat_str(self.gap)
        if self.nodes is not None:
            doc["nodes"] = self.nodes
        if self.stats:
            doc["stats"] = {
                k: (rat_str(v) if isinstance(v, Fraction) else v)
                for k, v in self.stats.items()
                if not k.startswith("_")
            }
        return doc
