"""Solvers for leader commitment in singleton congestion games.

One player (the leader) commits to a randomized resource choice; the
remaining players (followers) settle into a pure Nash equilibrium of the
induced expected-cost game.  This package computes optimal commitments under
optimistic and pessimistic tie-breaking, exactly, in rational arithmetic.
"""

from .model import (
    ClassFlags,
    CostTable,
    DeviationWitness,
    GameInstance,
    LeaderStrategy,
    ValidationError,
    VerifyReport,
    classify,
    config_of,
    expected_follower_cost,
    instance_from_json_dict,
    instance_to_json_dict,
    is_nash,
    leader_cost,
    load_instance,
    dump_instance,
)

__version__ = "0.1.0"

__all__ = [
    "ClassFlags",
    "CostTable",
    "DeviationWitness",
    "GameInstance",
    "LeaderStrategy",
    "ValidationError",
    "VerifyReport",
    "classify",
    "config_of",
    "expected_follower_cost",
    "instance_from_json_dict",
    "instance_to_json_dict",
    "is_nash",
    "leader_cost",
    "load_instance",
    "dump_instance",
    "__version__",
]
