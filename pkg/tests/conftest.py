"""Shared fixtures: small hand-checked games used throughout the suite.

Each game is tiny enough to verify on paper; the expected equilibrium
values asserted in the tests were derived by exhaustive enumeration by hand
before the solvers existed, so they are independent of the code under test.
"""

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from leadcon.model import GameInstance


@pytest.fixture
def two_road_game() -> GameInstance:
    """One follower, two roads; the pessimistic optimum is an unattained
    infimum (value 1, approached as the commitment nears the fifty-fifty
    split, where the worst stable outcome jumps to 2)."""
    return GameInstance.build(
        resources=["r1", "r2"],
        follower_count=1,
        leader_actions="ALL",
        follower_actions=["ALL"],
        leader_costs={"r1": [2, 0], "r2": [2, 2]},
        follower_costs={"r1": [1, 2], "r2": [1, 2]},
    )


@pytest.fixture
def three_road_game() -> GameInstance:
    """Three followers, three resources, weakly increasing costs.  The spread
    configuration (1,1,1) is stable only under a mixed commitment, and the
    best achievable leader cost is 2."""
    return GameInstance.build(
        resources=["r1", "r2", "r3"],
        follower_count=3,
        leader_actions="ALL",
        follower_actions=["ALL"] * 3,
        leader_costs={"r1": [1, 2, 3], "r2": [3, 4, 5], "r3": [1, 2, 3]},
        follower_costs={"r1": [1, 3, 6], "r2": [4, 5, 6], "r3": [1, 3, 6]},
    )


@pytest.fixture
def mirror_game() -> GameInstance:
    """Constant follower costs make every outcome stable, so an adversarial
    follower mirrors the leader: pure commitments cost 2, the uniform mix
    drops the worst case to 3/2 (and that optimum is attained)."""
    return GameInstance.build(
        resources=["r1", "r2"],
        follower_count=1,
        leader_actions="ALL",
        follower_actions=["ALL"],
        leader_costs={"r1": [1, 2], "r2": [1, 2]},
        follower_costs={"r1": [1, 1], "r2": [1, 1]},
    )


@pytest.fixture
def valley_game() -> GameInstance:
    """Follower costs decrease with congestion (2 then 1), so the follower
    chases the leader; the optimistic optimum 3/2 needs the uniform mix."""
    return GameInstance.build(
        resources=["r1", "r2"],
        follower_count=1,
        leader_actions="ALL",
        follower_actions=["ALL"],
        leader_costs={"r1": [1, 2], "r2": [1, 2]},
        follower_costs={"r1": [2, 1], "r2": [2, 1]},
    )


@pytest.fixture
def fork_game() -> GameInstance:
    """Two followers with overlapping two-resource menus and a leader limited
    to r1/r2.  Every pure commitment costs 1; splitting evenly across r1/r2
    stabilizes (p1 on r2, p2 on r3) for a cost of 1/2."""
    return GameInstance.build(
        resources=["r1", "r2", "r3"],
        follower_count=2,
        leader_actions=["r1", "r2"],
        follower_actions=[["r1", "r2"], ["r2", "r3"]],
        leader_costs={"r1": [0, 1, 1], "r2": [1, 1, 1], "r3": [0, 0, 0]},
        follower_costs={"r1": [1, 1, 1], "r2": [0, 2, 4], "r3": [3, 3, 3]},
    )


TWO_CLAUSE_CNF = """c tiny satisfiable formula
p cnf 3 2
1 2 3 0
-1 2 -3 0
"""


# ---------------------------------------------------------------------------
# hypothesis strategies for random games
# ---------------------------------------------------------------------------


def cost_values(length: int, mono: str | None):
    base = st.lists(
        st.integers(min_value=0, max_value=12), min_size=length, max_size=length
    )
    if mono == "weak":
        return base.map(sorted)
    if mono == "strict":
        return st.lists(
            st.integers(min_value=1, max_value=60),
            min_size=length,
            max_size=length,
            unique=True,
        ).map(sorted)
    return base


@st.composite
def game_instances(
    draw,
    max_followers: int = 5,
    max_resources: int = 4,
    symmetric: bool = True,
    follower_mono: str | None = None,
    leader_mono: str | None = None,
):
    r = draw(st.integers(min_value=1, max_value=max_resources))
    f = draw(st.integers(min_value=0, max_value=max_followers))
    n = f + 1
    names = [f"r{k + 1}" for k in range(r)]
    lcost = {nm: draw(cost_values(n, leader_mono)) for nm in names}
    fcost = {nm: draw(cost_values(n, follower_mono)) for nm in names}
    if symmetric:
        leader_acts = "ALL"
        follower_acts = ["ALL"] * f
    else:
        subset = st.lists(
            st.integers(min_value=0, max_value=r - 1),
            min_size=1,
            max_size=r,
            unique=True,
        )
        leader_acts = draw(subset)
        follower_acts = [draw(subset) for _ in range(f)]
    return GameInstance.build(
        resources=names,
        follower_count=f,
        leader_actions=leader_acts,
        follower_actions=follower_acts,
        leader_costs=lcost,
        follower_costs=fcost,
    )
