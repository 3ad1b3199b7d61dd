"""Generic single-player Monte Carlo tree search with UCT selection.

Problems plug in via MctsProblem: a successor relation, transition weights
that bias random playouts, a reward in [0, 1] and a success test. One search
iteration selects a tree node by UCT, draws one of its unexplored successor
states (weight-biased), runs a non-backtracking random playout from it, adds
a single new leaf, and backpropagates the playout reward to the root. Nodes
left with neither children nor unexplored successors are deleted, so hopeless
subtrees stop attracting exploration; a fully deleted tree means the whole
space was searched.

Bookkeeping note: every node except the root receives one visit when it is
created, so for consistency checks

    visits == (0 if root else 1) + sum(child visits) + deleted_visits

where deleted_visits accumulates the visit counts of deleted children.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass


class MctsProblem:
    """Base class for pluggable problem definitions. Implementations must be
    pure over immutable states; the engine may call them in any order."""

    def initial_state(self):
        raise NotImplementedError

    def successors(self, state) -> list:
        raise NotImplementedError

    def transition_weight(self, state, successor) -> float:
        return 1.0

    def weights(self, state, candidates) -> list:
        """Batch form of transition_weight; override when weights need the
        whole candidate cohort to be computed efficiently."""
        return [self.transition_weight(state, s) for s in candidates]

    def reward(self, state) -> float:
        raise NotImplementedError

    def is_success(self, state) -> bool:
        raise NotImplementedError

    def openness(self, state) -> int:
        """Number of open subgoals, used by best-node expansion. Problems
        without such a notion may keep the constant default."""
        return 0


@dataclass
class SearchConfig:
    cp_base: float = 1.0 / math.sqrt(2.0)
    cp_amplitude: float = 0.0
    cp_period: float = 0.0
    max_sim_depth: int = 20
    max_iterations: int | None = None
    time_budget: float | None = None
    expansion: str = "first"  # first | best
    seed: int = 0
    reward_goal: float | None = None

    def validate(self):
        if self.cp_base <= 0:
            raise ValueError("exploration constant must be positive")
        if self.cp_amplitude < 0:
            raise ValueError("oscillation amplitude must be nonnegative")
        if self.cp_amplitude >= self.cp_base:
            raise ValueError("oscillation amplitude must stay below the base constant")
        if self.cp_amplitude > 0 and self.cp_period <= 0:
            raise ValueError("oscillation requires a positive period")
        if self.max_sim_depth < 1:
            raise ValueError("simulation depth must be at least 1")
        if self.expansion not in ("first", "best"):
            raise ValueError(f"unknown expansion policy {self.expansion!r}")


def uct_value(mean: float, visits: int, parent_visits: int, cp: float) -> float:
    return mean + cp * math.sqrt(2.0 * math.log(parent_visits) / visits)


def cp_schedule(iteration: int, config: SearchConfig) -> float:
    if config.cp_amplitude == 0:
        return config.cp_base
    return config.cp_base + config.cp_amplitude * math.sin(
        2.0 * math.pi * iteration / config.cp_period
    )


def draw_index(rng: random.Random, weights) -> int:
    total = 0.0
    for w in weights:
        if w <= 0:
            raise ValueError("transition weights must be positive")
        total += w
    x = rng.random() * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if x < acc:
            return i
    return len(weights) - 1


def simulate(start, problem: MctsProblem, max_depth: int, rng: random.Random):
    """Random playout from `start`, no backtracking. Returns the sequence of
    states after `start` plus whether the last state reached is a success."""
    trajectory = []
    state = start
    while len(trajectory) < max_depth:
        if problem.is_success(state):
            break
        succs = problem.successors(state)
        if not succs:
            break
        if len(succs) == 1:
            state = succs[0]
        else:
            state = succs[draw_index(rng, problem.weights(state, succs))]
        trajectory.append(state)
    return trajectory, problem.is_success(state)


class MctsNode:
    __slots__ = ("state", "parent", "children", "unexplored", "visits", "reward_sum", "deleted_visits")

    def __init__(self, state, parent=None):
        self.state = state
        self.parent = parent
        self.children: list = []
        self.unexplored: list = []
        self.visits = 0
        self.reward_sum = 0.0
        self.deleted_visits = 0

    @property
    def mean(self) -> float:
        return self.reward_sum / self.visits


@dataclass
class SearchStats:
    iterations: int = 0
    simulations: int = 0
    deletions: int = 0
    nodes_created: int = 0
    max_tree_depth: int = 0
    wall_time: float = 0.0
    best_reward: float = -1.0
    best_state: object = None


class MctsTree:
    def __init__(self, problem: MctsProblem, root_state):
        self.problem = problem
        self.root = MctsNode(root_state)
        self.root.unexplored = list(problem.successors(root_state))
        self.stats = SearchStats(nodes_created=1)

    @property
    def exhausted(self) -> bool:
        return not self.root.unexplored and not self.root.children


def mcts_step(tree: MctsTree, config: SearchConfig, rng: random.Random, iteration: int):
    """One selection/simulation/expansion/backpropagation round.

    Returns the list of states from the root to a success state when the
    playout finished a solution, else None.
    """
    problem = tree.problem
    stats = tree.stats
    cp = cp_schedule(iteration, config)

    node = tree.root
    depth = 0
    while not node.unexplored:
        if not node.children:
            return None  # dead root; run() reports exhaustion
        parent_visits = node.visits
        node = max(
            node.children,
            key=lambda c: uct_value(c.reward_sum / c.visits, c.visits, parent_visits, cp),
        )
        depth += 1

    if len(node.unexplored) == 1:
        idx = 0
    else:
        idx = draw_index(rng, problem.weights(node.state, node.unexplored))
    action_state = node.unexplored.pop(idx)

    trajectory, success = simulate(action_state, problem, config.max_sim_depth, rng)
    stats.simulations += 1
    chain = [action_state] + trajectory
    final = chain[-1]
    reward = problem.reward(final)
    if not 0.0 <= reward <= 1.0:
        raise ValueError(f"reward {reward} outside [0, 1]")

    if config.expansion == "best":
        pick = min(range(len(chain)), key=lambda i: (problem.openness(chain[i]), i))
        child_state = chain[pick]
    else:
        child_state = chain[0]
    child = MctsNode(child_state, parent=node)
    if not problem.is_success(child_state):
        child.unexplored = list(problem.successors(child_state))
    node.children.append(child)
    stats.nodes_created += 1
    if depth + 1 > stats.max_tree_depth:
        stats.max_tree_depth = depth + 1

    walk = child
    while walk is not None:
        walk.visits += 1
        walk.reward_sum += reward
        walk = walk.parent

    if reward > stats.best_reward:
        stats.best_reward = reward
        stats.best_state = final

    dead = child
    while dead.parent is not None and not dead.unexplored and not dead.children:
        parent = dead.parent
        parent.children.remove(dead)
        parent.deleted_visits += dead.visits
        stats.deletions += 1
        dead = parent

    if success:
        prefix = []
        walk = node
        while walk.parent is not None:
            prefix.append(walk.state)
            walk = walk.parent
        prefix.reverse()
        return prefix + chain
    return None


@dataclass
class Solution:
    final_state: object
    trajectory: list
    by_reward_goal: bool = False


@dataclass
class Exhausted:
    pass


@dataclass
class BudgetSpent:
    reason: str


@dataclass
class MctsResult:
    outcome: Solution | Exhausted | BudgetSpent
    stats: SearchStats

    @property
    def solved(self) -> bool:
        return isinstance(self.outcome, Solution)


def run(problem: MctsProblem, config: SearchConfig | None = None, stop=None) -> MctsResult:
    """Iterate mcts_step until a solution, exhaustion, or a spent budget.

    The random stream is a single seeded generator per search, consumed only
    by the unexplored-action draw and the playout steps, so equal seeds give
    identical traces.
    """
    config = config or SearchConfig()
    config.validate()
    started = time.monotonic()
    rng = random.Random(config.seed)

    init = problem.initial_state()
    if problem.is_success(init):
        stats = SearchStats(best_reward=problem.reward(init), best_state=init)
        stats.wall_time = time.monotonic() - started
        return MctsResult(Solution(init, []), stats)

    tree = MctsTree(problem, init)
    stats = tree.stats
    deadline = started + config.time_budget if config.time_budget else None
    iteration = 0
    while True:
        if tree.exhausted:
            outcome: Solution | Exhausted | BudgetSpent = Exhausted()
            break
        if config.max_iterations is not None and iteration >= config.max_iterations:
            outcome = BudgetSpent("iterations")
            break
        if deadline is not None and time.monotonic() > deadline:
            outcome = BudgetSpent("time")
            break
        if stop is not None and stop():
            outcome = BudgetSpent("stopped")
            break
        iteration += 1
        stats.iterations = iteration
        solved_path = mcts_step(tree, config, rng, iteration)
        if solved_path is not None:
            outcome = Solution(solved_path[-1], solved_path)
            break
        if config.reward_goal is not None and stats.best_reward >= config.reward_goal:
            outcome = Solution(stats.best_state, [], by_reward_goal=True)
            break
    stats.wall_time = time.monotonic() - started
    return MctsResult(outcome, stats)
