"""Immutable discrete Bayesian networks: variables, DAG structure, CPTs.

All types here are frozen values; the edge operators return new networks
and never touch their inputs, so instances are safe to share across
threads.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import CycleWouldForm, CyclicStructure, EditInapplicable

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered set of state labels."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.name:
            raise ValueError("variable name must be nonempty")
        if len(self.states) < 2:
            raise ValueError(f"variable {self.name!r} needs >= 2 states")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"variable {self.name!r} has duplicate state labels")

    @property
    def n_states(self) -> int:
        return len(self.states)

    def state_index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise KeyError(f"{label!r} is not a state of {self.name!r}") from None


@dataclass(frozen=True)
class NetworkStructure:
    """Directed graph over an ordered variable list.

    Endpoint validity, self-loops and duplicate edges are rejected at
    construction; acyclicity is a query (`detect_cycle`) so that cyclic
    graphs can be represented and reported on.
    """

    variables: tuple[Variable, ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique within a network")
        edge_list = [(int(p), int(c)) for p, c in self.edges]
        n = len(variables)
        for p, c in edge_list:
            if not (0 <= p < n and 0 <= c < n):
                raise ValueError(f"edge ({p}, {c}) references an unknown variable index")
            if p == c:
                raise ValueError(f"self-loop on variable index {p}")
        if len(set(edge_list)) != len(edge_list):
            raise ValueError("duplicate edges are not allowed")
        object.__setattr__(self, "edges", frozenset(edge_list))

    @property
    def n(self) -> int:
        return len(self.variables)

    @cached_property
    def _parent_map(self) -> tuple[tuple[int, ...], ...]:
        parents: list[list[int]] = [[] for _ in range(self.n)]
        for p, c in self.edges:
            parents[c].append(p)
        return tuple(tuple(sorted(ps)) for ps in parents)

    @cached_property
    def _child_map(self) -> tuple[tuple[int, ...], ...]:
        children: list[list[int]] = [[] for _ in range(self.n)]
        for p, c in self.edges:
            children[p].append(c)
        return tuple(tuple(sorted(cs)) for cs in children)

    def parents(self, node: int) -> tuple[int, ...]:
        return self._parent_map[node]

    def children(self, node: int) -> tuple[int, ...]:
        return self._child_map[node]

    @property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(f"no variable named {name!r}")

    def edge_between(self, a: int, b: int) -> tuple[int, int] | None:
        """The existing edge between the pair in either direction, if any."""
        if (a, b) in self.edges:
            return (a, b)
        if (b, a) in self.edges:
            return (b, a)
        return None

    def with_edges(self, edges: Iterable[tuple[int, int]]) -> "NetworkStructure":
        return NetworkStructure(self.variables, frozenset(edges))


def detect_cycle(structure: NetworkStructure) -> bool:
    """True iff the directed graph contains a cycle.

    Iterative three-color depth-first search; nodes and successors are
    visited in ascending index order, so the traversal is deterministic.
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * structure.n
    for start in range(structure.n):
        if color[start] != WHITE:
            continue
        stack: list[tuple[int, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            node, pos = stack[-1]
            succ = structure.children(node)
            if pos < len(succ):
                stack[-1] = (node, pos + 1)
                nxt = succ[pos]
                if color[nxt] == GRAY:
                    return True
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return False


def topological_order(structure: NetworkStructure) -> tuple[int, ...]:
    """Parents before children; ties broken by ascending variable index."""
    indegree = [len(structure.parents(i)) for i in range(structure.n)]
    ready = [i for i in range(structure.n) if indegree[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for child in structure.children(node):
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(ready, child)
    if len(order) != structure.n:
        raise CyclicStructure("graph contains a cycle; no topological order exists")
    return tuple(order)


def markov_blanket(structure: NetworkStructure, node: int) -> tuple[int, ...]:
    """Parents, children, and children's other parents, ascending."""
    if not (0 <= node < structure.n):
        raise ValueError(f"node index {node} out of range")
    blanket: set[int] = set(structure.parents(node))
    for child in structure.children(node):
        blanket.add(child)
        blanket.update(p for p in structure.parents(child) if p != node)
    blanket.discard(node)
    return tuple(sorted(blanket))


def _strides(cards: Sequence[int]) -> tuple[int, ...]:
    # Row-major layout: the last parent varies fastest.
    out = []
    acc = 1
    for c in reversed(cards):
        out.append(acc)
        acc *= c
    return tuple(reversed(out))


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table for one node.

    Parent axes are ordered by ascending variable index and enumerated
    row-major with the last parent varying fastest. `rows` has one row
    per parent configuration (a single row when parentless) and one
    column per owner state.
    """

    owner: int
    parents: tuple[int, ...]
    parent_cards: tuple[int, ...]
    rows: np.ndarray
    estimated: bool = True

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))
        object.__setattr__(self, "parent_cards", tuple(int(c) for c in self.parent_cards))
        if list(self.parents) != sorted(set(self.parents)):
            raise ValueError("cpt parents must be strictly ascending variable indices")
        if len(self.parents) != len(self.parent_cards):
            raise ValueError("one cardinality per parent required")
        rows = np.array(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("cpt rows must be a 2-d table")
        expected = prod(self.parent_cards) if self.parents else 1
        if rows.shape[0] != expected:
            raise ValueError(
                f"cpt for node {self.owner} has {rows.shape[0]} rows, "
                f"expected {expected}"
            )
        if np.any(rows < 0.0) or np.any(rows > 1.0):
            raise ValueError("cpt probabilities must lie in [0, 1]")
        sums = rows.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            worst = int(np.argmax(np.abs(sums - 1.0)))
            raise ValueError(
                f"cpt row {worst} for node {self.owner} sums to {sums[worst]!r}"
            )
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n_states(self) -> int:
        return int(self.rows.shape[1])

    @property
    def n_configs(self) -> int:
        return int(self.rows.shape[0])

    @cached_property
    def strides(self) -> tuple[int, ...]:
        return _strides(self.parent_cards)

    def config_index(self, parent_states: Sequence[int]) -> int:
        return sum(s * st for s, st in zip(parent_states, self.strides))

    def config_tuples(self) -> Iterable[tuple[int, ...]]:
        """Enumerate parent configurations in row order."""
        if not self.parents:
            yield ()
            return
        for idx in np.ndindex(*self.parent_cards):
            yield tuple(int(i) for i in idx)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cpt):
            return NotImplemented
        return (
            self.owner == other.owner
            and self.parents == other.parents
            and self.parent_cards == other.parent_cards
            and self.estimated == other.estimated
            and np.array_equal(self.rows, other.rows)
        )


def uniform_cpt(
    structure: NetworkStructure, node: int, estimated: bool = False
) -> Cpt:
    """Placeholder CPT laid out for the node's current parent set."""
    parents = structure.parents(node)
    cards = tuple(structure.variables[p].n_states for p in parents)
    n_states = structure.variables[node].n_states
    n_configs = prod(cards) if cards else 1
    rows = np.full((n_configs, n_states), 1.0 / n_states)
    return Cpt(node, parents, cards, rows, estimated=estimated)


@dataclass(frozen=True, eq=False)
class Network:
    """A DAG structure plus one CPT per variable and a class variable."""

    structure: NetworkStructure
    cpts: tuple[Cpt, ...]
    class_var: int

    def __post_init__(self):
        object.__setattr__(self, "cpts", tuple(self.cpts))
        s = self.structure
        if detect_cycle(s):
            raise CyclicStructure("network structure must be acyclic")
        if len(self.cpts) != s.n:
            raise ValueError("exactly one cpt per variable required")
        if not (0 <= self.class_var < s.n):
            raise ValueError(f"class variable index {self.class_var} out of range")
        for i, cpt in enumerate(self.cpts):
            if cpt.owner != i:
                raise ValueError(f"cpt at position {i} owned by node {cpt.owner}")
            expected_parents = s.parents(i)
            if cpt.parents != expected_parents:
                raise ValueError(
                    f"cpt for node {i} laid out for parents {cpt.parents}, "
                    f"structure has {expected_parents}"
                )
            cards = tuple(s.variables[p].n_states for p in cpt.parents)
            if cpt.parent_cards != cards:
                raise ValueError(f"cpt for node {i} has wrong parent cardinalities")
            if cpt.n_states != s.variables[i].n_states:
                raise ValueError(f"cpt for node {i} has wrong state count")

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.structure.variables

    @property
    def class_variable(self) -> Variable:
        return self.structure.variables[self.class_var]

    @property
    def fully_estimated(self) -> bool:
        return all(c.estimated for c in self.cpts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.structure == other.structure
            and self.class_var == other.class_var
            and self.cpts == other.cpts
        )


class EditKind(str, Enum):
    ADD = "add"
    REMOVE = "remove"
    REVERSE = "reverse"


class AddDirection(str, Enum):
    A_TO_B = "a_to_b"
    B_TO_A = "b_to_a"


@dataclass(frozen=True)
class CandidateEdit:
    """One structural edit on a node pair, plus its draw position."""

    kind: EditKind
    node_a: int
    node_b: int
    direction: AddDirection | None = None
    sequence_index: int = 0

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise ValueError("edit endpoints must be distinct")
        if (self.kind == EditKind.ADD) != (self.direction is not None):
            raise ValueError("direction is required for add edits and only for them")
        if self.sequence_index < 0:
            raise ValueError("sequence index must be nonnegative")


def edited_structure(
    structure: NetworkStructure, edit: CandidateEdit
) -> tuple[NetworkStructure, frozenset[int]]:
    """The edited structure plus the nodes whose parent set changed.

    Raises EditInapplicable when the edge precondition fails and
    CycleWouldForm when the edited graph would be cyclic.
    """
    a, b = edit.node_a, edit.node_b
    if not (0 <= a < structure.n and 0 <= b < structure.n):
        raise ValueError("edit references an unknown variable index")
    existing = structure.edge_between(a, b)

    if edit.kind == EditKind.ADD:
        if existing is not None:
            raise EditInapplicable(
                f"an edge already exists between nodes {a} and {b}"
            )
        new_edge = (a, b) if edit.direction == AddDirection.A_TO_B else (b, a)
        new_edges = set(structure.edges)
        new_edges.add(new_edge)
        changed = {new_edge[1]}
    elif edit.kind == EditKind.REMOVE:
        if existing is None:
            raise EditInapplicable(f"no edge exists between nodes {a} and {b}")
        new_edges = set(structure.edges)
        new_edges.remove(existing)
        changed = {existing[1]}
    else:
        if existing is None:
            raise EditInapplicable(f"no edge exists between nodes {a} and {b}")
        new_edges = set(structure.edges)
        new_edges.remove(existing)
        new_edges.add((existing[1], existing[0]))
        changed = {existing[0], existing[1]}

    new_structure = structure.with_edges(new_edges)
    if edit.kind != EditKind.REMOVE and detect_cycle(new_structure):
        raise CycleWouldForm(
            f"{edit.kind.value} between nodes {a} and {b} would create a cycle"
        )
    return new_structure, frozenset(changed)


def apply_edit(network: Network, edit: CandidateEdit) -> Network:
    """Apply one edit, returning a new network.

    CPTs of every node whose parent set changed are reset to uniform
    placeholders (marked unestimated); all others are carried over
    unchanged. Raises EditInapplicable when the edge precondition fails
    and CycleWouldForm when the edited graph would be cyclic.
    """
    new_structure, changed = edited_structure(network.structure, edit)
    cpts = [
        uniform_cpt(new_structure, i) if i in changed else network.cpts[i]
        for i in range(network.structure.n)
    ]
    return Network(new_structure, tuple(cpts), network.class_var)
