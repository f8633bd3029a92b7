"""Reference structure learners: K2 and tree-augmented naive Bayes.

K2 greedily adds parents along a fixed variable ordering, scored by the
Cooper-Herskovits marginal likelihood in log space. TAN builds the
maximum-weight spanning tree over attributes using class-conditional
mutual information (Chow-Liu) on top of a naive Bayes skeleton.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np
from scipy.special import gammaln

from .data import Dataset
from .errors import EmptyDataset, InvalidOrdering
from .learning import estimate_cpts
from .network import Network, NetworkStructure, Variable


def _variables_from_data(data: Dataset) -> tuple[Variable, ...]:
    return tuple(Variable(c.name, c.states) for c in data.columns)


def naive_bayes_structure(data: Dataset) -> NetworkStructure:
    """Class variable as sole parent of every attribute."""
    variables = _variables_from_data(data)
    cls = data.class_index
    edges = frozenset((cls, i) for i in range(len(variables)) if i != cls)
    return NetworkStructure(variables, edges)


@dataclass(frozen=True)
class K2Config:
    max_parents: int = 1
    ordering: tuple[str, ...] | None = None  # default: class first, then column order
    start_naive: bool = True

    def __post_init__(self):
        if self.max_parents < 1:
            raise ValueError("max_parents must be >= 1")
        if self.ordering is not None:
            object.__setattr__(self, "ordering", tuple(self.ordering))


def _family_log_score(counts: np.ndarray) -> float:
    """Cooper-Herskovits log marginal likelihood of one node's family.

    counts: (n_parent_configs, n_states) raw frequencies.
    """
    r = counts.shape[1]
    n_ij = counts.sum(axis=1)
    return float(
        np.sum(gammaln(r) - gammaln(n_ij + r)) + np.sum(gammaln(counts + 1.0))
    )


def _counts_for(codes: np.ndarray, node: int, parents: tuple[int, ...], cards: np.ndarray) -> np.ndarray:
    family = (*parents, node)
    fam = codes[:, family]
    fam = fam[np.all(fam >= 0, axis=1)]
    shape = [int(cards[p]) for p in parents] + [int(cards[node])]
    n_cfg = prod(shape[:-1]) if parents else 1
    if len(fam) == 0:
        return np.zeros((n_cfg, shape[-1]))
    flat = np.zeros(len(fam), dtype=np.int64)
    for i in range(fam.shape[1]):
        flat = flat * shape[i] + fam[:, i]
    counts = np.bincount(flat, minlength=n_cfg * shape[-1])
    return counts.reshape(n_cfg, shape[-1]).astype(np.float64)


def learn_k2(data: Dataset, config: K2Config = K2Config(), pseudocount: float = 1.0) -> Network:
    """Greedy parent selection along the ordering, one best parent at a time.

    With ``start_naive`` every attribute begins with the class as parent
    and that edge counts toward ``max_parents``. Parents are added only
    on strict score improvement; score ties keep the earlier candidate
    in the ordering.
    """
    if data.n_rows == 0:
        raise EmptyDataset("cannot learn a structure from an empty dataset")
    variables = _variables_from_data(data)
    names = [v.name for v in variables]
    cls = data.class_index

    if config.ordering is None:
        ordering = [names[cls]] + [n for n in names if n != names[cls]]
    else:
        ordering = list(config.ordering)
    if sorted(ordering) != sorted(names):
        raise InvalidOrdering("ordering must be a permutation of the variable names")
    if config.start_naive and ordering[0] != names[cls]:
        raise InvalidOrdering("the class variable must come first when starting naive")

    order_idx = [names.index(n) for n in ordering]
    codes = data.codes.astype(np.int64)
    cards = np.array([len(c.states) for c in data.columns])

    edges: set[tuple[int, int]] = set()
    for pos, node in enumerate(order_idx):
        predecessors = order_idx[:pos]
        parents: list[int] = []
        if config.start_naive and node != cls:
            parents.append(cls)
        current = _family_log_score(
            _counts_for(codes, node, tuple(sorted(parents)), cards)
        )
        while len(parents) < config.max_parents:
            best_gain, best_parent = 0.0, None
            for cand in predecessors:
                if cand in parents or cand == node:
                    continue
                trial = tuple(sorted(parents + [cand]))
                score = _family_log_score(_counts_for(codes, node, trial, cards))
                if score - current > best_gain:
                    best_gain, best_parent = score - current, cand
            if best_parent is None:
                break
            parents.append(best_parent)
            current += best_gain
        edges.update((p, node) for p in parents)

    structure = NetworkStructure(variables, frozenset(edges))
    return Network(structure, estimate_cpts(structure, data, pseudocount), cls)


@dataclass(frozen=True, eq=False)
class MutualInfoTable:
    """Pairwise class-conditional mutual information over attributes, in nats."""

    attributes: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (len(self.attributes),) * 2:
            raise ValueError("square table over the attributes required")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def get(self, a: str, b: str) -> float:
        i = self.attributes.index(a)
        j = self.attributes.index(b)
        return float(self.values[i, j])


def _pair_cmi(codes: np.ndarray, i: int, j: int, c: int, cards: np.ndarray) -> float:
    """Plug-in I(Xi; Xj | C): unsmoothed frequencies, 0 * ln(0/.) = 0."""
    cols = codes[:, (i, j, c)]
    cols = cols[np.all(cols >= 0, axis=1)]
    if len(cols) == 0:
        return 0.0
    ni, nj, nc = int(cards[i]), int(cards[j]), int(cards[c])
    flat = (cols[:, 0] * nj + cols[:, 1]) * nc + cols[:, 2]
    n_xyc = np.bincount(flat, minlength=ni * nj * nc).reshape(ni, nj, nc).astype(np.float64)
    n = n_xyc.sum()
    n_xc = n_xyc.sum(axis=1)  # (ni, nc)
    n_yc = n_xyc.sum(axis=0)  # (nj, nc)
    n_c = n_xyc.sum(axis=(0, 1))  # (nc,)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (
            n_xyc * n_c[None, None, :] / (n_xc[:, None, :] * n_yc[None, :, :])
        )
        terms = np.where(n_xyc > 0, n_xyc * np.log(ratio), 0.0)
    return float(terms.sum() / n)


def conditional_mutual_info(data: Dataset) -> MutualInfoTable:
    """I(Xi; Xj | class) for every attribute pair; exactly symmetric.

    The diagonal carries the self-information I(X; X | C) = H(X | C).
    Rows missing either attribute or the class are excluded per pair.
    """
    if data.n_rows == 0:
        raise EmptyDataset("cannot estimate mutual information from an empty dataset")
    cls = data.class_index
    attrs = [i for i in range(len(data.columns)) if i != cls]
    if len(attrs) < 2:
        raise ValueError("conditional mutual information needs >= 2 attributes")
    codes = data.codes.astype(np.int64)
    cards = np.array([len(c.states) for c in data.columns])
    m = len(attrs)
    table = np.zeros((m, m))
    for a in range(m):
        for b in range(a, m):
            v = _pair_cmi(codes, attrs[a], attrs[b], cls, cards)
            table[a, b] = v
            table[b, a] = v
    return MutualInfoTable(tuple(data.columns[i].name for i in attrs), table)


def learn_tan(data: Dataset, pseudocount: float = 1.0) -> Network:
    """Naive Bayes plus a CMI-weighted maximum spanning tree over attributes.

    Kruskal with ties broken by lexicographic attribute-name pairs; the
    tree is rooted at the first attribute in column order and its edges
    directed away from the root.
    """
    cmi = conditional_mutual_info(data)
    variables = _variables_from_data(data)
    names = [v.name for v in variables]
    cls = data.class_index
    attrs = [i for i in range(len(variables)) if i != cls]
    m = len(attrs)

    pairs = []
    for a in range(m):
        for b in range(a + 1, m):
            name_key = tuple(sorted((cmi.attributes[a], cmi.attributes[b])))
            pairs.append((-cmi.values[a, b], name_key, a, b))
    pairs.sort()

    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adjacency: list[list[int]] = [[] for _ in range(m)]
    taken = 0
    for _, _, a, b in pairs:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        parent[ra] = rb
        adjacency[a].append(b)
        adjacency[b].append(a)
        taken += 1
        if taken == m - 1:
            break

    edges: set[tuple[int, int]] = {(cls, i) for i in attrs}
    visited = [False] * m
    queue = [0]  # first attribute in column order is the root
    visited[0] = True
    while queue:
        node = queue.pop(0)
        for nxt in sorted(adjacency[node]):
            if not visited[nxt]:
                visited[nxt] = True
                edges.add((attrs[node], attrs[nxt]))
                queue.append(nxt)

    structure = NetworkStructure(variables, frozenset(edges))
    return Network(structure, estimate_cpts(structure, data, pseudocount), cls)
