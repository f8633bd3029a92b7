"""CPT estimation by frequency counting with symmetric pseudocount smoothing.

Rows with a missing value in a node or any of its parents are excluded
from that node's counts only (available-case analysis); other tables
still use them. With pseudocount 0, a parent configuration that was
never observed yields a uniform row.
"""

from __future__ import annotations

from math import prod
from typing import Iterable

import numpy as np

from .data import Dataset, aligned_codes
from .errors import ColumnMismatch, EmptyDataset
from .network import Cpt, Network, NetworkStructure, _strides


def family_counts(
    structure: NetworkStructure, codes: np.ndarray, node: int
) -> np.ndarray:
    """Raw (n_parent_configs, n_states) counts for one node's family."""
    parents = structure.parents(node)
    cards = tuple(structure.variables[p].n_states for p in parents)
    n_states = structure.variables[node].n_states
    n_configs = prod(cards) if cards else 1

    family = (*parents, node)
    fam_codes = codes[:, family]
    ok = np.all(fam_codes >= 0, axis=1)
    fam_codes = fam_codes[ok]
    if len(parents):
        strides = np.array(_strides(cards), dtype=np.int64)
        cfg = fam_codes[:, :-1].astype(np.int64) @ strides
    else:
        cfg = np.zeros(len(fam_codes), dtype=np.int64)
    flat = cfg * n_states + fam_codes[:, -1]
    counts = np.bincount(flat, minlength=n_configs * n_states)
    return counts.reshape(n_configs, n_states).astype(np.float64)


def _estimate_one(
    structure: NetworkStructure, codes: np.ndarray, node: int, pseudocount: float
) -> Cpt:
    counts = family_counts(structure, codes, node) + pseudocount
    totals = counts.sum(axis=1, keepdims=True)
    n_states = counts.shape[1]
    rows = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), 1.0 / n_states)
    parents = structure.parents(node)
    cards = tuple(structure.variables[p].n_states for p in parents)
    return Cpt(node, parents, cards, rows, estimated=True)


def estimate_cpts(
    structure: NetworkStructure, data: Dataset, pseudocount: float = 1.0
) -> tuple[Cpt, ...]:
    """Estimate every node's CPT from the dataset.

    P(v=s | u) = (count(v=s, u) + pseudocount) / (count(u) + pseudocount * |states(v)|).
    """
    if pseudocount < 0:
        raise ValueError("pseudocount must be nonnegative")
    if data.n_rows == 0:
        raise EmptyDataset("cannot estimate CPTs from an empty dataset")
    codes = aligned_codes(structure.variables, data)
    return tuple(
        _estimate_one(structure, codes, node, pseudocount) for node in range(structure.n)
    )


def rebuild_affected(
    network: Network,
    data: Dataset,
    changed_nodes: Iterable[int],
    pseudocount: float = 1.0,
) -> Network:
    """Re-estimate only the named nodes' CPTs; all others carry over as-is."""
    changed = set(changed_nodes)
    if not changed:
        return network
    if not changed <= set(range(network.structure.n)):
        raise ColumnMismatch("changed nodes must be valid variable indices")
    if pseudocount < 0:
        raise ValueError("pseudocount must be nonnegative")
    if data.n_rows == 0:
        raise EmptyDataset("cannot estimate CPTs from an empty dataset")
    codes = aligned_codes(network.structure.variables, data)
    cpts = tuple(
        _estimate_one(network.structure, codes, i, pseudocount)
        if i in changed
        else network.cpts[i]
        for i in range(network.structure.n)
    )
    return Network(network.structure, cpts, network.class_var)
