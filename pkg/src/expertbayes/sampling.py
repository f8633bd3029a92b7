"""Forward sampling of rows from a network; used to build synthetic datasets."""

from __future__ import annotations

from .data import Column, Dataset
from .network import Network, topological_order
from .prng import SplitMix64


def forward_sample(network: Network, n_rows: int, seed: int) -> Dataset:
    """Draw complete rows by ancestral sampling (deterministic in seed)."""
    s = network.structure
    order = topological_order(s)
    names = [v.name for v in s.variables]
    rng = SplitMix64(seed)
    rows = []
    for _ in range(n_rows):
        states = [0] * s.n
        for node in order:
            cpt = network.cpts[node]
            cfg = cpt.config_index([states[p] for p in cpt.parents])
            u = rng.float53()
            acc = 0.0
            pick = cpt.n_states - 1
            for k in range(cpt.n_states):
                acc += cpt.rows[cfg, k]
                if u < acc:
                    pick = k
                    break
            states[node] = pick
        rows.append(tuple(s.variables[i].states[states[i]] for i in range(s.n)))
    columns = tuple(Column(name, s.variables[i].states) for i, name in enumerate(names))
    return Dataset(columns, tuple(rows), s.variables[network.class_var].name)
