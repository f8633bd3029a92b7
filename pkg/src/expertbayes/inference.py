"""Exact class-posterior computation.

Posteriors are computed by log-space variable elimination restricted to
the class variable's connected component; when every non-class variable
in that component is observed, the computation collapses to the Markov
blanket product. Unobserved variables are marginalized, never imputed.
If the evidence has zero probability under the model (possible with
pseudocount 0), the posterior is defined as uniform over class states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import logsumexp

from .data import Dataset, aligned_codes
from .errors import InvalidEvidenceLabel, NonBinaryClass, UnestimatedCpt
from .network import Network, topological_order

_Factor = tuple[tuple[int, ...], np.ndarray]  # (sorted scope, log table)


@dataclass(frozen=True)
class Posterior:
    """Distribution over the class variable's states."""

    class_states: tuple[str, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "class_states", tuple(self.class_states))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if len(self.class_states) != len(self.probabilities):
            raise ValueError("one probability per class state required")
        if any(p < 0.0 or p > 1.0 for p in self.probabilities):
            raise ValueError("posterior probabilities must lie in [0, 1]")
        if abs(sum(self.probabilities) - 1.0) > 1e-9:
            raise ValueError("posterior must be normalized")

    def probability_of(self, label: str) -> float:
        return self.probabilities[self.class_states.index(label)]


def class_component(network: Network) -> tuple[int, ...]:
    """Variables connected (ignoring edge direction) to the class variable."""
    s = network.structure
    seen = {network.class_var}
    frontier = [network.class_var]
    while frontier:
        node = frontier.pop()
        for nxt in (*s.parents(node), *s.children(node)):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return tuple(sorted(seen))


def _require_estimated(network: Network) -> None:
    for i, cpt in enumerate(network.cpts):
        if not cpt.estimated:
            raise UnestimatedCpt(
                f"cpt for {network.variables[i].name!r} has not been estimated"
            )


def _log_table(network: Network, node: int) -> _Factor:
    """The node's CPT as a log factor over its sorted family scope."""
    cpt = network.cpts[node]
    with np.errstate(divide="ignore"):
        table = np.log(cpt.rows)
    axes = (*cpt.parents, node)
    table = table.reshape(*cpt.parent_cards, cpt.n_states)
    scope = tuple(sorted(axes))
    table = np.transpose(table, [axes.index(u) for u in scope])
    return scope, table


def _reduce(factor: _Factor, observed: Mapping[int, int]) -> _Factor:
    scope, table = factor
    new_scope = []
    axis = 0
    for u in scope:
        if u in observed:
            table = np.take(table, observed[u], axis=axis)
        else:
            new_scope.append(u)
            axis += 1
    return tuple(new_scope), table


def _multiply(factors: list[_Factor], card: np.ndarray) -> _Factor:
    scope = tuple(sorted(set().union(*(f[0] for f in factors))))
    acc = np.zeros([int(card[u]) for u in scope])
    for fs, tbl in factors:
        shape = [int(card[u]) if u in fs else 1 for u in scope]
        acc = acc + tbl.reshape(shape)
    return scope, acc


def _ve_log_posterior(network: Network, observed: Mapping[int, int]) -> np.ndarray:
    """Log posterior over class states for one observation map.

    Unobserved non-class variables are eliminated in reverse topological
    order (leaves first), which is deterministic and keeps intermediate
    factors small on the sparse structures this tool targets.
    """
    s = network.structure
    cls = network.class_var
    card = np.array([v.n_states for v in s.variables])
    comp = class_component(network)
    factors = [_reduce(_log_table(network, v), observed) for v in comp]
    to_eliminate = {v for v in comp if v != cls and v not in observed}

    for v in reversed(topological_order(s)):
        if v not in to_eliminate:
            continue
        group = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        scope, tbl = _multiply(group, card)
        axis = scope.index(v)
        tbl = logsumexp(tbl, axis=axis)
        factors.append((tuple(u for u in scope if u != v), tbl))

    scope, tbl = _multiply(factors, card)
    if scope == ():
        # Class observed is rejected upstream; scope can only be (cls,).
        raise AssertionError("class variable vanished from the elimination")
    return tbl


def _normalize_log(logp: np.ndarray) -> np.ndarray:
    total = logsumexp(logp, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore"):
        probs = np.exp(logp - total)
    bad = ~np.isfinite(total[..., 0])
    if np.any(bad):
        probs[bad] = 1.0 / logp.shape[-1]
    return probs


def class_posterior(network: Network, evidence: Mapping[str, str]) -> Posterior:
    """Posterior over class states given a (possibly partial) evidence row."""
    _require_estimated(network)
    s = network.structure
    cls = network.class_var
    observed: dict[int, int] = {}
    for name, label in evidence.items():
        try:
            idx = s.index_of(name)
        except KeyError:
            raise InvalidEvidenceLabel(f"unknown variable {name!r}") from None
        if idx == cls:
            raise ValueError("the class variable cannot appear as evidence")
        try:
            observed[idx] = s.variables[idx].state_index(label)
        except KeyError:
            raise InvalidEvidenceLabel(
                f"{label!r} is not a state of {name!r}"
            ) from None

    comp = class_component(network)
    if all(v in observed for v in comp if v != cls):
        logp = _blanket_log_likelihood(network, observed)
    else:
        logp = _ve_log_posterior(network, observed)
    probs = _normalize_log(logp)
    return Posterior(s.variables[cls].states, tuple(float(p) for p in probs))


def _blanket_log_likelihood(network: Network, observed: Mapping[int, int]) -> np.ndarray:
    """Unnormalized log posterior when the class component is fully observed.

    Only the class's own CPT and its children's CPTs depend on the class
    state; every other factor cancels in the normalization.
    """
    s = network.structure
    cls = network.class_var
    n_cls = s.variables[cls].n_states
    logp = np.zeros(n_cls)
    with np.errstate(divide="ignore"):
        for node in (cls, *s.children(cls)):
            cpt = network.cpts[node]
            log_rows = np.log(cpt.rows)
            for state in range(n_cls):
                cfg = cpt.config_index(
                    [state if p == cls else observed[p] for p in cpt.parents]
                )
                own = state if node == cls else observed[node]
                logp[state] += log_rows[cfg, own]
    return logp


def posterior_matrix(network: Network, data: Dataset) -> np.ndarray:
    """Class posteriors for every dataset row, shape (n_rows, n_class_states).

    The class column, when present in the data, is never used as
    evidence. Rows fully observed on the class component take a
    vectorized Markov-blanket path; the rest fall back to per-row
    variable elimination.
    """
    _require_estimated(network)
    s = network.structure
    cls = network.class_var
    codes = aligned_codes(s.variables, data)
    n_cls = s.variables[cls].n_states
    comp = class_component(network)
    non_class = [v for v in comp if v != cls]

    out = np.empty((data.n_rows, n_cls))
    if non_class:
        complete = np.all(codes[:, non_class] >= 0, axis=1)
    else:
        complete = np.ones(data.n_rows, dtype=bool)

    idx = np.nonzero(complete)[0]
    if len(idx):
        logp = np.zeros((len(idx), n_cls))
        with np.errstate(divide="ignore"):
            for node in (cls, *s.children(cls)):
                cpt = network.cpts[node]
                log_rows = np.log(cpt.rows)
                parents = np.array(cpt.parents, dtype=np.intp)
                strides = np.array(cpt.strides, dtype=np.int64)
                if len(parents):
                    pcodes = codes[np.ix_(idx, parents)].astype(np.int64)
                else:
                    pcodes = np.zeros((len(idx), 0), dtype=np.int64)
                for state in range(n_cls):
                    pc = pcodes.copy()
                    if len(parents):
                        pc[:, parents == cls] = state
                    cfg = pc @ strides if len(parents) else np.zeros(len(idx), dtype=np.int64)
                    own = (
                        np.full(len(idx), state)
                        if node == cls
                        else codes[idx, node].astype(np.int64)
                    )
                    logp[:, state] += log_rows[cfg, own]
        out[idx] = _normalize_log(logp)

    for ri in np.nonzero(~complete)[0]:
        observed = {
            v: int(codes[ri, v]) for v in comp if v != cls and codes[ri, v] >= 0
        }
        out[ri] = _normalize_log(_ve_log_posterior(network, observed))
    return out


def classify(
    network: Network,
    evidence: Mapping[str, str],
    threshold: float,
    positive_state: str,
) -> str:
    """positive_state iff P(positive | evidence) > threshold (strict)."""
    posterior = class_posterior(network, evidence)
    return decide(posterior.class_states, posterior.probabilities, threshold, positive_state)


def decide(
    class_states: tuple[str, ...],
    probabilities: tuple[float, ...] | np.ndarray,
    threshold: float,
    positive_state: str,
) -> str:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if len(class_states) != 2:
        raise NonBinaryClass(
            "thresholded classification is defined for binary classes only"
        )
    if positive_state not in class_states:
        raise ValueError(f"{positive_state!r} is not a class state")
    pos = class_states.index(positive_state)
    if probabilities[pos] > threshold:
        return positive_state
    return class_states[1 - pos]
