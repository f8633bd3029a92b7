"""Seeded single-edge refinement of an expert network.

Every candidate is one edit away from the ORIGINAL network, never from
the incumbent best, so the search cannot drift from the expert's model.
The candidate stream is a pure function of the seed: cycle-forming
candidates are recorded as rejected and count against the iteration
budget (set ``redraw_rejected`` to draw replacements instead). Scoring
may run on a worker pool; results are invariant to the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from threading import Lock
from typing import Callable

import numpy as np

from .data import Dataset, aligned_codes
from .errors import CycleWouldForm, EmptyDataset, NonBinaryClass
from .inference import posterior_matrix
from .learning import rebuild_affected
from .network import (
    AddDirection,
    CandidateEdit,
    EditKind,
    Network,
    NetworkStructure,
    apply_edit,
    edited_structure,
)
from .prng import SplitMix64

REJECTED_CYCLE = "cycle"


@dataclass(frozen=True)
class RefinementConfig:
    iterations: int
    seed: int
    positive_state: str
    threshold: float = 0.5
    pseudocount: float = 1.0
    redraw_rejected: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.pseudocount < 0:
            raise ValueError("pseudocount must be nonnegative")
        if not self.positive_state:
            raise ValueError("positive state label must be nonempty")


@dataclass(frozen=True)
class CandidateOutcome:
    """One drawn edit: either a train score or a rejection reason."""

    edit: CandidateEdit
    train_score: float | None = None
    rejection: str | None = None

    @property
    def accepted(self) -> bool:
        return self.rejection is None


@dataclass(frozen=True)
class RefinementRun:
    config: RefinementConfig
    original_train_score: float
    original_test_score: float
    candidates: tuple[CandidateOutcome, ...]
    best_net: Network = field(repr=False)
    best_train_score: float = 0.0
    best_test_score: float = 0.0
    best_edit_index: int | None = None

    @property
    def best_edit(self) -> CandidateEdit | None:
        if self.best_edit_index is None:
            return None
        return self.candidates[self.best_edit_index].edit


def draw_candidate(
    rng: SplitMix64, structure: NetworkStructure, sequence_index: int = 0
) -> CandidateEdit:
    """One random single-edge edit.

    The node pair is uniform over unordered distinct pairs (lexicographic
    unranking of a uniform pair index; see docs/FORMATS.md). If an edge
    exists between the pair the kind is Remove or Reverse with equal
    probability; otherwise it is Add with a uniformly chosen direction.
    Consumes exactly two generator draws.
    """
    n = structure.n
    if n < 2:
        raise ValueError("candidate drawing needs >= 2 nodes")
    k = rng.below(n * (n - 1) // 2)
    a = 0
    run = n - 1
    while k >= run:
        k -= run
        a += 1
        run -= 1
    b = a + 1 + k
    if structure.edge_between(a, b) is not None:
        kind = EditKind.REMOVE if rng.below(2) == 0 else EditKind.REVERSE
        return CandidateEdit(kind, a, b, None, sequence_index)
    direction = AddDirection.A_TO_B if rng.below(2) == 0 else AddDirection.B_TO_A
    return CandidateEdit(EditKind.ADD, a, b, direction, sequence_index)


def score_cci(
    network: Network, data: Dataset, threshold: float, positive_state: str
) -> float:
    """Fraction of rows whose thresholded decision matches the class label.

    Rows with a missing class label are excluded from both numerator and
    denominator.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    cls_var = network.class_variable
    if cls_var.n_states != 2:
        raise NonBinaryClass("CCI scoring is defined for binary classes only")
    pos = cls_var.state_index(positive_state)
    if data.n_rows == 0:
        raise EmptyDataset("no rows to score")
    codes = aligned_codes(network.variables, data)
    labelled = codes[:, network.class_var] >= 0
    if not np.any(labelled):
        raise EmptyDataset("no rows with a class label to score")
    probs = posterior_matrix(network, data)
    predicted_pos = probs[labelled, pos] > threshold
    actual_pos = codes[labelled, network.class_var] == pos
    return float(np.mean(predicted_pos == actual_pos))


def worker_count(explicit: int | None = None) -> int:
    """Resolve the scoring worker count; EXPERTBAYES_THREADS caps it (0 = auto)."""
    cap = os.environ.get("EXPERTBAYES_THREADS", "0")
    try:
        cap_n = int(cap)
    except ValueError:
        cap_n = 0
    if cap_n <= 0:
        cap_n = os.cpu_count() or 1
    if explicit is not None and explicit >= 1:
        return min(explicit, cap_n)
    return cap_n


_DRAW_CAP_FACTOR = 100  # redraw mode safety bound on total draws


def refine(
    original: Network,
    train: Dataset,
    test: Dataset,
    config: RefinementConfig,
    workers: int | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> RefinementRun:
    """Search the original network's single-edit neighborhood.

    Parameters of the original are learned from the training set; each
    candidate edit is applied to the original, its affected CPTs are
    re-estimated, and its training CCI recorded. The best network (the
    original unless a candidate strictly beats it; score ties go to the
    smallest sequence index) is finally scored once on the test set.
    """
    pc = config.pseudocount
    base = rebuild_affected(original, train, range(original.structure.n), pc)
    original_train = score_cci(base, train, config.threshold, config.positive_state)
    original_test = score_cci(base, test, config.threshold, config.positive_state)

    rng = SplitMix64(config.seed)
    edits: list[CandidateEdit] = []
    rejected: dict[int, str] = {}
    accepted = 0
    cap = config.iterations * (_DRAW_CAP_FACTOR if config.redraw_rejected else 1)
    while len(edits) < cap:
        edit = draw_candidate(rng, base.structure, sequence_index=len(edits))
        edits.append(edit)
        try:
            edited_structure(base.structure, edit)
        except CycleWouldForm:
            rejected[edit.sequence_index] = REJECTED_CYCLE
        else:
            accepted += 1
        if config.redraw_rejected:
            if accepted == config.iterations:
                break
        elif len(edits) == config.iterations:
            break

    total = len(edits)
    done = 0
    tick = Lock()

    def evaluate(edit: CandidateEdit) -> CandidateOutcome:
        nonlocal done
        if edit.sequence_index in rejected:
            outcome = CandidateOutcome(edit, None, rejected[edit.sequence_index])
        else:
            cand = apply_edit(base, edit)
            stale = [i for i, c in enumerate(cand.cpts) if not c.estimated]
            cand = rebuild_affected(cand, train, stale, pc)
            score = score_cci(cand, train, config.threshold, config.positive_state)
            outcome = CandidateOutcome(edit, score, None)
        if progress is not None:
            with tick:
                done += 1
                progress(done, total)
        return outcome

    n_workers = worker_count(workers)
    if n_workers > 1 and total > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(evaluate, edits))
    else:
        outcomes = [evaluate(e) for e in edits]

    best_score = original_train
    best_index: int | None = None
    for outcome in outcomes:
        if outcome.accepted and outcome.train_score > best_score:
            best_score = outcome.train_score
            best_index = outcome.edit.sequence_index

    if best_index is None:
        best_net = base
    else:
        best_net = apply_edit(base, outcomes[best_index].edit)
        stale = [i for i, c in enumerate(best_net.cpts) if not c.estimated]
        best_net = rebuild_affected(best_net, train, stale, pc)
    best_test = score_cci(best_net, test, config.threshold, config.positive_state)

    return RefinementRun(
        config=config,
        original_train_score=original_train,
        original_test_score=original_test,
        candidates=tuple(outcomes),
        best_net=best_net,
        best_train_score=best_score,
        best_test_score=best_test,
        best_edit_index=best_index,
    )
