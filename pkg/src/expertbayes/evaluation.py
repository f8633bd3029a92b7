"""Cross-validation driver, PR analysis, significance tests, correlation screen.

PR confusion counts are pooled over folds (micro-pooling) before
precision/recall are computed; fold CCIs are macro-averaged. The
threshold grid spans the two clinical low thresholds plus 0.2-1.0 in
steps of 0.1, anchored by 0.0 (the classify-everything-positive
baseline), 12 points in all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import stdtr

from .baselines import K2Config, learn_k2, learn_tan
from .data import Dataset, aligned_codes
from .errors import EmptyDataset, LengthMismatch, NonBinaryClass, TooFewRows
from .inference import posterior_matrix
from .learning import rebuild_affected
from .network import Network
from .prng import SplitMix64, child_seed
from .refine import RefinementConfig, refine

DEFAULT_THRESHOLDS: tuple[float, ...] = (
    0.0, 0.02, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0,
)

ZERO_VARIANCE_P = 1e-12


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic row-to-fold assignment."""

    k: int
    seed: int
    stratified: bool
    assignments: tuple[int, ...]

    def test_indices(self, fold: int) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.assignments) if f == fold)

    def train_indices(self, fold: int) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.assignments) if f != fold)

    def fold_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.k
        for f in self.assignments:
            sizes[f] += 1
        return tuple(sizes)


def make_folds(data: Dataset, k: int, seed: int, stratified: bool = True) -> FoldPlan:
    """Assign every row to one of k folds.

    Stratified assignment round-robins each class group (shuffled) into
    folds, carrying the fold offset from group to group so that both the
    per-class and the total fold sizes differ by at most one row.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    n = data.n_rows
    if n < k:
        raise TooFewRows(f"{n} rows cannot fill {k} folds")
    rng = SplitMix64(seed)
    assignments = [0] * n

    if stratified:
        cls = data.class_index
        cls_states = data.columns[cls].states
        by_state: dict[str | None, list[int]] = {s: [] for s in cls_states}
        by_state[None] = []
        for i, row in enumerate(data.rows):
            by_state[row[cls]].append(i)
        for state in cls_states:
            if 0 < len(by_state[state]) < k:
                raise TooFewRows(
                    f"class state {state!r} has {len(by_state[state])} rows; "
                    f"stratified {k}-fold needs >= {k}"
                )
        offset = 0
        for state in (*cls_states, None):
            group = by_state[state]
            rng.shuffle(group)
            for j, row in enumerate(group):
                assignments[row] = (j + offset) % k
            offset = (offset + len(group)) % k
    else:
        order = list(range(n))
        rng.shuffle(order)
        for j, row in enumerate(order):
            assignments[row] = j % k
    return FoldPlan(k, seed, stratified, tuple(assignments))


@dataclass(frozen=True)
class PrPoint:
    threshold: float
    precision: float | None  # None when no positives were predicted
    recall: float
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class LearnerResult:
    name: str
    fold_cci: tuple[float, ...]
    macro_cci: float
    pr_points: tuple[PrPoint, ...]


@dataclass(frozen=True)
class EvaluationReport:
    plan: FoldPlan
    positive_state: str
    cci_threshold: float
    thresholds: tuple[float, ...]
    learners: tuple[LearnerResult, ...]
    pairwise_p: tuple[tuple[str, str, float], ...]
    pairwise_mcnemar: tuple[tuple[str, str, float], ...]
    baseline_precision: float


@dataclass(frozen=True)
class OriginalSpec:
    """Score the expert network as-is (parameters learned per fold)."""

    network: Network
    pseudocount: float = 1.0
    name: str = "original"


@dataclass(frozen=True)
class ExpertBayesSpec:
    """Refine the expert network per fold; test folds never drive selection."""

    network: Network
    config: RefinementConfig
    name: str = "expertbayes"


@dataclass(frozen=True)
class K2Spec:
    config: K2Config = K2Config()
    pseudocount: float = 1.0
    name: str = "k2"


@dataclass(frozen=True)
class TanSpec:
    pseudocount: float = 1.0
    name: str = "tan"


LearnerSpec = Union[OriginalSpec, ExpertBayesSpec, K2Spec, TanSpec]


def _fit(
    spec: LearnerSpec,
    train: Dataset,
    test: Dataset,
    fold: int,
    workers: int | None,
) -> Network:
    if isinstance(spec, OriginalSpec):
        nodes = range(spec.network.structure.n)
        return rebuild_affected(spec.network, train, nodes, spec.pseudocount)
    if isinstance(spec, ExpertBayesSpec):
        cfg = replace(spec.config, seed=child_seed(spec.config.seed, fold))
        return refine(spec.network, train, test, cfg, workers=workers).best_net
    if isinstance(spec, K2Spec):
        return learn_k2(train, spec.config, spec.pseudocount)
    if isinstance(spec, TanSpec):
        return learn_tan(train, spec.pseudocount)
    raise TypeError(f"unknown learner spec {spec!r}")


def baseline_precision(data: Dataset, positive_state: str) -> float:
    """Positive-class prevalence: the precision of predicting all-positive."""
    cls = data.class_index
    labels = [row[cls] for row in data.rows if row[cls] is not None]
    if not labels:
        raise EmptyDataset("no class labels present")
    return sum(1 for v in labels if v == positive_state) / len(labels)


def cross_validate(
    specs: Sequence[LearnerSpec],
    data: Dataset,
    plan: FoldPlan,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    positive_state: str | None = None,
    cci_threshold: float = 0.5,
    workers: int | None = None,
    progress: "Callable[[int, int], None] | None" = None,
) -> EvaluationReport:
    """Train on k-1 folds, score the held-out fold, aggregate.

    Per-fold CCIs are macro-averaged; PR confusion counts are summed over
    folds before precision/recall are derived.
    """
    if not specs:
        raise ValueError("at least one learner spec required")
    if len(plan.assignments) != data.n_rows:
        raise ValueError("fold plan was built for a different number of rows")
    cls_states = data.columns[data.class_index].states
    if len(cls_states) != 2:
        raise NonBinaryClass("cross-validation scoring needs a binary class")
    if positive_state is None:
        positive_state = cls_states[0]
    if positive_state not in cls_states:
        raise ValueError(f"{positive_state!r} is not a class state")
    thresholds = tuple(float(t) for t in thresholds)

    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValueError("learner names must be unique within one evaluation")

    fold_cci: dict[str, list[float]] = {s.name: [] for s in specs}
    # name -> threshold index -> [tp, fp, fn, tn]
    counts: dict[str, np.ndarray] = {
        s.name: np.zeros((len(thresholds), 4), dtype=np.int64) for s in specs
    }
    # per-row correctness at cci_threshold, pooled fold by fold (for McNemar)
    pooled_correct: dict[str, list[np.ndarray]] = {s.name: [] for s in specs}

    steps_done = 0
    for fold in range(plan.k):
        train = data.subset(plan.train_indices(fold))
        test = data.subset(plan.test_indices(fold))
        for spec in specs:
            net = _fit(spec, train, test, fold, workers)
            if progress is not None:
                steps_done += 1
                progress(steps_done, plan.k * len(specs))
            codes = aligned_codes(net.variables, test)
            labelled = codes[:, net.class_var] >= 0
            if not np.any(labelled):
                raise EmptyDataset(f"fold {fold} has no labelled test rows")
            pos_idx = net.class_variable.state_index(positive_state)
            probs = posterior_matrix(net, test)[labelled, pos_idx]
            actual = codes[labelled, net.class_var] == pos_idx

            predicted = probs > cci_threshold
            fold_cci[spec.name].append(float(np.mean(predicted == actual)))
            pooled_correct[spec.name].append(predicted == actual)

            for ti, t in enumerate(thresholds):
                pred = probs > t
                counts[spec.name][ti] += (
                    int(np.sum(pred & actual)),
                    int(np.sum(pred & ~actual)),
                    int(np.sum(~pred & actual)),
                    int(np.sum(~pred & ~actual)),
                )

    learners = []
    for spec in specs:
        pr = []
        for ti, t in enumerate(thresholds):
            tp, fp, fn, tn = (int(x) for x in counts[spec.name][ti])
            precision = tp / (tp + fp) if tp + fp > 0 else None
            recall = tp / (tp + fn) if tp + fn > 0 else 0.0
            pr.append(PrPoint(t, precision, recall, tp, fp, fn, tn))
        ccis = tuple(fold_cci[spec.name])
        learners.append(
            LearnerResult(spec.name, ccis, float(np.mean(ccis)), tuple(pr))
        )

    pairwise = []
    mcnemar = []
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            p = paired_significance(learners[i].fold_cci, learners[j].fold_cci)
            pairwise.append((specs[i].name, specs[j].name, p))
            q = mcnemar_significance(
                np.concatenate(pooled_correct[specs[i].name]),
                np.concatenate(pooled_correct[specs[j].name]),
            )
            mcnemar.append((specs[i].name, specs[j].name, q))

    return EvaluationReport(
        plan=plan,
        positive_state=positive_state,
        cci_threshold=cci_threshold,
        thresholds=thresholds,
        learners=tuple(learners),
        pairwise_p=tuple(pairwise),
        pairwise_mcnemar=tuple(mcnemar),
        baseline_precision=baseline_precision(data, positive_state),
    )


def paired_significance(scores_a: Sequence[float], scores_b: Sequence[float]) -> float:
    """Two-tailed paired t-test over per-fold scores.

    All-zero differences return p = 1; zero-variance nonzero differences
    return the documented floor ZERO_VARIANCE_P (the t statistic is
    undefined there).
    """
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise LengthMismatch("paired score vectors must have equal length")
    n = len(a)
    if n < 2:
        raise LengthMismatch("need >= 2 paired scores")
    d = a - b
    if np.all(d == 0.0):
        return 1.0
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        return ZERO_VARIANCE_P
    t = float(d.mean()) / (sd / math.sqrt(n))
    p = 2.0 * float(stdtr(n - 1, -abs(t)))
    return min(max(p, 0.0), 1.0)


def mcnemar_significance(correct_a: Sequence[bool], correct_b: Sequence[bool]) -> float:
    """Exact two-tailed McNemar test on pooled per-row correctness.

    Uses only the discordant pairs (one classifier right, the other
    wrong) under a Binomial(n, 1/2) null; returns 1.0 when there are
    none.
    """
    a = np.asarray(correct_a, dtype=bool)
    b = np.asarray(correct_b, dtype=bool)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch("correctness vectors must have equal length")
    only_a = int(np.sum(a & ~b))
    only_b = int(np.sum(~a & b))
    n = only_a + only_b
    if n == 0:
        return 1.0
    k = min(only_a, only_b)
    tail = sum(math.comb(n, i) for i in range(k + 1)) / 2.0**n
    return min(1.0, 2.0 * tail)


@dataclass(frozen=True)
class CorrelationFlag:
    a: str
    b: str
    score: float


def screen_correlations(data: Dataset, warn_threshold: float) -> tuple[CorrelationFlag, ...]:
    """Column pairs with normalized mutual information above the threshold.

    NMI = I(X;Y) / min(H(X), H(Y)) from unsmoothed plug-in frequencies
    over rows where both columns are observed; 0 when either marginal
    entropy is 0. Sorted by score descending, then names.
    """
    if warn_threshold < 0:
        raise ValueError("warn threshold must be nonnegative")
    codes = data.codes.astype(np.int64)
    cards = [len(c.states) for c in data.columns]
    flags = []
    for i in range(len(data.columns)):
        for j in range(i + 1, len(data.columns)):
            both = codes[np.all(codes[:, (i, j)] >= 0, axis=1)][:, (i, j)]
            if len(both) == 0 or cards[i] == 0 or cards[j] == 0:
                continue
            joint = np.bincount(
                both[:, 0] * cards[j] + both[:, 1], minlength=cards[i] * cards[j]
            ).reshape(cards[i], cards[j]).astype(np.float64)
            n = joint.sum()
            px = joint.sum(axis=1) / n
            py = joint.sum(axis=0) / n
            pxy = joint / n
            with np.errstate(divide="ignore", invalid="ignore"):
                mi = float(
                    np.sum(np.where(pxy > 0, pxy * np.log(pxy / np.outer(px, py)), 0.0))
                )
                hx = float(-np.sum(np.where(px > 0, px * np.log(px), 0.0)))
                hy = float(-np.sum(np.where(py > 0, py * np.log(py), 0.0)))
            ref = min(hx, hy)
            nmi = mi / ref if ref > 0 else 0.0
            if nmi > warn_threshold:
                flags.append(
                    CorrelationFlag(data.columns[i].name, data.columns[j].name, nmi)
                )
    flags.sort(key=lambda f: (-f.score, f.a, f.b))
    return tuple(flags)
