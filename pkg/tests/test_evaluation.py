import numpy as np
import pytest

from expertbayes import (
    Column,
    Cpt,
    Dataset,
    ExpertBayesSpec,
    K2Spec,
    LengthMismatch,
    Network,
    NetworkStructure,
    OriginalSpec,
    RefinementConfig,
    TanSpec,
    TooFewRows,
    Variable,
    cross_validate,
    forward_sample,
    make_folds,
    paired_significance,
    refine,
    screen_correlations,
    uniform_cpt,
    DEFAULT_THRESHOLDS,
)
from oracles import t_test_p_quadrature


def labelled_dataset(n_pos, n_neg, seed=0):
    """Binary class plus one informative and one noise attribute."""
    rng = np.random.default_rng(seed)
    rows = []
    for label in ["pos"] * n_pos + ["neg"] * n_neg:
        informative = "a1" if (label == "pos") == (rng.random() < 0.85) else "a0"
        rows.append((label, informative, f"b{int(rng.integers(2))}"))
    rng.shuffle(rows)
    cols = (
        Column("C", ("pos", "neg")),
        Column("A", ("a0", "a1")),
        Column("B", ("b0", "b1")),
    )
    return Dataset(cols, tuple(rows), "C")


class TestMakeFolds:
    def test_perfectly_divisible_stratification(self):
        data = labelled_dataset(5, 5)
        plan = make_folds(data, 5, seed=1)
        for fold in range(5):
            rows = [data.rows[i] for i in plan.test_indices(fold)]
            labels = [r[0] for r in rows]
            assert labels.count("pos") == 1 and labels.count("neg") == 1

    def test_same_seed_identical_assignments(self):
        data = labelled_dataset(20, 30)
        assert make_folds(data, 5, seed=9) == make_folds(data, 5, seed=9)

    def test_different_seed_differs(self):
        data = labelled_dataset(20, 30)
        assert make_folds(data, 5, 1).assignments != make_folds(data, 5, 2).assignments

    def test_prostate_shaped_sizes(self):
        data = labelled_dataset(352, 144, seed=3)  # 496 rows
        plan = make_folds(data, 5, seed=4)
        assert set(plan.fold_sizes()) <= {99, 100}
        for fold in range(5):
            labels = [data.rows[i][0] for i in plan.test_indices(fold)]
            assert abs(labels.count("pos") - 352 / 5) <= 1
            assert abs(labels.count("neg") - 144 / 5) <= 1

    def test_every_row_assigned_exactly_once(self):
        data = labelled_dataset(33, 21)
        plan = make_folds(data, 4, seed=5)
        assert len(plan.assignments) == data.n_rows
        assert set(plan.assignments) == set(range(4))
        covered = sorted(i for f in range(4) for i in plan.test_indices(f))
        assert covered == list(range(data.n_rows))

    def test_unstratified_sizes_balanced(self):
        data = labelled_dataset(7, 6)
        plan = make_folds(data, 5, seed=6, stratified=False)
        sizes = plan.fold_sizes()
        assert max(sizes) - min(sizes) <= 1

    def test_too_few_rows_per_class(self):
        data = labelled_dataset(3, 40)
        with pytest.raises(TooFewRows):
            make_folds(data, 5, seed=7)

    def test_k_below_two_rejected(self):
        with pytest.raises(ValueError):
            make_folds(labelled_dataset(5, 5), 1, seed=8)


def prior_only_network():
    C = Variable("C", ("pos", "neg"))
    A = Variable("A", ("a0", "a1"))
    B = Variable("B", ("b0", "b1"))
    s = NetworkStructure((C, A, B), frozenset())
    return Network(s, tuple(uniform_cpt(s, i, estimated=True) for i in range(3)), 0)


def informative_network():
    C = Variable("C", ("pos", "neg"))
    A = Variable("A", ("a0", "a1"))
    B = Variable("B", ("b0", "b1"))
    s = NetworkStructure((C, A, B), frozenset({(0, 1)}))
    return Network(s, tuple(uniform_cpt(s, i, estimated=True) for i in range(3)), 0)


class TestCrossValidate:
    def test_perfect_learner_scores_one_everywhere(self):
        C = Variable("C", ("pos", "neg"))
        A = Variable("A", ("a0", "a1"))
        s = NetworkStructure((C, A), frozenset({(0, 1)}))
        cpts = (
            Cpt(0, (), (), np.array([[0.5, 0.5]])),
            Cpt(1, (0,), (2,), np.array([[1.0, 0.0], [0.0, 1.0]])),
        )
        truth = Network(s, cpts, 0)
        data = forward_sample(truth, 200, seed=11)
        plan = make_folds(data, 5, seed=12)
        report = cross_validate([OriginalSpec(truth)], data, plan, positive_state="pos")
        learner = report.learners[0]
        assert learner.macro_cci == 1.0
        at_half = next(p for p in learner.pr_points if p.threshold == 0.5)
        assert at_half.precision == 1.0 and at_half.recall == 1.0

    def test_all_positive_baseline_precision_is_prevalence(self):
        data = labelled_dataset(37, 63, seed=13)
        plan = make_folds(data, 5, seed=14)
        report = cross_validate(
            [OriginalSpec(prior_only_network())], data, plan, positive_state="pos"
        )
        assert report.baseline_precision == pytest.approx(0.37)
        for threshold in (0.0, 0.02, 0.1):
            point = next(
                p for p in report.learners[0].pr_points if p.threshold == threshold
            )
            assert point.recall == 1.0
            assert point.precision == pytest.approx(0.37)

    def test_threshold_grid_has_twelve_points(self):
        assert len(DEFAULT_THRESHOLDS) == 12
        for required in (0.02, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0):
            assert required in DEFAULT_THRESHOLDS
        data = labelled_dataset(30, 30, seed=15)
        plan = make_folds(data, 5, seed=16)
        report = cross_validate(
            [OriginalSpec(informative_network())], data, plan, positive_state="pos"
        )
        assert len(report.learners[0].pr_points) == 12

    def test_recall_non_increasing_in_threshold(self):
        data = labelled_dataset(40, 60, seed=17)
        plan = make_folds(data, 5, seed=18)
        report = cross_validate(
            [OriginalSpec(informative_network()), K2Spec(), TanSpec()],
            data,
            plan,
            positive_state="pos",
        )
        for learner in report.learners:
            recalls = [p.recall for p in learner.pr_points]
            assert all(a >= b for a, b in zip(recalls, recalls[1:]))

    def test_cci_consistent_with_confusion_counts(self):
        data = labelled_dataset(50, 50, seed=19)  # folds of exactly 20 rows
        plan = make_folds(data, 5, seed=20)
        report = cross_validate(
            [OriginalSpec(informative_network())], data, plan, positive_state="pos"
        )
        learner = report.learners[0]
        point = next(p for p in learner.pr_points if p.threshold == 0.5)
        total = point.tp + point.fp + point.fn + point.tn
        assert total == data.n_rows
        micro = (point.tp + point.tn) / total
        assert micro == pytest.approx(learner.macro_cci, abs=1e-12)

    def test_pairwise_p_values_cover_every_pair(self):
        data = labelled_dataset(30, 30, seed=21)
        plan = make_folds(data, 5, seed=22)
        report = cross_validate(
            [OriginalSpec(informative_network()), K2Spec(), TanSpec()],
            data,
            plan,
            positive_state="pos",
        )
        pairs = {(a, b) for a, b, _ in report.pairwise_p}
        assert pairs == {("original", "k2"), ("original", "tan"), ("k2", "tan")}
        assert all(0.0 <= p <= 1.0 for _, _, p in report.pairwise_p)

    def test_expertbayes_selection_never_sees_test_rows(self):
        data = labelled_dataset(60, 60, seed=23)
        train = data.subset(range(0, 100))
        test_a = data.subset(range(100, 120))
        # a different test set with the same shape
        flipped = Dataset(
            data.columns,
            tuple(
                ("neg" if r[0] == "pos" else "pos", r[1], r[2])
                for r in data.subset(range(100, 120)).rows
            ),
            "C",
        )
        config = RefinementConfig(iterations=40, seed=24, positive_state="pos")
        run_a = refine(informative_network(), train, test_a, config)
        run_b = refine(informative_network(), train, flipped, config)
        assert run_a.best_net == run_b.best_net
        assert run_a.candidates == run_b.candidates
        assert run_a.best_train_score == run_b.best_train_score

    def test_fold_seed_derivation_changes_per_fold(self):
        data = labelled_dataset(40, 40, seed=25)
        plan = make_folds(data, 4, seed=26)
        config = RefinementConfig(iterations=10, seed=27, positive_state="pos")
        report = cross_validate(
            [ExpertBayesSpec(informative_network(), config)],
            data,
            plan,
            positive_state="pos",
        )
        assert len(report.learners[0].fold_cci) == 4


class TestPairedSignificance:
    def test_identical_vectors_give_one(self):
        assert paired_significance((0.5, 0.6, 0.7), (0.5, 0.6, 0.7)) == 1.0

    def test_constant_shift_hits_floor(self):
        a = (0.6, 0.7, 0.8, 0.9, 0.5)
        b = tuple(x - 0.1 for x in a)
        assert paired_significance(a, b) == 1e-12

    def test_reference_vectors_match_quadrature_oracle(self):
        a = (0.6, 0.62, 0.58, 0.61, 0.59)
        b = (0.5, 0.52, 0.49, 0.51, 0.50)
        p = paired_significance(a, b)
        # frozen from the quadrature oracle (see oracles.t_test_p_quadrature)
        assert p == pytest.approx(2.5321312228770012e-06, rel=1e-4)
        oracle = t_test_p_quadrature([x - y for x, y in zip(a, b)])
        assert p == pytest.approx(oracle, rel=1e-3)

    def test_symmetry_two_tailed(self):
        a = (0.6, 0.7, 0.64, 0.58)
        b = (0.55, 0.72, 0.6, 0.5)
        assert paired_significance(a, b) == pytest.approx(paired_significance(b, a))

    def test_length_mismatch_rejected(self):
        with pytest.raises(LengthMismatch):
            paired_significance((0.1, 0.2), (0.1, 0.2, 0.3))

    def test_single_fold_rejected(self):
        with pytest.raises(LengthMismatch):
            paired_significance((0.1,), (0.2,))


class TestMcnemarSignificance:
    def test_identical_predictions_give_one(self):
        from expertbayes import mcnemar_significance

        correct = [True, False, True, True]
        assert mcnemar_significance(correct, correct) == 1.0

    def test_matches_binomial_oracle(self):
        from expertbayes import mcnemar_significance
        from scipy.stats import binom

        # 12 discordant pairs: 9 favor A, 3 favor B
        a = [True] * 9 + [False] * 3 + [True] * 20
        b = [False] * 9 + [True] * 3 + [True] * 20
        p = mcnemar_significance(a, b)
        oracle = min(1.0, 2.0 * float(binom.cdf(3, 12, 0.5)))
        assert p == pytest.approx(oracle, abs=1e-12)

    def test_reported_for_every_learner_pair(self):
        data = labelled_dataset(30, 30, seed=32)
        plan = make_folds(data, 5, seed=33)
        report = cross_validate(
            [OriginalSpec(informative_network()), K2Spec()],
            data,
            plan,
            positive_state="pos",
        )
        assert len(report.pairwise_mcnemar) == 1
        a, b, p = report.pairwise_mcnemar[0]
        assert (a, b) == ("original", "k2")
        assert 0.0 <= p <= 1.0

    def test_length_mismatch_rejected(self):
        from expertbayes import mcnemar_significance

        with pytest.raises(LengthMismatch):
            mcnemar_significance([True, False], [True])


class TestScreenCorrelations:
    def test_duplicated_class_column_flagged_at_one(self):
        rng = np.random.default_rng(28)
        labels = ["pos" if rng.random() < 0.4 else "neg" for _ in range(500)]
        rows = tuple((l, l.upper(), f"x{int(rng.integers(2))}") for l in labels)
        cols = (
            Column("C", ("pos", "neg")),
            Column("Disease", ("POS", "NEG")),
            Column("X", ("x0", "x1")),
        )
        data = Dataset(cols, rows, "C")
        flags = screen_correlations(data, 0.9)
        assert flags[0].score == pytest.approx(1.0)
        assert {flags[0].a, flags[0].b} == {"C", "Disease"}

    def test_independent_columns_not_flagged(self):
        rng = np.random.default_rng(29)
        rows = tuple(
            (
                "pos" if rng.random() < 0.5 else "neg",
                f"a{int(rng.integers(2))}",
                f"b{int(rng.integers(2))}",
            )
            for _ in range(20000)
        )
        cols = (
            Column("C", ("pos", "neg")),
            Column("A", ("a0", "a1")),
            Column("B", ("b0", "b1")),
        )
        data = Dataset(cols, rows, "C")
        flags = screen_correlations(data, 0.9)
        assert flags == ()
        scores = screen_correlations(data, 0.0)
        assert all(f.score < 0.01 for f in scores)

    def test_threshold_above_one_flags_nothing(self):
        data = labelled_dataset(20, 20, seed=30)
        assert screen_correlations(data, 1.0 + 1e-9) == ()

    def test_sorted_descending(self):
        data = labelled_dataset(50, 50, seed=31)
        flags = screen_correlations(data, 0.0)
        scores = [f.score for f in flags]
        assert scores == sorted(scores, reverse=True)
