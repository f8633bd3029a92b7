import numpy as np
import pytest

from expertbayes import (
    CandidateEdit,
    Column,
    ColumnMismatch,
    Dataset,
    EditKind,
    EmptyDataset,
    Network,
    NetworkStructure,
    Variable,
    apply_edit,
    estimate_cpts,
    rebuild_affected,
)

C = Variable("C", ("pos", "neg"))
A = Variable("A", ("a0", "a1"))


def small_dataset(rows):
    cols = (Column("C", ("pos", "neg")), Column("A", ("a0", "a1")))
    return Dataset(cols, tuple(rows), "C")


CHAIN = NetworkStructure((C, A), frozenset({(0, 1)}))  # C -> A

FOUR_ROWS = small_dataset(
    [("pos", "a0"), ("pos", "a0"), ("pos", "a1"), ("neg", "a1")]
)


class TestEstimateCpts:
    def test_laplace_counts_match_hand_calculation(self):
        cpts = estimate_cpts(CHAIN, FOUR_ROWS, pseudocount=1)
        # P(C=pos) = (3+1)/(4+2)
        assert cpts[0].rows[0, 0] == pytest.approx(4 / 6, abs=1e-12)
        # P(A=a0 | C=pos) = (2+1)/(3+2); P(A=a0 | C=neg) = (0+1)/(1+2)
        assert cpts[1].rows[0, 0] == pytest.approx(3 / 5, abs=1e-12)
        assert cpts[1].rows[1, 0] == pytest.approx(1 / 3, abs=1e-12)

    def test_unseen_parent_config_with_zero_pseudocount_is_uniform(self):
        data = small_dataset([("pos", "a0"), ("pos", "a1")])  # C=neg never seen
        cpts = estimate_cpts(CHAIN, data, pseudocount=0)
        assert tuple(cpts[1].rows[1]) == (0.5, 0.5)

    def test_single_row_parentless_binary_laplace(self):
        data = small_dataset([("pos", "a0")])
        cpts = estimate_cpts(NetworkStructure((C, A), frozenset()), data, pseudocount=1)
        assert cpts[0].rows[0, 0] == pytest.approx(2 / 3)
        assert cpts[0].rows[0, 1] == pytest.approx(1 / 3)

    def test_rows_always_normalized(self):
        cpts = estimate_cpts(CHAIN, FOUR_ROWS, pseudocount=0.37)
        for cpt in cpts:
            assert np.allclose(cpt.rows.sum(axis=1), 1.0, atol=1e-9)

    def test_row_duplication_leaves_unsmoothed_estimates_unchanged(self):
        doubled = small_dataset(list(FOUR_ROWS.rows) * 2)
        once = estimate_cpts(CHAIN, FOUR_ROWS, pseudocount=0)
        twice = estimate_cpts(CHAIN, doubled, pseudocount=0)
        for a, b in zip(once, twice):
            assert np.allclose(a.rows, b.rows, atol=1e-12)

    def test_missing_cells_excluded_per_family_only(self):
        data = small_dataset([("pos", "a0"), ("pos", None), (None, "a1"), ("neg", "a1")])
        cpts = estimate_cpts(CHAIN, data, pseudocount=0)
        # C counts use 3 labelled rows: pos 2, neg 1
        assert cpts[0].rows[0, 0] == pytest.approx(2 / 3)
        # A|C uses the 2 rows with both observed: (pos,a0), (neg,a1)
        assert cpts[1].rows[0, 0] == pytest.approx(1.0)
        assert cpts[1].rows[1, 1] == pytest.approx(1.0)

    def test_empty_dataset_rejected(self):
        with pytest.raises(EmptyDataset):
            estimate_cpts(CHAIN, small_dataset([]), pseudocount=1)

    def test_unknown_label_for_network_states_rejected(self):
        cols = (Column("C", ("pos", "neg")), Column("A", ("weird", "a1")))
        data = Dataset(cols, (("pos", "weird"),), "C")
        with pytest.raises(ColumnMismatch):
            estimate_cpts(CHAIN, data, pseudocount=1)

    def test_missing_column_rejected(self):
        cols = (Column("C", ("pos", "neg")), Column("B", ("b0", "b1")))
        data = Dataset(cols, (("pos", "b0"),), "C")
        with pytest.raises(ColumnMismatch):
            estimate_cpts(CHAIN, data, pseudocount=1)

    def test_negative_pseudocount_rejected(self):
        with pytest.raises(ValueError):
            estimate_cpts(CHAIN, FOUR_ROWS, pseudocount=-0.5)

    def test_extra_dataset_columns_are_ignored(self):
        cols = (
            Column("C", ("pos", "neg")),
            Column("A", ("a0", "a1")),
            Column("Z", ("z0", "z1")),
        )
        data = Dataset(cols, (("pos", "a0", "z1"), ("neg", "a1", "z0")), "C")
        cpts = estimate_cpts(CHAIN, data, pseudocount=1)
        assert cpts[0].rows[0, 0] == pytest.approx(2 / 4)


def chain_network():
    return Network(CHAIN, estimate_cpts(CHAIN, FOUR_ROWS, 1), 0)


class TestRebuildAffected:
    def test_empty_change_set_is_a_no_op(self):
        net = chain_network()
        assert rebuild_affected(net, FOUR_ROWS, set(), 1) is net

    def test_reverse_rebuilds_both_endpoints(self):
        net = chain_network()
        edited = apply_edit(net, CandidateEdit(EditKind.REVERSE, 0, 1))
        rebuilt = rebuild_affected(edited, FOUR_ROWS, {0, 1}, 1)
        assert rebuilt.fully_estimated
        # P(A=a0) = (2+1)/(4+2); P(C=pos | A=a0) = (2+1)/(2+2)
        assert rebuilt.cpts[1].rows[0, 0] == pytest.approx(3 / 6)
        assert rebuilt.cpts[0].rows[0, 0] == pytest.approx(3 / 4)

    def test_remove_rebuilds_child_only(self):
        net = chain_network()
        edited = apply_edit(net, CandidateEdit(EditKind.REMOVE, 0, 1))
        stale = [i for i, c in enumerate(edited.cpts) if not c.estimated]
        assert stale == [1]
        rebuilt = rebuild_affected(edited, FOUR_ROWS, stale, 1)
        assert rebuilt.cpts[0] is edited.cpts[0]  # untouched, bit-identical
        assert rebuilt.cpts[1].rows[0, 0] == pytest.approx(3 / 6)

    def test_full_rebuild_equals_estimate_cpts(self):
        net = chain_network()
        rebuilt = rebuild_affected(net, FOUR_ROWS, {0, 1}, 1)
        fresh = estimate_cpts(CHAIN, FOUR_ROWS, 1)
        assert rebuilt.cpts == tuple(fresh)

    def test_invalid_node_rejected(self):
        with pytest.raises(ColumnMismatch):
            rebuild_affected(chain_network(), FOUR_ROWS, {9}, 1)
