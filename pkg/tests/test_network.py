import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expertbayes import (
    AddDirection,
    CandidateEdit,
    Cpt,
    CycleWouldForm,
    CyclicStructure,
    EditInapplicable,
    EditKind,
    Network,
    NetworkStructure,
    Variable,
    apply_edit,
    detect_cycle,
    markov_blanket,
    topological_order,
    uniform_cpt,
)
from oracles import moral_blanket, random_dag


def binary(name):
    return Variable(name, ("0", "1"))


def structure(n, edges):
    return NetworkStructure(tuple(binary(f"X{i}") for i in range(n)), tuple(edges))


def network(n, edges, class_var=0):
    s = structure(n, edges)
    return Network(s, tuple(uniform_cpt(s, i, estimated=True) for i in range(n)), class_var)


@st.composite
def dags(draw, max_nodes=10):
    n = draw(st.integers(2, max_nodes))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return structure(n, random_dag(rng, n))


class TestVariable:
    def test_requires_two_states(self):
        with pytest.raises(ValueError):
            Variable("A", ("only",))

    def test_rejects_duplicate_states(self):
        with pytest.raises(ValueError):
            Variable("A", ("x", "x"))

    def test_rejects_empty_name(self):
        with pytest.raises(ValueError):
            Variable("", ("a", "b"))


class TestStructureValidation:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            structure(2, [(0, 0)])

    def test_rejects_duplicate_edges(self):
        with pytest.raises(ValueError):
            structure(2, [(0, 1), (0, 1)])

    def test_rejects_bad_endpoint(self):
        with pytest.raises(ValueError):
            structure(2, [(0, 5)])

    def test_rejects_duplicate_names(self):
        with pytest.raises(ValueError):
            NetworkStructure((binary("A"), binary("A")), frozenset())


class TestDetectCycle:
    def test_chain_is_acyclic(self):
        assert detect_cycle(structure(3, [(0, 1), (1, 2)])) is False

    def test_three_cycle(self):
        assert detect_cycle(structure(3, [(0, 1), (1, 2), (2, 0)])) is True

    def test_empty_graph(self):
        assert detect_cycle(structure(3, [])) is False

    def test_two_node_back_and_forth(self):
        assert detect_cycle(structure(2, [(0, 1), (1, 0)])) is True


class TestTopologicalOrder:
    def test_parent_first_regardless_of_declaration(self):
        # B declared before A, edge A->B
        s = NetworkStructure((binary("B"), binary("A")), frozenset({(1, 0)}))
        assert topological_order(s) == (1, 0)

    def test_edgeless_is_declaration_order(self):
        assert topological_order(structure(3, [])) == (0, 1, 2)

    def test_cyclic_raises(self):
        with pytest.raises(CyclicStructure):
            topological_order(structure(3, [(0, 1), (1, 2), (2, 0)]))

    @given(dags())
    @settings(max_examples=50, deadline=None)
    def test_parents_precede_children(self, s):
        order = topological_order(s)
        pos = {v: i for i, v in enumerate(order)}
        assert all(pos[p] < pos[c] for p, c in s.edges)


class TestMarkovBlanket:
    def test_naive_structure_children_only(self):
        s = structure(3, [(0, 1), (0, 2)])
        assert markov_blanket(s, 0) == (1, 2)

    def test_parent_child_coparent(self):
        # A->C, C->B, D->B; blanket(C) = {A, B, D}
        s = structure(4, [(0, 2), (2, 1), (3, 1)])
        assert markov_blanket(s, 2) == (0, 1, 3)

    def test_isolated_node(self):
        assert markov_blanket(structure(3, [(0, 1)]), 2) == ()

    @given(dags())
    @settings(max_examples=100, deadline=None)
    def test_matches_moral_graph_oracle(self, s):
        for node in range(s.n):
            assert set(markov_blanket(s, node)) == moral_blanket(s, node)

    @given(dags())
    @settings(max_examples=100, deadline=None)
    def test_symmetry_in_moral_graph(self, s):
        for u in range(s.n):
            for v in markov_blanket(s, u):
                assert u in markov_blanket(s, v)


class TestCpt:
    def test_row_count_must_match_parent_cards(self):
        with pytest.raises(ValueError):
            Cpt(0, (1,), (2,), np.array([[0.5, 0.5]]))  # needs 2 rows

    def test_rows_must_normalize(self):
        with pytest.raises(ValueError):
            Cpt(0, (), (), np.array([[0.6, 0.6]]))

    def test_probabilities_within_unit_interval(self):
        with pytest.raises(ValueError):
            Cpt(0, (), (), np.array([[1.2, -0.2]]))

    def test_rows_are_read_only(self):
        cpt = Cpt(0, (), (), np.array([[0.4, 0.6]]))
        with pytest.raises(ValueError):
            cpt.rows[0, 0] = 0.9

    def test_config_enumeration_row_major_last_parent_fastest(self):
        cpt = Cpt(2, (0, 1), (2, 3), np.full((6, 2), 0.5))
        configs = list(cpt.config_tuples())
        assert configs[:4] == [(0, 0), (0, 1), (0, 2), (1, 0)]
        assert cpt.config_index((1, 2)) == 5


class TestApplyEdit:
    def test_reverse_swaps_direction(self):
        net = network(2, [(1, 0)])  # C->A with A=X0
        out = apply_edit(net, CandidateEdit(EditKind.REVERSE, 1, 0))
        assert out.structure.edges == frozenset({(0, 1)})
        assert net.structure.edges == frozenset({(1, 0)})  # input untouched

    def test_add_closing_cycle_rejected(self):
        net = network(3, [(0, 1), (1, 2)])
        with pytest.raises(CycleWouldForm):
            apply_edit(net, CandidateEdit(EditKind.ADD, 2, 0, AddDirection.A_TO_B))

    def test_remove_then_add_restores_structure(self):
        net = network(2, [(0, 1)])
        removed = apply_edit(net, CandidateEdit(EditKind.REMOVE, 0, 1))
        assert removed.structure.edges == frozenset()
        restored = apply_edit(removed, CandidateEdit(EditKind.ADD, 0, 1, AddDirection.A_TO_B))
        assert restored.structure.edges == net.structure.edges

    def test_add_on_existing_pair_inapplicable(self):
        net = network(2, [(0, 1)])
        with pytest.raises(EditInapplicable):
            apply_edit(net, CandidateEdit(EditKind.ADD, 1, 0, AddDirection.A_TO_B))

    def test_remove_missing_edge_inapplicable(self):
        net = network(2, [])
        with pytest.raises(EditInapplicable):
            apply_edit(net, CandidateEdit(EditKind.REMOVE, 0, 1))

    def test_changed_cpts_reset_others_carried(self):
        net = network(3, [(0, 1), (0, 2)])
        out = apply_edit(net, CandidateEdit(EditKind.REMOVE, 0, 1))
        assert out.cpts[1].estimated is False
        assert out.cpts[1].parents == ()
        assert out.cpts[0] is net.cpts[0]
        assert out.cpts[2] is net.cpts[2]

    def test_reverse_resets_both_endpoints(self):
        net = network(3, [(0, 1)])
        out = apply_edit(net, CandidateEdit(EditKind.REVERSE, 0, 1))
        assert out.cpts[0].estimated is False
        assert out.cpts[1].estimated is False
        assert out.cpts[2] is net.cpts[2]

    def test_edit_on_pair_works_in_either_endpoint_order(self):
        net = network(2, [(0, 1)])
        out = apply_edit(net, CandidateEdit(EditKind.REMOVE, 1, 0))
        assert out.structure.edges == frozenset()

    def test_self_edit_rejected_at_construction(self):
        with pytest.raises(ValueError):
            CandidateEdit(EditKind.REMOVE, 1, 1)

    @given(dags(max_nodes=8), st.integers(0, 10**6))
    @settings(max_examples=150, deadline=None)
    def test_never_returns_cyclic_network(self, s, pick):
        net = Network(s, tuple(uniform_cpt(s, i, estimated=True) for i in range(s.n)), 0)
        pairs = [(a, b) for a in range(s.n) for b in range(a + 1, s.n)]
        a, b = pairs[pick % len(pairs)]
        if s.edge_between(a, b) is None:
            edit = CandidateEdit(EditKind.ADD, a, b, AddDirection.A_TO_B)
        else:
            edit = CandidateEdit(EditKind.REVERSE, a, b)
        try:
            out = apply_edit(net, edit)
        except CycleWouldForm:
            return
        assert detect_cycle(out.structure) is False

    @given(dags(max_nodes=8))
    @settings(max_examples=100, deadline=None)
    def test_reverse_is_involution_on_structure(self, s):
        if not s.edges:
            return
        a, b = min(s.edges)
        net = Network(s, tuple(uniform_cpt(s, i, estimated=True) for i in range(s.n)), 0)
        try:
            once = apply_edit(net, CandidateEdit(EditKind.REVERSE, a, b))
        except CycleWouldForm:
            return
        twice = apply_edit(once, CandidateEdit(EditKind.REVERSE, b, a))
        assert twice.structure == net.structure


class TestNetworkValidation:
    def test_rejects_cyclic_structure(self):
        s = structure(2, [(0, 1), (1, 0)])
        with pytest.raises(CyclicStructure):
            Network(s, (uniform_cpt(s, 0), uniform_cpt(s, 1)), 0)

    def test_rejects_mismatched_cpt_layout(self):
        s = structure(2, [(0, 1)])
        bad = Cpt(1, (), (), np.array([[0.5, 0.5]]))  # structure says parent {0}
        with pytest.raises(ValueError):
            Network(s, (uniform_cpt(s, 0), bad), 0)

    def test_rejects_bad_class_index(self):
        s = structure(2, [])
        with pytest.raises(ValueError):
            Network(s, (uniform_cpt(s, 0), uniform_cpt(s, 1)), 7)
