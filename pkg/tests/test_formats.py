import json
from pathlib import Path

import pytest

from expertbayes import (
    CyclicStructure,
    MissingClassColumn,
    ParseError,
    RaggedRow,
    SchemaVersionUnsupported,
    SingleStateClass,
)
from expertbayes.formats import (
    RNG_ALGORITHM,
    canonical_json,
    dataset_digest,
    dataset_to_csv,
    edit_document,
    edit_from_document,
    load_dataset,
    load_network,
    network_digest,
    report_digest,
    save_network,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


class TestNetworkDocuments:
    def test_minimal_round_trip_is_byte_identical(self):
        text = (FIXTURES / "synthetic_network.json").read_text()
        assert save_network(load_network(text)) == text

    def test_priors_round_trip_is_byte_identical(self):
        text = (FIXTURES / "example_network.json").read_text()
        net = load_network(text)
        assert net.fully_estimated
        assert save_network(net) == text

    def test_load_preserves_declared_order(self):
        net = load_network((FIXTURES / "example_network.json").read_text())
        assert [v.name for v in net.variables] == ["C", "A"]
        assert net.variables[0].states == ("pos", "neg")

    def test_unknown_edge_variable_named_in_error(self):
        doc = {
            "format_version": 1,
            "class_variable": "C",
            "variables": [
                {"name": "C", "states": ["a", "b"]},
                {"name": "A", "states": ["x", "y"]},
            ],
            "edges": [{"parent": "C", "child": "Ghost"}],
        }
        with pytest.raises(ParseError, match="Ghost"):
            load_network(json.dumps(doc))

    def test_cycle_rejected(self):
        doc = {
            "format_version": 1,
            "class_variable": "A",
            "variables": [
                {"name": "A", "states": ["0", "1"]},
                {"name": "B", "states": ["0", "1"]},
                {"name": "D", "states": ["0", "1"]},
            ],
            "edges": [
                {"parent": "A", "child": "B"},
                {"parent": "B", "child": "D"},
                {"parent": "D", "child": "A"},
            ],
        }
        with pytest.raises(CyclicStructure):
            load_network(json.dumps(doc))

    def test_unsupported_version(self):
        with pytest.raises(SchemaVersionUnsupported):
            load_network(json.dumps({"format_version": 99}))

    def test_missing_version(self):
        with pytest.raises(ParseError):
            load_network(json.dumps({"variables": []}))

    def test_malformed_json_reports_location(self):
        with pytest.raises(ParseError, match="line"):
            load_network('{"format_version": 1,,}')

    def test_cpt_row_sum_tolerance(self):
        base = json.loads((FIXTURES / "example_network.json").read_text())
        base["cpts"][0]["rows"][0] = [0.35, 0.7]  # sums to 1.05
        with pytest.raises(ParseError, match="sums to"):
            load_network(json.dumps(base))

    def test_cpt_slightly_off_rows_renormalized(self):
        base = json.loads((FIXTURES / "example_network.json").read_text())
        base["cpts"][0]["rows"][0] = [0.3000001, 0.7]  # within 1e-6
        net = load_network(json.dumps(base))
        row = net.cpts[0].rows[0]
        assert row.sum() == pytest.approx(1.0, abs=1e-12)

    def test_declared_parent_order_permuted_into_canonical(self):
        doc = {
            "format_version": 1,
            "class_variable": "C",
            "variables": [
                {"name": "P1", "states": ["0", "1"]},
                {"name": "P2", "states": ["0", "1", "2"]},
                {"name": "C", "states": ["n", "y"]},
            ],
            "edges": [
                {"parent": "P1", "child": "C"},
                {"parent": "P2", "child": "C"},
            ],
            "cpts": [
                {
                    "variable": "C",
                    "parents": ["P2", "P1"],  # declared backwards
                    "rows": [
                        [0.0, 1.0], [0.1, 0.9],
                        [0.2, 0.8], [0.3, 0.7],
                        [0.4, 0.6], [0.5, 0.5],
                    ],
                }
            ],
        }
        net = load_network(json.dumps(doc))
        cpt = net.cpts[2]
        assert cpt.parents == (0, 1)
        # declared row for (P2=2, P1=1) must land at canonical (P1=1, P2=2)
        assert cpt.rows[cpt.config_index((1, 2))][0] == pytest.approx(0.5)

    def test_network_digest_stable_across_whitespace(self):
        text = (FIXTURES / "synthetic_network.json").read_text()
        compact = json.dumps(json.loads(text))
        assert network_digest(load_network(text)) == network_digest(
            load_network(compact)
        )


class TestDatasetCsv:
    def test_small_file_first_appearance_state_order(self):
        text = "C,A\npos,a0\npos,a0\npos,a1\nneg,a1\n"
        data = load_dataset(text, "C")
        assert data.columns[0].states == ("pos", "neg")
        assert data.columns[1].states == ("a0", "a1")
        assert data.n_rows == 4

    def test_missing_token_becomes_marker(self):
        data = load_dataset("C,A\npos,?\nneg,a1\npos,a1\n", "C", missing_token="?")
        assert data.rows[0][1] is None
        assert data.columns[1].states == ("a1",)

    def test_quoted_fields(self):
        data = load_dataset('C,A\n"pos","with, comma"\nneg,plain\n', "C")
        assert data.rows[0][1] == "with, comma"

    def test_ragged_row_rejected_with_line_number(self):
        with pytest.raises(RaggedRow, match="line 3"):
            load_dataset("C,A\npos,a0\nneg\n", "C")

    def test_missing_class_column(self):
        with pytest.raises(MissingClassColumn):
            load_dataset("X,Y\na,b\n", "C")

    def test_single_state_class_rejected(self):
        with pytest.raises(SingleStateClass):
            load_dataset("C,A\npos,a0\npos,a1\n", "C")

    def test_empty_file_rejected(self):
        with pytest.raises(ParseError):
            load_dataset("", "C")

    def test_prostate_shaped_fixture_dimensions(self):
        text = (FIXTURES / "prostate_shaped.csv").read_text()
        data = load_dataset(text, "outcome5y")
        assert data.n_rows == 496
        assert len(data.columns) == 11
        labels = [r[data.class_index] for r in data.rows]
        assert labels.count("deceased") == 352
        assert labels.count("alive") == 144

    def test_round_trip_through_writer(self):
        text = (FIXTURES / "synthetic_train.csv").read_text()
        data = load_dataset(text, "C")
        assert dataset_to_csv(data) == text

    def test_dataset_digest_covers_class_choice(self):
        text = "A,B\nx,u\ny,v\nx,u\n"
        assert dataset_digest(load_dataset(text, "A")) != dataset_digest(
            load_dataset(text, "B")
        )


class TestEditDocuments:
    def test_round_trip(self):
        net = load_network((FIXTURES / "synthetic_network.json").read_text())
        doc = {"kind": "add", "a": "A", "b": "C", "direction": "a_to_b"}
        edit = edit_from_document(doc, net.structure)
        assert edit_document(edit, net.structure) == {
            "kind": "add", "a": "A", "b": "C",
            "direction": "a_to_b", "sequence_index": 0,
        }

    def test_unknown_variable_rejected(self):
        net = load_network((FIXTURES / "synthetic_network.json").read_text())
        with pytest.raises(ParseError, match="Ghost"):
            edit_from_document({"kind": "remove", "a": "Ghost", "b": "C"}, net.structure)

    def test_direction_only_for_add(self):
        net = load_network((FIXTURES / "synthetic_network.json").read_text())
        with pytest.raises(ParseError):
            edit_from_document(
                {"kind": "remove", "a": "A", "b": "C", "direction": "a_to_b"},
                net.structure,
            )


class TestReportStability:
    def test_digest_ignores_timestamp(self):
        doc = json.loads((FIXTURES / "golden_refine_report.json").read_text())
        assert doc["rng_algorithm"] == RNG_ALGORITHM
        recomputed = report_digest(doc)
        assert recomputed == doc["digest"]
        doc2 = dict(doc, created_at="2099-01-01T00:00:00+00:00")
        assert report_digest(doc2) == doc["digest"]

    def test_canonical_json_is_stable(self):
        doc = json.loads((FIXTURES / "golden_eval_report.json").read_text())
        assert canonical_json(doc) == canonical_json(json.loads(canonical_json(doc)))

    def test_golden_reports_parse_and_carry_inputs(self):
        for name in ("golden_refine_report.json", "golden_eval_report.json"):
            doc = json.loads((FIXTURES / name).read_text())
            assert doc["format_version"] == 1
            assert doc["inputs"]
            assert doc["rng_algorithm"] == RNG_ALGORITHM
