"""External formats: network documents, dataset CSV, report documents.

Documents are JSON with canonical serialization (sorted keys, two-space
indent, shortest round-trip float formatting) so that re-serialization
is byte-stable. Schemas and the RNG algorithm identifier embedded in
reports are documented in docs/FORMATS.md.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from datetime import datetime, timezone
from math import prod
from typing import Any

import numpy as np

from .data import Column, Dataset
from .errors import (
    CyclicStructure,
    MissingClassColumn,
    ParseError,
    RaggedRow,
    SchemaVersionUnsupported,
    SingleStateClass,
)
from .evaluation import EvaluationReport
from .network import (
    AddDirection,
    CandidateEdit,
    Cpt,
    EditKind,
    Network,
    NetworkStructure,
    Variable,
    detect_cycle,
    uniform_cpt,
)
from .refine import RefinementRun

NETWORK_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1
RNG_ALGORITHM = "splitmix64-v1"

# Keys excluded from the stability digest (everything else must be
# byte-identical across reruns with the same inputs and seed).
VOLATILE_KEYS = ("created_at", "digest")

CPT_LOAD_TOL = 1e-6


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def report_digest(doc: dict) -> str:
    stable = {k: v for k, v in doc.items() if k not in VOLATILE_KEYS}
    return sha256_hex(canonical_json(stable))


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# Network documents
# ---------------------------------------------------------------------------


def network_document(network: Network) -> dict:
    """Canonical document for a network; only estimated CPTs are written."""
    s = network.structure
    doc: dict[str, Any] = {
        "format_version": NETWORK_FORMAT_VERSION,
        "class_variable": s.variables[network.class_var].name,
        "variables": [
            {"name": v.name, "states": list(v.states)} for v in s.variables
        ],
        "edges": [
            {"parent": s.variables[p].name, "child": s.variables[c].name}
            for p, c in s.sorted_edges
        ],
    }
    cpts = []
    for cpt in network.cpts:
        if not cpt.estimated:
            continue
        cpts.append(
            {
                "variable": s.variables[cpt.owner].name,
                "parents": [s.variables[p].name for p in cpt.parents],
                "rows": [[float(x) for x in row] for row in cpt.rows],
            }
        )
    if cpts:
        doc["cpts"] = cpts
    return doc


def save_network(network: Network) -> str:
    return canonical_json(network_document(network))


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParseError(message)


def network_from_document(doc: Any) -> Network:
    _require(isinstance(doc, dict), "network document must be a JSON object")
    version = doc.get("format_version")
    _require(version is not None, "missing field 'format_version'")
    if version != NETWORK_FORMAT_VERSION:
        raise SchemaVersionUnsupported(f"unsupported network format version {version!r}")

    raw_vars = doc.get("variables")
    _require(isinstance(raw_vars, list) and raw_vars, "field 'variables' must be a nonempty list")
    variables = []
    for i, rv in enumerate(raw_vars):
        _require(isinstance(rv, dict), f"variables[{i}] must be an object")
        name = rv.get("name")
        states = rv.get("states")
        _require(isinstance(name, str), f"variables[{i}].name must be a string")
        _require(
            isinstance(states, list) and all(isinstance(s, str) for s in states),
            f"variable {name!r}: states must be a list of strings",
        )
        try:
            variables.append(Variable(name, tuple(states)))
        except ValueError as e:
            raise ParseError(f"variable {name!r}: {e}") from None
    names = [v.name for v in variables]
    _require(len(set(names)) == len(names), "duplicate variable names")
    index = {n: i for i, n in enumerate(names)}

    raw_edges = doc.get("edges", [])
    _require(isinstance(raw_edges, list), "field 'edges' must be a list")
    edges = []
    for i, re_ in enumerate(raw_edges):
        _require(isinstance(re_, dict), f"edges[{i}] must be an object")
        for endpoint in ("parent", "child"):
            v = re_.get(endpoint)
            _require(isinstance(v, str), f"edges[{i}].{endpoint} must be a string")
            _require(v in index, f"edges[{i}].{endpoint}: unknown variable {v!r}")
        edges.append((index[re_["parent"]], index[re_["child"]]))
    _require(len(set(edges)) == len(edges), "duplicate edges")

    cls_name = doc.get("class_variable")
    _require(isinstance(cls_name, str), "field 'class_variable' must be a string")
    _require(cls_name in index, f"class_variable: unknown variable {cls_name!r}")

    try:
        structure = NetworkStructure(tuple(variables), frozenset(edges))
    except ValueError as e:
        raise ParseError(str(e)) from None
    if detect_cycle(structure):
        raise CyclicStructure("network document contains a directed cycle")

    cpts: list[Cpt | None] = [None] * structure.n
    raw_cpts = doc.get("cpts", [])
    _require(isinstance(raw_cpts, list), "field 'cpts' must be a list")
    for i, rc in enumerate(raw_cpts):
        _require(isinstance(rc, dict), f"cpts[{i}] must be an object")
        vname = rc.get("variable")
        _require(isinstance(vname, str) and vname in index, f"cpts[{i}].variable: unknown variable {vname!r}")
        node = index[vname]
        declared = rc.get("parents")
        _require(
            isinstance(declared, list) and all(isinstance(p, str) for p in declared),
            f"cpt for {vname!r}: parents must be a list of names",
        )
        _require(
            all(p in index for p in declared),
            f"cpt for {vname!r}: parents name unknown variables",
        )
        declared_idx = [index[p] for p in declared]
        canonical = structure.parents(node)
        _require(
            sorted(declared_idx) == list(canonical),
            f"cpt for {vname!r}: parents do not match the structure",
        )
        rows = rc.get("rows")
        cards_declared = [variables[p].n_states for p in declared_idx]
        n_cfg = prod(cards_declared) if cards_declared else 1
        n_states = variables[node].n_states
        _require(
            isinstance(rows, list) and len(rows) == n_cfg,
            f"cpt for {vname!r}: expected {n_cfg} rows",
        )
        table = np.empty((n_cfg, n_states))
        for ri, row in enumerate(rows):
            _require(
                isinstance(row, list) and len(row) == n_states,
                f"cpt for {vname!r}, row {ri}: expected {n_states} probabilities",
            )
            try:
                vals = [float(x) for x in row]
            except (TypeError, ValueError):
                raise ParseError(f"cpt for {vname!r}, row {ri}: non-numeric entry") from None
            _require(
                all(0.0 <= x <= 1.0 for x in vals),
                f"cpt for {vname!r}, row {ri}: probabilities must lie in [0, 1]",
            )
            total = sum(vals)
            _require(
                abs(total - 1.0) <= CPT_LOAD_TOL,
                f"cpt for {vname!r}, row {ri}: sums to {total!r}",
            )
            if abs(total - 1.0) > 1e-9:
                vals = [x / total for x in vals]
            table[ri] = vals
        if declared_idx != list(canonical):
            # Re-lay rows from the declared parent order into ascending order.
            remapped = np.empty_like(table)
            decl_strides = _int_strides(cards_declared)
            canon_cards = [variables[p].n_states for p in canonical]
            for ci, cfg in enumerate(np.ndindex(*canon_cards) if canon_cards else [()]):
                by_var = dict(zip(canonical, cfg))
                di = sum(by_var[p] * st for p, st in zip(declared_idx, decl_strides))
                remapped[ci] = table[di]
            table = remapped
        cards = tuple(variables[p].n_states for p in canonical)
        cpts[node] = Cpt(node, canonical, cards, table, estimated=True)

    filled = tuple(
        cpt if cpt is not None else uniform_cpt(structure, i)
        for i, cpt in enumerate(cpts)
    )
    try:
        return Network(structure, filled, index[cls_name])
    except ValueError as e:
        raise ParseError(str(e)) from None


def _int_strides(cards: list[int]) -> list[int]:
    out = []
    acc = 1
    for c in reversed(cards):
        out.append(acc)
        acc *= c
    return list(reversed(out))


def load_network(text: str | bytes) -> Network:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return network_from_document(doc)


# ---------------------------------------------------------------------------
# Candidate edit documents (service wire format)
# ---------------------------------------------------------------------------


def edit_document(edit: CandidateEdit, structure: NetworkStructure) -> dict:
    doc = {
        "kind": edit.kind.value,
        "a": structure.variables[edit.node_a].name,
        "b": structure.variables[edit.node_b].name,
        "sequence_index": edit.sequence_index,
    }
    if edit.direction is not None:
        doc["direction"] = edit.direction.value
    return doc


def edit_from_document(doc: Any, structure: NetworkStructure) -> CandidateEdit:
    _require(isinstance(doc, dict), "edit must be a JSON object")
    kind_raw = doc.get("kind")
    try:
        kind = EditKind(kind_raw)
    except ValueError:
        raise ParseError(f"unknown edit kind {kind_raw!r}") from None
    nodes = []
    for key in ("a", "b"):
        name = doc.get(key)
        _require(isinstance(name, str), f"edit field {key!r} must be a variable name")
        try:
            nodes.append(structure.index_of(name))
        except KeyError:
            raise ParseError(f"edit names unknown variable {name!r}") from None
    direction = None
    if kind == EditKind.ADD:
        raw = doc.get("direction", "a_to_b")
        try:
            direction = AddDirection(raw)
        except ValueError:
            raise ParseError(f"unknown edit direction {raw!r}") from None
    elif "direction" in doc:
        raise ParseError("direction is only valid for add edits")
    seq = doc.get("sequence_index", 0)
    _require(isinstance(seq, int) and seq >= 0, "sequence_index must be a nonnegative integer")
    try:
        return CandidateEdit(kind, nodes[0], nodes[1], direction, seq)
    except ValueError as e:
        raise ParseError(str(e)) from None


# ---------------------------------------------------------------------------
# Dataset CSV
# ---------------------------------------------------------------------------


def load_dataset(
    text: str | bytes, class_column: str, missing_token: str = "?"
) -> Dataset:
    """Parse a comma-separated file with a header row.

    State sets are inferred per column in first-appearance order; cells
    equal to ``missing_token`` become missing markers.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file: a header row is required") from None
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header")
    if class_column not in header:
        raise MissingClassColumn(f"no column named {class_column!r} in header")

    n_cols = len(header)
    states: list[list[str]] = [[] for _ in range(n_cols)]
    seen: list[set[str]] = [set() for _ in range(n_cols)]
    rows = []
    for ri, record in enumerate(reader, start=2):
        if not record:
            continue  # tolerate blank trailing lines
        if len(record) != n_cols:
            raise RaggedRow(f"line {ri}: {len(record)} cells, header has {n_cols}")
        cells = []
        for ci, cell in enumerate(record):
            if cell == missing_token:
                cells.append(None)
            else:
                if cell not in seen[ci]:
                    seen[ci].add(cell)
                    states[ci].append(cell)
                cells.append(cell)
        rows.append(tuple(cells))

    cls_i = header.index(class_column)
    if len(states[cls_i]) < 2:
        raise SingleStateClass(
            f"class column {class_column!r} has {len(states[cls_i])} observed state(s)"
        )
    columns = tuple(Column(h, tuple(states[i])) for i, h in enumerate(header))
    return Dataset(columns, tuple(rows), class_column)


def dataset_summary(data: Dataset) -> dict:
    return {
        "rows": data.n_rows,
        "class_column": data.class_column,
        "columns": [
            {"name": c.name, "states": list(c.states)} for c in data.columns
        ],
    }


def dataset_to_csv(data: Dataset, missing_token: str = "?") -> str:
    """Serialize rows back to the CSV convention load_dataset reads."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([c.name for c in data.columns])
    for row in data.rows:
        writer.writerow([missing_token if cell is None else cell for cell in row])
    return out.getvalue()


def dataset_document(data: Dataset) -> dict:
    """Canonical dataset content, the basis of dataset digests/ids."""
    return {
        "class_column": data.class_column,
        "columns": [
            {"name": c.name, "states": list(c.states)} for c in data.columns
        ],
        "rows": [list(row) for row in data.rows],
    }


def dataset_digest(data: Dataset) -> str:
    return sha256_hex(canonical_json(dataset_document(data)))


def network_digest(network: Network) -> str:
    return sha256_hex(canonical_json(network_document(network)))


# ---------------------------------------------------------------------------
# Report documents
# ---------------------------------------------------------------------------


def refinement_config_document(config) -> dict:
    return {
        "iterations": config.iterations,
        "seed": config.seed,
        "positive_state": config.positive_state,
        "threshold": config.threshold,
        "pseudocount": config.pseudocount,
        "redraw_rejected": config.redraw_rejected,
    }


def refine_report_document(
    run: RefinementRun,
    inputs: dict[str, str],
    created_at: str | None = None,
) -> dict:
    s = run.best_net.structure
    candidates = []
    for outcome in run.candidates:
        entry: dict[str, Any] = {
            "index": outcome.edit.sequence_index,
            "edit": edit_document(outcome.edit, s),
        }
        if outcome.accepted:
            entry["train_cci"] = outcome.train_score
        else:
            entry["rejected"] = outcome.rejection
        candidates.append(entry)
    doc: dict[str, Any] = {
        "format_version": REPORT_FORMAT_VERSION,
        "kind": "refine",
        "rng_algorithm": RNG_ALGORITHM,
        "created_at": created_at or utc_now_iso(),
        "inputs": dict(inputs),
        "config": refinement_config_document(run.config),
        "original": {
            "train_cci": run.original_train_score,
            "test_cci": run.original_test_score,
        },
        "best": {
            "train_cci": run.best_train_score,
            "test_cci": run.best_test_score,
            "edit_index": run.best_edit_index,
            "edit": (
                edit_document(run.best_edit, s) if run.best_edit is not None else None
            ),
            "network": network_document(run.best_net),
        },
        "candidates": candidates,
    }
    doc["digest"] = report_digest(doc)
    return doc


def eval_report_document(
    report: EvaluationReport,
    inputs: dict[str, str],
    created_at: str | None = None,
) -> dict:
    learners = []
    for lr in report.learners:
        learners.append(
            {
                "name": lr.name,
                "fold_cci": list(lr.fold_cci),
                "macro_cci": lr.macro_cci,
                "pr": [
                    {
                        "threshold": p.threshold,
                        "precision": p.precision,
                        "recall": p.recall,
                        "tp": p.tp,
                        "fp": p.fp,
                        "fn": p.fn,
                        "tn": p.tn,
                    }
                    for p in lr.pr_points
                ],
            }
        )
    doc: dict[str, Any] = {
        "format_version": REPORT_FORMAT_VERSION,
        "kind": "evaluate",
        "rng_algorithm": RNG_ALGORITHM,
        "created_at": created_at or utc_now_iso(),
        "inputs": dict(inputs),
        "folds": {
            "k": report.plan.k,
            "seed": report.plan.seed,
            "stratified": report.plan.stratified,
        },
        "positive_state": report.positive_state,
        "cci_threshold": report.cci_threshold,
        "thresholds": list(report.thresholds),
        "baseline_precision": report.baseline_precision,
        "learners": learners,
        "pairwise_p": [
            {"a": a, "b": b, "p": p} for a, b, p in report.pairwise_p
        ],
        "pairwise_mcnemar": [
            {"a": a, "b": b, "p": p} for a, b, p in report.pairwise_mcnemar
        ],
    }
    doc["digest"] = report_digest(doc)
    return doc


def learn_report_document(
    network: Network,
    algorithm: str,
    inputs: dict[str, str],
    created_at: str | None = None,
) -> dict:
    doc: dict[str, Any] = {
        "format_version": REPORT_FORMAT_VERSION,
        "kind": "learn",
        "rng_algorithm": RNG_ALGORITHM,
        "created_at": created_at or utc_now_iso(),
        "inputs": dict(inputs),
        "algorithm": algorithm,
        "edge_count": len(network.structure.edges),
        "network": network_document(network),
    }
    doc["digest"] = report_digest(doc)
    return doc
