#!/usr/bin/env python3
"""Regenerate the committed fixtures deterministically.

Run from the repository root:  python3 scripts/make_fixtures.py
Outputs land in fixtures/. Golden reports are produced through the CLI
so they stay in lockstep with the shipped report schema.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

from expertbayes import (  # noqa: E402
    Cpt,
    Network,
    NetworkStructure,
    SplitMix64,
    Variable,
    forward_sample,
    uniform_cpt,
)
from expertbayes.cli import main as cli_main  # noqa: E402
from expertbayes.formats import dataset_to_csv, save_network  # noqa: E402


def synthetic_truth() -> Network:
    """A drives the class C; B is noise."""
    A = Variable("A", ("a0", "a1"))
    B = Variable("B", ("b0", "b1"))
    C = Variable("C", ("neg", "pos"))
    s = NetworkStructure((A, B, C), frozenset({(0, 2)}))
    cpts = (
        Cpt(0, (), (), np.array([[0.5, 0.5]])),
        Cpt(1, (), (), np.array([[0.5, 0.5]])),
        Cpt(2, (0,), (2,), np.array([[0.85, 0.15], [0.15, 0.85]])),
    )
    return Network(s, cpts, 2)


def edgeless_expert() -> Network:
    A = Variable("A", ("a0", "a1"))
    B = Variable("B", ("b0", "b1"))
    C = Variable("C", ("neg", "pos"))
    s = NetworkStructure((A, B, C), frozenset())
    return Network(s, tuple(uniform_cpt(s, i) for i in range(3)), 2)


def example_network_with_priors() -> Network:
    """Tiny document exercising expert-supplied CPTs."""
    C = Variable("C", ("pos", "neg"))
    A = Variable("A", ("a0", "a1"))
    s = NetworkStructure((C, A), frozenset({(0, 1)}))
    cpts = (
        Cpt(0, (), (), np.array([[0.3, 0.7]])),
        Cpt(1, (0,), (2,), np.array([[0.9, 0.1], [0.25, 0.75]])),
    )
    return Network(s, cpts, 0)


def prostate_shaped_csv() -> str:
    """496 rows, 11 columns, 352/144 class split, sparse missing cells.

    Purely synthetic data mimicking the published table shape; the
    attribute names are plausible clinical featuresing nothing more.
    """
    columns = [
        ("age_band", ("lt65", "65to75", "gt75")),
        ("weight_band", ("normal", "over")),
        ("family_history", ("no", "yes")),
        ("sbp_band", ("normal", "high")),
        ("dbp_band", ("normal", "high")),
        ("hemoglobin_band", ("low", "normal")),
        ("hypoechoic_nodule", ("absent", "present")),
        ("psa_band", ("lt4", "4to10", "gt10")),
        ("tumor_size_band", ("small", "large")),
        ("doubling_time_band", ("slow", "fast")),
    ]
    rng = SplitMix64(202406)
    lines = [",".join([c for c, _ in columns] + ["outcome5y"])]
    labels = ["deceased"] * 352 + ["alive"] * 144
    # deterministic interleave so the file isn't sorted by class
    order = list(range(496))
    rng.shuffle(order)
    labels = [labels[i] for i in order]
    for label in labels:
        row = []
        risk = 0.70 if label == "deceased" else 0.30
        for name, states in columns:
            if rng.float53() < 0.01:
                row.append("?")
                continue
            if len(states) == 2:
                row.append(states[1] if rng.float53() < risk else states[0])
            else:
                u = rng.float53()
                split = (0.25, 0.60) if label == "deceased" else (0.55, 0.85)
                row.append(states[0] if u < split[0] else states[1] if u < split[1] else states[2])
        lines.append(",".join(row + [label]))
    return "\n".join(lines) + "\n"


def main() -> int:
    FIXTURES.mkdir(exist_ok=True)
    truth = synthetic_truth()
    train = forward_sample(truth, 300, seed=11)
    test = forward_sample(truth, 150, seed=12)

    (FIXTURES / "synthetic_train.csv").write_text(dataset_to_csv(train))
    (FIXTURES / "synthetic_test.csv").write_text(dataset_to_csv(test))
    (FIXTURES / "synthetic_network.json").write_text(save_network(edgeless_expert()))
    (FIXTURES / "example_network.json").write_text(
        save_network(example_network_with_priors())
    )
    (FIXTURES / "prostate_shaped.csv").write_text(prostate_shaped_csv())

    rc = cli_main(
        [
            "refine",
            "--network", str(FIXTURES / "synthetic_network.json"),
            "--data", str(FIXTURES / "synthetic_train.csv"),
            "--class", "C",
            "--positive", "pos",
            "--test", str(FIXTURES / "synthetic_test.csv"),
            "--iterations", "200",
            "--seed", "7",
            "--out", str(FIXTURES / "golden_refine_report.json"),
        ]
    )
    if rc != 0:
        return rc
    rc = cli_main(
        [
            "eval",
            "--learners", "original,expertbayes,k2,tan",
            "--network", str(FIXTURES / "synthetic_network.json"),
            "--data", str(FIXTURES / "synthetic_train.csv"),
            "--class", "C",
            "--positive", "pos",
            "--folds", "5",
            "--seed", "3",
            "--iterations", "60",
            "--out", str(FIXTURES / "golden_eval_report.json"),
        ]
    )
    return rc


if __name__ == "__main__":
    sys.exit(main())
