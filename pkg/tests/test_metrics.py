"""Metric definitions against brute-force oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feedguard.errors import DataError
from feedguard.metrics import (ConfusionMatrix, accuracy, auroc, confusion,
                               f1, full_report, macro_f1, precision, recall)


def pairwise_auroc(probs, labels):
    """O(n^2) oracle: fraction of (pos, neg) pairs won, half credit for ties."""
    pos = [p for p, y in zip(probs, labels) if y == 1]
    neg = [p for p, y in zip(probs, labels) if y == 0]
    wins = 0.0
    for pp in pos:
        for pn in neg:
            if pp > pn:
                wins += 1.0
            elif pp == pn:
                wins += 0.5
    return wins / (len(pos) * len(neg))


class TestConfusion:
    def test_basic_counts(self):
        cm = confusion([0.9, 0.1], [1, 0], 0.5)
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (1, 1, 0, 0)

    def test_boundary_counts_as_positive(self):
        cm = confusion([0.5], [0], 0.5)
        assert cm.fp == 1 and cm.tn == 0

    def test_length_mismatch_rejected(self):
        with pytest.raises(DataError):
            confusion([0.5, 0.6], [1], 0.5)

    def test_total_is_input_size(self):
        rng = np.random.default_rng(0)
        probs = rng.random(57)
        labels = rng.integers(0, 2, size=57)
        cm = confusion(probs, labels, 0.3)
        assert cm.total == 57


class TestScalarMetrics:
    def test_equations_on_random_matrices(self):
        """accuracy/precision/recall/F1 match the defining equations on
        1,000 random confusion matrices."""
        rng = np.random.default_rng(42)
        for _ in range(1000):
            tp, fp, tn, fn = (int(x) for x in rng.integers(0, 500, size=4))
            if tp + fp + tn + fn == 0:
                tp = 1
            cm = ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)
            assert accuracy(cm) == (tp + tn) / (tp + tn + fp + fn)
            p_exp = tp / (tp + fp) if tp + fp else 0.0
            r_exp = tp / (tp + fn) if tp + fn else 0.0
            assert precision(cm) == p_exp
            assert recall(cm) == r_exp
            f_exp = 2 * p_exp * r_exp / (p_exp + r_exp) if p_exp + r_exp else 0.0
            assert f1(cm) == f_exp

    def test_symmetric_case(self):
        cm = ConfusionMatrix(tp=1, fp=1, tn=1, fn=1)
        assert accuracy(cm) == precision(cm) == recall(cm) == f1(cm) == 0.5

    def test_degenerate_denominators(self):
        assert precision(ConfusionMatrix(tp=0, fp=0, tn=5, fn=3)) == 0.0
        assert recall(ConfusionMatrix(tp=0, fp=2, tn=5, fn=0)) == 0.0
        assert f1(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0)) == 0.0

    def test_accuracy_integer_identity(self):
        rng = np.random.default_rng(1)
        probs = rng.random(321)
        labels = rng.integers(0, 2, size=321)
        cm = confusion(probs, labels, 0.4)
        assert round(accuracy(cm) * cm.total) == cm.tp + cm.tn

    def test_paper_scale_confusion_arithmetic(self):
        """Accuracy from the published test-split confusion counts:
        FP=1068, FN=760, N=60,484 at prevalence 64.7%."""
        n = 60_484
        n_pos = round(0.647 * n)
        cm = ConfusionMatrix(tp=n_pos - 760, fn=760,
                             tn=(n - n_pos) - 1068, fp=1068)
        assert cm.total == n
        assert accuracy(cm) == pytest.approx(0.9698, abs=1e-4)


class TestMacroF1:
    def test_perfect_classifier(self):
        assert macro_f1([0.9, 0.9, 0.1], [1, 1, 0], 0.5) == 1.0

    def test_all_predict_positive_on_balanced(self):
        # class-1 F1 = 2/3, class-0 F1 = 0 -> macro 1/3
        probs = [0.9, 0.8, 0.9, 0.8]
        labels = [1, 1, 0, 0]
        assert macro_f1(probs, labels, 0.5) == pytest.approx(1 / 3)

    def test_relabel_flip_invariance(self):
        rng = np.random.default_rng(2)
        probs = rng.random(40)
        labels = rng.integers(0, 2, size=40)
        # swapping classes and flipping the score axis swaps the per-class
        # F1s, so the macro average is unchanged; the asymmetric boundary
        # rule is dodged by keeping probs away from the grid
        probs = np.round(probs, 3) + 0.0001
        direct = macro_f1(probs, labels, 0.5)
        flipped = macro_f1(1.0 - probs, 1 - labels, 0.5)
        assert direct == pytest.approx(flipped, abs=1e-12)


class TestAuroc:
    def test_perfectly_separated(self):
        assert auroc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0

    def test_hand_computed_pairs(self):
        # pos {0.9, 0.4}, neg {0.6, 0.1}: 3 of 4 pairs won
        assert auroc([0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0]) == 0.75

    def test_single_class_rejected(self):
        with pytest.raises(DataError):
            auroc([0.5, 0.7], [1, 1])

    def test_matches_pairwise_oracle_exactly(self):
        """Rank computation equals the O(n^2) oracle on 1,000 random
        instances of size <= 200, ties included."""
        rng = np.random.default_rng(7)
        for trial in range(1000):
            n = int(rng.integers(2, 201))
            # coarse grid forces plenty of ties
            probs = rng.choice(np.linspace(0, 1, 11), size=n)
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            assert auroc(probs, labels) == pairwise_auroc(probs, labels), trial

    def test_complement_identity_without_ties(self):
        rng = np.random.default_rng(8)
        probs = rng.permutation(np.linspace(0.01, 0.99, 60))
        labels = rng.integers(0, 2, size=60)
        labels[0], labels[1] = 0, 1
        assert auroc(probs, labels) + auroc(1.0 - probs, labels) == pytest.approx(1.0)

    @given(st.integers(10, 80), st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_monotone_transform_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        probs = rng.random(n)
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        base = auroc(probs, labels)
        assert auroc(np.exp(3 * probs), labels) == pytest.approx(base, abs=1e-12)
        assert auroc(probs ** 3, labels) == pytest.approx(base, abs=1e-12)


class TestFullReport:
    def test_fields_consistent(self):
        rng = np.random.default_rng(9)
        probs = rng.random(100)
        labels = rng.integers(0, 2, size=100)
        labels[0], labels[1] = 0, 1
        rep = full_report(probs, labels, 0.6)
        cm = rep.confusion
        assert rep.accuracy == accuracy(cm)
        assert rep.f1 == f1(cm)
        assert rep.tau == 0.6
        assert 0.0 <= rep.auroc <= 1.0
        d = rep.as_dict()
        assert d["confusion"]["tp"] == cm.tp
