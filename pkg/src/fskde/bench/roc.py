"""ROC curves and AUC for distance-based matching (smaller distance = match)."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata


def roc_auc(pos_distances, neg_distances) -> float:
    """P(d_pos < d_neg) + P(d_pos == d_neg) / 2, via the Mann-Whitney rank sum."""
    pos = np.asarray(pos_distances, dtype=float).ravel()
    neg = np.asarray(neg_distances, dtype=float).ravel()
    if pos.size == 0 or neg.size == 0:
        raise ValueError("AUC needs at least one positive and one negative distance")
    ranks = rankdata(np.concatenate([pos, neg]))
    u = ranks[pos.size:].sum() - neg.size * (neg.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def roc_curve(pos_distances, neg_distances):
    """(false positive rate, true positive rate) at every distinct threshold.

    A pair is called corresponding when its distance is <= the threshold.
    """
    pos = np.sort(np.asarray(pos_distances, dtype=float).ravel())
    neg = np.sort(np.asarray(neg_distances, dtype=float).ravel())
    thresholds = np.unique(np.concatenate([pos, neg]))
    tpr = np.searchsorted(pos, thresholds, side="right") / pos.size
    fpr = np.searchsorted(neg, thresholds, side="right") / neg.size
    return np.concatenate([[0.0], fpr]), np.concatenate([[0.0], tpr])
