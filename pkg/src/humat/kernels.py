"""Column-wise versions of the per-agent math in :mod:`humat.core`.

Each kernel works on all agents (or all directed network slots) at once and
must agree bit-for-bit with the scalar functions. Reductions over motives
are therefore written as explicit left-to-right loops instead of
``ndarray.sum``, whose pairwise summation changes the rounding.
"""

from __future__ import annotations

import numpy as np

from .errors import ZeroImportance

_NONE, _SOCIAL, _NON_SOCIAL = 0, 1, 2


def importance_totals(importance: np.ndarray) -> np.ndarray:
    total = np.zeros(importance.shape[0])
    for m in range(importance.shape[1]):
        total += importance[:, m]
    return total


def evaluations(importance: np.ndarray, satisfaction: np.ndarray) -> np.ndarray:
    """``(N, K)`` importance-weighted mean satisfaction per alternative."""
    n, n_m, n_k = satisfaction.shape
    num = np.zeros((n, n_k))
    for m in range(n_m):
        num += importance[:, m, None] * satisfaction[:, m, :]
    den = importance_totals(importance)
    if np.any(den == 0.0):
        raise ZeroImportance(f"agent position {int(np.flatnonzero(den == 0.0)[0])} has only zero importances")
    return num / den[:, None]


def dissonances(importance: np.ndarray, satisfaction: np.ndarray) -> np.ndarray:
    """``(N, K)`` balance ratio ``2 min(P, C) / (P + C)`` per alternative."""
    n, n_m, n_k = satisfaction.shape
    pros = np.zeros((n, n_k))
    cons = np.zeros((n, n_k))
    for m in range(n_m):
        w = importance[:, m, None]
        s = satisfaction[:, m, :]
        pros += np.where(s > 0.0, w, 0.0)
        cons += np.where(s < 0.0, w, 0.0)
    total = pros + cons
    out = np.zeros((n, n_k))
    np.divide(2.0 * np.minimum(pros, cons), total, out=out, where=total != 0.0)
    return out


def choose(evals: np.ndarray, current: np.ndarray | None = None) -> np.ndarray:
    """Row-wise argmax, sticking with ``current`` on ties, else the lowest index."""
    best = evals.max(axis=1)
    is_best = evals == best[:, None]
    first = np.argmax(is_best, axis=1)
    if current is None:
        return first.astype(np.int64)
    keep = is_best[np.arange(evals.shape[0]), current]
    return np.where(keep, current, first).astype(np.int64)


def like_minded_fractions(choice, believed_choice, owner, degree) -> np.ndarray:
    n = choice.shape[0]
    same = np.bincount(owner, weights=(believed_choice == choice[owner]), minlength=n)
    frac = np.ones(n)
    np.divide(same, degree, out=frac, where=degree > 0)
    return frac


def social_values(fraction: np.ndarray) -> np.ndarray:
    return 2.0 * fraction - 1.0


def social_sums(importance, satisfaction, choice, social_ids) -> np.ndarray:
    rows = np.arange(choice.shape[0])
    total = np.zeros(choice.shape[0])
    for m in social_ids:
        total += importance[:, m] * satisfaction[rows, m, choice]
    return total


def classify(dissonance, importance, satisfaction, choice, social_ids, epsilon: float) -> np.ndarray:
    rows = np.arange(choice.shape[0])
    d = dissonance[rows, choice]
    unhappy = social_sums(importance, satisfaction, choice, social_ids) < 0.0
    status = np.where(unhappy, _SOCIAL, _NON_SOCIAL)
    return np.where(d <= epsilon, _NONE, status).astype(np.int8)


def similarities(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise ``1 - L1(a, b) / M`` for two ``(S, M)`` importance arrays."""
    dist = np.zeros(a.shape[0])
    for m in range(a.shape[1]):
        dist += np.abs(a[:, m] - b[:, m])
    return 1.0 - dist / a.shape[1]


def mix(sim: np.ndarray, aspiration: np.ndarray, similarity_weight: float, aspiration_weight: float) -> np.ndarray:
    return np.clip(similarity_weight * sim + aspiration_weight * aspiration, 0.0, 1.0)


def segment_argmax(score: np.ndarray, owner: np.ndarray, n: int) -> np.ndarray:
    """For each owner, the first slot holding its maximal score (-1 if it has none).

    Slots of one owner are contiguous and sorted by alter id, so "first"
    means "lowest alter id".
    """
    out = np.full(n, -1, dtype=np.int64)
    if score.size == 0:
        return out
    best = np.full(n, -np.inf)
    np.maximum.at(best, owner, score)
    hits = np.flatnonzero(score == best[owner])
    owners, first = np.unique(owner[hits], return_index=True)
    out[owners] = hits[first]
    return out
