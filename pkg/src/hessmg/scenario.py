"""Representative-day synthesis.

Historical days are summarized by per-signal statistics, clustered with
k-means, and reduced to one representative day per cluster. A first-order
Markov chain fitted on the historical label sequence then generates the
synthetic optimization period.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass

import numpy as np

from .data import HistoricalDay

N_FEATURES = 12  # 4 statistics x 3 signals (price, total demand, pv cf)


def extract_features(day: HistoricalDay) -> np.ndarray:
    """Per-day feature vector: mean/std/max/min of price, demand, and PV.

    Standard deviations are population statistics. Demand is the sum of
    charger and warehouse load.
    """
    out = []
    demand = day.demand_ch + day.demand_wh
    for signal in (day.price, demand, day.pv_cf):
        out.extend([signal.mean(), signal.std(), signal.max(), signal.min()])
    vec = np.array(out)
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{day.date}: non-finite feature")
    return vec


def standardize(features: np.ndarray) -> np.ndarray:
    """Z-score each feature column; constant columns are left at zero."""
    mu = features.mean(axis=0)
    sigma = features.std(axis=0)
    safe = np.where(sigma > 0, sigma, 1.0)
    return (features - mu) / safe


def _kmeans_pp_init(x, w, rng):
    """k-means++ seeding: spread initial centroids by squared distance."""
    n = len(x)
    centroids = np.empty((w, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    d2 = np.sum((x - centroids[0]) ** 2, axis=1)
    for j in range(1, w):
        total = d2.sum()
        if total <= 0:
            centroids[j] = x[rng.integers(n)]
        else:
            centroids[j] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((x - centroids[j]) ** 2, axis=1))
    return centroids


def _lloyd(x, centroids, max_iter=300, tol=1e-12):
    """Lloyd iterations; empty clusters are reseeded to the farthest point."""
    prev_obj = np.inf
    for _ in range(max_iter):
        d2 = np.sum((x[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        labels = np.argmin(d2, axis=1)
        obj = d2[np.arange(len(x)), labels].sum()
        assert obj <= prev_obj + 1e-9 * max(1.0, abs(prev_obj)), \
            "k-means objective increased"
        for j in range(len(centroids)):
            members = x[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
            else:
                centroids[j] = x[np.argmax(d2[np.arange(len(x)), labels])]
        if prev_obj - obj <= tol * max(1.0, abs(prev_obj)):
            break
        prev_obj = obj
    d2 = np.sum((x[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    obj = d2[np.arange(len(x)), labels].sum()
    return centroids, labels, obj


def kmeans(features: np.ndarray, w: int, seed: int, n_restarts: int = 10):
    """Cluster standardized feature rows into w groups.

    Best of `n_restarts` seeded k-means++/Lloyd runs; deterministic for a
    fixed seed. Returns (centroids, labels).
    """
    x = np.asarray(features, dtype=float)
    if w < 1 or w > len(x):
        raise ValueError(f"need 1 <= clusters <= {len(x)}, got {w}")
    best = None
    for restart in range(n_restarts):
        rng = np.random.default_rng((seed, restart))
        centroids, labels, obj = _lloyd(x, _kmeans_pp_init(x, w, rng))
        if best is None or obj < best[2]:
            best = (centroids, labels, obj)
    return best[0], best[1]


def select_representatives(features, centroids, labels) -> np.ndarray:
    """Index of the day closest to each centroid; ties go to the lowest index."""
    reps = np.empty(len(centroids), dtype=int)
    for j in range(len(centroids)):
        members = np.flatnonzero(labels == j)
        if not len(members):
            raise ValueError(f"cluster {j} is empty")
        d2 = np.sum((features[members] - centroids[j]) ** 2, axis=1)
        reps[j] = members[np.argmin(d2)]  # argmin returns the first minimum
    return reps


def cluster_weights(labels, n_hist: int) -> np.ndarray:
    """Empirical cluster probabilities, counts / n_hist."""
    counts = np.bincount(labels, minlength=np.max(labels) + 1)
    return counts / n_hist


def fit_transition(labels) -> np.ndarray:
    """Row-normalized day-to-day transition counts over the label sequence.

    A cluster never seen as a predecessor gets a uniform outgoing row.
    """
    w = int(np.max(labels)) + 1
    counts = np.zeros((w, w))
    for a, b in zip(labels[:-1], labels[1:]):
        counts[a, b] += 1
    rows = counts.sum(axis=1, keepdims=True)
    out = np.where(rows > 0, counts / np.where(rows > 0, rows, 1.0), 1.0 / w)
    return out


def sample_sequence(transition, weights, t_syn: int, seed: int) -> np.ndarray:
    """Sample a t_syn-day cluster label sequence from the fitted chain.

    The initial state is drawn from `weights`. Every cluster must appear at
    least once; when the raw sample misses some, the last occurrences of the
    currently most frequent label are overwritten by the missing clusters in
    ascending order.
    """
    w = len(weights)
    if t_syn < w:
        raise ValueError(f"cannot cover all clusters: t_syn={t_syn} < clusters={w}")
    rng = np.random.default_rng(seed)
    seq = np.empty(t_syn, dtype=int)
    seq[0] = rng.choice(w, p=weights)
    for t in range(1, t_syn):
        seq[t] = rng.choice(w, p=transition[seq[t - 1]])
    for missing in sorted(set(range(w)) - set(seq.tolist())):
        counts = np.bincount(seq, minlength=w)
        donor = int(np.argmax(counts))
        seq[np.flatnonzero(seq == donor)[-1]] = missing
    return seq


@dataclass
class ScenarioModel:
    """Clustering artifacts plus the sampled synthetic day sequence."""

    n_clusters: int
    centroids: np.ndarray        # (W, 12), standardized feature space
    labels: np.ndarray           # per historical day
    rep_days: np.ndarray         # historical index of each cluster representative
    weights: np.ndarray          # pi_w
    transition: np.ndarray       # (W, W) row-stochastic
    sequence: np.ndarray         # t_syn cluster labels
    representatives: list[HistoricalDay]  # one per cluster, index-aligned

    @property
    def synthetic_days(self) -> list[HistoricalDay]:
        return [self.representatives[j] for j in self.sequence]

    def validate(self):
        np.testing.assert_allclose(self.weights.sum(), 1.0, rtol=0, atol=1e-12)
        assert np.all(self.transition >= 0)
        np.testing.assert_allclose(
            self.transition.sum(axis=1), 1.0, rtol=0, atol=1e-12)
        assert set(self.sequence.tolist()) == set(range(self.n_clusters))
        assert all(self.labels[self.rep_days[j]] == j for j in range(self.n_clusters))

    def to_json(self) -> str:
        def day_dict(d):
            return {"date": d.date.isoformat(),
                    "price": d.price.tolist(),
                    "demand_ch": d.demand_ch.tolist(),
                    "demand_wh": d.demand_wh.tolist(),
                    "pv_cf": d.pv_cf.tolist()}
        return json.dumps({
            "n_clusters": self.n_clusters,
            "centroids": self.centroids.tolist(),
            "labels": self.labels.tolist(),
            "rep_days": self.rep_days.tolist(),
            "weights": self.weights.tolist(),
            "transition": self.transition.tolist(),
            "sequence": self.sequence.tolist(),
            "representatives": [day_dict(d) for d in self.representatives],
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioModel":
        raw = json.loads(text)
        reps = [HistoricalDay(
            date=dt.date.fromisoformat(d["date"]),
            price=np.array(d["price"]),
            demand_ch=np.array(d["demand_ch"]),
            demand_wh=np.array(d["demand_wh"]),
            pv_cf=np.array(d["pv_cf"]),
        ) for d in raw["representatives"]]
        return cls(
            n_clusters=raw["n_clusters"],
            centroids=np.array(raw["centroids"]),
            labels=np.array(raw["labels"], dtype=int),
            rep_days=np.array(raw["rep_days"], dtype=int),
            weights=np.array(raw["weights"]),
            transition=np.array(raw["transition"]),
            sequence=np.array(raw["sequence"], dtype=int),
            representatives=reps,
        )

    def __eq__(self, other):
        if not isinstance(other, ScenarioModel):
            return NotImplemented
        arrays = ("centroids", "labels", "rep_days", "weights", "transition", "sequence")
        return (self.n_clusters == other.n_clusters
                and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
                and self.representatives == other.representatives)


def build_scenario(days: list[HistoricalDay], w: int, t_syn: int, seed: int) -> ScenarioModel:
    """Full pipeline: features -> k-means -> representatives -> chain -> sample."""
    features = standardize(np.array([extract_features(d) for d in days]))
    centroids, labels = kmeans(features, w, seed)
    reps = select_representatives(features, centroids, labels)
    weights = cluster_weights(labels, len(days))
    transition = fit_transition(labels)
    sequence = sample_sequence(transition, weights, t_syn, seed)
    model = ScenarioModel(
        n_clusters=w, centroids=centroids, labels=labels, rep_days=reps,
        weights=weights, transition=transition, sequence=sequence,
        representatives=[days[i] for i in reps])
    model.validate()
    return model


def stationary_distribution(transition, n_iter=10_000, tol=1e-14) -> np.ndarray:
    """Stationary vector of a row-stochastic matrix by power iteration."""
    pi = np.full(len(transition), 1.0 / len(transition))
    for _ in range(n_iter):
        nxt = pi @ transition
        if np.abs(nxt - pi).sum() < tol:
            return nxt
        pi = nxt
    return pi
