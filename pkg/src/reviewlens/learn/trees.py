"""CART decision trees and a probability-averaging random forest.

Training runs on a binned copy of the data (histogram splits, at most 64
bins per feature). When a feature has 64 or fewer distinct values the bin
boundaries are the midpoints between consecutive values, so the split
search is exact CART; denser features fall back to quantile bins. Stored
thresholds are real-valued, which lets prediction work on raw floats
without re-binning. The growth kernel is numba-compiled; everything is
deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

MAX_BINS = 64

_LCG_MULT = np.uint64(6364136223846793005)
_LCG_INC = np.uint64(1442695040888963407)


@dataclass(frozen=True)
class DecisionTreeConfig:
    max_depth: int = 16
    min_samples_split: int = 2
    max_features: int | str | None = None


@dataclass(frozen=True)
class RandomForestConfig:
    n_trees: int = 225
    max_depth: int = 16
    min_samples_split: int = 2
    max_features: int | str | None = "sqrt"
    bootstrap: bool = True


@njit(cache=True)
def _gini_cost(n0, n1):
    # n * gini(n0, n1); additive over children, so lower is purer.
    n = n0 + n1
    if n == 0.0:
        return 0.0
    return n - (n0 * n0 + n1 * n1) / n


@njit(cache=True)
def _grow(codes, y, order, n_bins, max_depth, min_split, mtry, seed,
          feature, thr_bin, left, right, count0, count1, importance):
    n_feat = codes.shape[1]
    hist0 = np.zeros(MAX_BINS, np.float64)
    hist1 = np.zeros(MAX_BINS, np.float64)
    cand = np.empty(n_feat, np.int64)
    cap = 2 * max_depth + 8
    st_node = np.empty(cap, np.int64)
    st_start = np.empty(cap, np.int64)
    st_end = np.empty(cap, np.int64)
    st_depth = np.empty(cap, np.int64)
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = order.shape[0]
    st_depth[0] = 0
    top = 1
    n_nodes = 1
    state = np.uint64(seed) * _LCG_MULT + _LCG_INC
    while top > 0:
        top -= 1
        node = st_node[top]
        start = st_start[top]
        end = st_end[top]
        depth = st_depth[top]
        n0 = 0
        n1 = 0
        for i in range(start, end):
            if y[order[i]] == 1:
                n1 += 1
            else:
                n0 += 1
        count0[node] = n0
        count1[node] = n1
        n = end - start
        if n0 == 0 or n1 == 0 or depth >= max_depth or n < min_split:
            feature[node] = -1
            continue
        parent_cost = _gini_cost(float(n0), float(n1))
        for f in range(n_feat):
            cand[f] = f
        m = mtry if mtry < n_feat else n_feat
        for j in range(m):
            state = state * _LCG_MULT + _LCG_INC
            span = np.uint64(n_feat - j)
            r = j + int(np.uint64(state >> np.uint64(33)) % span)
            tmp = cand[j]
            cand[j] = cand[r]
            cand[r] = tmp
        # Candidates scanned in ascending feature order so equal-gain ties
        # always resolve to the lowest feature id, keeping growth stable.
        for a in range(m):
            lo = a
            for b in range(a + 1, m):
                if cand[b] < cand[lo]:
                    lo = b
            tmp = cand[a]
            cand[a] = cand[lo]
            cand[lo] = tmp
        best_gain = 1e-12
        best_f = -1
        best_t = -1
        for ci in range(m):
            f = cand[ci]
            nb = n_bins[f]
            if nb <= 1:
                continue
            for b in range(nb):
                hist0[b] = 0.0
                hist1[b] = 0.0
            for i in range(start, end):
                c = codes[order[i], f]
                if y[order[i]] == 1:
                    hist1[c] += 1.0
                else:
                    hist0[c] += 1.0
            l0 = 0.0
            l1 = 0.0
            for t in range(nb - 1):
                l0 += hist0[t]
                l1 += hist1[t]
                nl = l0 + l1
                if nl == 0.0 or nl == n:
                    continue
                child_cost = _gini_cost(l0, l1) + _gini_cost(n0 - l0, n1 - l1)
                gain = parent_cost - child_cost
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_t = t
        if best_f < 0:
            feature[node] = -1
            continue
        i = start
        j = end - 1
        while i <= j:
            if codes[order[i], best_f] <= best_t:
                i += 1
            else:
                tmp = order[i]
                order[i] = order[j]
                order[j] = tmp
                j -= 1
        mid = i
        feature[node] = best_f
        thr_bin[node] = best_t
        importance[best_f] += best_gain
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        left[node] = lid
        right[node] = rid
        st_node[top] = rid
        st_start[top] = mid
        st_end[top] = end
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = lid
        st_start[top] = start
        st_end[top] = mid
        st_depth[top] = depth + 1
        top += 1
    return n_nodes


@njit(cache=True)
def _accumulate_proba(X, feature, threshold, left, right, p1, out):
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] += p1[node]


@dataclass(frozen=True)
class TreeArrays:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    count0: np.ndarray
    count1: np.ndarray

    @property
    def leaf_p1(self) -> np.ndarray:
        total = self.count0 + self.count1
        return np.where(total > 0, self.count1 / np.maximum(total, 1), 0.5)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)


def compute_bins(X: np.ndarray, max_bins: int = MAX_BINS):
    """Per-feature bin edges and uint8 codes for histogram growth."""
    n, n_feat = X.shape
    codes = np.empty((n, n_feat), np.uint8)
    n_bins = np.empty(n_feat, np.int64)
    edges_list: list[np.ndarray] = []
    for f in range(n_feat):
        col = X[:, f]
        distinct = np.unique(col)
        if len(distinct) <= max_bins:
            edges = (distinct[:-1] + distinct[1:]) / 2.0
        else:
            quantiles = np.quantile(col, np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
            edges = np.unique(quantiles)
            edges = edges[edges < distinct[-1]]
        edges_list.append(edges)
        codes[:, f] = np.searchsorted(edges, col, side="left").astype(np.uint8)
        n_bins[f] = len(edges) + 1
    return codes, edges_list, n_bins


def _resolve_mtry(max_features, n_feat: int) -> int:
    if max_features is None:
        return n_feat
    if max_features == "sqrt":
        return max(1, int(np.sqrt(n_feat)))
    return max(1, min(int(max_features), n_feat))


def _grow_one(codes, y, order, n_bins, max_depth, min_split, mtry, seed, edges_list):
    n = len(order)
    max_nodes = min(2 * n + 1, 2 ** (max_depth + 1) + 1)
    feature = np.full(max_nodes, -1, np.int64)
    thr_bin = np.zeros(max_nodes, np.int64)
    left = np.zeros(max_nodes, np.int64)
    right = np.zeros(max_nodes, np.int64)
    count0 = np.zeros(max_nodes, np.int64)
    count1 = np.zeros(max_nodes, np.int64)
    importance = np.zeros(codes.shape[1], np.float64)
    n_nodes = _grow(codes, y, order, n_bins, max_depth, min_split, mtry,
                    np.uint64(seed), feature, thr_bin, left, right, count0, count1, importance)
    threshold = np.zeros(n_nodes, np.float64)
    for i in range(n_nodes):
        if feature[i] >= 0:
            threshold[i] = edges_list[feature[i]][thr_bin[i]]
    tree = TreeArrays(
        feature=feature[:n_nodes].copy(),
        threshold=threshold,
        left=left[:n_nodes].copy(),
        right=right[:n_nodes].copy(),
        count0=count0[:n_nodes].copy(),
        count1=count1[:n_nodes].copy(),
    )
    return tree, importance


def _prepare(X: np.ndarray, y: np.ndarray):
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    y = np.ascontiguousarray(np.asarray(y, dtype=np.int64))
    if X.ndim != 2 or len(y) != len(X):
        raise ValueError("X must be 2-D with one label per row")
    return X, y


def _normalized(importance: np.ndarray) -> np.ndarray:
    total = importance.sum()
    if total > 0:
        return importance / total
    return importance.copy()


@dataclass(frozen=True)
class DecisionTreeModel:
    config: DecisionTreeConfig
    tree: TreeArrays
    n_features: int
    feature_importances_: np.ndarray
    seed: int

    def predict_proba1(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
        out = np.zeros(len(X), np.float64)
        _accumulate_proba(X, self.tree.feature, self.tree.threshold,
                          self.tree.left, self.tree.right, self.tree.leaf_p1, out)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba1(X) >= 0.5).astype(np.int64)


@dataclass(frozen=True)
class RandomForestModel:
    config: RandomForestConfig
    trees: tuple[TreeArrays, ...]
    n_features: int
    feature_importances_: np.ndarray
    seed: int

    def predict_proba1(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
        out = np.zeros(len(X), np.float64)
        for tree in self.trees:
            _accumulate_proba(X, tree.feature, tree.threshold,
                              tree.left, tree.right, tree.leaf_p1, out)
        return out / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba1(X) >= 0.5).astype(np.int64)


def fit_decision_tree(X, y, config: DecisionTreeConfig = DecisionTreeConfig(),
                      seed: int = 0) -> DecisionTreeModel:
    X, y = _prepare(X, y)
    codes, edges_list, n_bins = compute_bins(X)
    order = np.arange(len(y), dtype=np.int64)
    mtry = _resolve_mtry(config.max_features, X.shape[1])
    tree, importance = _grow_one(codes, y, order, n_bins, config.max_depth,
                                 config.min_samples_split, mtry, seed, edges_list)
    return DecisionTreeModel(config=config, tree=tree, n_features=X.shape[1],
                             feature_importances_=_normalized(importance), seed=seed)


def fit_random_forest(X, y, config: RandomForestConfig = RandomForestConfig(),
                      seed: int = 0) -> RandomForestModel:
    X, y = _prepare(X, y)
    codes, edges_list, n_bins = compute_bins(X)
    mtry = _resolve_mtry(config.max_features, X.shape[1])
    n = len(y)
    tree_seeds = np.random.SeedSequence(seed).generate_state(2 * config.n_trees, np.uint64)
    trees = []
    importance = np.zeros(X.shape[1], np.float64)
    for t in range(config.n_trees):
        if config.bootstrap:
            rng = np.random.default_rng(tree_seeds[2 * t])
            order = rng.integers(0, n, n).astype(np.int64)
        else:
            order = np.arange(n, dtype=np.int64)
        tree, imp = _grow_one(codes, y, order, n_bins, config.max_depth,
                              config.min_samples_split, mtry,
                              int(tree_seeds[2 * t + 1]), edges_list)
        trees.append(tree)
        importance += imp
    return RandomForestModel(config=config, trees=tuple(trees), n_features=X.shape[1],
                             feature_importances_=_normalized(importance), seed=seed)
