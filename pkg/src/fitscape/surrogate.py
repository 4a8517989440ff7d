"""Surrogate models over landscapes: CART, polynomial LASSO, ranking metrics.

The regression tree splits on level indices (threshold for grid options,
one-level-vs-rest for categorical) by greedy variance reduction, minimum
leaf size 1, no pruning, so its depth tracks how much interaction the data
needs. The LASSO expands options into indicator columns (levels 1..r-1, the
all-zeros level is the reference) and fits monomials over distinct options
up to a degree cap by cyclic coordinate descent with soft thresholding.

Any object with predict(space, ids) participates in evaluation, recall, and
search guidance; PredictionTable adapts a (ConfigId, prediction) CSV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import pandas as pd

from .errors import FitscapeError, PreconditionError, ValidationError
from .landscape import Landscape
from .space import ConfigSpace

DEFAULT_TRAIN_FRACTION = 0.01
DEFAULT_DEGREE_CAP = 5
DEFAULT_COLUMN_BOUND = 4096
DEFAULT_LASSO_ROW_CAP = 1 << 15
DEFAULT_MAX_ITER = 1000
DEFAULT_TOL = 1e-7
NONZERO_EPS = 1e-12


# ---------------------------------------------------------------- CART


@dataclass(frozen=True)
class TreeNode:
    """Internal split or leaf; leaf iff option < 0."""

    option: int
    threshold: int
    is_grid: bool
    left: "TreeNode | None"
    right: "TreeNode | None"
    mean: float
    count: int

    @property
    def is_leaf(self) -> bool:
        return self.option < 0


@dataclass(frozen=True)
class RegressionTree:
    root: TreeNode
    max_depth: int
    depth: int
    train_size: int
    seed: int
    train_ids: np.ndarray = field(repr=False)

    def predict(self, space: ConfigSpace, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        digits = space.digits_matrix(ids)
        out = np.empty(ids.shape[0], dtype=np.float64)
        self._assign(self.root, digits, np.arange(ids.shape[0]), out)
        return out

    def _assign(self, node: TreeNode, digits: np.ndarray, rows: np.ndarray,
                out: np.ndarray) -> None:
        if node.is_leaf:
            out[rows] = node.mean
            return
        col = digits[rows, node.option]
        go_left = col <= node.threshold if node.is_grid else col == node.threshold
        self._assign(node.left, digits, rows[go_left], out)
        self._assign(node.right, digits, rows[~go_left], out)

    def leaf_count(self) -> int:
        def walk(n: TreeNode) -> int:
            return 1 if n.is_leaf else walk(n.left) + walk(n.right)
        return walk(self.root)


def _best_split(space: ConfigSpace, digits: np.ndarray, y: np.ndarray):
    """Lowest-total-child-SSE split; ties to lowest (option, threshold).

    Returns (option, threshold, is_grid, child_sse) or None when no split
    separates the rows.
    """
    best = None
    n = y.shape[0]
    for o in range(space.n_options):
        col = digits[:, o]
        r = int(space.radices[o])
        cnt = np.bincount(col, minlength=r).astype(np.float64)
        s1 = np.bincount(col, weights=y, minlength=r)
        s2 = np.bincount(col, weights=y * y, minlength=r)
        if space.kinds[o] == 1:
            c_cnt = np.cumsum(cnt)
            c_s1 = np.cumsum(s1)
            c_s2 = np.cumsum(s2)
            for t in range(r - 1):
                nl = c_cnt[t]
                nr = n - nl
                if nl == 0 or nr == 0:
                    continue
                sse_l = c_s2[t] - c_s1[t] ** 2 / nl
                sse_r = (c_s2[-1] - c_s2[t]) - (c_s1[-1] - c_s1[t]) ** 2 / nr
                total = sse_l + sse_r
                if best is None or total < best[3]:
                    best = (o, t, True, total)
        else:
            tot_cnt = float(n)
            tot_s1 = float(s1.sum())
            tot_s2 = float(s2.sum())
            for v in range(r):
                nl = cnt[v]
                nr = tot_cnt - nl
                if nl == 0 or nr == 0:
                    continue
                sse_l = s2[v] - s1[v] ** 2 / nl
                sse_r = (tot_s2 - s2[v]) - (tot_s1 - s1[v]) ** 2 / nr
                total = sse_l + sse_r
                if best is None or total < best[3]:
                    best = (o, v, False, total)
    return best


def _grow(space: ConfigSpace, digits: np.ndarray, y: np.ndarray, depth: int,
          max_depth: int) -> TreeNode:
    mean = float(y.mean())
    leaf = TreeNode(option=-1, threshold=0, is_grid=False, left=None, right=None,
                    mean=mean, count=int(y.shape[0]))
    if depth >= max_depth or y.shape[0] < 2 or bool((y == y[0]).all()):
        return leaf
    best = _best_split(space, digits, y)
    if best is None:
        return leaf
    o, t, is_grid, _ = best
    col = digits[:, o]
    go_left = col <= t if is_grid else col == t
    left = _grow(space, digits[go_left], y[go_left], depth + 1, max_depth)
    right = _grow(space, digits[~go_left], y[~go_left], depth + 1, max_depth)
    return TreeNode(option=o, threshold=t, is_grid=is_grid, left=left, right=right,
                    mean=mean, count=int(y.shape[0]))


def _tree_depth(node: TreeNode) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(_tree_depth(node.left), _tree_depth(node.right))


def split_ids(l: Landscape, train_fraction: float, seed: int):
    """Seeded uniform train/holdout split of the known ids."""
    if not 0.0 < train_fraction <= 1.0:
        raise ValidationError("train fraction must be in (0, 1]")
    ids = l.known_ids()
    n_train = max(1, math.ceil(train_fraction * ids.shape[0]))
    rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    perm = rng.permutation(ids.shape[0])
    train = np.sort(ids[perm[:n_train]])
    holdout = np.sort(ids[perm[n_train:]])
    return train, holdout


def train_tree(l: Landscape, sample_fraction: float = DEFAULT_TRAIN_FRACTION,
               max_depth: int = 6, seed: int = 0) -> RegressionTree:
    """Greedy variance-reduction CART on a seeded uniform sample."""
    if max_depth < 0:
        raise ValidationError("max depth must be non-negative")
    train, _ = split_ids(l, sample_fraction, seed)
    if train.shape[0] < 2:
        raise ValidationError(
            f"training sample of {train.shape[0]} is too small (need at least 2)"
        )
    digits = l.space.digits_matrix(train)
    y = l.fitness_many(train)
    root = _grow(l.space, digits, y, 0, max_depth)
    return RegressionTree(
        root=root,
        max_depth=max_depth,
        depth=_tree_depth(root),
        train_size=int(train.shape[0]),
        seed=seed,
        train_ids=train,
    )


# ---------------------------------------------------------------- evaluation


def evaluate(model, l: Landscape, holdout_ids) -> float:
    """R^2 = 1 - SSE/SST of the model on the holdout ids."""
    holdout = np.asarray(holdout_ids, dtype=np.int64)
    if holdout.shape[0] < 2:
        raise ValidationError("holdout needs at least 2 ids")
    y = l.fitness_many(holdout)
    sst = float(((y - y.mean()) ** 2).sum())
    if sst == 0.0:
        raise ValidationError("zero holdout variance: R^2 undefined")
    pred = np.asarray(model.predict(l.space, holdout), dtype=np.float64)
    sse = float(((y - pred) ** 2).sum())
    return 1.0 - sse / sst


def top_n_recall(model, l: Landscape, true_top_k: int, predicted_top_n: int) -> float:
    """|true top-K  ∩  predicted top-N| / K, ties to the lowest ConfigId."""
    if true_top_k < 1:
        raise ValidationError("K must be at least 1")
    if not true_top_k <= predicted_top_n <= l.n_known:
        raise ValidationError("need K <= N <= number of known configs")
    ids = l.known_ids()
    true_top = ids[np.lexsort((ids, -l.gain))[:true_top_k]]
    pred = np.asarray(model.predict(l.space, ids), dtype=np.float64)
    pred_gain = pred if l.space.maximize else -pred
    pred_top = ids[np.lexsort((ids, -pred_gain))[:predicted_top_n]]
    hit = np.intersect1d(true_top, pred_top).shape[0]
    return hit / true_top_k


# ---------------------------------------------------------------- LASSO


@dataclass(frozen=True)
class LassoFit:
    """Sparse polynomial fit over an orthogonalized indicator expansion.

    Each option contributes standardized indicator columns for levels
    1..r-1 (level 0 is the reference); a monomial is the product of such
    columns over distinct options, re-standardized against the training
    rows. On a complete binary space this is an orthogonal design, so
    least squares decouples per column and soft thresholding yields exact
    zeros for absent degrees. terms maps each monomial, a tuple of
    (option, level) pairs, to its coefficient on the standardized-column
    scale; the empty tuple key is the intercept (the training mean).
    """

    degree_cap: int
    lam: float
    lam_source: str
    terms: dict[tuple, float]
    nonzero_fraction_per_degree: dict[int, float]
    converged: bool
    iterations: int
    final_max_change: float
    base_stats: dict[tuple[int, int], tuple[float, float]] = field(repr=False, default=None)
    mono_stats: dict[tuple, tuple[float, float]] = field(repr=False, default=None)

    def predict(self, space: ConfigSpace, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        digits = space.digits_matrix(ids)
        base = {}
        for (o, level), (mean, scale) in self.base_stats.items():
            base[(o, level)] = ((digits[:, o] == level) - mean) / scale
        out = np.full(ids.shape[0], self.terms[()], dtype=np.float64)
        for mono, coef in self.terms.items():
            if not mono or coef == 0.0:
                continue
            col = np.ones(ids.shape[0], dtype=np.float64)
            for key in mono:
                col *= base[key]
            m_mean, m_scale = self.mono_stats[mono]
            out += coef * ((col - m_mean) / m_scale)
        return out


def _indicator_columns(space: ConfigSpace) -> list[tuple[int, int]]:
    """(option, level) indicator list; level 0 is the dropped reference."""
    cols = []
    for o, opt in enumerate(space.options):
        for level in range(1, opt.n_levels):
            cols.append((o, level))
    return cols


def _count_monomials(space: ConfigSpace, degree_cap: int) -> int:
    """Monomial count without enumerating: sum over option subsets."""
    sizes = [opt.n_levels - 1 for opt in space.options]
    # dp[d] = number of monomials of degree d over options seen so far
    dp = [0] * (degree_cap + 1)
    dp[0] = 1
    for s in sizes:
        for d in range(degree_cap, 0, -1):
            dp[d] += dp[d - 1] * s
    return sum(dp[1:])


def _monomials(space: ConfigSpace, degree_cap: int) -> list[tuple]:
    per_option = {}
    for o, level in _indicator_columns(space):
        per_option.setdefault(o, []).append((o, level))
    opts = sorted(per_option)
    out = []
    for d in range(1, degree_cap + 1):
        for subset in combinations(opts, d):
            choices = [()]
            for o in subset:
                choices = [c + (ind,) for c in choices for ind in per_option[o]]
            out.extend(choices)
    return out


def _orthogonalized_design(space: ConfigSpace, ids: np.ndarray, monomials: list[tuple]):
    """Standardized monomial columns plus the stats needed to rebuild them.

    Returns (x, kept_monomials, base_stats, mono_stats). Monomials that come
    out constant on the given rows (a level never or always present) are
    dropped; their coefficient is fixed at zero.
    """
    digits = space.digits_matrix(ids)
    base = {}
    base_stats = {}
    for o, level in _indicator_columns(space):
        raw = (digits[:, o] == level).astype(np.float64)
        mean = float(raw.mean())
        scale = float(np.sqrt(np.mean((raw - mean) ** 2)))
        if scale == 0.0:
            continue
        base[(o, level)] = (raw - mean) / scale
        base_stats[(o, level)] = (mean, scale)
    cols = []
    kept = []
    mono_stats = {}
    for mono in monomials:
        if any(key not in base for key in mono):
            continue
        col = np.ones(ids.shape[0], dtype=np.float64)
        for key in mono:
            col = col * base[key]
        mean = float(col.mean())
        scale = float(np.sqrt(np.mean((col - mean) ** 2)))
        if scale == 0.0:
            continue
        cols.append((col - mean) / scale)
        kept.append(mono)
        mono_stats[mono] = (mean, scale)
    x = np.column_stack(cols) if cols else np.empty((ids.shape[0], 0), dtype=np.float64)
    return x, kept, base_stats, mono_stats


def _coordinate_descent(x: np.ndarray, y: np.ndarray, lam: float, max_iter: int,
                        tol: float):
    """LASSO via cyclic coordinate descent on standardized columns.

    Objective (1/2n)||y - Xb||^2 + lam*||b||_1; columns must have unit
    second moment. Returns (beta, iterations, max_change, objective_trace).
    """
    n, k = x.shape
    beta = np.zeros(k, dtype=np.float64)
    resid = y.copy()
    objective = []

    def obj() -> float:
        return float(resid @ resid) / (2 * n) + lam * float(np.abs(beta).sum())

    objective.append(obj())
    it = 0
    max_change = np.inf
    while it < max_iter:
        it += 1
        max_change = 0.0
        for c in range(k):
            old = beta[c]
            rho = float(x[:, c] @ resid) / n + old
            new = math.copysign(max(abs(rho) - lam, 0.0), rho)
            if new != old:
                resid += x[:, c] * (old - new)
                beta[c] = new
                max_change = max(max_change, abs(new - old))
        current = obj()
        if current > objective[-1] + 1e-10 * max(1.0, abs(objective[-1])):
            raise FitscapeError("internal: coordinate descent objective increased")
        objective.append(current)
        if max_change < tol:
            break
    return beta, it, max_change, objective


def lasso_poly(l: Landscape, degree_cap: int = DEFAULT_DEGREE_CAP,
               lam: float | None = None, max_iter: int = DEFAULT_MAX_ITER,
               tol: float = DEFAULT_TOL, column_bound: int = DEFAULT_COLUMN_BOUND,
               row_cap: int = DEFAULT_LASSO_ROW_CAP, seed: int = 0) -> LassoFit:
    """Sparse polynomial fit of fitness over indicator monomials.

    lam=None picks lambda by 5-fold cross-validated grid (20 log-spaced
    points down from the smallest all-zero lambda). Rows above row_cap are a
    seeded uniform subsample; fold assignment comes from the same stream.
    """
    if degree_cap < 1:
        raise ValidationError("degree cap must be at least 1")
    n_cols = _count_monomials(l.space, degree_cap)
    if n_cols > column_bound:
        raise ValidationError(
            f"design matrix needs {n_cols} columns, over the bound {column_bound}; "
            "lower the degree cap or raise the bound"
        )
    rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    ids = l.known_ids()
    if ids.shape[0] > row_cap:
        ids = np.sort(ids[rng.permutation(ids.shape[0])[:row_cap]])
    if ids.shape[0] < 2:
        raise ValidationError("LASSO needs at least 2 rows")
    monomials = _monomials(l.space, degree_cap)
    x, kept, base_stats, mono_stats = _orthogonalized_design(l.space, ids, monomials)
    y_raw = l.fitness_many(ids)
    y_mean = float(y_raw.mean())
    y = y_raw - y_mean
    lam_source = "given"
    if lam is None:
        lam, lam_source = _cv_lambda(x, y, max_iter, tol, rng)
    if lam < 0:
        raise ValidationError("lambda must be non-negative")
    beta, iterations, max_change, _ = _coordinate_descent(x, y, lam, max_iter, tol)
    converged = max_change < tol
    terms = {(): y_mean}
    coef_of = dict(zip(kept, beta))
    degree_total = {d: 0 for d in range(1, degree_cap + 1)}
    degree_nonzero = {d: 0 for d in range(1, degree_cap + 1)}
    for mono in monomials:
        coef = float(coef_of.get(mono, 0.0))
        terms[mono] = coef
        d = len(mono)
        degree_total[d] += 1
        if abs(coef) > NONZERO_EPS:
            degree_nonzero[d] += 1
    return LassoFit(
        degree_cap=degree_cap,
        lam=float(lam),
        lam_source=lam_source,
        terms=terms,
        nonzero_fraction_per_degree={
            d: (degree_nonzero[d] / degree_total[d] if degree_total[d] else 0.0)
            for d in degree_total
        },
        converged=converged,
        iterations=iterations,
        final_max_change=float(max_change),
        base_stats=base_stats,
        mono_stats=mono_stats,
    )


def _cv_lambda(x: np.ndarray, y: np.ndarray, max_iter: int, tol: float,
               rng: np.random.Generator):
    """5-fold CV over a log-spaced lambda grid; lowest mean MSE wins."""
    n = x.shape[0]
    if x.shape[1] == 0:
        return 0.0, "cv(degenerate)"
    lam_max = float(np.abs(x.T @ y).max()) / n
    if lam_max == 0.0:
        return 0.0, "cv(degenerate)"
    grid = lam_max * np.logspace(0, -3, 20)
    folds = rng.permutation(n) % 5
    mse = np.zeros(grid.shape[0], dtype=np.float64)
    for f in range(5):
        val = folds == f
        if not val.any() or val.all():
            continue
        x_tr, y_tr = x[~val], y[~val]
        x_va, y_va = x[val], y[val]
        for gi, lam in enumerate(grid):
            beta, _, _, _ = _coordinate_descent(x_tr, y_tr, float(lam), max_iter, tol)
            err = y_va - x_va @ beta
            mse[gi] += float(err @ err) / err.shape[0]
    best = int(np.argmin(mse))
    return float(grid[best]), "cv"


# ---------------------------------------------------------------- file oracle


@dataclass(frozen=True)
class PredictionTable:
    """Predictions from a (ConfigId, prediction) CSV; exact-id lookup."""

    ids: np.ndarray
    values: np.ndarray

    def predict(self, space: ConfigSpace, ids) -> np.ndarray:
        wanted = np.asarray(ids, dtype=np.int64)
        pos = np.searchsorted(self.ids, wanted)
        pos_c = np.minimum(pos, self.ids.shape[0] - 1)
        hit = self.ids[pos_c] == wanted
        if not hit.all():
            missing = int(wanted[~hit][0])
            raise PreconditionError(f"prediction table has no entry for ConfigId {missing}")
        return self.values[pos_c]


def write_predictions(path, ids, values) -> None:
    """CSV with exact round-trip floats (shortest repr)."""
    ids = np.asarray(ids, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ConfigId,prediction\n")
        for i, v in zip(ids, values):
            fh.write(f"{int(i)},{float(v)!r}\n")


def load_predictions(path) -> PredictionTable:
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path}: empty file") from None
    if list(frame.columns) != ["ConfigId", "prediction"]:
        raise ValidationError(f"{path}: expected header 'ConfigId,prediction'")
    if len(frame) == 0:
        raise ValidationError(f"{path}: no data rows")
    ids = frame["ConfigId"].to_numpy(dtype=np.int64)
    values = frame["prediction"].to_numpy(dtype=np.float64)
    if not np.isfinite(values).all():
        raise ValidationError(f"{path}: non-finite prediction")
    order = np.argsort(ids, kind="stable")
    ids = ids[order]
    if np.unique(ids).shape[0] != ids.shape[0]:
        raise ValidationError(f"{path}: duplicate ConfigId")
    return PredictionTable(ids=ids, values=values[order])
