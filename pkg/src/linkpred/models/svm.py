"""Soft-margin SVM trained in the dual by sequential minimal optimization.

The training objective is (lambda/2)||w||^2 + mean hinge loss, which maps to
the standard box-constrained dual with C = 1/(lambda*n). Scoring returns the
signed margin f(x) = sum_i alpha_i y_i K(x_i, x) + b.
"""

import numpy as np

from ..errors import ConvergenceError, DomainError
from .base import ModelConfig, TrainedModel, checked_labels

_POLY_DEGREE = 3


def resolve_gamma(cfg: ModelConfig, x: np.ndarray) -> float:
    if cfg.kernel_gamma != "auto":
        return float(cfg.kernel_gamma)
    mean_var = float(x.var(axis=0).mean())
    d = x.shape[1]
    return 1.0 / (d * mean_var) if mean_var > 0 else 1.0 / d


def kernel_matrix(kind: str, a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    if kind == "linear":
        return a @ b.T
    if kind == "polynomial":
        return (a @ b.T + 1.0) ** _POLY_DEGREE
    if kind == "gaussian":
        sq = (
            np.sum(a * a, axis=1)[:, None]
            + np.sum(b * b, axis=1)[None, :]
            - 2.0 * (a @ b.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise DomainError(f"unknown kernel {kind!r}")


def dual_objective(alpha, y, gram) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ gram @ ay)


def duality_gap(alpha, y, gram, b, box) -> float:
    """Gap between the standard-form primal and dual objectives at (alpha, b)."""
    ay = alpha * y
    f = gram @ ay + b
    quad = float(ay @ gram @ ay)
    hinge = np.maximum(0.0, 1.0 - y * f).sum()
    primal = 0.5 * quad + box * hinge
    dual = alpha.sum() - 0.5 * quad
    return float(primal - dual)


class _Smo:
    """SMO with maximal-violating-pair working-set selection.

    Each iteration solves the two-variable dual subproblem for the pair that
    most violates the KKT conditions, so the dual objective ascends
    monotonically and the stopping test bounds the KKT violation by `tol`.
    The cached vector `f` holds the bias-free margins sum_j alpha_j y_j K_ij.
    """

    def __init__(self, gram, y, box, tol):
        self.k = gram
        self.y = y
        self.box = float(box)
        self.tol = float(tol)
        self.n = y.size
        self.alpha = np.zeros(self.n)
        self.f = np.zeros(self.n)

    def violating_pair(self):
        """Indices (i1, i2) maximizing v[i1]-v[i2] over the feasible
        ascent sets, where v = y - f. Feasible bias values lie in
        [max_up v, min_low v]; a positive spread is a KKT violation."""
        at_lo = self.alpha <= 1e-12
        at_hi = self.alpha >= self.box - 1e-12
        pos = self.y > 0
        up = np.where(pos, ~at_hi, ~at_lo)
        low = np.where(pos, ~at_lo, ~at_hi)
        v = self.y - self.f
        i1 = int(np.argmax(np.where(up, v, -np.inf)))
        i2 = int(np.argmin(np.where(low, v, np.inf)))
        return i1, i2, float(v[i1]), float(v[i2])

    def take_step(self, i1, i2):
        if i1 == i2:
            return False
        a1_old, a2_old = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1 = self.f[i1] - y1
        e2 = self.f[i2] - y2
        s = y1 * y2
        if s > 0:
            lo = max(0.0, a1_old + a2_old - self.box)
            hi = min(self.box, a1_old + a2_old)
        else:
            lo = max(0.0, a2_old - a1_old)
            hi = min(self.box, self.box + a2_old - a1_old)
        if lo >= hi:
            return False
        k11, k12, k22 = self.k[i1, i1], self.k[i1, i2], self.k[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2 = a2_old + y2 * (e1 - e2) / eta
            a2 = min(max(a2, lo), hi)
        else:
            # degenerate curvature: compare the dual objective at the ends
            v1 = self.f[i1] - a1_old * y1 * k11 - a2_old * y2 * k12
            v2 = self.f[i2] - a1_old * y1 * k12 - a2_old * y2 * k22

            def w_of(a2_new):
                a1_new = a1_old + s * (a2_old - a2_new)
                return (
                    a1_new
                    + a2_new
                    - 0.5 * k11 * a1_new**2
                    - 0.5 * k22 * a2_new**2
                    - s * k12 * a1_new * a2_new
                    - y1 * a1_new * v1
                    - y2 * a2_new * v2
                )

            w_lo, w_hi = w_of(lo), w_of(hi)
            if w_lo > w_hi + 1e-12:
                a2 = lo
            elif w_hi > w_lo + 1e-12:
                a2 = hi
            else:
                return False
        if abs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12):
            return False
        a1 = a1_old + s * (a2_old - a2)
        if a1 < 0.0:
            a2 += s * a1
            a1 = 0.0
        elif a1 > self.box:
            a2 += s * (a1 - self.box)
            a1 = self.box
        d1 = y1 * (a1 - a1_old)
        d2 = y2 * (a2 - a2_old)
        self.f += d1 * self.k[i1] + d2 * self.k[i2]
        self.alpha[i1], self.alpha[i2] = a1, a2
        return True

    def _fallback_step(self):
        """Try near-maximal violating pairs when the best pair cannot move
        (duplicate rows make eta = 0 and clip steps to zero)."""
        at_lo = self.alpha <= 1e-12
        at_hi = self.alpha >= self.box - 1e-12
        pos = self.y > 0
        v = self.y - self.f
        up = np.flatnonzero(np.where(pos, ~at_hi, ~at_lo))
        low = np.flatnonzero(np.where(pos, ~at_lo, ~at_hi))
        up = up[np.argsort(-v[up], kind="stable")][:8]
        low = low[np.argsort(v[low], kind="stable")][:8]
        for i1 in up:
            for i2 in low:
                if v[i1] - v[i2] <= self.tol:
                    continue
                if self.take_step(int(i1), int(i2)):
                    return True
        return False

    def solve(self, max_iter):
        for _ in range(max_iter):
            i1, i2, v_up, v_low = self.violating_pair()
            if v_up - v_low <= self.tol:
                return self.alpha, 0.5 * (v_up + v_low)
            if not self.take_step(i1, i2) and not self._fallback_step():
                break  # numerically stalled on every candidate pair
        i1, i2, v_up, v_low = self.violating_pair()
        gap = duality_gap(self.alpha, self.y, self.k, 0.5 * (v_up + v_low), self.box)
        raise ConvergenceError(
            f"SMO did not satisfy the KKT conditions within {max_iter} iterations",
            duality_gap=gap,
        )


def train_svm(matrix, cfg: ModelConfig) -> TrainedModel:
    y01 = checked_labels(matrix)
    if y01.min() == y01.max():
        raise DomainError("SVM training needs both classes present")
    x = np.asarray(matrix.rows, dtype=np.float64)
    y = 2.0 * y01 - 1.0
    n = x.shape[0]
    if not cfg.penalty_weight > 0:
        raise DomainError("SVM penalty_weight must be positive")
    box = 1.0 / (cfg.penalty_weight * n)
    gamma = resolve_gamma(cfg, x)
    gram = kernel_matrix(cfg.kernel, x, x, gamma)
    smo = _Smo(gram, y, box, cfg.tol)
    alpha, b = smo.solve(cfg.smo_max_iter)

    keep = alpha > 1e-12
    params = {
        "support_vectors": x[keep],
        "dual_coef": (alpha * y)[keep],
        "bias": float(b),
        "gamma": gamma,
        "alpha": alpha,
    }
    if cfg.kernel == "linear":
        params["weights"] = x[keep].T @ (alpha * y)[keep]
    return TrainedModel(
        kind="svm",
        parameters=params,
        hyperparameters=cfg,
        feature_columns=matrix.column_names,
        threshold=0.0,
    )


def primal_weights(model: TrainedModel) -> np.ndarray:
    if model.kind != "svm" or "weights" not in model.parameters:
        raise DomainError("primal weights exist only for linear-kernel SVMs")
    return np.asarray(model.parameters["weights"], dtype=np.float64)


def score_rows(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    p = model.parameters
    k = kernel_matrix(
        model.hyperparameters.kernel, np.asarray(p["support_vectors"]), x, p["gamma"]
    )
    return p["dual_coef"] @ k + p["bias"]
