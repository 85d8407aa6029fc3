"""From-scratch soft-margin SVM.

Binary problems are solved by SMO-style maximal-violating-pair coordinate
ascent on the standard dual:

    max  sum(a) - 1/2 * a' Q a      Q_ij = y_i y_j K(x_i, x_j)
    s.t. 0 <= a_i <= C,  sum(a_i y_i) = 0

Each step picks the pair (i, j) with the largest KKT violation and solves the
two-variable subproblem analytically, so the dual objective never decreases.
Multiclass is one-vs-rest with argmax over decision values.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .catalog import Dataset, FeatureVector
from .errors import ConfigError, ContractError, NumericError, PersistenceError
from .pricebands import PriceBandSpec, assign_band

__all__ = [
    "KernelConfig",
    "ScalerParams",
    "BinarySvmModel",
    "MulticlassSvmModel",
    "kernel_eval",
    "kernel_matrix",
    "fit_scaler",
    "apply_scaler",
    "solve_binary",
    "predict_decision",
    "train_multiclass",
    "predict_band",
    "accuracy",
    "cross_validate",
    "max_kkt_violation",
    "save_model",
    "load_model",
]

KERNEL_KINDS = ("linear", "poly", "rbf", "sigmoid")
_TAU = 1e-12


@dataclass(frozen=True)
class KernelConfig:
    kind: str
    gamma: Optional[float] = None  # None = resolve from data at training time
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ConfigError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        if self.gamma is not None and not self.gamma > 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")
        if self.degree < 1:
            raise ConfigError(f"degree must be >= 1, got {self.degree}")


@dataclass(frozen=True)
class ScalerParams:
    means: tuple[float, ...]
    sds: tuple[float, ...]  # sample sd; 1.0 substituted where the column is constant
    zero_sd: tuple[bool, ...]


@dataclass
class BinarySvmModel:
    support_vectors: np.ndarray  # (n_sv, d), scaled space
    dual_coefs: np.ndarray  # alpha_i * y_i
    bias: float
    kernel: KernelConfig
    c: float
    # solver diagnostics, not persisted
    objective_history: Optional[list[float]] = field(default=None, repr=False)
    converged: bool = True


@dataclass
class MulticlassSvmModel:
    scaler: ScalerParams
    class_names: tuple[str, ...]
    binaries: tuple[BinarySvmModel, ...]


def _require_gamma(cfg: KernelConfig) -> float:
    if cfg.kind == "linear":
        return 0.0
    if cfg.gamma is None:
        raise ContractError(f"kernel {cfg.kind!r} needs a resolved gamma")
    return cfg.gamma


def kernel_eval(cfg: KernelConfig, a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ContractError(f"kernel dimension mismatch: {a.shape} vs {b.shape}")
    gamma = _require_gamma(cfg)
    if cfg.kind == "linear":
        value = float(a @ b)
    elif cfg.kind == "poly":
        value = float((gamma * (a @ b) + cfg.coef0) ** cfg.degree)
    elif cfg.kind == "rbf":
        diff = a - b
        value = float(np.exp(-gamma * (diff @ diff)))
    else:  # sigmoid
        value = float(np.tanh(gamma * (a @ b) + cfg.coef0))
    if not math.isfinite(value):
        raise NumericError(f"non-finite kernel value for {cfg.kind} kernel")
    return value


def kernel_matrix(cfg: KernelConfig, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Gram matrix K[i, j] = k(xa[i], xb[j]), vectorized."""
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    gamma = _require_gamma(cfg)
    if cfg.kind == "linear":
        out = xa @ xb.T
    elif cfg.kind == "poly":
        out = (gamma * (xa @ xb.T) + cfg.coef0) ** cfg.degree
    elif cfg.kind == "rbf":
        sq = (
            np.sum(xa * xa, axis=1)[:, None]
            + np.sum(xb * xb, axis=1)[None, :]
            - 2.0 * (xa @ xb.T)
        )
        out = np.exp(-gamma * np.maximum(sq, 0.0))
    else:
        out = np.tanh(gamma * (xa @ xb.T) + cfg.coef0)
    if not np.all(np.isfinite(out)):
        raise NumericError(f"non-finite kernel values for {cfg.kind} kernel")
    return out


def fit_scaler(train: Sequence[Sequence[float]]) -> ScalerParams:
    """Per-feature standardization parameters (sample sd, n-1 divisor)."""
    x = np.asarray(train, dtype=float)
    if x.size == 0:
        raise ContractError("fit_scaler needs at least one vector")
    means = x.mean(axis=0)
    sds = x.std(axis=0, ddof=1) if x.shape[0] > 1 else np.zeros(x.shape[1])
    zero = sds == 0.0
    sds = np.where(zero, 1.0, sds)
    return ScalerParams(
        means=tuple(float(v) for v in means),
        sds=tuple(float(v) for v in sds),
        zero_sd=tuple(bool(v) for v in zero),
    )


def apply_scaler(params: ScalerParams, v: Sequence[float]) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ContractError("cannot scale non-finite feature vector")
    return (arr - np.asarray(params.means)) / np.asarray(params.sds)


def _resolve_gamma(cfg: KernelConfig, x_scaled: np.ndarray) -> KernelConfig:
    if cfg.kind == "linear" or cfg.gamma is not None:
        return cfg
    mean_var = float(np.mean(np.var(x_scaled, axis=0, ddof=1))) if x_scaled.shape[0] > 1 else 0.0
    denom = x_scaled.shape[1] * mean_var
    gamma = 1.0 / denom if denom > 0 else 1.0 / x_scaled.shape[1]
    return KernelConfig(cfg.kind, gamma, cfg.degree, cfg.coef0)


def _smo(
    kmat: np.ndarray, y: np.ndarray, c: float, tol: float, max_iter: int
) -> tuple[np.ndarray, float, list[float], bool]:
    """Maximal-violating-pair SMO. Returns (alpha, bias, objective history, converged)."""
    n = len(y)
    q = (y[:, None] * y[None, :]) * kmat
    qd = np.diag(q).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the minimization form 1/2 a'Qa - e'a

    def objective() -> float:
        # dual (maximization) objective, cheap via the gradient
        return -0.5 * float(alpha @ grad - alpha.sum())

    history = [objective()]
    converged = False
    for _ in range(max_iter):
        yg = -y * grad
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < c)) | ((y > 0) & (alpha > 0))
        yg_up = np.where(up, yg, -np.inf)
        yg_low = np.where(low, yg, np.inf)
        i = int(np.argmax(yg_up))
        j = int(np.argmin(yg_low))
        gap = yg_up[i] - yg_low[j]
        if gap < tol:
            converged = True
            break

        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = qd[i] + qd[j] + 2.0 * q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = c - diff
            else:
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = c + diff
        else:
            quad = qd[i] + qd[j] - 2.0 * q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > c:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = total - c
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > c:
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = total - c
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total

        grad += q[:, i] * (alpha[i] - old_i) + q[:, j] * (alpha[j] - old_j)
        history.append(objective())

    bias = _compute_bias(alpha, grad, y, c)
    return alpha, bias, history, converged


def _compute_bias(alpha: np.ndarray, grad: np.ndarray, y: np.ndarray, c: float) -> float:
    """Average -y*grad over free support vectors; midpoint of bounds otherwise."""
    yg = y * grad
    free = (alpha > 0) & (alpha < c)
    if np.any(free):
        rho = float(np.mean(yg[free]))
    else:
        at_upper = alpha >= c
        at_lower = alpha <= 0
        ub = np.inf
        lb = -np.inf
        for t in range(len(y)):
            if at_upper[t]:
                if y[t] < 0:
                    ub = min(ub, yg[t])
                else:
                    lb = max(lb, yg[t])
            elif at_lower[t]:
                if y[t] > 0:
                    ub = min(ub, yg[t])
                else:
                    lb = max(lb, yg[t])
        rho = (ub + lb) / 2.0
    return -rho


def solve_binary(
    points: Sequence[Sequence[float]],
    labels: Sequence[int],
    kernel: KernelConfig,
    c: float,
    tol: float = 1e-3,
    max_passes: Optional[int] = None,
) -> BinarySvmModel:
    """Train one soft-margin binary SVM on already-scaled points."""
    x = np.asarray(points, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or len(x) < 2:
        raise ContractError("need at least 2 training points")
    if set(np.unique(y)) != {-1.0, 1.0}:
        raise ContractError("labels must contain both +1 and -1")
    if c <= 0:
        raise ContractError(f"C must be > 0, got {c}")

    n = len(y)
    if max_passes is None:
        max_passes = 10 * n
    kmat = kernel_matrix(kernel, x, x)
    alpha, bias, history, converged = _smo(kmat, y, c, tol, max_passes * n)

    sv = alpha > 0
    return BinarySvmModel(
        support_vectors=x[sv].copy(),
        dual_coefs=(alpha * y)[sv].copy(),
        bias=bias,
        kernel=kernel,
        c=c,
        objective_history=history,
        converged=converged,
    )


def predict_decision(m: BinarySvmModel, v: Sequence[float]) -> float:
    v = np.asarray(v, dtype=float)
    if len(m.dual_coefs) == 0:
        return m.bias
    k = kernel_matrix(m.kernel, m.support_vectors, v[None, :])[:, 0]
    return float(m.dual_coefs @ k + m.bias)


def _decision_matrix(m: MulticlassSvmModel, x_scaled: np.ndarray) -> np.ndarray:
    """(n_samples, n_classes) decision values."""
    cols = []
    for binary in m.binaries:
        if len(binary.dual_coefs) == 0:
            cols.append(np.full(len(x_scaled), binary.bias))
        else:
            k = kernel_matrix(binary.kernel, x_scaled, binary.support_vectors)
            cols.append(k @ binary.dual_coefs + binary.bias)
    return np.column_stack(cols)


def _feature_rows(ds: Dataset) -> np.ndarray:
    rows = []
    for rec in ds.records:
        if not rec.features.is_complete:
            raise ContractError(f"record {rec.id!r} has missing features; clean the dataset first")
        rows.append(rec.features.as_tuple())
    return np.asarray(rows, dtype=float)


def train_multiclass(
    ds: Dataset,
    bands: PriceBandSpec,
    kernel: KernelConfig,
    c: float = 1.0,
    tol: float = 1e-3,
    max_passes: Optional[int] = None,
) -> MulticlassSvmModel:
    """One-vs-rest: one binary SVM per band, +1 = records whose price is in the band."""
    if len(ds.records) < 2:
        raise ContractError("need at least 2 records to train")
    x_raw = _feature_rows(ds)
    scaler = fit_scaler(x_raw)
    x = np.asarray([apply_scaler(scaler, row) for row in x_raw])
    resolved = _resolve_gamma(kernel, x)

    band_of = [assign_band(bands, rec.original_price) for rec in ds.records]
    binaries = []
    for name in bands.names:
        y = [1 if b == name else -1 for b in band_of]
        if 1 not in y:
            raise ContractError(f"band {name!r} has no training records")
        if -1 not in y:
            raise ContractError(f"band {name!r} covers every training record")
        binaries.append(solve_binary(x, y, resolved, c, tol, max_passes))
    return MulticlassSvmModel(
        scaler=scaler, class_names=tuple(bands.names), binaries=tuple(binaries)
    )


def predict_band(m: MulticlassSvmModel, f: FeatureVector) -> str:
    """Band with the maximal decision value; ties go to the lowest class index."""
    if not f.is_complete:
        raise ContractError("cannot predict from an incomplete feature vector")
    v = apply_scaler(m.scaler, f.as_tuple())
    decisions = _decision_matrix(m, v[None, :])[0]
    return m.class_names[int(np.argmax(decisions))]


def accuracy(m: MulticlassSvmModel, ds: Dataset, bands: PriceBandSpec) -> float:
    """Fraction of exact band-name matches against the original-price bands."""
    if not ds.records:
        raise ContractError("accuracy of an empty dataset is undefined")
    x = np.asarray([apply_scaler(m.scaler, r) for r in _feature_rows(ds)])
    predicted = np.argmax(_decision_matrix(m, x), axis=1)
    truth = [bands.index_of(assign_band(bands, rec.original_price)) for rec in ds.records]
    return float(np.mean(predicted == np.asarray(truth)))


def cross_validate(
    ds: Dataset,
    bands: PriceBandSpec,
    grid: Sequence[tuple[KernelConfig, float]],
    folds: int,
    seed: int,
) -> list[tuple[KernelConfig, float, float]]:
    """Stratified k-fold accuracy per (kernel, C); ranked best first, ties by grid order."""
    if folds < 2:
        raise ContractError(f"folds must be >= 2, got {folds}")
    by_band: dict[str, list[int]] = {name: [] for name in bands.names}
    for idx, rec in enumerate(ds.records):
        by_band[assign_band(bands, rec.original_price)].append(idx)
    for name, members in by_band.items():
        if len(members) < folds:
            raise ContractError(f"band {name!r} has {len(members)} records, fewer than {folds} folds")

    rng = random.Random(seed)
    fold_of = [0] * len(ds.records)
    for name in bands.names:
        members = list(by_band[name])
        rng.shuffle(members)
        for pos, idx in enumerate(members):
            fold_of[idx] = pos % folds

    scored = []
    for order, (kernel, c) in enumerate(grid):
        fold_acc = []
        for k in range(folds):
            train = Dataset(
                tuple(r for i, r in enumerate(ds.records) if fold_of[i] != k),
                provenance=ds.provenance,
            )
            test = Dataset(
                tuple(r for i, r in enumerate(ds.records) if fold_of[i] == k),
                provenance=ds.provenance,
            )
            model = train_multiclass(train, bands, kernel, c)
            fold_acc.append(accuracy(model, test, bands))
        scored.append((order, kernel, c, float(np.mean(fold_acc))))

    scored.sort(key=lambda t: (-t[3], t[0]))
    return [(kernel, c, acc) for _, kernel, c, acc in scored]


def max_kkt_violation(
    m: BinarySvmModel, points: Sequence[Sequence[float]], labels: Sequence[int]
) -> float:
    """Largest three-case KKT violation of the stored solution on its training set.

    Cases on (alpha_i, y_i f(x_i)): alpha=0 wants yf >= 1, 0<alpha<C wants
    yf = 1, alpha=C wants yf <= 1.
    """
    x = np.asarray(points, dtype=float)
    y = np.asarray(labels, dtype=float)
    k = kernel_matrix(m.kernel, x, m.support_vectors)
    f = k @ m.dual_coefs + m.bias
    yf = y * f

    # recover alpha per training point by matching against stored SVs
    alpha = np.zeros(len(x))
    sv_index = 0
    for i in range(len(x)):
        if sv_index < len(m.support_vectors) and np.array_equal(x[i], m.support_vectors[sv_index]):
            alpha[i] = abs(m.dual_coefs[sv_index])
            sv_index += 1
    if sv_index != len(m.support_vectors):
        raise ContractError("points/labels do not match the model's training set")

    worst = 0.0
    for i in range(len(x)):
        if alpha[i] <= 0:
            worst = max(worst, 1.0 - yf[i])
        elif alpha[i] >= m.c:
            worst = max(worst, yf[i] - 1.0)
        else:
            worst = max(worst, abs(yf[i] - 1.0))
    return float(worst)


MODEL_VERSION = 1


def save_model(m: MulticlassSvmModel, path) -> None:
    doc = {
        "version": MODEL_VERSION,
        "class_names": list(m.class_names),
        "scaler": {
            "means": list(m.scaler.means),
            "sds": list(m.scaler.sds),
            "zero_sd": list(m.scaler.zero_sd),
        },
        "binaries": [
            {
                "kernel": {
                    "kind": b.kernel.kind,
                    "gamma": b.kernel.gamma,
                    "degree": b.kernel.degree,
                    "coef0": b.kernel.coef0,
                },
                "c": b.c,
                "bias": b.bias,
                "dual_coefs": [float(v) for v in b.dual_coefs],
                "support_vectors": [[float(v) for v in row] for row in b.support_vectors],
            }
            for b in m.binaries
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path) -> MulticlassSvmModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PersistenceError(f"cannot read model file {path}: {exc}") from exc
    try:
        if doc["version"] != MODEL_VERSION:
            raise PersistenceError(
                f"model version {doc['version']} unsupported (expected {MODEL_VERSION})"
            )
        scaler = ScalerParams(
            means=tuple(doc["scaler"]["means"]),
            sds=tuple(doc["scaler"]["sds"]),
            zero_sd=tuple(bool(v) for v in doc["scaler"]["zero_sd"]),
        )
        binaries = []
        for b in doc["binaries"]:
            kcfg = b["kernel"]
            binaries.append(
                BinarySvmModel(
                    support_vectors=np.asarray(b["support_vectors"], dtype=float).reshape(
                        len(b["support_vectors"]), -1
                    ),
                    dual_coefs=np.asarray(b["dual_coefs"], dtype=float),
                    bias=float(b["bias"]),
                    kernel=KernelConfig(
                        kcfg["kind"], kcfg["gamma"], int(kcfg["degree"]), float(kcfg["coef0"])
                    ),
                    c=float(b["c"]),
                )
            )
        model = MulticlassSvmModel(
            scaler=scaler,
            class_names=tuple(doc["class_names"]),
            binaries=tuple(binaries),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PersistenceError(f"model file {path} violates the schema: {exc}") from exc
    if len(model.binaries) != len(model.class_names) or len(model.class_names) < 2:
        raise PersistenceError(f"model file {path} violates the schema: class/binary mismatch")
    return model
