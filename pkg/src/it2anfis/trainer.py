"""Two-tier gradient training with adaptive rates and checkpointing.

Consequents learn by mini-batch gradient descent under combined L1/L2
regularization; antecedent interval bounds learn once per epoch from
exact analytic gradients over the full training split, with per-element
clipping.  Both learning rates adapt to the epoch-over-epoch change in
training error.  The best-validation snapshot is kept and restored, and
training stops early when validation stalls.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .core import Mode, RuleBase, predict_arrays
from .dataset import Dataset

ETA_CONS_BOUNDS = (1e-5, 0.05)
ETA_ANT_BOUNDS = (1e-6, 0.02)


class TrainingDiverged(RuntimeError):
    """Raised when the loss or a parameter block leaves the finite range."""


@dataclass
class TrainConfig:
    """Hyperparameters of the training loop.

    Defaults reproduce the reference schedule: rate growth 1.05 on
    improvement, consequent/antecedent decay 0.9/0.95 otherwise, rates
    clamped to fixed bounds, gradients on the interval bounds clipped to
    [-0.1, 0.1], and a minimum bound separation of 0.05.
    """

    max_epochs: int = 500
    batch_size: int = 64
    eta_cons: float = 0.01
    eta_ant: float = 0.001
    eta_cons_bounds: tuple[float, float] = ETA_CONS_BOUNDS
    eta_ant_bounds: tuple[float, float] = ETA_ANT_BOUNDS
    lr_up: float = 1.05
    lr_down_cons: float = 0.9
    lr_down_ant: float = 0.95
    lambda_l1: float = 0.05
    lambda_l2: float = 0.001
    grad_clip: float = 0.1
    min_separation: float = 0.05
    patience: int = 50
    seed: int = 0
    learn_q: bool = False
    log_path: str | Path | None = None

    def validate(self) -> None:
        if self.max_epochs < 1 or self.batch_size < 1 or self.patience < 1:
            raise ValueError("counts must be >= 1")
        for name in ("eta_cons", "eta_ant", "lr_up", "lr_down_cons",
                     "lr_down_ant", "grad_clip"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("eta_cons_bounds", "eta_ant_bounds"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must be ordered and positive")
        if self.lambda_l1 < 0 or self.lambda_l2 < 0:
            raise ValueError("regularization weights must be >= 0")


@dataclass
class EpochRecord:
    epoch: int
    train_mse: float
    val_mse: float
    eta_cons: float
    eta_ant: float
    checkpointed: bool


@dataclass
class TrainState:
    """Mutable loop state: current rates, best snapshot, history."""

    eta_cons: float
    eta_ant: float
    eta_cons_bounds: tuple[float, float] = ETA_CONS_BOUNDS
    eta_ant_bounds: tuple[float, float] = ETA_ANT_BOUNDS
    epoch: int = 0
    best_val_mse: float = math.inf
    best_snapshot: RuleBase | None = None
    epochs_since_improvement: int = 0
    history: list[EpochRecord] = field(default_factory=list)


@dataclass
class GradientSet:
    """One step's gradients for every trainable block."""

    d_w: np.ndarray
    d_b: np.ndarray
    d_c1: np.ndarray
    d_c2: np.ndarray


def _phi(rb: RuleBase, X: np.ndarray) -> np.ndarray:
    """Blend factor of normalized strengths used by consequent gradients.

    Each side is normalized again by its own sum before blending; the
    inner sums are already 1, so this equals q*fbar_L + (1-q)*fbar_U,
    but the computation keeps the written double-normalized form.
    """
    mu_l, mu_u = kernels.fire(X, rb.c1, rb.c2, rb.sigma)
    R = rb.n_rules
    s_l = mu_l.sum(axis=1)
    s_u = mu_u.sum(axis=1)
    ok_l = s_l >= kernels.STRENGTH_FLOOR
    ok_u = s_u >= kernels.STRENGTH_FLOOR
    f_l = np.where(ok_l[:, None], mu_l / np.where(ok_l, s_l, 1.0)[:, None],
                   1.0 / R)
    f_u = np.where(ok_u[:, None], mu_u / np.where(ok_u, s_u, 1.0)[:, None],
                   1.0 / R)
    f_l = f_l / f_l.sum(axis=1, keepdims=True)
    f_u = f_u / f_u.sum(axis=1, keepdims=True)
    return rb.q * f_l + (1.0 - rb.q) * f_u


def consequent_gradients(rb: RuleBase, Xb: np.ndarray,
                         yb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batch gradients of the half mean-squared error w.r.t. w and b.

    d_b[j] = mean_n(e_n * phi_n_j) and d_w[j] = mean_n(e_n * phi_n_j * x_n),
    with e the blended prediction error.
    """
    _, _, y_pred = predict_arrays(rb, Xb)
    e = y_pred - yb
    phi = _phi(rb, Xb)
    B = Xb.shape[0]
    weights = e[:, None] * phi
    d_b = weights.mean(axis=0)
    d_w = weights.T @ Xb / B
    return d_w, d_b


def apply_consequent_update(rb: RuleBase, d_w: np.ndarray, d_b: np.ndarray,
                            eta_cons: float, lambda_l1: float,
                            lambda_l2: float) -> RuleBase:
    """Regularized descent step on the consequents, in place.

    Each parameter moves by -eta * (grad + l2 * value + l1 * sign(value))
    with sign(0) = 0.  Order-0 mode keeps every slope pinned at zero.
    """
    rb.w -= eta_cons * (d_w + lambda_l2 * rb.w + lambda_l1 * np.sign(rb.w))
    rb.b -= eta_cons * (d_b + lambda_l2 * rb.b + lambda_l1 * np.sign(rb.b))
    if rb.mode is Mode.TYPE1_ORDER0:
        rb.w[:] = 0.0
    return rb


def antecedent_gradients(rb: RuleBase, X_full: np.ndarray,
                         y_full: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact full-split gradients of the half-MSE w.r.t. c1 and c2."""
    X_full = np.ascontiguousarray(X_full, dtype=np.float64)
    y_full = np.ascontiguousarray(y_full, dtype=np.float64)
    return kernels.ant_grads(X_full, y_full, rb.c1, rb.c2, rb.sigma,
                             rb.w, rb.b, rb.q, kernels.STRENGTH_FLOOR)


def apply_antecedent_update(rb: RuleBase, d_c1: np.ndarray, d_c2: np.ndarray,
                            eta_ant: float, clip: float,
                            min_separation: float = 0.05) -> RuleBase:
    """Clipped descent step on the interval bounds, then repair.

    Type-1 modes move the collapsed center rigidly by the summed bound
    gradients and skip constraint repair (the bounds stay identical).
    """
    if rb.mode.is_type1:
        step = np.clip(d_c1 + d_c2, -clip, clip)
        rb.c1 -= eta_ant * step
        rb.c2 = rb.c1.copy()
        return rb
    rb.c1 -= eta_ant * np.clip(d_c1, -clip, clip)
    rb.c2 -= eta_ant * np.clip(d_c2, -clip, clip)
    return enforce_constraints(rb, min_separation)


def enforce_constraints(rb: RuleBase,
                        min_separation: float = 0.05) -> RuleBase:
    """Restore bound ordering and the minimum interval width, in place.

    Bounds are swapped where inverted, then intervals narrower than the
    minimum are expanded symmetrically about their midpoint (the value
    inference branches on).  Widening nudges the upper bound by float
    ulps when rounding leaves the measured width short.  Type-1 modes
    are exempt: their bounds are collapsed by construction.
    """
    if rb.mode.is_type1:
        return rb
    c1, c2 = rb.c1, rb.c2
    swapped = c1 > c2
    if swapped.any():
        lo = np.where(swapped, c2, c1)
        hi = np.where(swapped, c1, c2)
        c1, c2 = lo, hi
    narrow = (c2 - c1) < min_separation
    if narrow.any():
        mid = 0.5 * (c1 + c2)
        half = 0.5 * min_separation
        c1 = np.where(narrow, mid - half, c1)
        c2 = np.where(narrow, mid + half, c2)
        short = (c2 - c1) < min_separation
        while short.any():
            c2 = np.where(short, np.nextafter(c2, np.inf), c2)
            short = (c2 - c1) < min_separation
    rb.c1 = np.ascontiguousarray(c1)
    rb.c2 = np.ascontiguousarray(c2)
    return rb


def adapt_learning_rates(state: TrainState, mse_prev: float,
                         mse_now: float, lr_up: float = 1.05,
                         lr_down_cons: float = 0.9,
                         lr_down_ant: float = 0.95) -> TrainState:
    """Scale both rates by the improvement signal and clamp to bounds."""
    if mse_prev - mse_now > 0:
        state.eta_cons *= lr_up
        state.eta_ant *= lr_up
    else:
        state.eta_cons *= lr_down_cons
        state.eta_ant *= lr_down_ant
    state.eta_cons = min(max(state.eta_cons, state.eta_cons_bounds[0]),
                         state.eta_cons_bounds[1])
    state.eta_ant = min(max(state.eta_ant, state.eta_ant_bounds[0]),
                        state.eta_ant_bounds[1])
    return state


def _check_finite(rb: RuleBase, epoch: int) -> None:
    for name in ("c1", "c2", "sigma", "w", "b"):
        if not np.all(np.isfinite(getattr(rb, name))):
            raise TrainingDiverged(
                f"non-finite values in parameter block {name!r} "
                f"at epoch {epoch}")


def _mse(rb: RuleBase, X: np.ndarray, y: np.ndarray) -> float:
    _, _, y_pred = predict_arrays(rb, X)
    return float(np.mean((y_pred - y) ** 2))


def _q_gradient(rb: RuleBase, X: np.ndarray, y: np.ndarray) -> float:
    y_l, y_u, y_p = predict_arrays(rb, X)
    return float(np.mean((y_p - y) * (y_l - y_u)))


def train(rb: RuleBase, data: Dataset, cfg: TrainConfig,
          epoch_callback=None) -> tuple[RuleBase, TrainState]:
    """Run the full epoch loop and return the best-validation model.

    Per epoch: shuffle the training split, apply mini-batch consequent
    updates, one full-split antecedent update, constraint repair, then
    evaluate train and validation MSE, adapt the rates on the train
    signal, and checkpoint when validation improves.  Stops after
    ``patience`` epochs without a new best or at ``max_epochs``.
    Deterministic for fixed (rb, data, cfg).

    ``epoch_callback(rb, state)``, when given, is invoked read-only at
    the end of every epoch (an observation hook for tests and progress
    reporting).
    """
    cfg.validate()
    rb.validate()
    Xtr, ytr = data.subset(data.train_idx)
    Xval, yval = data.subset(data.val_idx)
    if Xtr.shape[0] == 0:
        raise ValueError("training split is empty")
    if Xtr.shape[1] != rb.n_features:
        raise ValueError("rule base arity does not match the dataset")

    rng = np.random.default_rng(cfg.seed)
    state = TrainState(eta_cons=cfg.eta_cons, eta_ant=cfg.eta_ant,
                       eta_cons_bounds=cfg.eta_cons_bounds,
                       eta_ant_bounds=cfg.eta_ant_bounds)
    mse_prev = _mse(rb, Xtr, ytr)

    log_handle = None
    if cfg.log_path is not None:
        log_handle = Path(cfg.log_path).open("w", encoding="utf-8")
    try:
        n_train = Xtr.shape[0]
        for epoch in range(1, cfg.max_epochs + 1):
            state.epoch = epoch
            eta_cons_used = state.eta_cons
            eta_ant_used = state.eta_ant

            order = rng.permutation(n_train)
            for start in range(0, n_train, cfg.batch_size):
                batch = order[start:start + cfg.batch_size]
                d_w, d_b = consequent_gradients(rb, Xtr[batch], ytr[batch])
                apply_consequent_update(rb, d_w, d_b, state.eta_cons,
                                        cfg.lambda_l1, cfg.lambda_l2)

            d_c1, d_c2 = antecedent_gradients(rb, Xtr, ytr)
            apply_antecedent_update(rb, d_c1, d_c2, state.eta_ant,
                                    cfg.grad_clip, cfg.min_separation)

            if cfg.learn_q:
                rb.q = float(np.clip(
                    rb.q - state.eta_ant * _q_gradient(rb, Xtr, ytr),
                    0.0, 1.0))

            _check_finite(rb, epoch)
            train_mse = _mse(rb, Xtr, ytr)
            val_mse = _mse(rb, Xval, yval)
            if not (math.isfinite(train_mse) and math.isfinite(val_mse)):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}: "
                    f"train={train_mse}, val={val_mse}")

            adapt_learning_rates(state, mse_prev, train_mse, cfg.lr_up,
                                 cfg.lr_down_cons, cfg.lr_down_ant)
            mse_prev = train_mse

            checkpointed = val_mse < state.best_val_mse
            if checkpointed:
                state.best_val_mse = val_mse
                state.best_snapshot = rb.copy()
                state.epochs_since_improvement = 0
            else:
                state.epochs_since_improvement += 1

            state.history.append(EpochRecord(
                epoch=epoch, train_mse=train_mse, val_mse=val_mse,
                eta_cons=eta_cons_used, eta_ant=eta_ant_used,
                checkpointed=checkpointed))
            if log_handle is not None:
                log_handle.write(json.dumps({
                    "epoch": epoch, "train_mse": train_mse,
                    "val_mse": val_mse, "eta_cons": eta_cons_used,
                    "eta_ant": eta_ant_used, "checkpointed": checkpointed,
                }) + "\n")
            if epoch_callback is not None:
                epoch_callback(rb, state)

            if state.epochs_since_improvement >= cfg.patience:
                break
    finally:
        if log_handle is not None:
            log_handle.close()

    best = state.best_snapshot if state.best_snapshot is not None else rb
    return best.copy(), state
