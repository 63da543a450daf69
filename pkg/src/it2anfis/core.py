"""Interval type-2 TSK rule base: memberships, firing, type reduction.

A rule base holds R first-order Takagi-Sugeno rules over F inputs.  Each
antecedent is a Gaussian with an uncertain mean confined to [c1, c2] and
a fixed spread sigma, so membership is an interval [mu_L, mu_U] rather
than a single value (the footprint of uncertainty).  Rule outputs are
affine in the input; the lower and upper firing strengths each produce a
crisp output, and a fixed blend factor q mixes the two.

Data is stored as dense per-rule arrays (struct-of-arrays) so batch
inference can run through the compiled kernels; per-rule object views
are available for inspection.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .kernels import STRENGTH_FLOOR, fire as _fire_batch

SIGMA_MIN = 0.05
MIN_SEPARATION = 0.05


class Mode(enum.Enum):
    """Rule-base flavor.

    IT2 keeps the full uncertain-mean interval.  The TYPE1 modes collapse
    c1 = c2 so membership degenerates to an ordinary Gaussian; ORDER0
    additionally pins every consequent slope to zero (constant rule
    outputs), ORDER1 keeps affine consequents.
    """

    IT2 = "it2"
    TYPE1_ORDER0 = "type1_order0"
    TYPE1_ORDER1 = "type1_order1"

    @property
    def is_type1(self) -> bool:
        return self is not Mode.IT2


@dataclass
class IT2Antecedent:
    """One fuzzy set: Gaussian with mean uncertain within [c1, c2].

    Parameters
    ----------
    c1, c2 : float
        Lower and upper bound of the uncertain mean, in normalized
        feature units.  c1 <= c2.
    sigma : float
        Standard deviation shared by both bounding Gaussians.
    """

    c1: float
    c2: float
    sigma: float

    def validate(self) -> None:
        if not (math.isfinite(self.c1) and math.isfinite(self.c2)):
            raise ValueError("antecedent bounds must be finite")
        if self.c1 > self.c2:
            raise ValueError(f"c1 ={self.c1} exceeds c2 ={self.c2}")
        if not (math.isfinite(self.sigma) and self.sigma >= SIGMA_MIN):
            raise ValueError(f"sigma must be >= {SIGMA_MIN}, got {self.sigma}")


@dataclass
class Consequent:
    """Affine rule output y = w . x + b."""

    w: np.ndarray
    b: float

    def validate(self) -> None:
        if not (np.all(np.isfinite(self.w)) and math.isfinite(self.b)):
            raise ValueError("consequent parameters must be finite")


@dataclass
class FiringStrengths:
    """Raw and normalized rule activations for one input.

    mu_L / mu_U are the per-rule products of lower / upper memberships;
    fbar_L / fbar_U are those vectors normalized to sum to one.  When a
    raw sum falls below the activation floor the normalized vector is
    the uniform 1/R fallback instead.
    """

    mu_L: np.ndarray
    mu_U: np.ndarray
    fbar_L: np.ndarray
    fbar_U: np.ndarray


@dataclass
class IntervalPrediction:
    """Type-reduced output with its bounding interval.

    y_lower and y_upper are the crisp outputs under the lower and upper
    normalized strengths; they are not guaranteed to be ordered, so
    ``interval`` reports the sorted pair.
    """

    y_lower: float
    y_upper: float
    y_pred: float

    @property
    def interval(self) -> tuple[float, float]:
        lo = min(self.y_lower, self.y_upper)
        hi = max(self.y_lower, self.y_upper)
        return (lo, hi)

    @property
    def width(self) -> float:
        lo, hi = self.interval
        return hi - lo


@dataclass
class RuleBase:
    """Dense parameter store for an R-rule, F-feature system.

    Arrays c1, c2, sigma and w are (R, F); b is (R,).  q in [0, 1]
    weights the lower output in the final blend.
    """

    c1: np.ndarray
    c2: np.ndarray
    sigma: np.ndarray
    w: np.ndarray
    b: np.ndarray
    q: float = 0.5
    mode: Mode = Mode.IT2

    def __post_init__(self) -> None:
        for name in ("c1", "c2", "sigma", "w"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2:
                raise ValueError(f"{name} must be 2-d (rules x features)")
            setattr(self, name, arr)
        self.b = np.ascontiguousarray(self.b, dtype=np.float64)
        if self.b.ndim != 1:
            raise ValueError("b must be 1-d (one bias per rule)")

    @property
    def n_rules(self) -> int:
        return self.c1.shape[0]

    @property
    def n_features(self) -> int:
        return self.c1.shape[1]

    def validate(self) -> None:
        """Check structural and value invariants, raising on violation."""
        R, F = self.c1.shape
        if R < 1 or F < 1:
            raise ValueError("need at least one rule and one feature")
        for name in ("c2", "sigma", "w"):
            if getattr(self, name).shape != (R, F):
                raise ValueError(f"{name} shape mismatch: want {(R, F)}")
        if self.b.shape != (R,):
            raise ValueError(f"b shape mismatch: want ({R},)")
        arrays = (self.c1, self.c2, self.sigma, self.w, self.b)
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise ValueError("rule base contains non-finite parameters")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        if np.any(self.c1 > self.c2):
            raise ValueError("every antecedent needs c1 <= c2")
        if np.any(self.sigma < SIGMA_MIN):
            raise ValueError(f"every sigma must be >= {SIGMA_MIN}")
        if self.mode.is_type1 and np.any(self.c1 != self.c2):
            raise ValueError("type-1 modes require c1 == c2 everywhere")
        if self.mode is Mode.TYPE1_ORDER0 and np.any(self.w != 0.0):
            raise ValueError("order-0 consequents must have zero slopes")

    def antecedent(self, j: int, f: int) -> IT2Antecedent:
        """Object view of one antecedent (copies the scalars)."""
        return IT2Antecedent(float(self.c1[j, f]), float(self.c2[j, f]),
                             float(self.sigma[j, f]))

    def consequent(self, j: int) -> Consequent:
        """Object view of one rule's consequent (copies the parameters)."""
        return Consequent(self.w[j].copy(), float(self.b[j]))

    def rule(self, j: int) -> tuple[list[IT2Antecedent], Consequent]:
        return ([self.antecedent(j, f) for f in range(self.n_features)],
                self.consequent(j))

    @property
    def rules(self) -> list[tuple[list[IT2Antecedent], Consequent]]:
        return [self.rule(j) for j in range(self.n_rules)]

    @classmethod
    def from_rules(cls, rules, q: float = 0.5,
                   mode: Mode = Mode.IT2) -> "RuleBase":
        """Build the dense store from (antecedents, consequent) pairs."""
        if not rules:
            raise ValueError("need at least one rule")
        R = len(rules)
        F = len(rules[0][0])
        c1 = np.empty((R, F))
        c2 = np.empty((R, F))
        sigma = np.empty((R, F))
        w = np.empty((R, F))
        b = np.empty(R)
        for j, (ants, cons) in enumerate(rules):
            if len(ants) != F:
                raise ValueError("every rule must have the same arity")
            for f, ant in enumerate(ants):
                c1[j, f] = ant.c1
                c2[j, f] = ant.c2
                sigma[j, f] = ant.sigma
            w[j] = np.asarray(cons.w, dtype=np.float64)
            b[j] = cons.b
        return cls(c1, c2, sigma, w, b, q=q, mode=mode)

    def copy(self) -> "RuleBase":
        return RuleBase(self.c1.copy(), self.c2.copy(), self.sigma.copy(),
                        self.w.copy(), self.b.copy(), q=self.q, mode=self.mode)


def membership_bounds(ant: IT2Antecedent, x: float) -> tuple[float, float]:
    """Lower and upper membership of a scalar input.

    The upper bound is 1 on the plateau [c1, c2] and follows the nearer
    bounding Gaussian outside it.  The lower bound follows the farther
    Gaussian, switching at the interval midpoint; a tie at the midpoint
    takes the c2 branch.

    Returns
    -------
    (mu_L, mu_U) : tuple of float
        0 < mu_L <= mu_U <= 1.
    """
    c_mid = 0.5 * (ant.c1 + ant.c2)
    if x <= c_mid:
        z = (x - ant.c2) / ant.sigma
    else:
        z = (x - ant.c1) / ant.sigma
    mu_l = math.exp(-0.5 * z * z)

    if x < ant.c1:
        z = (x - ant.c1) / ant.sigma
        mu_u = math.exp(-0.5 * z * z)
    elif x > ant.c2:
        z = (x - ant.c2) / ant.sigma
        mu_u = math.exp(-0.5 * z * z)
    else:
        mu_u = 1.0
    return (mu_l, mu_u)


def normalize_strengths(mu: np.ndarray,
                        floor: float = STRENGTH_FLOOR) -> np.ndarray:
    """Normalize raw strengths to sum to one, uniform below the floor."""
    total = float(mu.sum())
    if total < floor:
        return np.full(mu.shape, 1.0 / mu.shape[0])
    return mu / total


def fire(rb: RuleBase, x: np.ndarray) -> FiringStrengths:
    """Evaluate all rule activations for one input vector."""
    X = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if X.shape[1] != rb.n_features:
        raise ValueError(f"input arity {X.shape[1]} != {rb.n_features}")
    mu_l, mu_u = _fire_batch(X, rb.c1, rb.c2, rb.sigma)
    mu_l = mu_l[0]
    mu_u = mu_u[0]
    return FiringStrengths(mu_L=mu_l, mu_U=mu_u,
                           fbar_L=normalize_strengths(mu_l),
                           fbar_U=normalize_strengths(mu_u))


def blend_outputs(y_lower: np.ndarray, y_upper: np.ndarray,
                  q: float) -> np.ndarray:
    """q-weighted mix of the two type-reduced outputs.

    Where the bounds coincide the shared value is returned as-is, so a
    collapsed (type-1) system is bit-for-bit independent of q.
    """
    return np.where(y_lower == y_upper, y_lower,
                    q * y_lower + (1.0 - q) * y_upper)


def predict_arrays(rb: RuleBase,
                   X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batch inference returning (y_lower, y_upper, y_pred) arrays.

    The workhorse behind predict_one/predict_batch, the trainer, and the
    evaluation paths; rows are processed independently.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != rb.n_features:
        raise ValueError(f"X must be (N, {rb.n_features})")
    N = X.shape[0]
    R = rb.n_rules
    if N == 0:
        empty = np.empty(0)
        return empty, empty.copy(), empty.copy()
    mu_l, mu_u = _fire_batch(X, rb.c1, rb.c2, rb.sigma)
    yr = X @ rb.w.T + rb.b

    s_l = mu_l.sum(axis=1)
    s_u = mu_u.sum(axis=1)
    ok_l = s_l >= STRENGTH_FLOOR
    ok_u = s_u >= STRENGTH_FLOOR
    f_l = np.where(ok_l[:, None], mu_l / np.where(ok_l, s_l, 1.0)[:, None],
                   1.0 / R)
    f_u = np.where(ok_u[:, None], mu_u / np.where(ok_u, s_u, 1.0)[:, None],
                   1.0 / R)
    y_lower = (f_l * yr).sum(axis=1)
    y_upper = (f_u * yr).sum(axis=1)
    return y_lower, y_upper, blend_outputs(y_lower, y_upper, rb.q)


def predict_one(rb: RuleBase, x: np.ndarray) -> IntervalPrediction:
    """Interval prediction for a single input vector."""
    y_l, y_u, y_p = predict_arrays(rb, np.asarray(x, dtype=np.float64)
                                   .reshape(1, -1))
    return IntervalPrediction(float(y_l[0]), float(y_u[0]), float(y_p[0]))


def predict_batch(rb: RuleBase, X: np.ndarray) -> list[IntervalPrediction]:
    """Row-wise interval predictions (empty input gives an empty list)."""
    y_l, y_u, y_p = predict_arrays(rb, X)
    return [IntervalPrediction(float(a), float(b), float(c))
            for a, b, c in zip(y_l, y_u, y_p)]
