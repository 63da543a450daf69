"""Type-1 comparator models built as collapsed-interval configurations.

ANFIS-0 (constant consequents) and ANFIS-1 (affine consequents) reuse
the entire inference and training stack: their membership intervals are
collapsed to points, so lower and upper outputs coincide and the
prediction interval has zero width by construction.  During training the
collapsed center moves rigidly (both bounds receive the summed bound
gradients) and interval-width repair is skipped.
"""

from __future__ import annotations

from dataclasses import replace

from .core import Mode, RuleBase
from .initializer import InitConfig, build_rulebase


def make_type1(cfg: InitConfig, order: int, feature_ranges) -> RuleBase:
    """Collapsed rule base for the requested consequent order (0 or 1)."""
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    mode = Mode.TYPE1_ORDER0 if order == 0 else Mode.TYPE1_ORDER1
    return build_rulebase(replace(cfg, mode=mode), feature_ranges)


def trainable_parameter_count(rb: RuleBase) -> int:
    """Number of consequent parameters the optimizer can move."""
    R, F = rb.n_rules, rb.n_features
    if rb.mode is Mode.TYPE1_ORDER0:
        return R
    return R * (F + 1)
