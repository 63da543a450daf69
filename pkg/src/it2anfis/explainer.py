"""Three-level uncertainty reporting over a trained rule base.

Feature level: the area enclosed between the upper and lower membership
curves of each antecedent (a scalar footprint-of-uncertainty size).
Rule level: per-rule aggregates of those areas plus a consequent-norm
diagnostic.  Instance level: the prediction interval in original target
units with the rules that drove it.

Also renders per-rule membership plots as standalone SVG documents and
dumps the rule base as readable IF-THEN text.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (IntervalPrediction, IT2Antecedent, RuleBase, fire,
                   membership_bounds, predict_one)
from .dataset import FeatureScaler, TargetScaler

DEFAULT_FOU_POINTS = 256


@dataclass
class FeatureUncertainty:
    """FOU size of one antecedent."""

    rule_index: int
    feature_index: int
    fou_area: float
    interval_width: float


@dataclass
class RuleUncertainty:
    """Per-rule aggregate of feature-level FOU areas."""

    rule_index: int
    mean_fou_area: float
    max_fou_area: float
    consequent_l1_norm: float


@dataclass
class UncertaintyReport:
    """Feature- and rule-level entries, optionally instance-level."""

    per_feature: list[FeatureUncertainty]
    per_rule: list[RuleUncertainty]
    per_instance: list[tuple[int, IntervalPrediction]] | None = None

    def as_dict(self) -> dict:
        doc: dict = {
            "per_feature": [vars(f).copy() for f in self.per_feature],
            "per_rule": [vars(r).copy() for r in self.per_rule],
        }
        if self.per_instance is not None:
            doc["per_instance"] = [
                {"index": i, "y_lower": p.y_lower, "y_upper": p.y_upper,
                 "y_pred": p.y_pred, "interval": list(p.interval),
                 "width": p.width}
                for i, p in self.per_instance]
        return doc


def fou_area(ant: IT2Antecedent, window: tuple[float, float] | None = None,
             n_points: int = DEFAULT_FOU_POINTS) -> float:
    """Trapezoidal area between the membership bounds.

    The default window spans three spreads beyond the uncertain-mean
    interval on each side, which captures effectively all of both
    Gaussian tails.
    """
    if n_points < 16:
        raise ValueError("n_points must be >= 16")
    if window is None:
        window = (ant.c1 - 3.0 * ant.sigma, ant.c2 + 3.0 * ant.sigma)
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"window must be increasing, got {window}")
    xs = np.linspace(lo, hi, n_points)
    gap = np.empty(n_points)
    for i, x in enumerate(xs):
        mu_l, mu_u = membership_bounds(ant, float(x))
        gap[i] = mu_u - mu_l
    step = (hi - lo) / (n_points - 1)
    return float((gap[0] + gap[-1] + 2.0 * gap[1:-1].sum()) * 0.5 * step)


def explain_model(rb: RuleBase) -> UncertaintyReport:
    """Feature- and rule-level uncertainty for every antecedent."""
    per_feature: list[FeatureUncertainty] = []
    per_rule: list[RuleUncertainty] = []
    for j in range(rb.n_rules):
        areas = np.empty(rb.n_features)
        for f in range(rb.n_features):
            ant = rb.antecedent(j, f)
            areas[f] = fou_area(ant)
            per_feature.append(FeatureUncertainty(
                rule_index=j, feature_index=f, fou_area=float(areas[f]),
                interval_width=float(ant.c2 - ant.c1)))
        l1 = float(np.abs(rb.w[j]).sum() + abs(rb.b[j]))
        per_rule.append(RuleUncertainty(
            rule_index=j, mean_fou_area=float(areas.mean()),
            max_fou_area=float(areas.max()), consequent_l1_norm=l1))
    return UncertaintyReport(per_feature=per_feature, per_rule=per_rule)


def explain_instance(rb: RuleBase, x: np.ndarray,
                     target_scaler: TargetScaler):
    """Interval prediction in original units plus rule attribution.

    Returns (IntervalPrediction in target units, top_rules), where
    top_rules lists (rule_index, fbar_U, fbar_L) sorted by the mean of
    the two normalized strengths, strongest first.
    """
    pred = predict_one(rb, x)
    pred_units = IntervalPrediction(
        y_lower=float(target_scaler.inverse(pred.y_lower)),
        y_upper=float(target_scaler.inverse(pred.y_upper)),
        y_pred=float(target_scaler.inverse(pred.y_pred)))
    strengths = fire(rb, x)
    score = 0.5 * (strengths.fbar_L + strengths.fbar_U)
    order = np.argsort(-score, kind="stable")
    top_rules = [(int(j), float(strengths.fbar_U[j]),
                  float(strengths.fbar_L[j])) for j in order]
    return pred_units, top_rules


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def export_rules_text(rb: RuleBase, feature_names: list[str],
                      feature_scalers: list[FeatureScaler] | None = None,
                      target_scaler: TargetScaler | None = None) -> str:
    """Readable IF-THEN dump of every rule.

    Antecedents print the uncertain-mean interval and spread in
    normalized units; when scalers are supplied the original-unit
    values are appended alongside.
    """
    if len(feature_names) != rb.n_features:
        raise ValueError("feature_names arity does not match the rule base")
    lines: list[str] = []
    for j in range(rb.n_rules):
        lines.append(f"Rule {j + 1}:")
        for f, name in enumerate(feature_names):
            ant = rb.antecedent(j, f)
            clause = (f"  {'IF ' if f == 0 else 'AND'} {name} is "
                      f"Gaussian(mean in [{_fmt(ant.c1)}, {_fmt(ant.c2)}], "
                      f"sigma {_fmt(ant.sigma)})")
            if feature_scalers is not None:
                sc = feature_scalers[f]
                lo = sc.inverse(np.float64(ant.c1))
                hi = sc.inverse(np.float64(ant.c2))
                sd = ant.sigma * (sc.max - sc.min)
                clause += (f"  [orig: mean in [{_fmt(float(lo))}, "
                           f"{_fmt(float(hi))}], sigma {_fmt(float(sd))}]")
            lines.append(clause)
        terms = " + ".join(f"{_fmt(rb.w[j, f])}*{name}"
                           for f, name in enumerate(feature_names))
        lines.append(f"  THEN y = {terms} + {_fmt(float(rb.b[j]))}")
        if target_scaler is not None:
            lines.append(f"       (y in standardized units; "
                         f"{target_scaler.name} = y * "
                         f"{_fmt(target_scaler.std)} + "
                         f"{_fmt(target_scaler.mean)})")
        lines.append("")
    return "\n".join(lines)


def _svg_path(xs: np.ndarray, ys: np.ndarray, x0: float, y0: float,
              width: float, height: float, lo: float, hi: float) -> str:
    px = x0 + (xs - lo) / (hi - lo) * width
    py = y0 + height - ys * height
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))


def render_rule_svg(rb: RuleBase, rule_index: int,
                    feature_names: list[str],
                    n_points: int = 200) -> str:
    """Standalone SVG showing each feature's membership bounds.

    One panel per feature: upper and lower curves with the enclosed
    footprint shaded.
    """
    if not 0 <= rule_index < rb.n_rules:
        raise ValueError(f"rule_index out of range: {rule_index}")
    panel_w, panel_h, pad = 300.0, 110.0, 34.0
    total_w = panel_w + 2 * pad
    total_h = (panel_h + pad) * rb.n_features + pad
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{total_w:.0f}" height="{total_h:.0f}" '
        f'viewBox="0 0 {total_w:.0f} {total_h:.0f}">',
        f'<text x="{pad}" y="{pad * 0.6:.1f}" font-size="13" '
        f'font-family="sans-serif">Rule {rule_index + 1} membership '
        f'functions</text>',
    ]
    for f, name in enumerate(feature_names):
        ant = rb.antecedent(rule_index, f)
        lo = ant.c1 - 3.0 * ant.sigma
        hi = ant.c2 + 3.0 * ant.sigma
        xs = np.linspace(lo, hi, n_points)
        mus = np.array([membership_bounds(ant, float(x)) for x in xs])
        y0 = pad + f * (panel_h + pad)
        upper = _svg_path(xs, mus[:, 1], pad, y0, panel_w, panel_h, lo, hi)
        lower = _svg_path(xs, mus[:, 0], pad, y0, panel_w, panel_h, lo, hi)
        reversed_lower = _svg_path(xs[::-1], mus[::-1, 0], pad, y0,
                                   panel_w, panel_h, lo, hi)
        parts.extend([
            f'<rect x="{pad}" y="{y0:.1f}" width="{panel_w}" '
            f'height="{panel_h}" fill="none" stroke="#999"/>',
            f'<polygon points="{upper} {reversed_lower}" fill="#4477aa" '
            f'fill-opacity="0.25" stroke="none"/>',
            f'<polyline points="{upper}" fill="none" stroke="#4477aa" '
            f'stroke-width="1.5"/>',
            f'<polyline points="{lower}" fill="none" stroke="#aa3344" '
            f'stroke-width="1.5"/>',
            f'<text x="{pad}" y="{y0 + panel_h + pad * 0.55:.1f}" '
            f'font-size="11" font-family="sans-serif">{name} '
            f'(c1 {_fmt(ant.c1)}, c2 {_fmt(ant.c2)}, '
            f'sigma {_fmt(ant.sigma)})</text>',
        ])
    parts.append("</svg>")
    return "\n".join(parts)
