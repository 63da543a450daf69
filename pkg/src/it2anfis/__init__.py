"""Interval type-2 neuro-fuzzy regression with explainable intervals.

Public surface: the rule-base core (types plus inference), dataset
plumbing, the initializer, the trainer, type-1 baselines, uncertainty
explanation, metrics, persistence, and the benchmark sweep.
"""

from .core import (FiringStrengths, IntervalPrediction, IT2Antecedent,
                   Consequent, Mode, RuleBase, fire, membership_bounds,
                   predict_arrays, predict_batch, predict_one)
from .dataset import (Dataset, FeatureScaler, RawTable, SyntheticSpec,
                      TargetScaler, generate_synthetic, inverse_target,
                      load_csv, normalize_and_split)
from .explainer import (FeatureUncertainty, RuleUncertainty,
                        UncertaintyReport, explain_instance, explain_model,
                        export_rules_text, fou_area)
from .initializer import (InitConfig, build_rulebase, lhs_centers,
                          partition_width)
from .baselines import make_type1
from .kernels import active_backend
from .metrics import MetricSet, evaluate, mean_metrics
from .modelio import ModelFormatError, load_model, save_model
from .sweep import SweepConfig, run_seed, sweep
from .trainer import (TrainConfig, TrainState, TrainingDiverged,
                      adapt_learning_rates, antecedent_gradients,
                      apply_antecedent_update, apply_consequent_update,
                      consequent_gradients, enforce_constraints, train)

__version__ = "0.1.0"

__all__ = [
    "Consequent", "Dataset", "FeatureScaler", "FeatureUncertainty",
    "FiringStrengths", "InitConfig", "IntervalPrediction", "IT2Antecedent",
    "MetricSet", "Mode", "ModelFormatError", "RawTable", "RuleBase",
    "RuleUncertainty", "SweepConfig", "SyntheticSpec", "TargetScaler",
    "TrainConfig", "TrainState", "TrainingDiverged", "UncertaintyReport",
    "active_backend", "adapt_learning_rates", "antecedent_gradients",
    "apply_antecedent_update", "apply_consequent_update", "build_rulebase",
    "consequent_gradients", "enforce_constraints", "evaluate",
    "explain_instance", "explain_model", "export_rules_text", "fire",
    "fou_area", "generate_synthetic", "inverse_target", "lhs_centers",
    "load_csv", "load_model", "make_type1", "mean_metrics",
    "membership_bounds", "normalize_and_split", "partition_width",
    "predict_arrays", "predict_batch", "predict_one", "run_seed",
    "save_model", "sweep", "train",
]
