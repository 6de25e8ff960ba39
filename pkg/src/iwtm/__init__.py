"""Tsetlin Machine (TM) and Integer-Weighted Tsetlin Machine (IWTM)."""
from .automata import Action, SslWeight, TsetlinAutomaton
from .binarizer import Binarizer, BinarizedDataset, ThresholdSpec, binarize, fit_thresholds, transform_value
from .clause import Clause, Mode, Polarity, make_literals
from .data import RECIPES, RawTable, Recipe, TrialReport, TrialSpec, load_csv, run_trials, split
from .machine import ConfigError, Machine, MachineConfig, feedback_probability
from .metrics import ConfusionCounts, Metrics, compute_metrics, count_literals
from .rules import Rule, RuleSet, export_rules

__version__ = "0.1.0"

__all__ = [
    "Action", "SslWeight", "TsetlinAutomaton",
    "Binarizer", "BinarizedDataset", "ThresholdSpec", "binarize", "fit_thresholds", "transform_value",
    "Clause", "Mode", "Polarity", "make_literals",
    "RECIPES", "RawTable", "Recipe", "TrialReport", "TrialSpec", "load_csv", "run_trials", "split",
    "ConfigError", "Machine", "MachineConfig", "feedback_probability",
    "ConfusionCounts", "Metrics", "compute_metrics", "count_literals",
    "Rule", "RuleSet", "export_rules",
]
