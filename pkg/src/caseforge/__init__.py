"""Translate Assurance 2.0 cases into logic programs and check their semantics."""

from .case_model import AssuranceCase, load_case, load_case_file, validate_case, vocabulary_of
from .checks import SemanticRuleSet, Verdict, parse_rules, run_checks
from .engine import check_constraints, prove_negation, solve, stratify
from .logic import Literal, Program, Rule, unify
from .oracle import brute_force_stable_models
from .syntax import parse_program, render_program
from .translator import ExportBundle, instantiate_theory, translate_case

__version__ = "0.1.0"
