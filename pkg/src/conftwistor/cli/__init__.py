"""Scene files, expression parsing, verification suites and the command line."""

from .expr import DomainError, ExpressionError, parse_expression
from .main import main
from .scenes import Scene, SceneError, builtin_names, load_scene, validate
from .suites import ANCHORS, CHECKS, SUITES, run_suite

__all__ = ["ANCHORS", "CHECKS", "DomainError", "ExpressionError", "SUITES", "Scene", "SceneError",
           "builtin_names", "load_scene", "main", "parse_expression", "run_suite", "validate"]
