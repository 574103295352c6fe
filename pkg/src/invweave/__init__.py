"""invweave: class-invariant check weaving for the MiniOO subject language.

The pipeline: parse MiniOO sources, load a JSON invariant specification,
analyze the class hierarchy for representation exposure, generate exposure
interfaces / exposed subclasses / an invariant visitor, and execute original
or woven programs on a tree-walking interpreter.
"""

from .diagnostics import Diagnostic, ParseError, SpecError, WeaveError
from .interp import ExecutionResult, MiniOORuntimeError, ViolationRecord, run_program
from .invspec import InvariantSpec, load_spec, serialize_spec, validate_spec
from .parser import parse_unit
from .printer import render_source
from .syntax import SourceUnit, merge_units
from .typecheck import typecheck_program
from .weave import (
    WovenArtifacts,
    render_artifacts,
    space_report,
    swap_driver_constructors,
    weave_program,
)

__all__ = [
    "Diagnostic",
    "ExecutionResult",
    "InvariantSpec",
    "MiniOORuntimeError",
    "ParseError",
    "SourceUnit",
    "SpecError",
    "ViolationRecord",
    "WeaveError",
    "WovenArtifacts",
    "load_spec",
    "merge_units",
    "parse_unit",
    "render_artifacts",
    "render_source",
    "run_program",
    "serialize_spec",
    "space_report",
    "swap_driver_constructors",
    "typecheck_program",
    "validate_spec",
    "weave_program",
]
