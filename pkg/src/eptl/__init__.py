"""Event-based parallel temporal logic over abstract executions."""

from .datatypes import (
    MVR_FORMULA,
    DatatypeSpec,
    GeneratorConfig,
    counter_get_oracle,
    generate,
    mvr_get_oracle,
    validate_returns,
)
from .errors import *  # noqa: F403
from .evaluator import EvalCache, Evaluator, Verdict, check_execution, diagnose, sat
from .formula import free_vars, match_prop, render
from .graph import AbstractExecution, Event, OperationRecord, validate
from .parser import parse
from .trace_io import load_trace, loads_trace
from .values import ValueSet

__version__ = "0.1.0"
