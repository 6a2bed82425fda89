"""Processor registry: built-in classical baselines plus external adapters."""

from .types import OutputSlot, ProcessorDescriptor, StepOutput, TaskKind
from .registry import Registry, builtin_descriptors, registry_load, list_models
from .builtins import (
    run_builtin,
    run_builtin_enhancer,
    run_builtin_mock_separator,
    run_builtin_vad,
)
from .adapter import run_external

__all__ = [
    "TaskKind",
    "OutputSlot",
    "ProcessorDescriptor",
    "StepOutput",
    "Registry",
    "registry_load",
    "list_models",
    "builtin_descriptors",
    "run_builtin",
    "run_builtin_vad",
    "run_builtin_enhancer",
    "run_builtin_mock_separator",
    "run_external",
]
