"""Declarative analysis pipelines: build, validate, share, execute, report."""

from .spec import (
    CURRENT_SCHEMA_VERSION,
    InputBinding,
    PipelineSpec,
    StepSpec,
    export_pipeline,
    import_pipeline,
    validate,
)
from .engine import ArtifactStore, execute, run_step
from .report import (
    RunReport,
    erase_volatile,
    ratings_csv,
    render_report,
    set_rating,
)

__all__ = [
    "CURRENT_SCHEMA_VERSION",
    "InputBinding",
    "StepSpec",
    "PipelineSpec",
    "validate",
    "export_pipeline",
    "import_pipeline",
    "ArtifactStore",
    "run_step",
    "execute",
    "RunReport",
    "set_rating",
    "render_report",
    "ratings_csv",
    "erase_volatile",
]
