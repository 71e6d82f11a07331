from .config import RunConfig, load_run_config, preset_names, preset_overrides, with_overrides
from .pipeline import Backends, EvalRecord, Pipeline, plan_requests, run_pipeline
from .questions import QuestionRecord, dump_questions, load_questions
from .report import aggregate, parse_choice, report_text, timing

__all__ = [
    "RunConfig",
    "load_run_config",
    "preset_names",
    "preset_overrides",
    "with_overrides",
    "Backends",
    "EvalRecord",
    "Pipeline",
    "plan_requests",
    "run_pipeline",
    "QuestionRecord",
    "dump_questions",
    "load_questions",
    "aggregate",
    "parse_choice",
    "report_text",
    "timing",
]
