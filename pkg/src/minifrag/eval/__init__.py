"""CPU reference execution of validated shaders."""

from .image import Image, UniformSet
from .interp import (
    EvalBudgetExceeded,
    EvaluatorError,
    STATEMENT_BUDGET,
    eval_fragment,
    eval_lanes,
    sample_texture,
)
from .render import quantize_channel, render_frame

__all__ = [
    "EvalBudgetExceeded",
    "EvaluatorError",
    "Image",
    "STATEMENT_BUDGET",
    "UniformSet",
    "eval_fragment",
    "eval_lanes",
    "quantize_channel",
    "render_frame",
    "sample_texture",
]
