"""
一元二次有限和问题包
提供问题类型、下界构造、随机实例与假设检查
"""

from .components import (
    QuadraticComponent,
    FiniteSumProblem,
    ValidationReport,
    component_gradient,
    objective,
    suboptimality,
    validate,
)
from .constructions import (
    ConstructionKind,
    OrderPattern,
    check_even,
    make_construction,
    make_random_instance,
    recommended_start,
    variant_mask,
    variant_summary,
)
from .serialization import problem_from_text, problem_to_text

__all__ = [
    'QuadraticComponent',
    'FiniteSumProblem',
    'ValidationReport',
    'ConstructionKind',
    'OrderPattern',
    'component_gradient',
    'objective',
    'suboptimality',
    'validate',
    'check_even',
    'make_construction',
    'make_random_instance',
    'recommended_start',
    'variant_mask',
    'variant_summary',
    'problem_from_text',
    'problem_to_text',
]
