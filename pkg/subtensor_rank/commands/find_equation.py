"""
Command building a polynomial that vanishes on all tensors of partition rank at most r.
"""

from typing import Any, Dict

import structlog

from ..equations import MODES, budgets_for, find_vanishing_poly, vanishes_on_parametrization
from ..errors import ParseError, SubtensorRankError
from .utils import ExperimentConfig, error_response, report_envelope, success_response

logger = structlog.get_logger(__name__)


def find_equation(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Take the first canonical element of the pullback kernel in degree m.

    Args:
        config (ExperimentConfig): --d, --n, --r, --m, --mode and optionally --field

    Returns:
        dict: the polynomial and its per-budget symbolic vanishing checks, or
            status "info" when only the zero polynomial vanishes
    """
    try:
        config.require("d", "n", "r", "m")
        if config.mode not in MODES:
            raise ParseError(f"Unknown mode '{config.mode}'", {"known": list(MODES)})
        field = config.field_or_default
        f = find_vanishing_poly(config.d, config.n, config.r, config.m, field, config.mode, config.size_cap)
        body = {"d": config.d, "n": config.n, "r": config.r, "m": config.m, "mode": config.mode}
        if f is None:
            body["polynomial"] = None
            return success_response(
                f"No nonzero degree-{config.m} polynomial vanishes ({config.mode} mode)",
                report_envelope("find-equation", config, body),
                config,
                status="info",
            )
        budgets = budgets_for(config.d, config.r, config.mode)
        body["polynomial"] = f.to_json()
        body["text"] = str(f)
        body["checks"] = [
            {"budget": b.to_json(), "vanishes": vanishes_on_parametrization(f, b)} for b in budgets
        ]
        logger.info("equation_found", terms=len(f), degree=f.degree)
        return success_response(
            f"Found a vanishing polynomial with {len(f)} terms",
            report_envelope("find-equation", config, body),
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="find-equation")
