"""
Commands of the subtensor-rank CLI, one module per command.
"""

from .bounds import bounds
from .bridge import bridge
from .complement_scan import complement_scan
from .counting_check import counting_check
from .decompose import decompose
from .find_equation import find_equation
from .hchain import hchain
from .nullcone import nullcone
from .rank import rank
from .subtensor_scan import subtensor_scan
from .utils import ExperimentConfig, ScanReport, render_json
from .verify_report import verify_report

__all__ = [
    "rank",
    "subtensor_scan",
    "complement_scan",
    "find_equation",
    "hchain",
    "decompose",
    "bridge",
    "bounds",
    "counting_check",
    "verify_report",
    "nullcone",
    "ExperimentConfig",
    "ScanReport",
    "render_json",
]
