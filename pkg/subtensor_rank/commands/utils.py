"""
Shared helpers for the command modules: experiment configuration, file
loading, report hashing and the status dictionaries every command returns.
"""

import hashlib
import json
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import structlog

from .. import __version__
from ..config import DEFAULT_NODE_BUDGET, DEFAULT_SEED, DEFAULT_SIZE_CAP, DEFAULT_WORKERS
from ..errors import NoWitnessFound, ParseError
from ..exact_algebra import RATIONALS, Field
from ..polynomials import Poly
from ..tensor_core import Tensor

logger = structlog.get_logger(__name__)

TOOL_NAME = "subtensor-rank"


@dataclass
class ExperimentConfig:
    """Everything a command needs; filled from CLI flags over config defaults."""

    command: str
    inputs: List[str] = dc_field(default_factory=list)
    field: Optional[Field] = None
    dims: Optional[Tuple[int, ...]] = None
    d: Optional[int] = None
    n: Optional[int] = None
    r: Optional[int] = None
    m: Optional[int] = None
    k: Optional[int] = None
    size: Optional[int] = None
    mode: str = "tight"
    strategy: str = "subspace"
    seed: int = DEFAULT_SEED
    seeds: int = 1
    generator: str = "uniform"
    determinism: bool = True
    exhaustive: bool = False
    sample: Optional[int] = None
    node_budget: int = DEFAULT_NODE_BUDGET
    size_cap: int = DEFAULT_SIZE_CAP
    workers: int = DEFAULT_WORKERS
    out: Optional[str] = None
    plot: Optional[str] = None

    def __post_init__(self):
        for name in ("node_budget", "size_cap", "workers", "seeds"):
            if getattr(self, name) <= 0:
                raise ParseError(f"--{name.replace('_', '-')} must be positive", {name: getattr(self, name)})
        if self.sample is not None and self.sample <= 0:
            raise ParseError("--sample must be positive", {"sample": self.sample})

    def require(self, *names: str):
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ParseError(
                f"Command '{self.command}' needs {', '.join('--' + n for n in missing)}", {"missing": missing}
            )

    def input_path(self, position: int, what: str) -> str:
        if len(self.inputs) <= position:
            raise ParseError(f"Command '{self.command}' needs a {what} file", {"position": position + 1})
        return self.inputs[position]

    @property
    def field_or_default(self) -> Field:
        return self.field or RATIONALS

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "field": None if self.field is None else self.field.to_json(),
            "dims": None if self.dims is None else list(self.dims),
            "d": self.d,
            "n": self.n,
            "r": self.r,
            "m": self.m,
            "mode": self.mode,
            "seed": self.seed,
            "node_budget": self.node_budget,
        }


@dataclass
class ScanReport:
    """Per-subtensor ranks, their maximum and the full-tensor rank of one scan."""

    dims: Tuple[int, ...]
    size: int
    mode: str
    seed: int
    entries: List[dict]
    expected_count: int
    max_prank: int
    full_prank: int
    full_lower_bound: str
    bounds: Dict[str, Any]
    matrix_fact: Optional[dict] = None
    timing: Optional[Dict[str, float]] = None

    @property
    def monotone(self) -> bool:
        return self.max_prank <= self.full_prank

    def to_json(self) -> dict:
        doc = {
            "dims": list(self.dims),
            "size": self.size,
            "mode": self.mode,
            "seed": self.seed,
            "count": len(self.entries),
            "expected_count": self.expected_count,
            "subtensors": self.entries,
            "max_subtensor_prank": self.max_prank,
            "full_prank": self.full_prank,
            "full_lower_bound": self.full_lower_bound,
            "monotone": self.monotone,
            "bounds": self.bounds,
        }
        if self.matrix_fact is not None:
            doc["matrix_fact"] = self.matrix_fact
        if self.timing is not None:
            doc["timing"] = self.timing
        return doc


def load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ParseError(f"File not found: {path}", {"path": path}) from e
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON in {path}: {e}", {"path": path}) from e


def load_tensor(path: str, field: Optional[Field] = None) -> Tensor:
    T = Tensor.from_json(load_json(path))
    return T if field is None or field == T.field else T.to_field(field)


def load_poly(path: str, field: Optional[Field] = None) -> Poly:
    P = Poly.from_json(load_json(path))
    return P if field is None or field == P.field else P.to_field(field)


def file_sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def input_hashes(paths: Sequence[str]) -> Dict[str, str]:
    return {str(p): file_sha256(p) for p in paths}


def render_json(doc: Any) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_json(doc: Any, out: Optional[str]) -> Optional[str]:
    if out is None:
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_json(doc), encoding="utf-8")
    logger.info("report_written", path=str(path))
    return str(path)


def report_envelope(report_type: str, config: ExperimentConfig, body: dict) -> dict:
    """Wrap a command's result with the tool name, version, seed and input hashes."""
    return {
        "report_type": report_type,
        "tool": TOOL_NAME,
        "version": __version__,
        "seed": config.seed,
        "inputs": input_hashes(config.inputs),
        "config": config.to_json(),
        "result": body,
    }


class Stopwatch:
    """Wall-clock timings, recorded only outside determinism mode."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.start = time.perf_counter()

    def elapsed(self) -> Optional[Dict[str, float]]:
        if not self.enabled:
            return None
        return {"seconds": round(time.perf_counter() - self.start, 6)}


def success_response(message: str, report: dict, config: ExperimentConfig, status: str = "success") -> Dict[str, Any]:
    path = write_json(report, config.out)
    return {
        "status": status,
        "message": message,
        "report": report,
        "output_path": path,
        "exit_code": 0,
    }


_SUGGESTIONS = {
    "BudgetExceeded": "Raise --budget or shrink the instance",
    "SizeCapExceeded": "Raise --size-cap or lower m, n or r",
    "ParseError": "Check the input file against the documented JSON format",
    "IndexOutOfRange": "Indices in files are 1-based and must lie within dims",
    "HypothesisViolated": "The tensor does not satisfy the polynomial hypothesis",
    "BadCharacteristic": "Use the rationals or a prime larger than the degree",
    "NoWitnessFound": "Try other seeds or a different r",
}


def error_response(e: Exception, **context) -> Dict[str, Any]:
    """Turn an exception into a status dictionary; NoWitnessFound is informative."""
    error_type = type(e).__name__
    exit_code = getattr(e, "exit_code", 1)
    status = "info" if isinstance(e, NoWitnessFound) else "error"
    if status == "error":
        logger.error("command_failed", error_type=error_type, message=str(e), exc_info=exit_code == 1)
    response = {
        "status": status,
        "message": str(e),
        "error_type": error_type,
        "details": getattr(e, "details", {}),
        "exit_code": exit_code,
    }
    if error_type in _SUGGESTIONS:
        response["suggestion"] = _SUGGESTIONS[error_type]
    response.update(context)
    return response
