"""
Command scanning the s x ... x s subtensors of a tensor and comparing their
partition ranks with the rank of the whole tensor.
"""

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..config import EXHAUSTIVE_THRESHOLD
from ..equations import fd_gd
from ..errors import BudgetExceeded, ParseError, SubtensorRankError
from ..rank_engine import max_full_rank_submatrix, prank
from ..tensor_core import IndexSubsets, Tensor, subtensor
from .utils import ExperimentConfig, ScanReport, Stopwatch, error_response, load_tensor, report_envelope, success_response

logger = structlog.get_logger(__name__)

Choice = Tuple[Tuple[int, ...], ...]


def exhaustive_choices(dims: Sequence[int], size: int) -> Iterable[Choice]:
    return itertools.product(*(itertools.combinations(range(n), size) for n in dims))


def sampled_choices(dims: Sequence[int], size: int, count: int, seed: int) -> List[Choice]:
    """Up to ``count`` distinct seeded choices, returned in canonical order."""
    rng = np.random.default_rng(seed)
    seen = set()
    for _ in range(count):
        seen.add(tuple(tuple(sorted(int(i) for i in rng.choice(n, size, replace=False))) for n in dims))
    return sorted(seen)


def _scan_one(job: Tuple[Tensor, Choice, int, str]) -> dict:
    T, choice, node_budget, strategy = job
    cert = prank(subtensor(T, IndexSubsets(choice)), node_budget, strategy)
    return {
        "subsets": [[i + 1 for i in s] for s in choice],
        "prank": cert.value,
        "lower_bound": cert.lower_bound.value,
        "witness": cert.witness.to_json(),
    }


def run_scan(T: Tensor, choices: Sequence[Choice], node_budget: int, strategy: str, workers: int) -> List[dict]:
    jobs = [(T, c, node_budget, strategy) for c in choices]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_scan_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        entries = [_scan_one(job) for job in jobs]
    return sorted(entries, key=lambda e: e["subsets"])


def write_histogram(entries: Sequence[dict], path: str, title: str):
    """Static SVG histogram of the subtensor ranks."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ranks = [e["prank"] for e in entries]
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = np.arange(min(ranks, default=0), max(ranks, default=0) + 2) - 0.5
    ax.hist(ranks, bins=bins, edgecolor="black")
    ax.set_xlabel("partition rank")
    ax.set_ylabel("subtensors")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("plot_written", path=path)


def _matrix_fact(T: Tensor, size: int, entries: Sequence[dict], full: int) -> dict:
    """For matrices the best s x s submatrix has rank exactly min(s, rank)."""
    best = max((e["prank"] for e in entries), default=0)
    X, Y, _ = max_full_rank_submatrix(T)
    return {
        "rank": full,
        "size": size,
        "max_submatrix_rank": best,
        "expected": min(size, full),
        "holds": best == min(size, full),
        "full_rank_rows": [i + 1 for i in X],
        "full_rank_cols": [j + 1 for j in Y],
    }


def scan(
    T: Tensor,
    size: int,
    seed: int,
    node_budget: int,
    strategy: str = "subspace",
    exhaustive: bool = False,
    sample: Optional[int] = None,
    workers: int = 1,
    timed: bool = False,
) -> ScanReport:
    if not 1 <= size <= min(T.dims):
        raise ParseError(f"Subtensor size {size} must lie in [1, {min(T.dims)}]", {"size": size, "dims": list(T.dims)})
    watch = Stopwatch(timed)
    total = math.prod(math.comb(n, size) for n in T.dims)
    if sample is not None and not exhaustive:
        mode, choices = "sample", sampled_choices(T.dims, size, sample, seed)
    elif exhaustive or total <= EXHAUSTIVE_THRESHOLD:
        mode, choices = "exhaustive", list(exhaustive_choices(T.dims, size))
    else:
        raise BudgetExceeded(
            f"{total} subtensors exceed the exhaustive threshold {EXHAUSTIVE_THRESHOLD}; pass --sample N or --exhaustive",
            {"count": total, "threshold": EXHAUSTIVE_THRESHOLD},
        )
    logger.info("scan_started", dims=list(T.dims), size=size, mode=mode, count=len(choices), workers=workers)
    entries = run_scan(T, choices, node_budget, strategy, workers)
    full = prank(T, node_budget, strategy)
    best = max((e["prank"] for e in entries), default=0)
    r = max(full.value, 1)
    F, G = fd_gd(T.order, r)
    report = ScanReport(
        dims=T.dims,
        size=size,
        mode=mode,
        seed=seed,
        entries=entries,
        expected_count=total if mode == "exhaustive" else len(choices),
        max_prank=best,
        full_prank=full.value,
        full_lower_bound=full.lower_bound.value,
        bounds={"r": r, "F": F, "G": G, "size_reaches_F": size >= F},
        matrix_fact=_matrix_fact(T, size, entries, full.value) if T.order == 2 else None,
        timing=watch.elapsed(),
    )
    if not report.monotone:
        logger.warning("scan_not_monotone", max_subtensor=best, full=full.value)
    return report


def subtensor_scan(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Scan s x ... x s subtensors of the tensor in ``config.inputs[0]``.

    Args:
        config (ExperimentConfig): input path, --size, optional --sample/--exhaustive,
            --workers and --plot

    Returns:
        dict: status, message and the ScanReport plus the tensor
    """
    try:
        config.require("size")
        T = load_tensor(config.input_path(0, "tensor"), config.field)
        report = scan(
            T,
            config.size,
            config.seed,
            config.node_budget,
            config.strategy,
            config.exhaustive,
            config.sample,
            config.workers,
            timed=not config.determinism,
        )
        if config.plot:
            write_histogram(report.entries, config.plot, f"{'x'.join(map(str, T.dims))}, s={config.size}")
        body = {"tensor": T.to_json(), "scan": report.to_json()}
        return success_response(
            f"Scanned {len(report.entries)} subtensors: max prank {report.max_prank}, full prank {report.full_prank}",
            report_envelope("subtensor-scan", config, body),
            config,
        )
    except (SubtensorRankError, ValueError) as e:
        return error_response(e, command="subtensor-scan")
