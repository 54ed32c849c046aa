"""Run one experiment through the stage pipeline, or sweep a parameter."""

import csv
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from joblib import Parallel, delayed
from loguru import logger
from tqdm import tqdm

from ..core.errors import ConfigError, DivergenceError
from ..core.pipeline import engine
from ..flows.export_flow import format_float
from ..utils.config import settings
from .run_config import RunConfig

RUN_STAGES = ["initial_conditions", "integration", "analysis", "certification"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_VIOLATION = 4

AGGREGATE_COLUMNS = [
    "value", "status", "t_velocity_sep", "t_spatial_sep", "t_flock",
    "dv_final", "dw_final", "center_sep_final", "min_inter_dist_final",
]


@dataclass
class RunOutcome:
    """Exit code, JSON summary and written files of one run."""

    exit_code: int
    summary: Optional[Dict[str, Any]] = None
    artifacts: List[str] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def status(self) -> str:
        return {
            EXIT_OK: "ok",
            EXIT_FAILURE: "error",
            EXIT_CONFIG: "config_error",
            EXIT_DIVERGENCE: "diverged",
            EXIT_VIOLATION: "violated",
        }[self.exit_code]


def default_options(thresholds=None) -> Dict[str, Any]:
    """Stage thresholds and certificate defaults from settings."""
    return {
        "thresholds": tuple(thresholds) if thresholds else settings.stage_thresholds,
        "certificate_options": settings.certificate_options(),
    }


def run(config: RunConfig, strict: bool = False, thresholds: Optional[Sequence[float]] = None) -> RunOutcome:
    """Simulate, analyse, certify and export one configuration.

    Exit codes: 0 ok, 1 unexpected failure, 2 config error, 3 divergence
    (partial outputs are still written), 4 certificate violation with
    ``strict``.
    """
    logger.info(f"Running '{config.name}' (seed {config.seed})")
    data: Dict[str, Any] = {"config": config, "options": default_options(thresholds)}
    result = engine.execute_pipeline(RUN_STAGES, data)
    data = result.data
    completed = [entry["flow"] for entry in result.metadata.get("completed_flows", []) if entry["success"]]

    if not result.success:
        if isinstance(result.exception, ConfigError):
            return RunOutcome(EXIT_CONFIG, error=result.error)
        if not isinstance(result.exception, DivergenceError) or data.get("trajectory") is None:
            return RunOutcome(EXIT_FAILURE, error=result.error)
        # Partial trajectory: analyse what is there, then export it flagged.
        analysis = engine.execute_pipeline(["analysis"], data)
        if analysis.success:
            data = analysis.data
            completed.append("analysis")

    data["completed_stages"] = completed
    export = engine.execute_pipeline(["export"], data)
    if not export.success:
        return RunOutcome(EXIT_FAILURE, error=export.error)
    summary, artifacts = export.data["summary"], export.data["artifacts"]

    if data.get("diverged"):
        return RunOutcome(EXIT_DIVERGENCE, summary, artifacts, error=result.error)
    violated = [c["name"] for c in summary["certificates"] if c["status"] == "Violated"]
    if strict and violated:
        return RunOutcome(EXIT_VIOLATION, summary, artifacts, error=f"violated: {', '.join(violated)}")
    return RunOutcome(EXIT_OK, summary, artifacts)


def _axis_value(config: RunConfig, axis: str) -> Any:
    node: Any = config.echo()
    for part in axis.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"sweep axis '{axis}' is not a config field")
        node = node[part]
    return node


def _row_label(value: float) -> str:
    return format_float(value).replace("-", "m")


def _sweep_row(base: RunConfig, axis: str, value: float, out_dir: Path, strict: bool, thresholds) -> Dict[str, Any]:
    row: Dict[str, Any] = {"value": value}
    try:
        config = base.with_overrides({axis: value, "outputs.dir": str(out_dir / f"{axis}={_row_label(value)}")})
        outcome = run(config, strict=strict, thresholds=thresholds)
    except ConfigError as err:
        return {**row, "status": "config_error", "error": str(err)}
    except Exception as err:
        return {**row, "status": "error", "error": str(err)}

    row["status"] = outcome.status
    summary = outcome.summary or {}
    stages = summary.get("stages") or {}
    final = summary.get("final_frame") or {}
    for key in ("t_velocity_sep", "t_spatial_sep", "t_flock"):
        row[key] = stages.get(key)
    for key in ("dv", "dw", "center_sep", "min_inter_dist"):
        row[f"{key}_final"] = final.get(key)
    for cert in summary.get("certificates", []):
        row[f"margin:{cert['name']}"] = cert["margin"]
    return row


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, numbers.Real) and not isinstance(value, bool):
        return format_float(value)
    return str(value)


@dataclass
class SweepResult:
    rows: List[Dict[str, Any]]
    aggregate_path: Path


def sweep(
    base: RunConfig,
    axis: str,
    values: Sequence[float],
    parallelism: int = 1,
    out_dir: Optional[str] = None,
    strict: bool = False,
    thresholds: Optional[Sequence[float]] = None,
) -> SweepResult:
    """One independent run per value of ``axis``; rows sorted by value.

    Child failures are recorded in their row and the sweep continues. The
    aggregate CSV does not depend on ``parallelism``.
    """
    current = _axis_value(base, axis)
    if not isinstance(current, numbers.Real) or isinstance(current, bool):
        raise ConfigError(f"sweep axis '{axis}' is not numeric")
    values = sorted(float(v) for v in values)
    if not values or not all(math.isfinite(v) for v in values):
        raise ConfigError("sweep needs at least one finite value")

    root = Path(out_dir or base.outputs.dir)
    root.mkdir(parents=True, exist_ok=True)
    logger.info(f"Sweeping {axis} over {len(values)} values with parallelism {parallelism}")

    rows = Parallel(n_jobs=parallelism)(
        delayed(_sweep_row)(base, axis, value, root, strict, thresholds)
        for value in tqdm(values, desc=f"sweep {axis}", disable=len(values) < 2)
    )
    rows = sorted(rows, key=lambda row: row["value"])

    margin_columns = [f"margin:{name}" for name in sorted(base.certificates)]
    aggregate_path = root / "aggregate.csv"
    with open(aggregate_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(AGGREGATE_COLUMNS + margin_columns)
        for row in rows:
            writer.writerow([_cell(row.get(column)) for column in AGGREGATE_COLUMNS + margin_columns])

    failed = [row for row in rows if row["status"] in ("error", "config_error")]
    if failed:
        logger.warning(f"{len(failed)} sweep rows failed")
    return SweepResult(rows=rows, aggregate_path=aggregate_path)
