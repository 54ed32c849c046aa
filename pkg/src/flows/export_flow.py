"""Export flow: frames CSV, optional state dump and the JSON summary."""

import csv
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from .. import __version__
from ..core.pipeline import BaseFlow, FlowResult, register_flow

FRAME_COLUMNS = [
    "t", "m2", "m2_hat", "center_sep", "dx", "dv", "dy", "dw", "min_inter_dist", "psi_d_upper", "psi_s_lower",
]


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return f"{float(value):.17g}"


def json_ready(value: Any) -> Any:
    """Recursively turn results into JSON-safe values; non-finite floats become strings."""
    if hasattr(value, "as_dict"):
        return json_ready(value.as_dict())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def write_frames_csv(path: Path, trajectory) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(FRAME_COLUMNS)
        for t, frame in zip(trajectory.times, trajectory.frames):
            writer.writerow([format_float(t)] + [format_float(getattr(frame, name)) for name in FRAME_COLUMNS[1:]])


def write_states_csv(path: Path, trajectory) -> None:
    """One row per agent and sample: t, group, index, positions, velocities."""
    dim = trajectory.states[0].dim if trajectory.states else 0
    header = ["t", "group", "index"] + [f"x{k}" for k in range(dim)] + [f"v{k}" for k in range(dim)]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for t, state in zip(trajectory.times, trajectory.states):
            for group, pos, vel in ((1, state.x, state.v), (2, state.y, state.w)):
                for i in range(pos.shape[0]):
                    writer.writerow(
                        [format_float(t), group, i]
                        + [format_float(c) for c in pos[i]]
                        + [format_float(c) for c in vel[i]]
                    )


def build_summary(data: Dict[str, Any]) -> Dict[str, Any]:
    """Everything a run reports, with stable key order."""
    config = data["config"]
    trajectory = data.get("trajectory")
    certificates: List = data.get("certificates", [])
    summary = {
        "version": __version__,
        "name": config.name,
        "seed": config.seed,
        "config": config.echo(),
        "samples": len(trajectory) if trajectory is not None else 0,
        "final_frame": trajectory.final_frame if trajectory is not None and len(trajectory) else None,
        "stages": data.get("stages"),
        "flocking_report": data.get("flocking_report"),
        "certificates": certificates,
        "diverged": bool(data.get("diverged", False)),
        "divergence_time": data.get("divergence_time"),
        "completed_stages": data.get("completed_stages", []),
    }
    return json_ready(summary)


@register_flow("export")
class ExportFlow(BaseFlow):

    def execute(self, input_data: Dict[str, Any]) -> FlowResult:
        self.log_start()

        try:
            if not self.validate_input(input_data, ["config", "trajectory"]):
                return FlowResult(success=False, data=input_data, error="Missing trajectory")

            config = input_data["config"]
            trajectory = input_data["trajectory"]
            outputs = config.outputs
            Path(outputs.dir).mkdir(parents=True, exist_ok=True)

            write_frames_csv(outputs.csv_path, trajectory)
            artifacts = [str(outputs.csv_path)]
            if outputs.dump_states:
                write_states_csv(outputs.states_path, trajectory)
                artifacts.append(str(outputs.states_path))

            summary = build_summary(input_data)
            with open(outputs.json_path, "w", encoding="utf-8") as handle:
                json.dump(summary, handle, indent=2, allow_nan=False)
                handle.write("\n")
            artifacts.append(str(outputs.json_path))

            self.logger.info(f"Wrote {', '.join(artifacts)}")
            result = FlowResult(success=True, data={"summary": summary, "artifacts": artifacts}, metadata={"flow": self.name})
            self.log_end(result)
            return result

        except Exception as e:
            return self.fail(input_data, e, "Export failed")
