"""Analysis flow: stage onset times and flocking proxies."""

from typing import Any, Dict

from ..core.diagnostics import DEFAULT_THRESHOLDS, detect_stages, flocking_report
from ..core.pipeline import BaseFlow, FlowResult, register_flow


@register_flow("analysis")
class AnalysisFlow(BaseFlow):

    def execute(self, input_data: Dict[str, Any]) -> FlowResult:
        self.log_start()

        try:
            if not self.validate_input(input_data, ["config", "trajectory"]):
                return FlowResult(success=False, data=input_data, error="Missing trajectory")

            trajectory = input_data["trajectory"]
            thresholds = input_data.get("options", {}).get("thresholds", DEFAULT_THRESHOLDS)
            stages = detect_stages(trajectory, thresholds)
            report = flocking_report(trajectory, input_data["config"].model)

            self.logger.info(
                f"Stages: velocity={stages.t_velocity_sep} spatial={stages.t_spatial_sep} flock={stages.t_flock}"
            )
            result = FlowResult(
                success=True,
                data={"stages": stages, "flocking_report": report},
                metadata={"flow": self.name},
            )
            self.log_end(result)
            return result

        except Exception as e:
            return self.fail(input_data, e, "Analysis failed")
