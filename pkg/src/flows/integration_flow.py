"""Integration flow."""

from typing import Any, Dict

from ..core.errors import DivergenceError
from ..core.integrator import SimConfig, simulate
from ..core.pipeline import BaseFlow, FlowResult, register_flow


@register_flow("integration")
class IntegrationFlow(BaseFlow):
    """Runs RK4 from the initial state; divergence hands back the partial trajectory."""

    def execute(self, input_data: Dict[str, Any]) -> FlowResult:
        self.log_start()

        try:
            if not self.validate_input(input_data, ["config", "initial"]):
                return FlowResult(success=False, data=input_data, error="Missing config or initial state")

            config = input_data["config"]
            sim_config = SimConfig(
                params=config.model,
                initial=input_data["initial"],
                dt=config.sim.dt,
                t_end=config.sim.t_end,
                sample_stride=config.sim.sample_stride,
            )
            trajectory = simulate(sim_config)
            self.logger.info(f"Recorded {len(trajectory)} samples up to t={trajectory.times[-1]:.6g}")

            result = FlowResult(
                success=True,
                data={"trajectory": trajectory, "diverged": False, "divergence_time": None},
                metadata={"flow": self.name},
            )
            self.log_end(result)
            return result

        except DivergenceError as e:
            error_msg = f"Integration diverged at t={e.time:.6g}"
            self.logger.error(error_msg)
            result = FlowResult(
                success=False,
                data={"trajectory": e.trajectory, "diverged": True, "divergence_time": e.time},
                error=error_msg,
                exception=e,
            )
            self.log_end(result)
            return result

        except Exception as e:
            return self.fail(input_data, e, "Integration failed")
