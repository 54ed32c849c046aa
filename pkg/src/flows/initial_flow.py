"""Initial conditions flow."""

from typing import Any, Dict

from ..core.pipeline import BaseFlow, FlowResult, register_flow
from ..experiments.initial import generate_initial


@register_flow("initial_conditions")
class InitialConditionsFlow(BaseFlow):
    """Builds the t = 0 state from the run's InitSpec and seed."""

    def execute(self, input_data: Dict[str, Any]) -> FlowResult:
        self.log_start()

        try:
            if not self.validate_input(input_data, ["config"]):
                return FlowResult(success=False, data=input_data, error="Missing run config")

            config = input_data["config"]
            initial = generate_initial(config.init, config.model, config.seed)
            self.logger.info(f"Initial state: n1={initial.n1} n2={initial.n2} dim={initial.dim} seed={config.seed}")

            result = FlowResult(success=True, data={"initial": initial}, metadata={"flow": self.name})
            self.log_end(result)
            return result

        except Exception as e:
            return self.fail(input_data, e, "Initial condition generation failed")
