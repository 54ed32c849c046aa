"""Certification flow."""

from typing import Any, Dict

from ..core.certificates import certificate_registry
from ..core.pipeline import BaseFlow, FlowResult, register_flow


@register_flow("certification")
class CertificationFlow(BaseFlow):
    """Evaluates every requested certificate, in name order.

    Per-certificate parameters from the run config override the shared
    options (tolerances, eps0).
    """

    def execute(self, input_data: Dict[str, Any]) -> FlowResult:
        self.log_start()

        try:
            if not self.validate_input(input_data, ["config", "trajectory"]):
                return FlowResult(success=False, data=input_data, error="Missing trajectory")

            config = input_data["config"]
            shared = input_data.get("options", {}).get("certificate_options", {})
            results = []
            for name in sorted(config.certificates):
                options = {**shared, **config.certificates[name]}
                results.append(certificate_registry.evaluate(name, input_data["trajectory"], config.model, **options))

            violated = [r.name for r in results if r.status.value == "Violated"]
            if violated:
                self.logger.warning(f"Violated certificates: {', '.join(violated)}")

            result = FlowResult(success=True, data={"certificates": results}, metadata={"flow": self.name})
            self.log_end(result)
            return result

        except Exception as e:
            return self.fail(input_data, e, "Certification failed")
