"""Stage engine: named stages run in order over one shared run dict."""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Type

from loguru import logger


@dataclass
class FlowResult:
    """Outcome of one stage, or of a whole pipeline."""
    success: bool
    data: Dict[str, Any]
    error: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    exception: Optional[BaseException] = None


class BaseFlow(ABC):
    """One stage of a run. Subclasses read the run dict and return new keys."""

    def __init__(self, name: str, config: Optional[Dict[str, Any]] = None):
        self.name = name
        self.config = config or {}
        self.logger = logger.bind(flow=name)

    @abstractmethod
    def execute(self, input_data: Dict[str, Any]) -> FlowResult:
        ...

    def validate_input(self, input_data: Dict[str, Any], required_keys: List[str]) -> bool:
        absent = [key for key in required_keys if key not in input_data]
        if absent:
            self.logger.error(f"Stage {self.name} needs {absent}")
        return not absent

    def fail(self, input_data: Dict[str, Any], error: BaseException, prefix: str) -> FlowResult:
        """Failed result carrying the original exception."""
        error_msg = f"{prefix}: {error}"
        self.logger.error(error_msg)
        result = FlowResult(success=False, data=input_data, error=error_msg, exception=error)
        self.log_end(result)
        return result

    def log_start(self):
        self.logger.debug(f"Stage {self.name} started")

    def log_end(self, result: FlowResult):
        self.logger.debug(f"Stage {self.name} {'done' if result.success else 'failed'}")


class ExperimentEngine:
    """Stage registry plus sequential execution of a stage list."""

    def __init__(self):
        self._stages: Dict[str, Type[BaseFlow]] = {}

    def register_flow(self, name: str, flow_class: Type[BaseFlow]):
        self._stages[name] = flow_class
        logger.debug(f"Stage '{name}' -> {flow_class.__name__}")

    def create_flow(self, name: str, config: Optional[Dict[str, Any]] = None) -> Optional[BaseFlow]:
        """Fresh stage instance, or None for an unknown name."""
        stage_class = self._stages.get(name)
        if stage_class is None:
            logger.error(f"Unknown stage '{name}'")
            return None
        return stage_class(name, config)

    def execute_pipeline(
        self,
        flow_names: List[str],
        initial_data: Optional[Dict[str, Any]] = None,
        flow_configs: Optional[Dict[str, Dict[str, Any]]] = None,
    ) -> FlowResult:
        """Run ``flow_names`` in order, merging each stage's data into the next.

        Stops at the first failed stage. ``metadata["completed_flows"]`` has one
        entry per stage that ran (with its wall time); the failing stage's
        exception is kept on the returned result.
        """
        if not flow_names:
            return FlowResult(success=False, data={}, error="No stages given")

        run_data = dict(initial_data or {})
        flow_configs = flow_configs or {}
        ran: List[Dict[str, Any]] = []

        for stage_name in flow_names:
            stage = self.create_flow(stage_name, flow_configs.get(stage_name))
            if stage is None:
                return FlowResult(
                    success=False,
                    data=run_data,
                    error=f"Unknown stage: {stage_name}",
                    metadata={"completed_flows": ran},
                )

            started = time.perf_counter()
            try:
                outcome = stage.execute(run_data)
            except Exception as e:
                logger.exception(f"Stage {stage_name} raised")
                outcome = FlowResult(success=False, data={}, error=f"{type(e).__name__}: {e}", exception=e)

            ran.append(
                {
                    "flow": stage_name,
                    "success": outcome.success,
                    "error": outcome.error,
                    "seconds": time.perf_counter() - started,
                }
            )
            # A failed stage may still hand back partial data (a diverged trajectory).
            run_data.update(outcome.data)

            if not outcome.success:
                logger.warning(f"Run stopped in stage {stage_name}: {outcome.error}")
                return FlowResult(
                    success=False,
                    data=run_data,
                    error=outcome.error,
                    metadata={"completed_flows": ran, "failed_flow": stage_name},
                    exception=outcome.exception,
                )

        logger.debug(f"Stages {' -> '.join(flow_names)} finished")
        return FlowResult(success=True, data=run_data, metadata={"completed_flows": ran})

    def get_status(self) -> Dict[str, Any]:
        return {"available_flows": list(self._stages)}


def register_flow(name: str):
    """Class decorator registering a stage on the global engine."""
    def decorator(flow_class: Type[BaseFlow]):
        engine.register_flow(name, flow_class)
        return flow_class
    return decorator


engine = ExperimentEngine()
