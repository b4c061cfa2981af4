"""
Sampled stepping over scipy's ODE solver classes.

The solvers integrate in dimensionless time (tau = gamma * t). This module
drives a ``scipy.integrate.OdeSolver`` step by step, evaluates its dense
output at the sample times falling inside each step, and lets the caller
stop at any sample. An optional switch hook may replace the stepper
mid-run (the closure uses it for its stiffness switch).
"""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import BDF, DOP853, RK45, OdeSolver, Radau

from domain_relaxation.core.solver import IntegrationError

logger = logging.getLogger(__name__)

STEPPERS = {
    "RK45": RK45,
    "DOP853": DOP853,
    "Radau": Radau,
    "BDF": BDF,
}

SampleHook = Callable[[int, float, np.ndarray], bool]
SwitchHook = Callable[[OdeSolver], Optional[OdeSolver]]


class SampledStepper:
    """
    Steps an ODE solver across a fixed grid of sample times.

    Args:
        seconds_per_unit: Conversion from integration time to seconds (1/gamma)
        switch: Optional hook returning a replacement solver, or None
        switch_interval: Steps between calls of ``switch``
    """

    def __init__(
        self,
        seconds_per_unit: float,
        switch: Optional[SwitchHook] = None,
        switch_interval: int = 20
    ):
        self.seconds_per_unit = seconds_per_unit
        self.switch = switch
        self.switch_interval = max(1, switch_interval)
        self.steps = 0
        self.history: List[Tuple[str, float]] = []

    def run(self, solver: OdeSolver, grid: np.ndarray, on_sample: SampleHook) -> int:
        """
        Integrate across ``grid`` (integration units, grid[0] == solver.t).

        ``on_sample(index, t, y)`` is called for every sample in order and
        returns True to stop. Returns the index of the last recorded sample.

        Raises:
            IntegrationError: When a step fails or the state stops being finite
        """
        self.history = [(type(solver).__name__, float(solver.t) * self.seconds_per_unit)]
        if on_sample(0, float(grid[0]), np.array(solver.y, copy=True)):
            return 0

        index = 1
        while index < grid.size:
            message = solver.step()
            self.steps += 1
            if solver.status == "failed":
                raise IntegrationError(
                    f"{type(solver).__name__} step failed: {message}",
                    last_good_time_s=float(solver.t) * self.seconds_per_unit
                )
            if not np.all(np.isfinite(solver.y)):
                raise IntegrationError(
                    "State became non-finite",
                    last_good_time_s=float(solver.t_old or 0.0) * self.seconds_per_unit
                )

            if solver.t >= grid[index]:
                dense = solver.dense_output()
                while index < grid.size and grid[index] <= solver.t:
                    y = np.array(solver.y, copy=True) if grid[index] == solver.t else dense(grid[index])
                    if on_sample(index, float(grid[index]), y):
                        logger.debug(f"Stopped at sample {index} after {self.steps} steps")
                        return index
                    index += 1

            if solver.status == "finished":
                break

            if self.switch is not None and self.steps % self.switch_interval == 0:
                replacement = self.switch(solver)
                if replacement is not None:
                    solver = replacement
                    self.history.append(
                        (type(solver).__name__, float(solver.t) * self.seconds_per_unit)
                    )

        logger.debug(f"Reached the end of the grid after {self.steps} steps")
        return index - 1

    @property
    def stepper_names(self) -> List[str]:
        return [name for name, _ in self.history]
