"""Link-level simulator for wirelessly powered UAV uplinks.

A UAV harvests downlink energy from the ground infrastructure (cell-free APs,
a single small-cell AP, or one large cellular BS), spends it on uplink pilots
and data, and flies toward a destination along per-slot planned headings. The
package provides the channel statistics, LMMSE estimation, closed-form
harvested-energy and spectral-efficiency expressions with hardware
impairments and terrestrial interference, signal-level Monte Carlo oracles
for every closed form, trajectory planners, and a deterministic experiment
harness with a CLI.
"""

from .config import ConfigError, ScenarioConfig, load_config
from .geometry import Placement, Position, generate_placement, slots_on_line, step_uav

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_config",
    "Placement",
    "Position",
    "generate_placement",
    "slots_on_line",
    "step_uav",
]

__version__ = "0.1.0"
