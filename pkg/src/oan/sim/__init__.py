from oan.sim.plant import CYCLE_PERIOD, SimConfig, SimState, initial_state, sense, step
from oan.sim.scenario import (ScenarioError, ScenarioEvent, ScenarioScript, load_scenario,
                              parse_scenario)
from oan.sim.server import SimServer

serve = SimServer

__all__ = ["CYCLE_PERIOD", "ScenarioError", "ScenarioEvent", "ScenarioScript", "SimConfig",
           "SimServer", "SimState", "initial_state", "load_scenario", "parse_scenario",
           "sense", "serve", "step"]
