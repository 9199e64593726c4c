"""Component models and the pumped-network integrator."""
from .components import (
    G_ACC,
    CavitationError,
    Conductivity,
    ConstantConductivity,
    FlowSolveError,
    Insulation,
    OperatingPointError,
    PipeSegment,
    PumpSpec,
    ValveSpec,
    friction_factor,
    pipe_pressure_drop,
    pump_efficiency,
    pump_energy,
    pump_pressure_rise,
    radial_heat_ingress,
    valve_dp,
    valve_flow,
)
from .network import Boundary, Branch, Ledger, PumpedNetwork, StepReport, network_solve_step
from .pipe import Pipe, PipeStepResult, pipe_step
from .tank import OverfillError, SupplyExhaustedError, Tank, TankSpec, sphere_area, tank_step
