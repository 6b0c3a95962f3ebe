from app.plant.arm import (
    Observation,
    PlantState,
    TorqueCommand,
    coriolis_matrix,
    forward_dynamics,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
    kinetic_energy,
    mass_matrix,
    step,
    wrap_angles,
)
from app.plant.noise import apply_disturbance, observe, perturb_measurement


__all__ = [
    "Observation",
    "PlantState",
    "TorqueCommand",
    "apply_disturbance",
    "coriolis_matrix",
    "forward_dynamics",
    "forward_kinematics",
    "inverse_kinematics",
    "jacobian",
    "kinetic_energy",
    "mass_matrix",
    "observe",
    "perturb_measurement",
    "step",
    "wrap_angles",
]
