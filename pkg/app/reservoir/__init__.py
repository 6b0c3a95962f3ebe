from app.reservoir.controller import EsnController
from app.reservoir.encoding import MomentAccumulator, fold_input_scaling, increment_transform
from app.reservoir.esn import (
    EsnState,
    EsnWeights,
    harvest_states,
    init_reservoir,
    readout,
    reset_state,
    spectral_radius,
    update_state,
)
from app.reservoir.readout import GramAccumulator, train_readout
from app.reservoir.storage import MAGIC, load_controller, save_controller


__all__ = [
    "EsnController",
    "EsnState",
    "EsnWeights",
    "GramAccumulator",
    "MAGIC",
    "MomentAccumulator",
    "fold_input_scaling",
    "harvest_states",
    "increment_transform",
    "init_reservoir",
    "load_controller",
    "readout",
    "reset_state",
    "save_controller",
    "spectral_radius",
    "train_readout",
    "update_state",
]
