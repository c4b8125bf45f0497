"""Binary quantum channel discrimination: variational strategies,
kernel and variational classifiers, and diamond-norm baselines."""

__version__ = "0.1.0"

from .qcore import (
    ContractError,
    DensityMatrix,
    PureState,
    ShapeError,
    partial_trace,
    random_mixed_state,
    random_pure_state,
    tensor,
    trace_norm,
)
from .channels import (
    KrausChannel,
    apply,
    choi,
    compose,
    depolarizing,
    eb_channel_A,
    eb_channel_B,
    identity_channel,
    tensor_channels,
)
from .ansatz import gradient, hea, u1_circuit, u2_circuit, u3_circuit, unitary
from .diamond import DiamondEstimate, diamond_norm, p_diamond
from .vardisc import StrategySpec, TrainReport, sweep_depolarizing, train
from .vclass import make_dataset, run_cell, train_classifier
from .ksvm import IntervalSpec, KernelModel, intervals_I, run_experiment

__all__ = [
    "__version__",
    "ContractError", "DensityMatrix", "PureState", "ShapeError",
    "partial_trace", "random_mixed_state", "random_pure_state", "tensor",
    "trace_norm",
    "KrausChannel", "apply", "choi", "compose", "depolarizing",
    "eb_channel_A", "eb_channel_B", "identity_channel", "tensor_channels",
    "gradient", "hea", "u1_circuit", "u2_circuit", "u3_circuit", "unitary",
    "DiamondEstimate", "diamond_norm", "p_diamond",
    "StrategySpec", "TrainReport", "sweep_depolarizing", "train",
    "make_dataset", "run_cell", "train_classifier",
    "IntervalSpec", "KernelModel", "intervals_I", "run_experiment",
]
