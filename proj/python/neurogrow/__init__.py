"""Grow ReLU MLPs during training: shared-weights neuron insertion and
probe-voting layer allocation, with inactivity auditing."""

from ._neurogrow import (
    ExtenderKind,
    LossKind,
    Network,
    OutputHead,
    Task,
    frobenius_extend,
    grad_check,
    kaiming_extend,
    kaiming_init,
    load_idx,
    load_network,
    measure_inactivity,
    probe_gradients,
    ras_allocate,
    save_network,
    svod_allocate,
    swe_extend,
    synthetic_blobs,
    train,
)

__all__ = [
    "ExtenderKind",
    "LossKind",
    "Network",
    "OutputHead",
    "Task",
    "frobenius_extend",
    "grad_check",
    "kaiming_extend",
    "kaiming_init",
    "load_idx",
    "load_network",
    "measure_inactivity",
    "probe_gradients",
    "ras_allocate",
    "save_network",
    "svod_allocate",
    "swe_extend",
    "synthetic_blobs",
    "train",
]
