# Copyright Contributors to the mpi-forge Project
# SPDX-License-Identifier: Apache-2.0
"""Read mpi-forge artifacts into numpy arrays and drive the mpi-forge CLI.

The bridge only decodes and re-encodes bytes. Every numeric artifact comes
from the C++ tools.
"""

from .formats import (
    LABEL_NAMES,
    FormatError,
    LoadedGrid,
    LoadedStack,
    LoadedWeightMap,
    decode_grid,
    decode_stack,
    decode_weight_map,
    encode_grid,
    encode_stack,
    encode_weight_map,
    label_counts,
    load_grid,
    load_stack,
    load_weight_map,
)
from .dataset import iterate_dataset, load_plan
from .cli import CliError, run_cli

__all__ = [
    "CliError",
    "LABEL_NAMES",
    "FormatError",
    "LoadedGrid",
    "LoadedStack",
    "LoadedWeightMap",
    "decode_grid",
    "decode_stack",
    "decode_weight_map",
    "encode_grid",
    "encode_stack",
    "encode_weight_map",
    "iterate_dataset",
    "label_counts",
    "load_grid",
    "load_plan",
    "load_stack",
    "load_weight_map",
    "run_cli",
]
