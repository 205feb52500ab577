# Copyright Contributors to the mpi-forge Project
# SPDX-License-Identifier: Apache-2.0
"""Decoders and encoders for OCCV1 grids, MPIT stacks and WMAP weight maps.

All integers and floats are little-endian. Header floats are kept as the raw
float32 values so re-encoding reproduces the input bytes.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GRID_MAGIC = b"OCCV1\0"
STACK_MAGIC = b"MPIT\0"
WEIGHT_MAGIC = b"WMAP"
MAX_ELEMENTS = 2**31 - 1

LABEL_NAMES = {
    i: n
    for i, n in enumerate(
        ["free", "barrier", "bicycle", "bus", "car", "construction vehicle", "motorcycle", "pedestrian",
         "traffic cone", "trailer", "truck", "driveable surface", "other flat", "sidewalk", "terrain",
         "manmade", "vegetation"]
    )
}
LABEL_NAMES[255] = "unknown"


def label_counts(labels: np.ndarray) -> dict[str, int]:
    """Nonzero label counts keyed by class name, as the CLI stats report them."""
    ids, counts = np.unique(labels, return_counts=True)
    return {LABEL_NAMES[int(i)]: int(c) for i, c in zip(ids, counts)}


class FormatError(ValueError):
    """Malformed bytes. `kind` is one of magic mismatch, truncated, dimension
    overflow, zero dimension, invalid value, trailing bytes, malformed json."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class _Reader:
    def __init__(self, data: bytes, fmt: str):
        self.data = memoryview(data)
        self.fmt = fmt
        self.pos = 0

    def magic(self, magic: bytes) -> None:
        head = bytes(self.data[: len(magic)])
        if head != magic[: len(head)]:
            raise FormatError("magic mismatch", f"{self.fmt} magic bytes not found")
        if len(head) < len(magic):
            raise FormatError("truncated", f"{self.fmt} file ends inside the magic")
        self.pos = len(magic)

    def take(self, n: int, what: str) -> memoryview:
        if len(self.data) - self.pos < n:
            raise FormatError("truncated", f"{self.fmt} ends before {what}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def f32(self, what: str) -> np.float32:
        return np.frombuffer(self.take(4, what), dtype="<f4")[0]

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise FormatError("trailing bytes", f"{self.fmt} has {len(self.data) - self.pos} unexpected trailing bytes")


def _volume(dims, fmt: str) -> int:
    n = 1
    for d in dims:
        if d == 0:
            raise FormatError("zero dimension", f"{fmt} header has a zero dimension")
        if n > MAX_ELEMENTS // d:
            raise FormatError("dimension overflow", f"{fmt} dimensions exceed the element limit")
        n *= d
    return n


def _labels(raw: memoryview, shape, fmt: str) -> np.ndarray:
    labels = np.frombuffer(raw, dtype=np.uint8).reshape(shape).copy()
    bad = (labels > 16) & (labels != 255)
    if bad.any():
        raise FormatError("invalid value", f"{fmt} holds invalid label id {int(labels[bad][0])}")
    return labels


@dataclass
class LoadedGrid:
    labels: np.ndarray  # nx x ny x nz, uint8, z fastest
    origin: np.ndarray  # float32[3]
    resolution: np.float32


@dataclass
class LoadedStack:
    labels: np.ndarray  # N x D x H x W, uint8
    d_min: np.float32
    d_max: np.float32
    metadata: dict = field(default_factory=dict)  # the MPIT sidecar


@dataclass
class LoadedWeightMap:
    values: np.ndarray  # H x W, float32
    step_fraction: np.float32


def decode_grid(data: bytes) -> LoadedGrid:
    r = _Reader(data, "OCCV1")
    r.magic(GRID_MAGIC)
    dims = [r.u32("nx"), r.u32("ny"), r.u32("nz")]
    volume = _volume(dims, "OCCV1")
    origin = np.array([r.f32("origin") for _ in range(3)], dtype=np.float32)
    res = r.f32("resolution")
    if not np.all(np.isfinite(origin)):
        raise FormatError("invalid value", "OCCV1 origin is not finite")
    if not (np.isfinite(res) and res > 0):
        raise FormatError("invalid value", "OCCV1 resolution must be positive")
    labels = _labels(r.take(volume, "labels"), dims, "OCCV1")
    r.finish()
    return LoadedGrid(labels, origin, res)


def encode_grid(grid: LoadedGrid) -> bytes:
    nx, ny, nz = grid.labels.shape
    return (
        GRID_MAGIC
        + struct.pack("<3I", nx, ny, nz)
        + np.asarray(grid.origin, dtype="<f4").tobytes()
        + np.asarray([grid.resolution], dtype="<f4").tobytes()
        + np.ascontiguousarray(grid.labels, dtype=np.uint8).tobytes()
    )


def decode_stack(data: bytes) -> LoadedStack:
    r = _Reader(data, "MPIT")
    r.magic(STACK_MAGIC)
    dims = [r.u32("N"), r.u32("D"), r.u32("H"), r.u32("W")]
    volume = _volume(dims, "MPIT")
    d_min, d_max = r.f32("d_min"), r.f32("d_max")
    if not (np.isfinite(d_min) and np.isfinite(d_max) and 0 <= d_min < d_max) or dims[1] < 2:
        raise FormatError("invalid value", "MPIT plane configuration is invalid")
    labels = _labels(r.take(volume, "labels"), dims, "MPIT")
    length = r.u32("sidecar length")
    text = bytes(r.take(length, "sidecar"))
    r.finish()
    try:
        metadata = json.loads(text.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError("malformed json", f"MPIT sidecar: {e}") from None
    if not isinstance(metadata, dict) or not isinstance(metadata.get("rig"), dict):
        raise FormatError("invalid value", "MPIT sidecar needs a rig object")
    if len(metadata["rig"].get("cameras", [])) != dims[0]:
        raise FormatError("invalid value", "MPIT sidecar rig size does not match N")
    return LoadedStack(labels, d_min, d_max, metadata)


def _sidecar_text(metadata: dict) -> bytes:
    # Compact separators and key order as written by the C++ encoder.
    return json.dumps(metadata, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def encode_stack(stack: LoadedStack) -> bytes:
    text = _sidecar_text(stack.metadata)
    return (
        STACK_MAGIC
        + struct.pack("<4I", *stack.labels.shape)
        + np.asarray([stack.d_min, stack.d_max], dtype="<f4").tobytes()
        + np.ascontiguousarray(stack.labels, dtype=np.uint8).tobytes()
        + struct.pack("<I", len(text))
        + text
    )


def decode_weight_map(data: bytes) -> LoadedWeightMap:
    r = _Reader(data, "WMAP")
    r.magic(WEIGHT_MAGIC)
    h, w = r.u32("H"), r.u32("W")
    volume = _volume([h, w], "WMAP")
    step = r.f32("step fraction")
    if not np.isfinite(step):
        raise FormatError("invalid value", "WMAP step fraction is not finite")
    values = np.frombuffer(r.take(4 * volume, "weights"), dtype="<f4").reshape(h, w).copy()
    r.finish()
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise FormatError("invalid value", "WMAP weights must be finite and non-negative")
    return LoadedWeightMap(values, step)


def encode_weight_map(wm: LoadedWeightMap) -> bytes:
    h, w = wm.values.shape
    return (
        WEIGHT_MAGIC
        + struct.pack("<2I", h, w)
        + np.asarray([wm.step_fraction], dtype="<f4").tobytes()
        + np.ascontiguousarray(wm.values, dtype="<f4").tobytes()
    )


def load_grid(path) -> LoadedGrid:
    return decode_grid(Path(path).read_bytes())


def load_stack(path) -> LoadedStack:
    return decode_stack(Path(path).read_bytes())


def load_weight_map(path) -> LoadedWeightMap:
    return decode_weight_map(Path(path).read_bytes())
