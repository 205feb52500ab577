# Copyright Contributors to the mpi-forge Project
# SPDX-License-Identifier: Apache-2.0
"""Dataset iteration in the order of a precomputed sampling plan."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator


def load_plan(path) -> list[str]:
    plan = json.loads(Path(path).read_text())
    return list(plan["entries"])


def _frames(index_path: Path) -> dict[str, tuple[str, str]]:
    """Frame id -> (grid path, stack path), relative paths resolved against the
    index file's directory. A frame without "stack" uses its grid path with
    the .mpit suffix."""
    base = index_path.parent
    out = {}
    for f in json.loads(index_path.read_text())["frames"]:
        grid = f.get("grid", "")
        stack = f.get("stack") or (str(Path(grid).with_suffix(".mpit")) if grid else "")
        out[f["id"]] = tuple(str(base / p) if p else "" for p in (grid, stack))
    return out


def iterate_dataset(index_path, plan_path, batch: int) -> Iterator[list[tuple[str, str]]]:
    """Yields lists of (grid path, stack path) of at most `batch` frames, in
    plan order. The last batch may be short."""
    if batch < 1:
        raise ValueError("batch must be >= 1")
    frames = _frames(Path(index_path))
    entries = load_plan(plan_path)
    missing = sorted(set(entries) - frames.keys())
    if missing:
        raise KeyError(f"plan entries not in the index: {missing[:5]}")
    for start in range(0, len(entries), batch):
        yield [frames[e] for e in entries[start : start + batch]]
