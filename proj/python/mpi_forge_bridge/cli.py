# Copyright Contributors to the mpi-forge Project
# SPDX-License-Identifier: Apache-2.0
"""Subprocess wrapper around the mpi-forge executable."""

from __future__ import annotations

import os
import shutil
import subprocess


class CliError(RuntimeError):
    def __init__(self, code: int, stderr: str):
        super().__init__(f"mpi-forge exited with {code}: {stderr.strip()}")
        self.code = code
        self.stderr = stderr


def _executable() -> str:
    exe = os.environ.get("MPI_FORGE_EXE") or shutil.which("mpi-forge")
    if not exe:
        raise FileNotFoundError("set MPI_FORGE_EXE or put mpi-forge on PATH")
    return exe


def run_cli(*args: str) -> str:
    """Runs `mpi-forge args...` and returns its stderr; raises CliError on a
    nonzero exit."""
    proc = subprocess.run([_executable(), *map(str, args)], capture_output=True, text=True)
    if proc.returncode != 0:
        raise CliError(proc.returncode, proc.stderr)
    return proc.stderr
