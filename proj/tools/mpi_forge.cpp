// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/cli.hpp"

int main(int argc, char** argv) { return mpi_forge::cli::run(argc, argv); }
