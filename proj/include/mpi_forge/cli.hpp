// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#ifndef MPI_FORGE_CLI_HPP
#define MPI_FORGE_CLI_HPP

namespace mpi_forge::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kIoError = 2,
  kCheckFailure = 3,
};

/// Runs one `mpi-forge` invocation. Diagnostics go to stderr, data only to
/// the files named on the command line.
int run(int argc, const char* const* argv);

}  // namespace mpi_forge::cli

#endif  // MPI_FORGE_CLI_HPP
