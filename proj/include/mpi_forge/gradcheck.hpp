// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#ifndef MPI_FORGE_GRADCHECK_HPP
#define MPI_FORGE_GRADCHECK_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>

#include "mpi_forge/toy.hpp"

namespace mpi_forge::toy {

enum class ToyOp { MpiEncode, Attention, CrossViewMix, CrossFrameMix, ReweighedLoss };

inline constexpr std::array<ToyOp, 5> kAllToyOps = {ToyOp::MpiEncode, ToyOp::Attention, ToyOp::CrossViewMix,
                                                    ToyOp::CrossFrameMix, ToyOp::ReweighedLoss};

std::string_view to_string(ToyOp op);

/// |a - n| / max(|a|, |n|, 1e-3). The floor keeps near-zero gradients from
/// turning round-off into large relative errors.
double relative_error(double analytic, double numeric);

struct GradcheckResult {
  double max_rel_error{0.0};
  std::size_t worst_index{0};
  std::size_t checked{0};
};

/// Compares `analytic` against (f(x + h e_i) - f(x - h e_i)) / 2h for every
/// coordinate i. Throws ConfigError when h <= 0 or sizes differ.
GradcheckResult finite_diff_gradcheck(const std::function<double(const Vector&)>& f, const Vector& x,
                                      const Vector& analytic, double h);

/// Draws a random small problem for `op` from `seed` (inputs and parameters,
/// with nonzero gates for the mixes) and checks the gradient of a random
/// projection of its output with respect to every input and parameter.
/// Encoder problems are redrawn until no pre-activation lies within 1e-3 of
/// the ReLU kink.
GradcheckResult gradcheck_op(ToyOp op, std::uint64_t seed, double h = 1e-5);

}  // namespace mpi_forge::toy

#endif  // MPI_FORGE_GRADCHECK_HPP
