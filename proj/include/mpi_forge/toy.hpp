// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale reference implementation of the conditioning blocks: the 1x1
// MPI encoder, scaled dot-product attention, zero-gated residual mixing with
// neighboring views or frames, and the reweighed denoising loss. Every
// forward pass has a hand-written backward pass checked against central
// differences in gradcheck.hpp.

#ifndef MPI_FORGE_TOY_HPP
#define MPI_FORGE_TOY_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mpi_forge/mpi.hpp"
#include "mpi_forge/random.hpp"

namespace mpi_forge::toy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row-major tensor of up to four axes.
class DenseTensor {
public:
  DenseTensor() = default;
  /// Zero-filled. Throws ConfigError for more than 4 axes or a negative dim.
  explicit DenseTensor(std::vector<Eigen::Index> dims);
  /// Throws ConfigError when sizes disagree or any entry is not finite.
  DenseTensor(std::vector<Eigen::Index> dims, Vector data);

  [[nodiscard]] const std::vector<Eigen::Index>& dims() const noexcept { return dims_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return data_.size(); }
  [[nodiscard]] const Vector& data() const noexcept { return data_; }
  [[nodiscard]] Vector& data() noexcept { return data_; }

  /// Leading axis as rows, all remaining axes flattened into columns.
  [[nodiscard]] Eigen::Map<const RowMatrix> as_matrix() const;
  [[nodiscard]] Eigen::Map<RowMatrix> as_matrix();

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

private:
  std::vector<Eigen::Index> dims_;
  Vector data_;
};

/// Embeds a D x H x W label slab as (D * e) x H x W channels: each plane's
/// labels are replaced by the matching row of `class_embedding`
/// (kNumClasses x e). Unknown labels embed as zeros.
DenseTensor embed_planes(const LabelSlab& slab, const Matrix& class_embedding);

/// (D * kNumClasses) x H x W one-hot encoding; the alternative to
/// embed_planes.
DenseTensor one_hot_planes(const LabelSlab& slab);

/// Nearest subsampling of a slab by an integer stride, e.g. image -> latent
/// resolution.
LabelSlab subsample_slab(const LabelSlab& slab, int factor);

struct Conv1x1Params {
  Matrix weight;  ///< out_ch x in_ch
  Vector bias;    ///< out_ch

  static Conv1x1Params random(Eigen::Index in_ch, Eigen::Index out_ch, Rng& rng, double scale = 1.0);
};

/// Chained 1x1 conv + ReLU layers over a C x H x W input. Output k is the
/// feature map after layer k; every output keeps the input's H x W.
std::vector<DenseTensor> mpi_encode(const DenseTensor& input, std::span<const Conv1x1Params> layers);

struct EncoderGrads {
  std::vector<Conv1x1Params> layers;
  DenseTensor input;
};

/// Gradients of sum_k <grad_outputs[k], output_k>.
EncoderGrads mpi_encode_backward(const DenseTensor& input, std::span<const Conv1x1Params> layers,
                                 std::span<const DenseTensor> grad_outputs);

/// Elementwise sum of a condition feature into a latent of the same shape.
DenseTensor add_condition(const DenseTensor& features, const DenseTensor& latent);

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& scores);

/// softmax(Q K^T / sqrt(d)) V with tokens as rows.
Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v);

struct AttentionGrads {
  Matrix q, k, v;
};

AttentionGrads attention_backward(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& grad_out);

/// Projections for attending from the target view to one neighbor, with a
/// scalar output gate.
struct AttentionParams {
  Matrix wq, wk, wv;  ///< d x d, applied as h * W
  double gate{0.0};

  /// Random projections and the zero gate used at initialization.
  static AttentionParams init(Eigen::Index d, Rng& rng, double scale = 1.0);
};

/// One AttentionParams per neighbor.
struct MixParams {
  std::array<AttentionParams, 2> neighbors;

  static MixParams init(Eigen::Index d, Rng& rng, double scale = 1.0);
};

/// h_in + sum_i gate_i * Attention(h_in Wq_i, h_i Wk_i, h_i Wv_i). Terms with
/// a zero gate are skipped, so freshly initialized params return h_in
/// exactly.
Matrix neighbor_mix(const Matrix& h_in, const std::array<const Matrix*, 2>& neighbors, const MixParams& params);

/// Target view attends to its left and right camera views.
inline Matrix cross_view_mix(const Matrix& h_in, const Matrix& h_left, const Matrix& h_right, const MixParams& params) {
  return neighbor_mix(h_in, {&h_left, &h_right}, params);
}

/// Target frame attends to the same camera in the future and history frames.
inline Matrix cross_frame_mix(const Matrix& h_in, const Matrix& h_future, const Matrix& h_history,
                              const MixParams& params) {
  return neighbor_mix(h_in, {&h_future, &h_history}, params);
}

struct MixGrads {
  Matrix h_in;
  std::array<Matrix, 2> neighbors;
  std::array<AttentionParams, 2> params;  ///< gradient of each field, gate included
};

MixGrads neighbor_mix_backward(const Matrix& h_in, const std::array<const Matrix*, 2>& neighbors,
                               const MixParams& params, const Matrix& grad_out);

/// Mean over all elements of (pred - truth)^2 * w, where the H x W weight map
/// broadcasts over the leading axes. Throws ConfigError on shape mismatch or
/// a negative weight.
double reweighed_loss(const DenseTensor& pred, const DenseTensor& truth, const RealImage& weight);

struct LossGrads {
  DenseTensor pred, truth;
  RealImage weight;
};

LossGrads reweighed_loss_backward(const DenseTensor& pred, const DenseTensor& truth, const RealImage& weight);

}  // namespace mpi_forge::toy

#endif  // MPI_FORGE_TOY_HPP
