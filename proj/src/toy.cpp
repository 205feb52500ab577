// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/toy.hpp"

#include <cmath>
#include <numeric>

namespace mpi_forge::toy {

namespace {

Eigen::Index product(const std::vector<Eigen::Index>& dims) {
  return std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
}

void check_dims(const std::vector<Eigen::Index>& dims) {
  if (dims.empty() || dims.size() > 4) throw ConfigError("tensor must have 1 to 4 axes");
  for (auto d : dims)
    if (d < 0) throw ConfigError("tensor dims must be non-negative");
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError(std::string(what) + ": shape mismatch");
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_ = Vector::Zero(product(dims_));
}

DenseTensor::DenseTensor(std::vector<Eigen::Index> dims, Vector data) : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != product(dims_)) throw ConfigError("tensor data size does not match dims");
  if (!data_.allFinite()) throw ConfigError("tensor entries must be finite");
}

Eigen::Map<const RowMatrix> DenseTensor::as_matrix() const {
  const Eigen::Index rows = dims_.empty() ? 0 : dims_.front();
  return {data_.data(), rows, rows == 0 ? 0 : data_.size() / rows};
}

Eigen::Map<RowMatrix> DenseTensor::as_matrix() {
  const Eigen::Index rows = dims_.empty() ? 0 : dims_.front();
  return {data_.data(), rows, rows == 0 ? 0 : data_.size() / rows};
}

DenseTensor embed_planes(const LabelSlab& slab, const Matrix& class_embedding) {
  if (class_embedding.rows() != kNumClasses) throw ConfigError("class embedding needs one row per class");
  const Eigen::Index e = class_embedding.cols();
  const Eigen::Index hw = Eigen::Index{slab.height} * slab.width;
  DenseTensor out({slab.planes * e, slab.height, slab.width});
  auto m = out.as_matrix();
  for (Eigen::Index l = 0; l < slab.planes; ++l) {
    for (Eigen::Index p = 0; p < hw; ++p) {
      const auto id = to_id(slab.labels[l * hw + p]);
      if (id >= kNumClasses) continue;
      m.col(p).segment(l * e, e) = class_embedding.row(id).transpose();
    }
  }
  return out;
}

DenseTensor one_hot_planes(const LabelSlab& slab) {
  return embed_planes(slab, Matrix::Identity(kNumClasses, kNumClasses));
}

LabelSlab subsample_slab(const LabelSlab& slab, int factor) {
  if (factor < 1) throw ConfigError("subsample factor must be >= 1");
  LabelSlab out{slab.planes, (slab.height + factor - 1) / factor, (slab.width + factor - 1) / factor, {}};
  out.labels.reserve(static_cast<std::size_t>(out.planes) * out.height * out.width);
  for (int l = 0; l < slab.planes; ++l)
    for (int v = 0; v < out.height; ++v)
      for (int u = 0; u < out.width; ++u) out.labels.push_back(slab.at(l, v * factor, u * factor));
  return out;
}

Conv1x1Params Conv1x1Params::random(Eigen::Index in_ch, Eigen::Index out_ch, Rng& rng, double scale) {
  Conv1x1Params p{Matrix(out_ch, in_ch), Vector(out_ch)};
  for (Eigen::Index i = 0; i < p.weight.size(); ++i) p.weight.data()[i] = uniform(rng, -scale, scale);
  for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias[i] = uniform(rng, -scale, scale);
  return p;
}

namespace {

struct EncoderTrace {
  std::vector<RowMatrix> pre;  // before ReLU
  std::vector<RowMatrix> act;  // after ReLU
};

EncoderTrace encode_trace(const DenseTensor& input, std::span<const Conv1x1Params> layers) {
  if (input.dims().size() != 3) throw ConfigError("MPI encoder input must be C x H x W");
  EncoderTrace t;
  RowMatrix x = input.as_matrix();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& p = layers[k];
    if (p.weight.cols() != x.rows())
      throw ConfigError("encoder layer " + std::to_string(k) + " expects " + std::to_string(p.weight.cols()) +
                        " channels, got " + std::to_string(x.rows()));
    if (p.bias.size() != p.weight.rows()) throw ConfigError("encoder bias size does not match weight rows");
    RowMatrix z = p.weight * x;
    z.colwise() += p.bias;
    x = z.cwiseMax(0.0);
    t.pre.push_back(std::move(z));
    t.act.push_back(x);
  }
  return t;
}

}  // namespace

std::vector<DenseTensor> mpi_encode(const DenseTensor& input, std::span<const Conv1x1Params> layers) {
  auto trace = encode_trace(input, layers);
  std::vector<DenseTensor> out;
  for (auto& a : trace.act) {
    const Eigen::Index ch = a.rows();
    out.emplace_back(std::vector<Eigen::Index>{ch, input.dims()[1], input.dims()[2]},
                     Eigen::Map<const Vector>(a.data(), a.size()));
  }
  return out;
}

EncoderGrads mpi_encode_backward(const DenseTensor& input, std::span<const Conv1x1Params> layers,
                                 std::span<const DenseTensor> grad_outputs) {
  if (grad_outputs.size() != layers.size()) throw ConfigError("need one output gradient per encoder layer");
  auto trace = encode_trace(input, layers);
  EncoderGrads g;
  g.layers.resize(layers.size());
  RowMatrix upstream;  // gradient flowing into act[k] from layer k + 1
  for (std::size_t k = layers.size(); k-- > 0;) {
    RowMatrix grad_act = grad_outputs[k].as_matrix();
    if (grad_act.rows() != trace.act[k].rows() || grad_act.cols() != trace.act[k].cols())
      throw ConfigError("encoder output gradient " + std::to_string(k) + " has the wrong shape");
    if (upstream.size() > 0) grad_act += upstream;
    const RowMatrix grad_pre = grad_act.cwiseProduct((trace.pre[k].array() > 0.0).cast<double>().matrix());
    const RowMatrix& below = k == 0 ? RowMatrix(input.as_matrix()) : trace.act[k - 1];
    g.layers[k].weight = grad_pre * below.transpose();
    g.layers[k].bias = grad_pre.rowwise().sum();
    upstream = layers[k].weight.transpose() * grad_pre;
  }
  g.input = DenseTensor(input.dims());
  if (!layers.empty()) g.input.as_matrix() = upstream;
  return g;
}

DenseTensor add_condition(const DenseTensor& features, const DenseTensor& latent) {
  if (features.dims() != latent.dims()) throw ConfigError("condition features and latent differ in shape");
  return DenseTensor(latent.dims(), features.data() + latent.data());
}

Matrix softmax_rows(const Matrix& scores) {
  Matrix p = scores.colwise() - scores.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

namespace {

void check_attention(const Matrix& q, const Matrix& k, const Matrix& v) {
  if (q.cols() == 0) throw ConfigError("attention needs d > 0");
  if (k.cols() != q.cols()) throw ConfigError("attention: Q and K differ in d");
  if (k.rows() != v.rows()) throw ConfigError("attention: K and V differ in token count");
  if (k.rows() == 0) throw ConfigError("attention needs at least one key");
}

}  // namespace

Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v) {
  check_attention(q, k, v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  return softmax_rows((q * k.transpose()) * scale) * v;
}

AttentionGrads attention_backward(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& grad_out) {
  check_attention(q, k, v);
  if (grad_out.rows() != q.rows() || grad_out.cols() != v.cols())
    throw ConfigError("attention output gradient has the wrong shape");
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  const Matrix p = softmax_rows((q * k.transpose()) * scale);
  const Matrix grad_p = grad_out * v.transpose();
  const Eigen::VectorXd row_dot = (grad_p.cwiseProduct(p)).rowwise().sum();
  const Matrix grad_s = p.cwiseProduct(grad_p.colwise() - row_dot);
  return {grad_s * k * scale, grad_s.transpose() * q * scale, p.transpose() * grad_out};
}

AttentionParams AttentionParams::init(Eigen::Index d, Rng& rng, double scale) {
  auto mat = [&] {
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -scale, scale);
    return m;
  };
  AttentionParams p;
  p.wq = mat();
  p.wk = mat();
  p.wv = mat();
  p.gate = 0.0;
  return p;
}

MixParams MixParams::init(Eigen::Index d, Rng& rng, double scale) {
  MixParams p;
  for (auto& n : p.neighbors) n = AttentionParams::init(d, rng, scale);
  return p;
}

namespace {

void check_mix(const Matrix& h_in, const std::array<const Matrix*, 2>& neighbors, const MixParams& params) {
  const Eigen::Index d = h_in.cols();
  for (std::size_t i = 0; i < 2; ++i) {
    if (neighbors[i]->cols() != d) throw ConfigError("neighbor hidden state differs in d from the target");
    const auto& p = params.neighbors[i];
    for (const Matrix* w : {&p.wq, &p.wk, &p.wv})
      if (w->rows() != d || w->cols() != d) throw ConfigError("attention projections must be d x d");
  }
}

}  // namespace

Matrix neighbor_mix(const Matrix& h_in, const std::array<const Matrix*, 2>& neighbors, const MixParams& params) {
  check_mix(h_in, neighbors, params);
  Matrix out = h_in;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& p = params.neighbors[i];
    if (p.gate == 0.0) continue;
    const Matrix& h = *neighbors[i];
    out += p.gate * attention(h_in * p.wq, h * p.wk, h * p.wv);
  }
  return out;
}

MixGrads neighbor_mix_backward(const Matrix& h_in, const std::array<const Matrix*, 2>& neighbors,
                               const MixParams& params, const Matrix& grad_out) {
  check_mix(h_in, neighbors, params);
  require_same_shape(h_in, grad_out, "mix output gradient");
  MixGrads g;
  g.h_in = grad_out;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& p = params.neighbors[i];
    const Matrix& h = *neighbors[i];
    const Matrix q = h_in * p.wq, k = h * p.wk, v = h * p.wv;
    const Matrix a = attention(q, k, v);
    auto& gp = g.params[i];
    gp.gate = a.cwiseProduct(grad_out).sum();
    const auto ga = attention_backward(q, k, v, p.gate * grad_out);
    gp.wq = h_in.transpose() * ga.q;
    gp.wk = h.transpose() * ga.k;
    gp.wv = h.transpose() * ga.v;
    g.h_in += ga.q * p.wq.transpose();
    g.neighbors[i] = ga.k * p.wk.transpose() + ga.v * p.wv.transpose();
  }
  return g;
}

namespace {

void check_loss(const DenseTensor& pred, const DenseTensor& truth, const RealImage& weight) {
  if (pred.dims() != truth.dims()) throw ConfigError("prediction and target differ in shape");
  const auto& d = pred.dims();
  if (d.size() < 2 || d[d.size() - 2] != weight.rows() || d[d.size() - 1] != weight.cols())
    throw ConfigError("weight map does not match the trailing H x W axes");
  if (!weight.allFinite() || (weight < 0.0).any()) throw ConfigError("loss weights must be finite and non-negative");
  if (pred.size() == 0) throw ConfigError("loss over an empty tensor");
}

}  // namespace

double reweighed_loss(const DenseTensor& pred, const DenseTensor& truth, const RealImage& weight) {
  check_loss(pred, truth, weight);
  const Eigen::Index plane = weight.size();
  const Eigen::Map<const Vector> w(weight.data(), plane);
  const Vector sq = (pred.data() - truth.data()).array().square().matrix();
  double sum = 0.0;
  for (Eigen::Index off = 0; off < sq.size(); off += plane) sum += sq.segment(off, plane).dot(w);
  return sum / static_cast<double>(pred.size());
}

LossGrads reweighed_loss_backward(const DenseTensor& pred, const DenseTensor& truth, const RealImage& weight) {
  check_loss(pred, truth, weight);
  const Eigen::Index plane = weight.size();
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  const Eigen::Map<const Vector> w(weight.data(), plane);
  const Vector diff = pred.data() - truth.data();

  LossGrads g{DenseTensor(pred.dims()), DenseTensor(pred.dims()), RealImage::Zero(weight.rows(), weight.cols())};
  Eigen::Map<Vector> gw(g.weight.data(), plane);
  for (Eigen::Index off = 0; off < diff.size(); off += plane) {
    const auto dseg = diff.segment(off, plane);
    g.pred.data().segment(off, plane) = 2.0 * inv_n * dseg.cwiseProduct(w);
    gw += inv_n * dseg.cwiseAbs2();
  }
  g.truth.data() = -g.pred.data();
  return g;
}

}  // namespace mpi_forge::toy
