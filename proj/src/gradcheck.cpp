// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mpi_forge::toy {

std::string_view to_string(ToyOp op) {
  switch (op) {
    case ToyOp::MpiEncode: return "mpi_encode";
    case ToyOp::Attention: return "attention";
    case ToyOp::CrossViewMix: return "cross_view_mix";
    case ToyOp::CrossFrameMix: return "cross_frame_mix";
    case ToyOp::ReweighedLoss: return "reweighed_loss";
  }
  return "unknown";
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / denom;
}

GradcheckResult finite_diff_gradcheck(const std::function<double(const Vector&)>& f, const Vector& x,
                                      const Vector& analytic, double h) {
  if (!(h > 0)) throw ConfigError("finite-difference step must be positive");
  if (analytic.size() != x.size()) throw ConfigError("analytic gradient size does not match the point");
  GradcheckResult r;
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    const double err = relative_error(analytic[i], (up - down) / (2.0 * h));
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst_index = static_cast<std::size_t>(i);
    }
    ++r.checked;
  }
  return r;
}

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
  return m;
}

// Walks every differentiable leaf of a problem in a fixed order, so values
// and gradients flatten identically.
template <typename Leaves>
Vector pack(Leaves&& leaves) {
  std::vector<double> flat;
  leaves([&](double* p, Eigen::Index n) { flat.insert(flat.end(), p, p + n); });
  return Eigen::Map<Vector>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

template <typename Leaves>
void unpack(Leaves&& leaves, const Vector& x) {
  Eigen::Index off = 0;
  leaves([&](double* p, Eigen::Index n) {
    std::copy_n(x.data() + off, n, p);
    off += n;
  });
}

template <typename Problem>
GradcheckResult check(const Problem& base, double h) {
  Problem work = base;
  const Vector x = pack([&](auto&& fn) { work.leaves(fn); });
  auto grads = base.gradient();
  const Vector analytic = pack([&](auto&& fn) { grads.leaves(fn); });
  auto f = [&](const Vector& v) {
    unpack([&](auto&& fn) { work.leaves(fn); }, v);
    return work.value();
  };
  return finite_diff_gradcheck(f, x, analytic, h);
}

struct EncoderProblem {
  DenseTensor input;
  std::vector<Conv1x1Params> layers;
  std::vector<DenseTensor> projections;

  template <typename Fn>
  void leaves(Fn&& fn) {
    fn(input.data().data(), input.size());
    for (auto& l : layers) {
      fn(l.weight.data(), l.weight.size());
      fn(l.bias.data(), l.bias.size());
    }
  }

  double value() const {
    const auto out = mpi_encode(input, layers);
    double s = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) s += out[k].data().dot(projections[k].data());
    return s;
  }

  struct Grads {
    EncoderGrads g;
    template <typename Fn>
    void leaves(Fn&& fn) {
      fn(g.input.data().data(), g.input.size());
      for (auto& l : g.layers) {
        fn(l.weight.data(), l.weight.size());
        fn(l.bias.data(), l.bias.size());
      }
    }
  };
  Grads gradient() const { return {mpi_encode_backward(input, layers, projections)}; }

  // Smallest |pre-activation| over all layers.
  double kink_margin() const {
    double margin = INFINITY;
    RowMatrix x = input.as_matrix();
    for (const auto& p : layers) {
      RowMatrix z = p.weight * x;
      z.colwise() += p.bias;
      margin = std::min(margin, z.cwiseAbs().minCoeff());
      x = z.cwiseMax(0.0);
    }
    return margin;
  }

  static EncoderProblem random(Rng& rng) {
    const std::array<Eigen::Index, 4> channels = {3, 4, 5, 3};
    const Eigen::Index h = 2, w = 3;
    EncoderProblem p;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      p.input = DenseTensor({channels[0], h, w}, random_matrix(channels[0] * h * w, 1, rng).col(0));
      p.layers.clear();
      p.projections.clear();
      for (std::size_t k = 0; k + 1 < channels.size(); ++k) {
        p.layers.push_back(Conv1x1Params::random(channels[k], channels[k + 1], rng));
        p.projections.emplace_back(std::vector<Eigen::Index>{channels[k + 1], h, w},
                                   random_matrix(channels[k + 1] * h * w, 1, rng).col(0));
      }
      if (p.kink_margin() > 1e-3) return p;
    }
    throw ConfigError("could not draw an encoder problem away from ReLU kinks");
  }
};

struct AttentionProblem {
  Matrix q, k, v, projection;

  template <typename Fn>
  void leaves(Fn&& fn) {
    for (Matrix* m : {&q, &k, &v}) fn(m->data(), m->size());
  }
  double value() const { return attention(q, k, v).cwiseProduct(projection).sum(); }

  struct Grads {
    AttentionGrads g;
    template <typename Fn>
    void leaves(Fn&& fn) {
      for (Matrix* m : {&g.q, &g.k, &g.v}) fn(m->data(), m->size());
    }
  };
  Grads gradient() const { return {attention_backward(q, k, v, projection)}; }

  static AttentionProblem random(Rng& rng) {
    const Eigen::Index d = 4;
    return {random_matrix(3, d, rng), random_matrix(5, d, rng), random_matrix(5, d, rng), random_matrix(3, d, rng)};
  }
};

struct MixProblem {
  Matrix h_in;
  std::array<Matrix, 2> neighbors;
  MixParams params;
  Matrix projection;

  template <typename Fn>
  static void param_leaves(std::array<AttentionParams, 2>& ps, Fn&& fn) {
    for (auto& p : ps) {
      for (Matrix* m : {&p.wq, &p.wk, &p.wv}) fn(m->data(), m->size());
      fn(&p.gate, 1);
    }
  }

  template <typename Fn>
  void leaves(Fn&& fn) {
    fn(h_in.data(), h_in.size());
    for (auto& n : neighbors) fn(n.data(), n.size());
    param_leaves(params.neighbors, fn);
  }
  double value() const {
    return neighbor_mix(h_in, {&neighbors[0], &neighbors[1]}, params).cwiseProduct(projection).sum();
  }

  struct Grads {
    MixGrads g;
    template <typename Fn>
    void leaves(Fn&& fn) {
      fn(g.h_in.data(), g.h_in.size());
      for (auto& n : g.neighbors) fn(n.data(), n.size());
      param_leaves(g.params, fn);
    }
  };
  Grads gradient() const { return {neighbor_mix_backward(h_in, {&neighbors[0], &neighbors[1]}, params, projection)}; }

  static MixProblem random(Rng& rng, std::array<Eigen::Index, 2> neighbor_tokens) {
    const Eigen::Index d = 4;
    MixProblem p;
    p.h_in = random_matrix(3, d, rng);
    for (std::size_t i = 0; i < 2; ++i) p.neighbors[i] = random_matrix(neighbor_tokens[i], d, rng);
    p.params = MixParams::init(d, rng);
    for (auto& n : p.params.neighbors) n.gate = uniform(rng, 0.25, 1.0) * (uniform01(rng) < 0.5 ? -1.0 : 1.0);
    p.projection = random_matrix(3, d, rng);
    return p;
  }
};

struct LossProblem {
  DenseTensor pred, truth;
  RealImage weight;

  template <typename Fn>
  void leaves(Fn&& fn) {
    fn(pred.data().data(), pred.size());
    fn(truth.data().data(), truth.size());
    fn(weight.data(), weight.size());
  }
  double value() const { return reweighed_loss(pred, truth, weight); }

  struct Grads {
    LossGrads g;
    template <typename Fn>
    void leaves(Fn&& fn) {
      fn(g.pred.data().data(), g.pred.size());
      fn(g.truth.data().data(), g.truth.size());
      fn(g.weight.data(), g.weight.size());
    }
  };
  Grads gradient() const { return {reweighed_loss_backward(pred, truth, weight)}; }

  static LossProblem random(Rng& rng) {
    const std::vector<Eigen::Index> dims = {2, 3, 4};
    LossProblem p;
    p.pred = DenseTensor(dims, random_matrix(24, 1, rng).col(0));
    p.truth = DenseTensor(dims, random_matrix(24, 1, rng).col(0));
    p.weight = random_matrix(3, 4, rng, 0.5, 2.0).array();
    return p;
  }
};

}  // namespace

GradcheckResult gradcheck_op(ToyOp op, std::uint64_t seed, double h) {
  Rng rng(seed);
  switch (op) {
    case ToyOp::MpiEncode: return check(EncoderProblem::random(rng), h);
    case ToyOp::Attention: return check(AttentionProblem::random(rng), h);
    case ToyOp::CrossViewMix: return check(MixProblem::random(rng, {4, 2}), h);
    case ToyOp::CrossFrameMix: return check(MixProblem::random(rng, {3, 5}), h);
    case ToyOp::ReweighedLoss: return check(LossProblem::random(rng), h);
  }
  throw ConfigError("unknown toy op");
}

}  // namespace mpi_forge::toy
