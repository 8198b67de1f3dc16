#include "mmpi/color_head.hpp"

#include <cmath>

namespace mmpi {

int positional_encode_dim(int dim, int freqs) { return dim * (1 + 2 * freqs); }

void positional_encode(std::span<const Real> v, int freqs, Real* out) {
  const int dim = static_cast<int>(v.size());
  for (int i = 0; i < dim; ++i) out[i] = v[i];
  Real* sc = out + dim;
  for (int i = 0; i < dim; ++i) {
    // sin/cos of 2^k x via angle doubling: one transcendental per coordinate.
    Real s = std::sin(v[i]);
    Real c = std::cos(v[i]);
    for (int k = 0; k < freqs; ++k) {
      sc[2 * k * dim + i] = s;
      sc[(2 * k + 1) * dim + i] = c;
      const Real s2 = 2.0 * s * c;
      const Real c2 = 1.0 - 2.0 * s * s;
      s = s2;
      c = c2;
    }
  }
}

ColorHead ColorHead::create(ParamStore& store, const ColorHeadConfig& cfg, Rng& rng) {
  ColorHead head;
  head.cfg = cfg;
  for (int l = 0; l <= cfg.hidden_layers; ++l) {
    const int in = head.layer_in(l);
    const int out = head.layer_out(l);
    Tensor& w = store.create("head/W" + std::to_string(l), {out, in}, LrGroup::kHead);
    Tensor& b = store.create("head/b" + std::to_string(l), {out}, LrGroup::kHead);
    // Kaiming-uniform fan-in init, biases zero (D8).
    const Real bound = std::sqrt(6.0 / in);
    std::uniform_real_distribution<Real> dist(-bound, bound);
    for (auto& x : w.values) x = dist(rng);
    head.weights.push_back(&w);
    head.biases.push_back(&b);
  }
  return head;
}

Vec3 ColorHead::forward(std::span<const Real> feature, const Vec3& position,
                        const Vec3& direction, MlpArena& arena) const {
  if (static_cast<int>(feature.size()) != cfg.feature_dim) {
    throw UsageError("color head: feature dim mismatch");
  }
  const int in_dim = input_dim();
  const int width = cfg.hidden_width;
  const size_t in_off = arena.inputs.size();
  const size_t pre_off = arena.preacts.size();
  arena.inputs.resize(in_off + static_cast<size_t>(in_dim));
  arena.preacts.resize(pre_off + static_cast<size_t>(cfg.hidden_layers) * width);
  Real* x = arena.inputs.data() + in_off;
  Real* z = arena.preacts.data() + pre_off;

  int at = 0;
  for (int i = 0; i < cfg.feature_dim; ++i) x[at++] = feature[i];
  positional_encode(std::span<const Real>(position.data(), 3), cfg.pe_freqs_x, x + at);
  at += positional_encode_dim(3, cfg.pe_freqs_x);
  positional_encode(std::span<const Real>(direction.data(), 3), cfg.pe_freqs_d, x + at);

  // Hidden layers with ReLU; pre-activations taped for backward.
  const Real* cur = x;
  thread_local std::vector<Real> h;
  h.resize(static_cast<size_t>(width));
  for (int l = 0; l < cfg.hidden_layers; ++l) {
    const int in = layer_in(l);
    Eigen::Map<const MatX> w(weights[static_cast<size_t>(l)]->values.data(), width, in);
    Eigen::Map<const VecX> b(biases[static_cast<size_t>(l)]->values.data(), width);
    Eigen::Map<VecX> zl(z + int64_t(l) * width, width);
    zl.noalias() = w * Eigen::Map<const VecX>(cur, in) + b;
    for (int i = 0; i < width; ++i) h[static_cast<size_t>(i)] = std::max(zl[i], Real(0));
    cur = h.data();
  }

  const int ll = cfg.hidden_layers;
  Eigen::Map<const MatX> w_out(weights[static_cast<size_t>(ll)]->values.data(), 3, layer_in(ll));
  Eigen::Map<const VecX> b_out(biases[static_cast<size_t>(ll)]->values.data(), 3);
  const VecX z_out = w_out * Eigen::Map<const VecX>(cur, layer_in(ll)) + b_out;

  ++arena.rows;
  return Vec3(sigmoid(z_out[0]), sigmoid(z_out[1]), sigmoid(z_out[2]));
}

void ColorHead::backward(const MlpArena& arena, int row, const Vec3& rgb, const Vec3& d_rgb,
                         Real* d_feature, GradBuffer& grads) const {
  if (row < 0 || row >= arena.rows) throw UsageError("color head backward: no taped forward");
  const int in_dim = input_dim();
  const int width = cfg.hidden_width;
  const Real* x = arena.inputs.data() + int64_t(row) * in_dim;
  const Real* z = arena.preacts.data() + int64_t(row) * cfg.hidden_layers * width;

  thread_local std::vector<Real> dz_buf, dh_buf, h_buf;
  dz_buf.resize(static_cast<size_t>(std::max(width, 3)));
  dh_buf.resize(static_cast<size_t>(std::max(width, in_dim)));
  h_buf.resize(static_cast<size_t>(std::max(1, cfg.hidden_layers) * width));

  // Recompute post-activations from taped pre-activations.
  for (int l = 0; l < cfg.hidden_layers; ++l) {
    for (int i = 0; i < width; ++i) {
      h_buf[static_cast<size_t>(l * width + i)] = std::max(z[l * width + i], Real(0));
    }
  }

  // Output layer: sigmoid gate.
  Vec3 dz_out;
  for (int i = 0; i < 3; ++i) dz_out[i] = d_rgb[i] * rgb[i] * (1.0 - rgb[i]);

  const int ll = cfg.hidden_layers;
  const Real* last_h = ll > 0 ? h_buf.data() + int64_t(ll - 1) * width : x;
  {
    const int in = layer_in(ll);
    auto& gw = grads.of(*weights[static_cast<size_t>(ll)]);
    auto& gb = grads.of(*biases[static_cast<size_t>(ll)]);
    Eigen::Map<MatX> gwm(gw.data(), 3, in);
    gwm.noalias() += dz_out * Eigen::Map<const VecX>(last_h, in).transpose();
    for (int i = 0; i < 3; ++i) gb[static_cast<size_t>(i)] += dz_out[i];
    Eigen::Map<const MatX> w(weights[static_cast<size_t>(ll)]->values.data(), 3, in);
    Eigen::Map<VecX>(dh_buf.data(), in).noalias() = w.transpose() * dz_out;
  }

  for (int l = cfg.hidden_layers - 1; l >= 0; --l) {
    const int in = layer_in(l);
    const Real* zl = z + int64_t(l) * width;
    for (int i = 0; i < width; ++i) {
      dz_buf[static_cast<size_t>(i)] = zl[i] > 0 ? dh_buf[static_cast<size_t>(i)] : 0.0;
    }
    const Real* prev = l > 0 ? h_buf.data() + int64_t(l - 1) * width : x;
    auto& gw = grads.of(*weights[static_cast<size_t>(l)]);
    auto& gb = grads.of(*biases[static_cast<size_t>(l)]);
    Eigen::Map<MatX> gwm(gw.data(), width, in);
    Eigen::Map<const VecX> dz(dz_buf.data(), width);
    gwm.noalias() += dz * Eigen::Map<const VecX>(prev, in).transpose();
    for (int i = 0; i < width; ++i) gb[static_cast<size_t>(i)] += dz[i];
    Eigen::Map<const MatX> w(weights[static_cast<size_t>(l)]->values.data(), width, in);
    Eigen::Map<VecX>(dh_buf.data(), in).noalias() = w.transpose() * dz;
  }

  for (int i = 0; i < cfg.feature_dim; ++i) d_feature[i] = dh_buf[static_cast<size_t>(i)];
}

}  // namespace mmpi
