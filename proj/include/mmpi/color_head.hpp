#pragma once

#include <span>
#include <vector>

#include "mmpi/param_store.hpp"
#include "mmpi/types.hpp"

namespace mmpi {

/// Output size of positional_encode for a `dim`-vector: dim * (1 + 2*freqs).
int positional_encode_dim(int dim, int freqs);

/// v ++ sin(2^k v) ++ cos(2^k v) for k = 0..freqs-1 (interleaved per k).
void positional_encode(std::span<const Real> v, int freqs, Real* out);

struct ColorHeadConfig {
  int feature_dim = 12;
  int pe_freqs_x = 5;
  int pe_freqs_d = 4;
  int hidden_width = 64;
  int hidden_layers = 2;
};

/// Scratch + tape rows for MLP evaluation. One arena per worker; rows are
/// appended per shaded sample and consumed by the matching backward pass.
struct MlpArena {
  std::vector<Real> inputs;   // rows of input_dim
  std::vector<Real> preacts;  // rows of hidden_layers * hidden_width
  int rows = 0;
  void clear() {
    inputs.clear();
    preacts.clear();
    rows = 0;
  }
};

/// Shallow view-dependent color head: rgb = sigmoid(MLP(feature, pe(x), pe(d)))
/// with ReLU hidden layers. Weights W[l] are [out x in] row-major tensors.
struct ColorHead {
  ColorHeadConfig cfg;
  std::vector<Tensor*> weights;
  std::vector<Tensor*> biases;

  static ColorHead create(ParamStore& store, const ColorHeadConfig& cfg, Rng& rng);

  int input_dim() const {
    return cfg.feature_dim + positional_encode_dim(3, cfg.pe_freqs_x) +
           positional_encode_dim(3, cfg.pe_freqs_d);
  }
  int layer_in(int l) const { return l == 0 ? input_dim() : cfg.hidden_width; }
  int layer_out(int l) const { return l == cfg.hidden_layers ? 3 : cfg.hidden_width; }

  /// Assembles the input, runs the net, appends a tape row, returns rgb in
  /// (0,1)^3 and the arena row index for backward.
  Vec3 forward(std::span<const Real> feature, const Vec3& position, const Vec3& direction,
               MlpArena& arena) const;

  /// Exact reverse pass for one tape row. Writes d(loss)/d(feature) into
  /// `d_feature` (size feature_dim) and accumulates weight/bias gradients.
  void backward(const MlpArena& arena, int row, const Vec3& rgb, const Vec3& d_rgb,
                Real* d_feature, GradBuffer& grads) const;
};

}  // namespace mmpi
