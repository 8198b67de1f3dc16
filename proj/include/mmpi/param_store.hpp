#pragma once

#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmpi/types.hpp"

namespace mmpi {

/// Learning-rate group a tensor belongs to (per-group base rates in the optimizer).
enum class LrGroup : uint8_t { kGrids = 0, kHead = 1, kReliability = 2 };

const char* lr_group_name(LrGroup g);

/// One learnable tensor: values, gradient buffer, and Adam moments, all the
/// same shape. Storage order of multi-dim tensors is fixed by the owning
/// module (checkpoints are bit-stable).
struct Tensor {
  std::string name;
  std::vector<int64_t> shape;
  std::vector<Real> values;
  std::vector<Real> grad;
  std::vector<Real> adam_m;
  std::vector<Real> adam_v;
  LrGroup group = LrGroup::kGrids;
  bool frozen = false;
  size_t id = 0;  // index within the owning store

  int64_t numel() const {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
  }
};

/// Flat registry of every learnable tensor. Tensors live at stable addresses
/// for the lifetime of the store; creation order defines checkpoint order.
class ParamStore {
 public:
  Tensor& create(std::string name, std::vector<int64_t> shape, LrGroup group);

  Tensor* find(std::string_view name);
  const Tensor* find(std::string_view name) const;
  Tensor& at(std::string_view name);

  size_t size() const { return tensors_.size(); }
  Tensor& operator[](size_t i) { return tensors_[i]; }
  const Tensor& operator[](size_t i) const { return tensors_[i]; }

  auto begin() { return tensors_.begin(); }
  auto end() { return tensors_.end(); }
  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }

  void zero_grads();
  int64_t total_params() const;

 private:
  std::deque<Tensor> tensors_;  // deque: stable references across create()
};

/// Per-worker gradient shadow with the same layout as a store. Workers
/// accumulate here; reduce_gradients() folds shadows into Tensor::grad in
/// worker-index order so reductions are deterministic for a fixed partition.
class GradBuffer {
 public:
  explicit GradBuffer(const ParamStore& store);

  std::vector<Real>& of(const Tensor& t) { return buffers_[t.id]; }
  const std::vector<Real>& of(const Tensor& t) const { return buffers_[t.id]; }

  void clear();
  void match(const ParamStore& store);  // re-sync layout after tensor creation

 private:
  std::vector<std::vector<Real>> buffers_;
};

void reduce_gradients(ParamStore& store, std::span<GradBuffer> shadows);

}  // namespace mmpi
