#include "mmpi/param_store.hpp"

namespace mmpi {

const char* lr_group_name(LrGroup g) {
  switch (g) {
    case LrGroup::kGrids:
      return "grids";
    case LrGroup::kHead:
      return "head";
    case LrGroup::kReliability:
      return "reliability";
  }
  return "?";
}

Tensor& ParamStore::create(std::string name, std::vector<int64_t> shape, LrGroup group) {
  if (find(name) != nullptr) {
    throw UsageError("duplicate tensor name: " + name);
  }
  Tensor t;
  t.name = std::move(name);
  t.shape = std::move(shape);
  t.group = group;
  t.id = tensors_.size();
  const int64_t n = t.numel();
  if (n <= 0) throw UsageError("tensor '" + t.name + "' has empty shape");
  t.values.assign(static_cast<size_t>(n), 0.0);
  t.grad.assign(static_cast<size_t>(n), 0.0);
  t.adam_m.assign(static_cast<size_t>(n), 0.0);
  t.adam_v.assign(static_cast<size_t>(n), 0.0);
  tensors_.push_back(std::move(t));
  return tensors_.back();
}

Tensor* ParamStore::find(std::string_view name) {
  for (auto& t : tensors_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Tensor* ParamStore::find(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

Tensor& ParamStore::at(std::string_view name) {
  Tensor* t = find(name);
  if (t == nullptr) throw UsageError("no tensor named '" + std::string(name) + "'");
  return *t;
}

void ParamStore::zero_grads() {
  for (auto& t : tensors_) {
    std::fill(t.grad.begin(), t.grad.end(), 0.0);
  }
}

int64_t ParamStore::total_params() const {
  int64_t n = 0;
  for (const auto& t : tensors_) n += t.numel();
  return n;
}

GradBuffer::GradBuffer(const ParamStore& store) { match(store); }

void GradBuffer::match(const ParamStore& store) {
  buffers_.resize(store.size());
  for (size_t i = 0; i < store.size(); ++i) {
    buffers_[i].assign(store[i].values.size(), 0.0);
  }
}

void GradBuffer::clear() {
  for (auto& b : buffers_) std::fill(b.begin(), b.end(), 0.0);
}

void reduce_gradients(ParamStore& store, std::span<GradBuffer> shadows) {
  for (auto& shadow : shadows) {
    for (size_t i = 0; i < store.size(); ++i) {
      Tensor& t = store[i];
      const auto& src = shadow.of(t);
      for (size_t k = 0; k < src.size(); ++k) t.grad[k] += src[k];
    }
  }
}

}  // namespace mmpi
