#include "mmpi/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace mmpi {

void adam_step(ParamStore& store, const AdamConfig& cfg, const LearningRates& lr,
               Real lr_scale, int64_t step) {
  if (step < 1) throw UsageError("adam_step: step must be >= 1");
  const Real bc1 = 1.0 - std::pow(cfg.beta1, static_cast<Real>(step));
  const Real bc2 = 1.0 - std::pow(cfg.beta2, static_cast<Real>(step));
  for (auto& t : store) {
    if (!t.frozen) {
      const Real rate = lr.of(t.group) * lr_scale;
      for (size_t i = 0; i < t.values.size(); ++i) {
        const Real g = t.grad[i];
        t.adam_m[i] = cfg.beta1 * t.adam_m[i] + (1.0 - cfg.beta1) * g;
        t.adam_v[i] = cfg.beta2 * t.adam_v[i] + (1.0 - cfg.beta2) * g * g;
        const Real mhat = t.adam_m[i] / bc1;
        const Real vhat = t.adam_v[i] / bc2;
        t.values[i] -= rate * mhat / (std::sqrt(vhat) + cfg.eps);
      }
    }
    std::fill(t.grad.begin(), t.grad.end(), 0.0);
  }
}

namespace {

bool name_matches(std::string_view name, std::string_view pattern) {
  if (!pattern.empty() && pattern.back() == '*') {
    return name.substr(0, pattern.size() - 1) == pattern.substr(0, pattern.size() - 1);
  }
  return name == pattern;
}

int set_frozen(ParamStore& store, std::string_view pattern, bool frozen) {
  int n = 0;
  for (auto& t : store) {
    if (name_matches(t.name, pattern)) {
      t.frozen = frozen;
      ++n;
    }
  }
  if (n == 0) {
    std::fprintf(stderr, "warning: freeze selector '%.*s' matched no tensors\n",
                 static_cast<int>(pattern.size()), pattern.data());
  }
  return n;
}

}  // namespace

int freeze(ParamStore& store, std::string_view pattern) { return set_frozen(store, pattern, true); }

int unfreeze(ParamStore& store, std::string_view pattern) {
  return set_frozen(store, pattern, false);
}

int freeze_group(ParamStore& store, LrGroup group, bool frozen) {
  int n = 0;
  for (auto& t : store) {
    if (t.group == group) {
      t.frozen = frozen;
      ++n;
    }
  }
  return n;
}

void freeze_all_except_group(ParamStore& store, LrGroup keep) {
  for (auto& t : store) t.frozen = (t.group != keep);
}

GradCheckReport grad_check(ParamStore& store, const std::function<Real(bool with_grad)>& loss,
                           Real h, int max_per_tensor, uint64_t seed) {
  store.zero_grads();
  loss(true);

  // Snapshot analytic gradients before finite differencing perturbs state.
  std::vector<std::vector<Real>> analytic(store.size());
  for (size_t i = 0; i < store.size(); ++i) analytic[i] = store[i].grad;

  GradCheckReport report;
  Rng rng(seed);
  for (size_t ti = 0; ti < store.size(); ++ti) {
    Tensor& t = store[ti];
    const int64_t n = t.numel();
    std::vector<int64_t> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    if (max_per_tensor >= 0 && n > max_per_tensor) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<size_t>(max_per_tensor));
    }
    for (int64_t k : idx) {
      const Real saved = t.values[static_cast<size_t>(k)];
      t.values[static_cast<size_t>(k)] = saved + h;
      const Real f_plus = loss(false);
      t.values[static_cast<size_t>(k)] = saved - h;
      const Real f_minus = loss(false);
      t.values[static_cast<size_t>(k)] = saved;

      const Real numeric = (f_plus - f_minus) / (2.0 * h);
      const Real a = analytic[ti][static_cast<size_t>(k)];
      const Real err = std::abs(a - numeric) / std::max({Real(1), std::abs(a), std::abs(numeric)});
      ++report.checked;
      if (err > report.max_err) {
        report.max_err = err;
        report.worst = {t.name, k, a, numeric, err};
      }
    }
  }
  return report;
}

}  // namespace mmpi
