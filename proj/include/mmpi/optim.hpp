#pragma once

#include <functional>
#include <string>

#include "mmpi/param_store.hpp"

namespace mmpi {

struct AdamConfig {
  Real beta1 = 0.9;
  Real beta2 = 0.99;
  Real eps = 1e-8;
};

/// Per-group base learning rates (multiplied by the caller's decay factor).
struct LearningRates {
  Real grids = 1e-1;
  Real head = 1e-3;
  Real reliability = 1e-2;

  Real of(LrGroup g) const {
    switch (g) {
      case LrGroup::kGrids:
        return grids;
      case LrGroup::kHead:
        return head;
      case LrGroup::kReliability:
        return reliability;
    }
    return 0;
  }
};

/// One Adam update over every unfrozen tensor. `step` is 1-based and drives
/// bias correction; gradients are zeroed afterwards (frozen tensors included,
/// so stale gradients never leak into a later unfreeze).
void adam_step(ParamStore& store, const AdamConfig& cfg, const LearningRates& lr,
               Real lr_scale, int64_t step);

/// Freeze/unfreeze tensors whose name matches `pattern` (exact name, or a
/// prefix when the pattern ends in '*'). Returns the number of tensors
/// touched; warns on stderr when nothing matches.
int freeze(ParamStore& store, std::string_view pattern);
int unfreeze(ParamStore& store, std::string_view pattern);
int freeze_group(ParamStore& store, LrGroup group, bool frozen);
void freeze_all_except_group(ParamStore& store, LrGroup keep);

struct GradCheckEntry {
  std::string tensor;
  int64_t index = 0;
  Real analytic = 0;
  Real numeric = 0;
  Real err = 0;
};

struct GradCheckReport {
  Real max_err = 0;  // symmetric relative error, floored at 1 (abs below 1)
  GradCheckEntry worst;
  int64_t checked = 0;
  bool passed(Real tol) const { return max_err < tol; }
};

/// Central finite differences against analytic gradients.
/// `loss(with_grad)` returns the scalar objective; when `with_grad` it must
/// also leave d(loss)/d(param) in every tensor's grad buffer. Error metric:
/// |analytic - numeric| / max(1, |analytic|, |numeric|). `max_per_tensor < 0`
/// checks every element, otherwise a deterministic random subset.
GradCheckReport grad_check(ParamStore& store, const std::function<Real(bool with_grad)>& loss,
                           Real h, int max_per_tensor = -1, uint64_t seed = 7);

}  // namespace mmpi
