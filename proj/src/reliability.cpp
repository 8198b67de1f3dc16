#include "mmpi/reliability.hpp"

#include <algorithm>
#include <cmath>

namespace mmpi {

void gather_logits(const SceneModel& model, const RenderOptions& opts, const FieldSample& s,
                   Real* logits, Vec3* points) {
  int at = 0;
  for (size_t j = 0; j < model.mpis.size(); ++j) {
    if (!opts.mpi_active(static_cast<int>(j))) continue;
    const MpiField& mpi = model.mpis[j];
    Vec3 q;
    if (static_cast<int32_t>(j) == s.field) {
      q = s.point;
    } else if (s.at_infinity) {
      // world_pos carries the ray direction for samples at infinity
      q = ndc_project_dir_clamped(mpi.frustum, s.world_pos);
    } else {
      q = ndc_project_clamped(mpi.frustum, s.world_pos);
    }
    points[at] = q;
    logits[at] = mpi.reliability.sample(q);
    ++at;
  }
}

Real softmax_confidence(std::span<const Real> logits, int owner) {
  Real m = logits[0];
  for (Real v : logits) m = std::max(m, v);
  Real denom = 0;
  Real num = 0;
  for (size_t i = 0; i < logits.size(); ++i) {
    const Real e = std::exp(logits[i] - m);
    denom += e;
    if (static_cast<int>(i) == owner) num = e;
  }
  return num / denom;
}

void softmax_backward(std::span<const Real> logits, int owner, Real d_p, Real* d_logits) {
  Real m = logits[0];
  for (Real v : logits) m = std::max(m, v);
  Real denom = 0;
  for (Real v : logits) denom += std::exp(v - m);
  const Real p_own = std::exp(logits[static_cast<size_t>(owner)] - m) / denom;
  for (size_t i = 0; i < logits.size(); ++i) {
    const Real p_i = std::exp(logits[i] - m) / denom;
    const Real delta = static_cast<int>(i) == owner ? 1.0 : 0.0;
    d_logits[i] = d_p * p_own * (delta - p_i);
  }
}

void reliability_backward(const SceneModel& model, const RenderOptions& opts,
                          std::span<const Vec3> points, std::span<const Real> d_logits,
                          GradBuffer& grads) {
  int at = 0;
  for (size_t j = 0; j < model.mpis.size(); ++j) {
    if (!opts.mpi_active(static_cast<int>(j))) continue;
    const MpiField& mpi = model.mpis[j];
    mpi.reliability.sample_backward(points[static_cast<size_t>(at)],
                                    d_logits[static_cast<size_t>(at)],
                                    grads.of(*mpi.reliability.data));
    ++at;
  }
}

}  // namespace mmpi
