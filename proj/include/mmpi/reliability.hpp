#pragma once

#include <span>

#include "mmpi/renderer.hpp"

namespace mmpi {

/// Logits of every active MPI at one sample: the owner's grid is read at the
/// sample's own NDC point, the others at the clamped cross-projection of the
/// sample's world position (direction for samples at infinity). Writes one
/// logit and one query point per active MPI, in active-MPI order.
void gather_logits(const SceneModel& model, const RenderOptions& opts, const FieldSample& s,
                   Real* logits, Vec3* points);

/// Softmax with max-subtraction; returns the owner's relative confidence.
Real softmax_confidence(std::span<const Real> logits, int owner);

/// d(owner's softmax)/d(logits) chained with an upstream dL/dP.
void softmax_backward(std::span<const Real> logits, int owner, Real d_p, Real* d_logits);

/// Scatters per-logit gradients through trilinear weights into the V_r grids
/// of the active MPIs (same active-MPI order as gather_logits).
void reliability_backward(const SceneModel& model, const RenderOptions& opts,
                          std::span<const Vec3> points, std::span<const Real> d_logits,
                          GradBuffer& grads);

}  // namespace mmpi
