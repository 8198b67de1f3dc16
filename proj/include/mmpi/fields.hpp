#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmpi/color_head.hpp"
#include "mmpi/grids.hpp"
#include "mmpi/ndc.hpp"
#include "mmpi/param_store.hpp"

namespace mmpi {

/// One NDC-warped plane-grid MPI: density stack V_sigma (1 channel), feature
/// stack V_feat (D channels) and reliability logits V_r over the NDC cube.
struct MpiField {
  int id = 0;
  MpiFrustum frustum;
  PlaneStack density;
  PlaneStack feature;
  ReliabilityGrid reliability;
  Real density_shift = 0;  // softplus(raw + shift), D9
  Real nominal_delta = 0;  // NDC z gap between adjacent planes
};

/// Centered world-space voxel grid; renders only in combination with MPIs.
struct CubeField {
  CubeGrid density;
  CubeGrid feature;
  Real density_shift = 0;
  Real step = 0;  // world-space sampling step (voxel edge * step_ratio, D10)
};

struct MpiFieldConfig {
  Mat4 pose = Mat4::Identity();
  Real tan_x = 1.0;
  Real tan_y = 1.0;
  Real near = 1.0;
  int res_x = 64;
  int res_y = 64;
  int planes = 32;
};

struct CubeFieldConfig {
  Aabb aabb;
  int res = 48;
  Real step_ratio = 0.5;
};

struct ModelConfig {
  std::vector<MpiFieldConfig> mpis;
  std::optional<CubeFieldConfig> cube;
  ColorHeadConfig head;
  Real alpha_init = 1e-3;  // initial alpha at the nominal delta (D9)
  Real feature_init = 1e-2;
  uint64_t seed = 1;
};

/// All learnable state of one scene: K MPIs, optional cube, shared color head.
/// Tensor creation order is fixed (mpi{i}/density, /feature, /reliability,
/// cube/density, cube/feature, head/W*, head/b*) so checkpoints are stable.
struct SceneModel {
  std::vector<MpiField> mpis;
  std::optional<CubeField> cube;
  ColorHead head;
  ModelConfig config;

  static SceneModel build(ParamStore& store, const ModelConfig& cfg);

  int field_count() const { return static_cast<int>(mpis.size()) + (cube ? 1 : 0); }
  int cube_field_id() const { return static_cast<int>(mpis.size()); }
};

/// Shift so softplus(0 + shift) yields the density whose alpha at `delta`
/// equals `alpha_init`.
Real density_shift_for(Real alpha_init, Real delta);

}  // namespace mmpi
