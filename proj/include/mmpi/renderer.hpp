#pragma once

#include <span>
#include <vector>

#include "mmpi/fields.hpp"

namespace mmpi {

/// One ray sample drawn from an MPI plane or the cube grid. MPI samples live
/// at plane crossings of the projected NDC line; the far plane (a_z = 1) is a
/// valid sample at infinite world distance.
struct FieldSample {
  int32_t field = 0;  // MPI index, or SceneModel::cube_field_id() for the cube
  int32_t plane = 0;  // plane index (MPI) or step index (cube)
  Real dist = 0;      // world distance from the ray origin (may be +inf)
  Real delta = 0;     // inter-sample distance: NDC for MPI, world for cube
  Vec3 point{0, 0, 0};      // MPI: NDC point; cube: normalized local coords
  Vec3 world_pos{0, 0, 0};  // world position; ray direction when at_infinity
  Vec3 shade_dir{0, 0, 0};  // direction fed to the color head
  bool at_infinity = false;

  // Filled by shading / compositing.
  Real raw_sigma = 0;
  Real alpha = 0;
  Real blend = 1;      // reliability weight P
  Real trans = 1;      // transmittance T before this sample
  Real weight = 0;     // T * P * alpha
  Vec3 rgb{0, 0, 0};
  int32_t tape_row = -1;  // MLP arena row
  int32_t rel_row = -1;   // reliability arena row (K logits + points)
};

struct RenderOutput {
  Vec3 color{0, 0, 0};
  Real opacity = 0;      // sum of sample weights
  Real trans_final = 1;  // transmittance after the last sample
  Real depth = 0;        // opacity-normalized expected depth (diagnostic)
  int n_samples = 0;
};

struct RenderOptions {
  bool reliability = false;
  Vec3 background{1, 1, 1};
  Real alpha_thresh = 0;   // drop samples below this alpha (0 = keep all)
  Real trans_cutoff = 0;   // stop the ray when T falls below (0 = never)
  std::vector<uint8_t> active_mpis;  // per-MPI mask; empty = all active
  bool use_cube = true;

  bool mpi_active(int i) const {
    return active_mpis.empty() || active_mpis[static_cast<size_t>(i)] != 0;
  }
  int active_mpi_count(int total) const;
};

/// Per-worker scratch: samples of the ray in flight plus flat tape arenas.
/// Reused across rays; nothing here owns learnable state.
struct RayWorkspace {
  std::vector<FieldSample> samples;
  MlpArena mlp;
  std::vector<Real> rel_logits;  // rows of K
  std::vector<Vec3> rel_points;  // rows of K
  int rel_k = 0;
  std::vector<Real> feat_buf;
  std::vector<Real> scratch;

  void clear() {
    samples.clear();
    mlp.clear();
    rel_logits.clear();
    rel_points.clear();
  }
};

/// Upstream gradients for one rendered ray, produced by the losses.
struct RayUpstream {
  Vec3 d_color{0, 0, 0};
  Real d_opacity = 0;
  std::vector<Real> d_weight;      // per kept sample; may be empty
  std::vector<Vec3> d_sample_rgb;  // per kept sample; may be empty
};

struct BackwardOptions {
  bool field_grads = true;        // densities, features, head
  bool reliability_grads = true;  // V_r logits
};

/// Geometry-only sampling (no grids touched): plane crossings of the
/// projected NDC line, forward-facing check applied, out-of-range x/y culled.
void mpi_ray_samples(const MpiField& mpi, const Ray& ray, std::vector<FieldSample>& out);

/// Geometry-only cube sampling: uniform world steps across the ray-AABB span.
void cube_ray_samples(const CubeField& cube, int field_id, const Ray& ray,
                      std::vector<FieldSample>& out);

/// Density/feature lookup, softplus activation, alpha, color. Returns false
/// when the sample is culled by opts.alpha_thresh.
bool shade_sample(const SceneModel& model, const RenderOptions& opts, FieldSample& s,
                  RayWorkspace& ws);

/// Spec surface: samples MPI `i` and shades every sample (alpha and color
/// filled, blend weight left at 1). Back-facing rays yield an empty list.
std::vector<FieldSample> sample_mpi(const SceneModel& model, int i, const Ray& ray,
                                    RayWorkspace& ws, const RenderOptions& opts = {});

std::vector<FieldSample> sample_cube_field(const SceneModel& model, const Ray& ray,
                                           RayWorkspace& ws, const RenderOptions& opts = {});

/// Sorts samples ascending by world distance, ties broken by (field, plane).
void merge_samples(std::vector<FieldSample>& samples);

/// Front-to-back compositing of a sorted batch (Eq. form: C = sum T P a c,
/// T = prod(1 - P a)). Throws UsageError if the batch is unsorted. Fills
/// trans/weight per sample.
RenderOutput composite(std::span<FieldSample> batch, const RenderOptions& opts);

/// Full pipeline for one ray: sample active fields, merge, attach reliability
/// weights, composite against the background. The workspace retains the tape
/// needed by render_backward.
RenderOutput render_ray(const SceneModel& model, const Ray& ray, const RenderOptions& opts,
                        RayWorkspace& ws);

/// Exact reverse pass for the last render_ray taped in `ws`.
void render_backward(const SceneModel& model, const RenderOptions& opts, RayWorkspace& ws,
                     const RayUpstream& up, GradBuffer& grads, const BackwardOptions& bopts = {});

/// [0,1] ray-distance compression used by the distortion loss: d / (1 + d),
/// with infinity mapping to exactly 1.
Real normalized_distance(Real d);

}  // namespace mmpi
