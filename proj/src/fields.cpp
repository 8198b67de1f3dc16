#include "mmpi/fields.hpp"

#include <cmath>

namespace mmpi {

Real density_shift_for(Real alpha_init, Real delta) {
  const Real sigma0 = -std::log1p(-alpha_init) / delta;
  return inverse_softplus(sigma0);
}

SceneModel SceneModel::build(ParamStore& store, const ModelConfig& cfg) {
  if (cfg.mpis.empty()) throw ConfigError("model needs at least one MPI field");
  SceneModel model;
  model.config = cfg;
  Rng rng(cfg.seed);
  std::uniform_real_distribution<Real> feat_dist(-cfg.feature_init, cfg.feature_init);

  for (size_t i = 0; i < cfg.mpis.size(); ++i) {
    const auto& mc = cfg.mpis[i];
    const std::string prefix = "mpi" + std::to_string(i) + "/";
    MpiField f;
    f.id = static_cast<int>(i);
    f.frustum = MpiFrustum::make(mc.pose, mc.tan_x, mc.tan_y, mc.near);
    f.density = PlaneStack::create(store, prefix + "density", 1, mc.planes, mc.res_x, mc.res_y,
                                   LrGroup::kGrids);
    f.feature = PlaneStack::create(store, prefix + "feature", cfg.head.feature_dim, mc.planes,
                                   mc.res_x, mc.res_y, LrGroup::kGrids);
    // Same size and resolution as the density grid, trilinear over the NDC cube.
    f.reliability =
        ReliabilityGrid::create(store, prefix + "reliability", mc.res_x, mc.res_y, mc.planes);
    f.nominal_delta = 2.0 / (mc.planes - 1);
    f.density_shift = density_shift_for(cfg.alpha_init, f.nominal_delta);
    for (auto& v : f.feature.data->values) v = feat_dist(rng);
    model.mpis.push_back(std::move(f));
  }

  if (cfg.cube) {
    const auto& cc = *cfg.cube;
    CubeField c;
    c.density =
        CubeGrid::create(store, "cube/density", 1, cc.res, cc.res, cc.res, cc.aabb, LrGroup::kGrids);
    c.feature = CubeGrid::create(store, "cube/feature", cfg.head.feature_dim, cc.res, cc.res,
                                 cc.res, cc.aabb, LrGroup::kGrids);
    c.step = c.density.min_voxel_edge() * cc.step_ratio;
    c.density_shift = density_shift_for(cfg.alpha_init, c.step);
    for (auto& v : c.feature.data->values) v = feat_dist(rng);
    model.cube = std::move(c);
  }

  model.head = ColorHead::create(store, cfg.head, rng);
  return model;
}

}  // namespace mmpi
