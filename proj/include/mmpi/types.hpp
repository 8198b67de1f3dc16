#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace mmpi {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

inline constexpr Real kInfinity = std::numeric_limits<Real>::infinity();

/// Base for all errors thrown by the library; carries a descriptive message.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller passed invalid data (bad pixel index, non-rigid pose, ...).
struct InputError : Error {
  using Error::Error;
};

/// API contract violated (unsorted batch, missing tape, shape mismatch).
struct UsageError : Error {
  using Error::Error;
};

/// File / parse problems.
struct IoError : Error {
  using Error::Error;
};

/// Bad configuration (unknown key, inconsistent field setup).
struct ConfigError : Error {
  using Error::Error;
};

inline Real sigmoid(Real x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const Real e = std::exp(x);
  return e / (1.0 + e);
}

// Overflow-safe softplus; exact 0 for -inf input.
inline Real softplus(Real x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

// log(exp(y) - 1), the inverse of softplus for y > 0.
inline Real inverse_softplus(Real y) {
  if (y > 30.0) return y;
  return std::log(std::expm1(y));
}

inline Real sq(Real x) { return x * x; }

struct Aabb {
  Vec3 min{0, 0, 0};
  Vec3 max{0, 0, 0};

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool valid() const { return (max.array() > min.array()).all(); }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

/// Max |R^T R - I| entry; 0 for a perfect rotation block.
inline Real rotation_defect(const Mat3& r) {
  return ((r.transpose() * r) - Mat3::Identity()).cwiseAbs().maxCoeff();
}

inline bool is_rigid(const Mat4& m, Real tol) {
  if (rotation_defect(m.topLeftCorner<3, 3>()) > tol) return false;
  return m(3, 0) == 0 && m(3, 1) == 0 && m(3, 2) == 0 && m(3, 3) == 1;
}

inline Mat4 rigid_inverse(const Mat4& m) {
  Mat4 out = Mat4::Identity();
  const Mat3 rt = m.topLeftCorner<3, 3>().transpose();
  out.topLeftCorner<3, 3>() = rt;
  out.topRightCorner<3, 1>() = -rt * m.topRightCorner<3, 1>();
  return out;
}

}  // namespace mmpi
