#pragma once

#include <functional>

#include <Eigen/Dense>

#include "qmink/cmm_geometry.hpp"

namespace qmink {

/// |d(pseudo-time)/d(theta)| below this counts as a stationary clock.
inline constexpr double kClockEps = 1e-12;

/// One-parameter family of seven-parameter states.
///
/// `value` is required. `derivative` (theta -> d(params)/d(theta)) is
/// optional; when absent, finite differences are used. `x_value` is an
/// optional auxiliary scalar reported alongside trajectory samples (e.g. a
/// model's mixing weight). All callables must be safe to invoke from
/// multiple threads concurrently.
struct ParametricD7Model {
  std::function<D7Params(double)> value;
  std::function<D7Params(double)> derivative;
  std::function<double(double)> x_value;
  double theta_lo = 0;
  double theta_hi = 1;
};

/// d/d(theta) of the eight manifold coordinates.
struct CmmDerivatives {
  double t_minus = 0;
  double u_minus = 0;
  double v_plus = 0;
  double w_minus = 0;
  double t_plus = 0;
  double u_plus = 0;
  double v_minus = 0;
  double w_plus = 0;
};

/// Velocities, speeds and signed squared quadrispeeds at one parameter
/// value, for both branches and their partial-transpose counterparts.
/// A stationary pseudo-time is flagged per branch; the numeric fields of a
/// flagged branch are NaN and must not be consumed.
struct KinematicSample {
  double theta = 0;
  Eigen::Vector3d v1{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v2{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v1t{Eigen::Vector3d::Zero()};
  Eigen::Vector3d v2t{Eigen::Vector3d::Zero()};
  double speed1 = 0, speed2 = 0, speed1t = 0, speed2t = 0;
  double qspeed1_sq = 0, qspeed2_sq = 0, qspeed1t_sq = 0, qspeed2t_sq = 0;
  bool clock1_degenerate = false;
  bool clock2_degenerate = false;
};

/// Derivative of every coordinate at theta. Uses the model's analytic
/// derivative through the linear parameter->coordinate map when available,
/// otherwise a central difference (one-sided at domain endpoints).
/// h <= 0 selects the default step 1e-5 * max(1, |theta|).
CmmDerivatives coordinate_derivatives(const ParametricD7Model& model, double theta,
                                      double h = 0);

/// Spatial coordinate rates against the branch pseudo-time.
/// branch 1: (u_minus, v_plus, w_minus) / t_minus-rate, branch 2 with the
/// opposite subscripts; transposed swaps the v/w roles. Throws
/// DegenerateClockError when the pseudo-time is stationary.
Eigen::Vector3d velocity(const ParametricD7Model& model, double theta, int branch,
                         bool transposed, double h = 0);

/// Euclidean norm of the velocity; may exceed 1.
double speed(const ParametricD7Model& model, double theta, int branch, bool transposed,
             double h = 0);

/// 1 - speed^2, signed; negative values flag faster-than-reference motion.
double quadrispeed_sq(const ParametricD7Model& model, double theta, int branch,
                      bool transposed, double h = 0);

/// All velocities/speeds/quadrispeeds at theta. Stationary clocks are
/// recorded as per-branch flags, not failures. Throws DomainError only.
KinematicSample sample_kinematics(const ParametricD7Model& model, double theta,
                                  double h = 0);

}  // namespace qmink
