#include "qmink/kinematics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qmink {

namespace {

double default_step(double theta) { return 1e-5 * std::max(1.0, std::abs(theta)); }

CmmDerivatives from_d7_rate(const D7Params& dd) {
  CmmDerivatives d;
  d.t_minus = -0.5 * dd.mzz;
  d.t_plus = 0.5 * dd.mzz;
  d.u_minus = 0.5 * (dd.p1z - dd.p2z);
  d.u_plus = 0.5 * (dd.p1z + dd.p2z);
  d.v_plus = 0.5 * (dd.mxx + dd.myy);
  d.v_minus = 0.5 * (dd.mxx - dd.myy);
  d.w_plus = 0.5 * (dd.myx + dd.mxy);
  d.w_minus = 0.5 * (dd.myx - dd.mxy);
  return d;
}

struct DiffTerm {
  double scale;
  CmmCoords a;
  CmmCoords b;
};

/// Sum of scale * (a - b) terms. Differencing before scaling makes every
/// stencil vanish bit-exactly on a constant family, which the degenerate
/// clock detection relies on.
CmmDerivatives combine(std::initializer_list<DiffTerm> terms) {
  CmmDerivatives d;
  for (const auto& [s, a, b] : terms) {
    d.t_minus += s * (a.t_minus - b.t_minus);
    d.u_minus += s * (a.u_minus - b.u_minus);
    d.v_plus += s * (a.v_plus - b.v_plus);
    d.w_minus += s * (a.w_minus - b.w_minus);
    d.t_plus += s * (a.t_plus - b.t_plus);
    d.u_plus += s * (a.u_plus - b.u_plus);
    d.v_minus += s * (a.v_minus - b.v_minus);
    d.w_plus += s * (a.w_plus - b.w_plus);
  }
  return d;
}

struct BranchRates {
  double clock = 0;            // d(pseudo-time)/d(theta)
  Eigen::Vector3d spatial;     // matching spatial coordinate rates
};

BranchRates branch_rates(const CmmDerivatives& d, int branch, bool transposed) {
  if (branch != 1 && branch != 2) throw DomainError("branch must be 1 or 2");
  BranchRates r;
  if (branch == 1) {
    r.clock = d.t_minus;
    r.spatial = transposed ? Eigen::Vector3d(d.u_minus, d.v_minus, d.w_plus)
                           : Eigen::Vector3d(d.u_minus, d.v_plus, d.w_minus);
  } else {
    r.clock = d.t_plus;
    r.spatial = transposed ? Eigen::Vector3d(d.u_plus, d.v_plus, d.w_minus)
                           : Eigen::Vector3d(d.u_plus, d.v_minus, d.w_plus);
  }
  return r;
}

}  // namespace

CmmDerivatives coordinate_derivatives(const ParametricD7Model& model, double theta,
                                      double h) {
  if (!model.value) throw DomainError("coordinate_derivatives: model has no value callable");
  const double lo = model.theta_lo, hi = model.theta_hi;
  if (!(theta >= lo && theta <= hi)) {
    throw DomainError("coordinate_derivatives: theta " + std::to_string(theta) +
                      " outside domain [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  if (model.derivative) return from_d7_rate(model.derivative(theta));

  if (h <= 0) h = default_step(theta);
  const auto coords_at = [&](double t) { return coords_from_d7(model.value(t)); };

  const bool left_ok = theta - h >= lo;
  const bool right_ok = theta + h <= hi;
  if (left_ok && right_ok) {
    return combine({{0.5 / h, coords_at(theta + h), coords_at(theta - h)}});
  }
  if (right_ok) {
    const CmmCoords c0 = coords_at(theta);
    const CmmCoords c1 = coords_at(theta + h);
    if (theta + 2 * h <= hi) {
      // second-order forward stencil (-3 c0 + 4 c1 - c2) / (2h)
      return combine({{2.0 / h, c1, c0}, {-0.5 / h, coords_at(theta + 2 * h), c0}});
    }
    return combine({{1.0 / h, c1, c0}});
  }
  if (left_ok) {
    const CmmCoords c0 = coords_at(theta);
    const CmmCoords c1 = coords_at(theta - h);
    if (theta - 2 * h >= lo) {
      return combine({{2.0 / h, c0, c1}, {-0.5 / h, c0, coords_at(theta - 2 * h)}});
    }
    return combine({{1.0 / h, c0, c1}});
  }
  throw DomainError("coordinate_derivatives: domain too narrow for step h = " +
                    std::to_string(h));
}

Eigen::Vector3d velocity(const ParametricD7Model& model, double theta, int branch,
                         bool transposed, double h) {
  const CmmDerivatives d = coordinate_derivatives(model, theta, h);
  const BranchRates r = branch_rates(d, branch, transposed);
  if (std::abs(r.clock) < kClockEps) {
    throw DegenerateClockError("velocity: pseudo-time of branch " + std::to_string(branch) +
                               " is stationary at theta = " + std::to_string(theta));
  }
  return r.spatial / r.clock;
}

double speed(const ParametricD7Model& model, double theta, int branch, bool transposed,
             double h) {
  return velocity(model, theta, branch, transposed, h).norm();
}

double quadrispeed_sq(const ParametricD7Model& model, double theta, int branch,
                      bool transposed, double h) {
  const double s = speed(model, theta, branch, transposed, h);
  return 1.0 - s * s;
}

KinematicSample sample_kinematics(const ParametricD7Model& model, double theta, double h) {
  const CmmDerivatives d = coordinate_derivatives(model, theta, h);
  KinematicSample s;
  s.theta = theta;

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const auto fill_branch = [&](int branch, Eigen::Vector3d& v, Eigen::Vector3d& vt,
                               double& sp, double& spt, double& q, double& qt, bool& flag) {
    const BranchRates plain = branch_rates(d, branch, false);
    if (std::abs(plain.clock) < kClockEps) {
      flag = true;
      v.setConstant(nan);
      vt.setConstant(nan);
      sp = spt = q = qt = nan;
      return;
    }
    const BranchRates trans = branch_rates(d, branch, true);
    v = plain.spatial / plain.clock;
    vt = trans.spatial / trans.clock;
    sp = v.norm();
    spt = vt.norm();
    q = 1.0 - sp * sp;
    qt = 1.0 - spt * spt;
  };

  fill_branch(1, s.v1, s.v1t, s.speed1, s.speed1t, s.qspeed1_sq, s.qspeed1t_sq,
              s.clock1_degenerate);
  fill_branch(2, s.v2, s.v2t, s.speed2, s.speed2t, s.qspeed2_sq, s.qspeed2t_sq,
              s.clock2_degenerate);
  return s;
}

}  // namespace qmink
