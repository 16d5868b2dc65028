#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qmink/kinematics.hpp"
#include "qmink/ppt_spectra.hpp"

namespace qmink {

enum class BewMode { ParameterX, Decay, Growth };

/// Singlet / maximally-mixed interpolation family. In ParameterX mode the
/// sweep parameter is the mixing weight x itself; Decay and Growth map a
/// time parameter through x(t) = exp(-gamma t) and 1 - exp(-gamma t).
struct BewSpec {
  BewMode mode = BewMode::ParameterX;
  double gamma = 1.0;  // decay rate, > 0; used by the time modes
};

/// The seven parameters (0, 0, -x, -x, 0, 0, -x); x in [0, 1].
D7Params bew_d7(double x);

/// Mixing weight at time t for the given mode; identity in ParameterX mode.
double bew_x_of_t(const BewSpec& spec, double t);

/// Full model with analytic derivative and reported x channel.
ParametricD7Model bew_model(const BewSpec& spec);

enum class Interpolation { Linear, CubicMonotone };

struct TabulatedRow {
  double theta = 0;
  D7Params d7;
};

/// Model interpolating user-supplied knots; exact at the knots, finite
/// differences only (no analytic channel). Throws MalformedTableError on
/// fewer than 2 rows, non-increasing theta or non-finite values.
ParametricD7Model load_tabulated(std::vector<TabulatedRow> rows, Interpolation interp);

/// Reads the knot table format: header `theta,p1z,p2z,mxx,myy,mxy,myx,mzz`,
/// one comma-separated row per knot.
std::vector<TabulatedRow> read_table_csv(std::istream& in);

/// One fully evaluated sweep sample.
struct TrajectoryPoint {
  double theta = 0;
  double x_value = 0;  // NaN when the model reports no auxiliary scalar
  D7Params d7;
  CmmCoords coords;
  QuadDistances quad;
  RegionLabel region;
  KinematicSample kin;
  double validity = 0;  // smallest eigenvalue of the composed state
};

/// Evaluate every grid point in order. Grid must be strictly increasing,
/// hold at least 2 points and lie inside the model domain. Points where the
/// composed matrix dips below positive are emitted with a negative validity
/// instead of being dropped.
std::vector<TrajectoryPoint> trace_trajectory(const ParametricD7Model& model,
                                              const std::vector<double>& grid,
                                              double tol = kDefaultTol, double h = 0);

enum class CrossingKind { SuddenDeath, Revival };

const char* to_string(CrossingKind k);

/// A sign change of min(s1t_sq, s2t_sq) along the sweep, refined by
/// bisection. SuddenDeath leaves the entangled-like region as theta grows;
/// Revival enters it.
struct CrossingEvent {
  double theta_star = 0;
  CrossingKind kind = CrossingKind::SuddenDeath;
  QuadDriver driver = QuadDriver::S2tSq;
  double refinement_width = 0;
};

struct CrossingScan {
  std::vector<CrossingEvent> events;      // sorted by theta_star
  std::vector<std::string> warnings;      // resolution-limited cells etc.
};

/// Scan min(s1t_sq, s2t_sq) on a coarse grid of coarse_n points and refine
/// each sign change to width <= tol. Cells hiding several crossings are
/// re-probed on a finer sub-grid and reported as resolution-limited.
CrossingScan find_crossings(const ParametricD7Model& model, double theta_lo,
                            double theta_hi, int coarse_n = 256, double tol = 1e-9);

}  // namespace qmink
