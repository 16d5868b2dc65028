#include "qmink/models_trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <memory>
#include <sstream>

namespace qmink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sign_of(double v) { return (v > 0) - (v < 0); }

bool d7_finite(const D7Params& d) {
  return std::isfinite(d.p1z) && std::isfinite(d.p2z) && std::isfinite(d.mxx) &&
         std::isfinite(d.myy) && std::isfinite(d.mxy) && std::isfinite(d.myx) &&
         std::isfinite(d.mzz);
}

double d7_field(const D7Params& d, int i) {
  switch (i) {
    case 0: return d.p1z;
    case 1: return d.p2z;
    case 2: return d.mxx;
    case 3: return d.myy;
    case 4: return d.mxy;
    case 5: return d.myx;
    default: return d.mzz;
  }
}

void set_d7_field(D7Params& d, int i, double v) {
  switch (i) {
    case 0: d.p1z = v; break;
    case 1: d.p2z = v; break;
    case 2: d.mxx = v; break;
    case 3: d.myy = v; break;
    case 4: d.mxy = v; break;
    case 5: d.myx = v; break;
    default: d.mzz = v; break;
  }
}

/// Knot data plus per-column tangents for monotone cubic evaluation.
struct Table {
  std::vector<double> theta;
  std::vector<std::array<double, 7>> y;       // y[row][column]
  std::vector<std::array<double, 7>> slope;   // tangents (cubic mode only)
  Interpolation interp = Interpolation::Linear;

  int segment(double t) const {
    // rightmost segment whose start is <= t; t == last knot maps to the
    // final segment so the endpoint evaluates exactly
    const auto it = std::upper_bound(theta.begin(), theta.end(), t);
    int i = static_cast<int>(it - theta.begin()) - 1;
    const int last = static_cast<int>(theta.size()) - 2;
    return std::clamp(i, 0, last);
  }

  D7Params row_params(int i) const {
    D7Params d;
    for (int c = 0; c < 7; ++c) set_d7_field(d, c, y[i][c]);
    return d;
  }

  D7Params eval(double t) const {
    if (!(t >= theta.front() && t <= theta.back())) {
      throw DomainError("tabulated model: theta " + std::to_string(t) +
                        " outside table range [" + std::to_string(theta.front()) + ", " +
                        std::to_string(theta.back()) + "]");
    }
    const int i = segment(t);
    // knots reproduce the rows exactly
    if (t == theta[i]) return row_params(i);
    if (t == theta[i + 1]) return row_params(i + 1);
    const double hseg = theta[i + 1] - theta[i];
    const double s = (t - theta[i]) / hseg;
    D7Params d;
    if (interp == Interpolation::Linear) {
      for (int c = 0; c < 7; ++c)
        set_d7_field(d, c, y[i][c] + s * (y[i + 1][c] - y[i][c]));
      return d;
    }
    // cubic Hermite basis
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    for (int c = 0; c < 7; ++c) {
      set_d7_field(d, c, h00 * y[i][c] + h10 * hseg * slope[i][c] + h01 * y[i + 1][c] +
                             h11 * hseg * slope[i + 1][c]);
    }
    return d;
  }
};

/// Fritsch-Carlson tangents: monotone on monotone data, exact at knots.
void compute_monotone_slopes(Table& tb) {
  const int n = static_cast<int>(tb.theta.size());
  tb.slope.assign(n, {});
  for (int c = 0; c < 7; ++c) {
    std::vector<double> h(n - 1), delta(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      h[i] = tb.theta[i + 1] - tb.theta[i];
      delta[i] = (tb.y[i + 1][c] - tb.y[i][c]) / h[i];
    }
    std::vector<double> m(n);
    if (n == 2) {
      m[0] = m[1] = delta[0];
    } else {
      for (int i = 1; i < n - 1; ++i) {
        if (delta[i - 1] * delta[i] <= 0) {
          m[i] = 0;
        } else {
          const double w1 = 2 * h[i] + h[i - 1];
          const double w2 = h[i] + 2 * h[i - 1];
          m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
      }
      const auto endpoint = [](double h0, double h1, double d0, double d1) {
        double m0 = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (sign_of(m0) != sign_of(d0))
          m0 = 0;
        else if (sign_of(d0) != sign_of(d1) && std::abs(m0) > 3 * std::abs(d0))
          m0 = 3 * d0;
        return m0;
      };
      m[0] = endpoint(h[0], h[1], delta[0], delta[1]);
      m[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    for (int i = 0; i < n; ++i) tb.slope[i][c] = m[i];
  }
}

struct Root {
  double theta = 0;
  double width = 0;
};

Root bisect_to_width(const std::function<double(double)>& g, double a, double b, double ga,
                     double tol) {
  // invariant: sign change inside [a, b]
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;  // step below double resolution
    const double gm = g(mid);
    if (gm == 0.0) return {mid, 0.0};
    if (sign_of(gm) == sign_of(ga)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return {0.5 * (a + b), b - a};
}

}  // namespace

const char* to_string(CrossingKind k) {
  return k == CrossingKind::SuddenDeath ? "SuddenDeath" : "Revival";
}

D7Params bew_d7(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("bew_d7: x must lie in [0, 1], got " + std::to_string(x));
  return D7Params{0, 0, -x, -x, 0, 0, -x};
}

double bew_x_of_t(const BewSpec& spec, double t) {
  if (spec.mode == BewMode::ParameterX) return t;
  if (!(spec.gamma > 0))
    throw DomainError("bew_x_of_t: gamma must be positive, got " + std::to_string(spec.gamma));
  if (!(t >= 0)) throw DomainError("bew_x_of_t: t must be >= 0, got " + std::to_string(t));
  const double decay = std::exp(-spec.gamma * t);
  return spec.mode == BewMode::Decay ? decay : 1.0 - decay;
}

ParametricD7Model bew_model(const BewSpec& spec) {
  if (spec.mode != BewMode::ParameterX && !(spec.gamma > 0))
    throw DomainError("bew_model: gamma must be positive, got " + std::to_string(spec.gamma));

  ParametricD7Model m;
  const BewSpec s = spec;
  m.value = [s](double th) { return bew_d7(bew_x_of_t(s, th)); };
  m.x_value = [s](double th) { return bew_x_of_t(s, th); };
  switch (spec.mode) {
    case BewMode::ParameterX:
      m.theta_lo = 0;
      m.theta_hi = 1;
      m.derivative = [](double) { return D7Params{0, 0, -1, -1, 0, 0, -1}; };
      break;
    case BewMode::Decay:
      m.theta_lo = 0;
      m.theta_hi = kInf;
      m.derivative = [s](double t) {
        const double r = s.gamma * std::exp(-s.gamma * t);  // -dx/dt
        return D7Params{0, 0, r, r, 0, 0, r};
      };
      break;
    case BewMode::Growth:
      m.theta_lo = 0;
      m.theta_hi = kInf;
      m.derivative = [s](double t) {
        const double r = -s.gamma * std::exp(-s.gamma * t);
        return D7Params{0, 0, r, r, 0, 0, r};
      };
      break;
  }
  return m;
}

ParametricD7Model load_tabulated(std::vector<TabulatedRow> rows, Interpolation interp) {
  if (rows.size() < 2)
    throw MalformedTableError("tabulated model needs at least 2 rows, got " +
                              std::to_string(rows.size()));
  auto tb = std::make_shared<Table>();
  tb->interp = interp;
  tb->theta.reserve(rows.size());
  tb->y.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!std::isfinite(r.theta) || !d7_finite(r.d7))
      throw MalformedTableError("tabulated model: non-finite value in row " +
                                std::to_string(i + 1));
    if (i > 0 && !(r.theta > tb->theta.back()))
      throw MalformedTableError("tabulated model: theta must be strictly increasing at row " +
                                std::to_string(i + 1));
    tb->theta.push_back(r.theta);
    std::array<double, 7> col{};
    for (int c = 0; c < 7; ++c) col[c] = d7_field(r.d7, c);
    tb->y.push_back(col);
  }
  if (interp == Interpolation::CubicMonotone) compute_monotone_slopes(*tb);

  ParametricD7Model m;
  m.theta_lo = tb->theta.front();
  m.theta_hi = tb->theta.back();
  m.value = [tb](double t) { return tb->eval(t); };
  return m;
}

std::vector<TabulatedRow> read_table_csv(std::istream& in) {
  static constexpr const char* kHeader = "theta,p1z,p2z,mxx,myy,mxy,myx,mzz";
  const auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
  };

  std::string line;
  if (!std::getline(in, line) || strip(line) != kHeader)
    throw MalformedTableError(std::string("table header must be exactly `") + kHeader + "`");

  std::vector<TabulatedRow> rows;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = strip(line);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string cell;
    double vals[8];
    for (int c = 0; c < 8; ++c) {
      if (!std::getline(ls, cell, ','))
        throw MalformedTableError("table line " + std::to_string(lineno) +
                                  ": expected 8 comma-separated values");
      try {
        size_t used = 0;
        vals[c] = std::stod(cell, &used);
        while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw MalformedTableError("table line " + std::to_string(lineno) + ": bad number `" +
                                  cell + "`");
      }
    }
    if (std::getline(ls, cell, ','))
      throw MalformedTableError("table line " + std::to_string(lineno) + ": too many columns");
    TabulatedRow r;
    r.theta = vals[0];
    r.d7 = D7Params{vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7]};
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrajectoryPoint> trace_trajectory(const ParametricD7Model& model,
                                              const std::vector<double>& grid, double tol,
                                              double h) {
  if (grid.size() < 2) throw DomainError("trace_trajectory: grid needs at least 2 points");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= model.theta_lo && grid[i] <= model.theta_hi))
      throw DomainError("trace_trajectory: grid point " + std::to_string(grid[i]) +
                        " outside model domain");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw DomainError("trace_trajectory: grid must be strictly increasing");
  }

  std::vector<TrajectoryPoint> out;
  out.reserve(grid.size());
  for (const double theta : grid) {
    TrajectoryPoint p;
    p.theta = theta;
    p.x_value = model.x_value ? model.x_value(theta)
                              : std::numeric_limits<double>::quiet_NaN();
    p.d7 = model.value(theta);
    p.coords = coords_from_d7(p.d7);
    p.quad = quad_distances(p.coords);
    p.region = region_of(p.quad, tol);
    p.validity = d7_eigenvalues(p.d7).min();
    p.kin = sample_kinematics(model, theta, h);
    out.push_back(p);
  }
  return out;
}

CrossingScan find_crossings(const ParametricD7Model& model, double theta_lo,
                            double theta_hi, int coarse_n, double tol) {
  if (!(theta_lo < theta_hi))
    throw DomainError("find_crossings: need theta_lo < theta_hi");
  if (coarse_n < 2) throw DomainError("find_crossings: coarse_n must be >= 2");
  if (!(theta_lo >= model.theta_lo && theta_hi <= model.theta_hi))
    throw DomainError("find_crossings: scan range outside model domain");
  if (!(tol > 0)) throw DomainError("find_crossings: tol must be positive");

  const auto g = [&](double th) {
    const QuadDistances q = quad_distances(coords_from_d7(model.value(th)));
    return std::min(q.s1t_sq, q.s2t_sq);
  };

  CrossingScan scan;
  const auto record = [&](double theta_star, double width, CrossingKind kind) {
    CrossingEvent ev;
    ev.theta_star = theta_star;
    ev.refinement_width = width;
    ev.kind = kind;
    const QuadDistances q = quad_distances(coords_from_d7(model.value(theta_star)));
    ev.driver = q.s1t_sq <= q.s2t_sq ? QuadDriver::S1tSq : QuadDriver::S2tSq;
    scan.events.push_back(ev);
  };

  // sub-probing inside each coarse cell catches crossing pairs the endpoint
  // scan cannot see (same sign at both cell ends)
  constexpr int kProbes = 8;
  const double step = (theta_hi - theta_lo) / (coarse_n - 1);
  double cell_lo = theta_lo;
  double g_lo = g(cell_lo);
  bool lo_is_shared = false;  // left endpoint already examined by previous cell
  for (int i = 0; i + 1 < coarse_n; ++i) {
    const double cell_hi = (i + 2 == coarse_n) ? theta_hi : theta_lo + (i + 1) * step;

    std::array<double, kProbes + 1> pt, pg;
    pt[0] = cell_lo;
    pg[0] = g_lo;
    for (int p = 1; p <= kProbes; ++p) {
      pt[p] = (p == kProbes) ? cell_hi : cell_lo + (cell_hi - cell_lo) * p / kProbes;
      pg[p] = g(pt[p]);
    }

    int changes = 0;
    for (int p = 0; p <= kProbes; ++p) {
      if (pg[p] == 0.0) {
        if (p == 0 && lo_is_shared) continue;
        // probe landed on a root: classify by the nearest non-zero signs
        int sl = 0, sr = 0;
        for (int q = p - 1; q >= 0 && sl == 0; --q) sl = sign_of(pg[q]);
        for (int q = p + 1; q <= kProbes && sr == 0; ++q) sr = sign_of(pg[q]);
        if (sl < 0 && sr > 0) {
          record(pt[p], 0.0, CrossingKind::SuddenDeath);
          ++changes;
        } else if (sl > 0 && sr < 0) {
          record(pt[p], 0.0, CrossingKind::Revival);
          ++changes;
        } else {
          std::ostringstream os;
          os << "tangential zero of min(s1t_sq, s2t_sq) at theta = " << pt[p]
             << " without a sign change; not reported as a crossing";
          scan.warnings.push_back(os.str());
        }
        continue;
      }
      if (p < kProbes && pg[p + 1] != 0.0 && sign_of(pg[p]) != sign_of(pg[p + 1])) {
        const Root root = bisect_to_width(g, pt[p], pt[p + 1], pg[p], tol);
        record(root.theta, root.width,
               pg[p] < 0 ? CrossingKind::SuddenDeath : CrossingKind::Revival);
        ++changes;
      }
    }
    if (changes > 1) {
      std::ostringstream os;
      os << "resolution limited: " << changes << " sign changes inside coarse cell ["
         << cell_lo << ", " << cell_hi << "]; increase coarse_n to separate them reliably";
      scan.warnings.push_back(os.str());
    }
    cell_lo = cell_hi;
    g_lo = pg[kProbes];
    lo_is_shared = true;
  }

  std::sort(scan.events.begin(), scan.events.end(),
            [](const CrossingEvent& x, const CrossingEvent& y) {
              return x.theta_star < y.theta_star;
            });
  return scan;
}

}  // namespace qmink
