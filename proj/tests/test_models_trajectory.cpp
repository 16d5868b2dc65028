#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qmink/models_trajectory.hpp"
#include "test_common.hpp"

using namespace qmink;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + i * (hi - lo) / (n - 1);
  g.back() = hi;
  return g;
}

}  // namespace

TEST_CASE("bew_d7 parameter pattern and composed matrix") {
  const D7Params zero = bew_d7(0.0);
  CHECK(zero.mxx == 0.0);
  CHECK(zero.mzz == 0.0);
  CHECK(qt::max_abs_diff(compose_d7(zero).m, 0.25 * Eigen::Matrix4cd::Identity()) == 0.0);

  // pure singlet projector at x = 1
  const Spectrum4 s = d7_eigenvalues(bew_d7(1.0));
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(qt::max_abs_diff(compose_d7(bew_d7(1.0)).m, qt::singlet().m) <= 1e-16);

  const DensityMatrix4 mid = compose_d7(bew_d7(0.5));
  CHECK(mid.m(0, 0).real() == doctest::Approx(0.125));
  CHECK(mid.m(1, 1).real() == doctest::Approx(0.375));
  CHECK(mid.m(1, 2).real() == doctest::Approx(-0.25));
  CHECK(qt::max_abs_diff(mid.m, qt::bew_matrix(0.5).m) <= 1e-16);

  CHECK_THROWS_AS(bew_d7(-0.1), DomainError);
  CHECK_THROWS_AS(bew_d7(1.1), DomainError);
}

TEST_CASE("bew_x_of_t for all modes") {
  const BewSpec decay{BewMode::Decay, 1.0};
  CHECK(bew_x_of_t(decay, 0.0) == 1.0);
  CHECK(std::abs(bew_x_of_t(decay, std::log(3.0)) - 1.0 / 3.0) <= 1e-15);
  CHECK_THROWS_AS(bew_x_of_t(decay, -0.5), DomainError);

  const BewSpec growth{BewMode::Growth, 1.0};
  CHECK(bew_x_of_t(growth, 0.0) == 0.0);
  double prev = -1;
  for (double t = 0; t <= 20; t += 0.5) {
    const double x = bew_x_of_t(growth, t);
    CHECK(x > prev);
    prev = x;
  }
  CHECK(1.0 - bew_x_of_t(growth, 40.0) <= 1e-15);

  const BewSpec ident{BewMode::ParameterX, 1.0};
  CHECK(bew_x_of_t(ident, 0.37) == 0.37);

  CHECK_THROWS_AS(bew_x_of_t(BewSpec{BewMode::Decay, -1.0}, 1.0), DomainError);
}

TEST_CASE("trace_trajectory on the decaying family matches the closed forms") {
  const ParametricD7Model model = bew_model(BewSpec{BewMode::Decay, 1.0});
  const auto pts = trace_trajectory(model, linspace(0.0, 5.0, 501));
  REQUIRE(pts.size() == 501);
  bool crossed = false;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const double x = std::exp(-p.theta);
    CHECK(std::abs(p.x_value - x) <= 1e-15);
    CHECK(std::abs(p.quad.s1t_sq - (1 + x) * (1 + x) / 4) <= kAlgebraTol);
    CHECK(std::abs(p.quad.s2t_sq - (x + 1) * (1 - 3 * x) / 4) <= kAlgebraTol);
    CHECK(invariance_residual(p.quad) <= kAlgebraTol);
    // stored region is consistent with its own quad values
    CHECK(p.region.label == region_of(p.quad).label);
    CHECK(p.validity >= -1e-12);
    if (i > 0 && pts[i - 1].quad.s2t_sq < 0 && p.quad.s2t_sq >= 0) {
      crossed = true;
      CHECK(pts[i - 1].theta <= std::log(3.0));
      CHECK(p.theta >= std::log(3.0));
    }
  }
  CHECK(crossed);
}

TEST_CASE("trace_trajectory of a constant model repeats the same point") {
  ParametricD7Model c;
  c.value = [](double) { return bew_d7(0.3); };
  c.theta_lo = 0;
  c.theta_hi = 1;
  const auto pts = trace_trajectory(c, linspace(0.0, 1.0, 11));
  for (const auto& p : pts) {
    CHECK(p.quad.s1_sq == pts.front().quad.s1_sq);
    CHECK(p.region.label == pts.front().region.label);
    CHECK(p.kin.clock1_degenerate);
    CHECK(std::isnan(p.x_value));
  }
}

TEST_CASE("trace_trajectory endpoints of the x sweep") {
  const ParametricD7Model model = bew_model(BewSpec{BewMode::ParameterX, 1.0});
  const auto pts = trace_trajectory(model, linspace(0.0, 1.0, 101));
  const auto s1 = [](const TrajectoryPoint& p) { return std::sqrt(std::max(0.0, p.quad.s1_sq)); };
  const auto s2 = [](const TrajectoryPoint& p) { return std::sqrt(std::max(0.0, p.quad.s2_sq)); };
  CHECK(s1(pts.front()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s2(pts.front()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s1(pts.back()) <= 1e-12);
  CHECK(s2(pts.back()) <= 1e-12);
  // interior ordering, equality only at the ends
  for (size_t i = 1; i + 1 < pts.size(); ++i)
    CHECK(pts[i].quad.s1_sq > pts[i].quad.s2_sq);
}

TEST_CASE("trace_trajectory grid validation") {
  const ParametricD7Model model = bew_model(BewSpec{BewMode::ParameterX, 1.0});
  CHECK_THROWS_AS(trace_trajectory(model, {0.5}), DomainError);
  CHECK_THROWS_AS(trace_trajectory(model, {0.5, 0.4}), DomainError);
  CHECK_THROWS_AS(trace_trajectory(model, {0.5, 1.5}), DomainError);
}

TEST_CASE("bew spectra identities hold along a trajectory") {
  const ParametricD7Model model = bew_model(BewSpec{BewMode::Decay, 0.7});
  for (const auto& p : trace_trajectory(model, linspace(0.0, 4.0, 101))) {
    const double x = p.x_value;
    const Spectrum4 s = d7_eigenvalues(p.d7);
    CHECK(std::abs(s.values[0] - (3 * x + 1) / 4) <= 1e-10);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(s.values[i] - (1 - x) / 4) <= 1e-10);
    const Spectrum4 st = d7_pt_eigenvalues(p.d7);
    CHECK(std::abs(st.min() - (1 - 3 * x) / 4) <= 1e-10);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(st.values[i] - (1 + x) / 4) <= 1e-10);
  }
}

TEST_CASE("swapping the sign of x exchanges the plain and transposed squares") {
  // formula-level identity, evaluated outside the physical domain
  const auto s1_formula = [](double x) { return (1 - x) * (1 + 3 * x) / 4; };
  const auto s2_formula = [](double x) { return (1 - x) * (1 - x) / 4; };
  for (double x = 0.0; x <= 1.0; x += 0.01) {
    const QuadDistances q = quad_distances(coords_from_d7(bew_d7(x)));
    CHECK(std::abs(q.s1t_sq - s2_formula(-x)) <= kAlgebraTol);
    CHECK(std::abs(q.s2t_sq - s1_formula(-x)) <= kAlgebraTol);
  }
}

TEST_CASE("find_crossings locates the sudden death of the decaying family") {
  const ParametricD7Model model = bew_model(BewSpec{BewMode::Decay, 1.0});
  const CrossingScan scan = find_crossings(model, 0.0, 10.0);
  REQUIRE(scan.events.size() == 1);
  const CrossingEvent& ev = scan.events.front();
  CHECK(ev.kind == CrossingKind::SuddenDeath);
  CHECK(ev.driver == QuadDriver::S2tSq);
  CHECK(std::abs(ev.theta_star - std::log(3.0)) <= 1e-6);
  CHECK(ev.refinement_width <= 1e-9);
  CHECK(scan.warnings.empty());

  // the driver sign really flips across the event and is tiny at it
  const auto g = [&](double th) {
    const QuadDistances q = quad_distances(coords_from_d7(model.value(th)));
    return std::min(q.s1t_sq, q.s2t_sq);
  };
  CHECK(g(ev.theta_star - 1e-4) < 0);
  CHECK(g(ev.theta_star + 1e-4) > 0);
  CHECK(std::abs(g(ev.theta_star)) <= 1e-9);
}

TEST_CASE("find_crossings scales with the decay rate and detects revivals") {
  const CrossingScan fast =
      find_crossings(bew_model(BewSpec{BewMode::Decay, 2.0}), 0.0, 10.0);
  REQUIRE(fast.events.size() == 1);
  CHECK(std::abs(fast.events[0].theta_star - std::log(3.0) / 2) <= 1e-6);

  const CrossingScan growth =
      find_crossings(bew_model(BewSpec{BewMode::Growth, 1.0}), 0.0, 10.0);
  REQUIRE(growth.events.size() == 1);
  CHECK(growth.events[0].kind == CrossingKind::Revival);
  CHECK(std::abs(growth.events[0].theta_star - std::log(1.5)) <= 1e-6);

  const CrossingScan late =
      find_crossings(bew_model(BewSpec{BewMode::Decay, 1.0}), 2.0, 5.0);
  CHECK(late.events.empty());

  const CrossingScan xsweep =
      find_crossings(bew_model(BewSpec{BewMode::ParameterX, 1.0}), 0.0, 1.0);
  REQUIRE(xsweep.events.size() == 1);
  CHECK(xsweep.events[0].kind == CrossingKind::Revival);
  CHECK(std::abs(xsweep.events[0].theta_star - 1.0 / 3.0) <= 1e-6);
}

TEST_CASE("find_crossings flags several crossings inside one coarse cell") {
  ParametricD7Model wiggle;
  wiggle.theta_lo = 0;
  wiggle.theta_hi = 1;
  wiggle.value = [](double th) {
    return bew_d7(0.5 - 0.3 * std::cos(2 * M_PI * th));
  };
  const CrossingScan scan = find_crossings(wiggle, 0.0, 1.0, 2, 1e-9);
  REQUIRE(scan.events.size() == 2);
  CHECK_FALSE(scan.warnings.empty());
  CHECK(scan.events[0].kind == CrossingKind::Revival);
  CHECK(scan.events[1].kind == CrossingKind::SuddenDeath);
  CHECK(scan.events[0].theta_star < scan.events[1].theta_star);
  // with enough coarse cells the same two events come back without warnings
  const CrossingScan fine = find_crossings(wiggle, 0.0, 1.0, 64, 1e-9);
  REQUIRE(fine.events.size() == 2);
  CHECK(fine.warnings.empty());
  CHECK(std::abs(fine.events[0].theta_star - scan.events[0].theta_star) <= 1e-8);
}

TEST_CASE("find_crossings argument validation") {
  const ParametricD7Model model = bew_model(BewSpec{BewMode::Decay, 1.0});
  CHECK_THROWS_AS(find_crossings(model, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(find_crossings(model, 0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(find_crossings(model, -1.0, 1.0), DomainError);
}

TEST_CASE("load_tabulated linear reproduction of the linear family") {
  std::vector<TabulatedRow> rows = {{0.0, bew_d7(0.0)}, {1.0, bew_d7(1.0)}};
  const ParametricD7Model table = load_tabulated(rows, Interpolation::Linear);
  const ParametricD7Model builtin = bew_model(BewSpec{BewMode::ParameterX, 1.0});
  const auto grid = linspace(0.0, 1.0, 21);
  const auto a = trace_trajectory(table, grid);
  const auto b = trace_trajectory(builtin, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(a[i].coords.t_minus - b[i].coords.t_minus) <= kAlgebraTol);
    CHECK(std::abs(a[i].coords.v_plus - b[i].coords.v_plus) <= kAlgebraTol);
    CHECK(std::abs(a[i].quad.s2t_sq - b[i].quad.s2t_sq) <= kAlgebraTol);
    CHECK(a[i].region.label == b[i].region.label);
    CHECK(std::abs(a[i].kin.speed2t - b[i].kin.speed2t) <= 1e-6);
    CHECK(std::isnan(a[i].x_value));  // tables carry no mixing weight
  }
}

TEST_CASE("load_tabulated rejects malformed tables") {
  CHECK_THROWS_AS(load_tabulated({{0.0, bew_d7(0.0)}}, Interpolation::Linear),
                  MalformedTableError);
  CHECK_THROWS_AS(
      load_tabulated({{1.0, bew_d7(0.0)}, {0.0, bew_d7(1.0)}}, Interpolation::Linear),
      MalformedTableError);
  CHECK_THROWS_AS(
      load_tabulated({{0.0, bew_d7(0.0)}, {0.0, bew_d7(1.0)}}, Interpolation::Linear),
      MalformedTableError);
  D7Params bad = bew_d7(0.5);
  bad.mxx = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(load_tabulated({{0.0, bew_d7(0.0)}, {1.0, bad}}, Interpolation::Linear),
                  MalformedTableError);
}

TEST_CASE("tabulated models are exact at the knots") {
  std::vector<TabulatedRow> rows = {{0.0, D7Params{0.0, 0, 0, 0, 0, 0, 0}},
                                    {0.5, D7Params{0.3, 0, -0.2, 0, 0, 0, -0.1}},
                                    {1.2, D7Params{0.5, 0, -0.4, 0, 0, 0, -0.3}},
                                    {2.0, D7Params{0.9, 0, -0.1, 0, 0, 0, 0.2}}};
  for (const auto interp : {Interpolation::Linear, Interpolation::CubicMonotone}) {
    const ParametricD7Model m = load_tabulated(rows, interp);
    for (const auto& r : rows) {
      const D7Params d = m.value(r.theta);
      CHECK(d.p1z == r.d7.p1z);
      CHECK(d.mxx == r.d7.mxx);
      CHECK(d.mzz == r.d7.mzz);
    }
  }
}

TEST_CASE("monotone cubic interpolation does not overshoot monotone data") {
  std::vector<TabulatedRow> rows = {{0.0, D7Params{0.0, 0, 0, 0, 0, 0, 0}},
                                    {1.0, D7Params{0.3, 0, 0, 0, 0, 0, 0}},
                                    {2.0, D7Params{0.5, 0, 0, 0, 0, 0, 0}},
                                    {3.0, D7Params{0.9, 0, 0, 0, 0, 0, 0}}};
  const ParametricD7Model m = load_tabulated(rows, Interpolation::CubicMonotone);
  double prev = -1;
  for (double t = 0.0; t <= 3.0; t += 0.01) {
    const double v = m.value(t).p1z;
    CHECK(v >= prev - 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 0.9);
    prev = v;
  }
  CHECK_THROWS_AS(m.value(3.5), DomainError);
}

TEST_CASE("read_table_csv parses the knot format and reports bad input") {
  std::istringstream good(
      "theta,p1z,p2z,mxx,myy,mxy,myx,mzz\r\n"
      "0,0,0,0,0,0,0,0\n"
      "1,0,0,-1,-1,0,0,-1\n");
  const auto rows = read_table_csv(good);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].theta == 1.0);
  CHECK(rows[1].d7.mxx == -1.0);
  CHECK(rows[1].d7.mzz == -1.0);

  std::istringstream bad_header("t,p1z,p2z,mxx,myy,mxy,myx,mzz\n0,0,0,0,0,0,0,0\n");
  CHECK_THROWS_AS(read_table_csv(bad_header), MalformedTableError);

  std::istringstream short_row("theta,p1z,p2z,mxx,myy,mxy,myx,mzz\n0,0,0\n");
  CHECK_THROWS_AS(read_table_csv(short_row), MalformedTableError);

  std::istringstream bad_number("theta,p1z,p2z,mxx,myy,mxy,myx,mzz\n0,0,0,zzz,0,0,0,0\n");
  CHECK_THROWS_AS(read_table_csv(bad_number), MalformedTableError);

  std::istringstream extra("theta,p1z,p2z,mxx,myy,mxy,myx,mzz\n0,0,0,0,0,0,0,0,9\n");
  CHECK_THROWS_AS(read_table_csv(extra), MalformedTableError);
}
