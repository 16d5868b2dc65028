#pragma once

#include <array>

#include "qmink/state_core.hpp"

namespace qmink {

enum class Region { SeparableLike, EntangledLike, LightLike };

const char* to_string(Region r);
/// Single-letter code used in CSV output: S, E, L.
char region_letter(Region r);

/// Which of the two transposed interval squares drove a classification.
enum class QuadDriver { S1tSq, S2tSq };

const char* to_string(QuadDriver d);

/// The eight manifold coordinates built from the seven-parameter class.
/// Branch 1 rides (t_minus; u_minus, v_plus, w_minus), branch 2 rides
/// (t_plus; u_plus, v_minus, w_plus); t_minus + t_plus == 1 exactly.
struct CmmCoords {
  double t_minus = 0;
  double u_minus = 0;
  double v_plus = 0;
  double w_minus = 0;
  double t_plus = 0;
  double u_plus = 0;
  double v_minus = 0;
  double w_plus = 0;
};

/// Signed squared intervals for the state (s1, s2) and its partial
/// transpose (s1t, s2t). Kept as signed squares: the transposed pair can
/// reach -1, so the root is not globally real.
struct QuadDistances {
  double s1_sq = 0;
  double s2_sq = 0;
  double s1t_sq = 0;
  double s2t_sq = 0;
};

struct RegionLabel {
  Region label = Region::SeparableLike;
  QuadDriver driver = QuadDriver::S1tSq;
};

CmmCoords coords_from_d7(const D7Params& d);

/// Coordinate image of the partial transposition: swaps v_plus/v_minus and
/// w_plus/w_minus, leaves t and u untouched. Involutive.
CmmCoords pt_coords(const CmmCoords& c);

QuadDistances quad_distances(const CmmCoords& c);

/// |s1_sq + s2_sq - s1t_sq - s2t_sq|. Measures, does not assume: for
/// coordinates derived from any D7Params both sums are algebraically equal.
double invariance_residual(const QuadDistances& q);

/// EntangledLike iff min(s1t_sq, s2t_sq) < -tol; LightLike within the band.
/// The driver names the minimizing component.
RegionLabel region_of(const QuadDistances& q, double tol = kDefaultTol);

/// 45-degree reference line (x, 0, x, 0) for plot overlays; x in [0, 1].
std::array<double, 4> lightcone_reference(double x);

}  // namespace qmink
