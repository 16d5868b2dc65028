#include "qmink/cmm_geometry.hpp"

#include <cmath>
#include <string>

namespace qmink {

const char* to_string(Region r) {
  switch (r) {
    case Region::SeparableLike: return "SeparableLike";
    case Region::EntangledLike: return "EntangledLike";
    case Region::LightLike: return "LightLike";
  }
  return "?";
}

char region_letter(Region r) {
  switch (r) {
    case Region::SeparableLike: return 'S';
    case Region::EntangledLike: return 'E';
    case Region::LightLike: return 'L';
  }
  return '?';
}

const char* to_string(QuadDriver d) {
  return d == QuadDriver::S1tSq ? "s1t_sq" : "s2t_sq";
}

CmmCoords coords_from_d7(const D7Params& d) {
  CmmCoords c;
  // t_minus is derived as the complement so the pair sums to 1 exactly.
  c.t_plus = 0.5 + 0.5 * d.mzz;
  c.t_minus = 1.0 - c.t_plus;
  c.u_minus = 0.5 * (d.p1z - d.p2z);
  c.u_plus = 0.5 * (d.p1z + d.p2z);
  c.v_plus = 0.5 * (d.mxx + d.myy);
  c.v_minus = 0.5 * (d.mxx - d.myy);
  c.w_plus = 0.5 * (d.myx + d.mxy);
  c.w_minus = 0.5 * (d.myx - d.mxy);
  return c;
}

CmmCoords pt_coords(const CmmCoords& c) {
  CmmCoords p = c;
  p.v_plus = c.v_minus;
  p.v_minus = c.v_plus;
  p.w_plus = c.w_minus;
  p.w_minus = c.w_plus;
  return p;
}

QuadDistances quad_distances(const CmmCoords& c) {
  QuadDistances q;
  q.s1_sq = c.t_minus * c.t_minus -
            (c.u_minus * c.u_minus + c.v_plus * c.v_plus + c.w_minus * c.w_minus);
  q.s2_sq = c.t_plus * c.t_plus -
            (c.u_plus * c.u_plus + c.v_minus * c.v_minus + c.w_plus * c.w_plus);
  q.s1t_sq = c.t_minus * c.t_minus -
             (c.u_minus * c.u_minus + c.v_minus * c.v_minus + c.w_plus * c.w_plus);
  q.s2t_sq = c.t_plus * c.t_plus -
             (c.u_plus * c.u_plus + c.v_plus * c.v_plus + c.w_minus * c.w_minus);
  return q;
}

double invariance_residual(const QuadDistances& q) {
  return std::abs(q.s1_sq + q.s2_sq - q.s1t_sq - q.s2t_sq);
}

RegionLabel region_of(const QuadDistances& q, double tol) {
  RegionLabel r;
  r.driver = q.s1t_sq <= q.s2t_sq ? QuadDriver::S1tSq : QuadDriver::S2tSq;
  const double mn = std::min(q.s1t_sq, q.s2t_sq);
  if (mn < -tol)
    r.label = Region::EntangledLike;
  else if (std::abs(mn) <= tol)
    r.label = Region::LightLike;
  else
    r.label = Region::SeparableLike;
  return r;
}

std::array<double, 4> lightcone_reference(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("lightcone_reference: x must lie in [0, 1], got " + std::to_string(x));
  return {x, 0.0, x, 0.0};
}

}  // namespace qmink
