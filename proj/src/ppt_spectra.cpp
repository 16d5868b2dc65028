#include "qmink/ppt_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmink {

namespace {

Spectrum4 sorted_descending(std::array<double, 4> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return Spectrum4{v};
}

/// Eigenvalues from one coordinate frame: each pseudo-time splits against
/// the Euclidean distance of its spatial triple.
Spectrum4 branch_spectrum(const CmmCoords& c) {
  const double x1 = std::sqrt(c.u_minus * c.u_minus + c.v_plus * c.v_plus +
                              c.w_minus * c.w_minus);
  const double x2 = std::sqrt(c.u_plus * c.u_plus + c.v_minus * c.v_minus +
                              c.w_plus * c.w_plus);
  return sorted_descending({0.5 * (c.t_minus + x1), 0.5 * (c.t_minus - x1),
                            0.5 * (c.t_plus + x2), 0.5 * (c.t_plus - x2)});
}

}  // namespace

Eigen::Vector4d hermitian4_eigenvalues_raw(const Eigen::Matrix4cd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

DensityMatrix4 partial_transpose(const DensityMatrix4& rho, int qubit) {
  if (qubit != 1 && qubit != 2) throw DomainError("partial_transpose: qubit must be 1 or 2");
  const double hres = rho.hermiticity_residual();
  const double tdev = rho.trace_deviation();
  if (!(hres <= kDefaultTol) || !(tdev <= kDefaultTol)) {
    std::ostringstream os;
    os << "partial_transpose: input is not unit-trace Hermitian (residual " << hres
       << ", trace deviation " << tdev << ")";
    throw InvalidStateError(os.str());
  }

  DensityMatrix4 out;
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      if (qubit == 2)
        out.m.block<2, 2>(2 * a, 2 * c) = rho.m.block<2, 2>(2 * a, 2 * c).transpose();
      else
        out.m.block<2, 2>(2 * a, 2 * c) = rho.m.block<2, 2>(2 * c, 2 * a);
    }
  }
  return out;
}

FanoParams reflect_fano(const FanoParams& f) {
  FanoParams r = f;
  r.p2.y() = -f.p2.y();
  r.m(0, 1) = -f.m(0, 1);
  r.m(1, 1) = -f.m(1, 1);
  r.m(2, 1) = -f.m(2, 1);
  return r;
}

Spectrum4 eigenvalues_hermitian4(const DensityMatrix4& rho, double tol) {
  const double hres = rho.hermiticity_residual();
  if (!(hres <= tol)) {
    throw NotHermitianError("eigenvalues_hermitian4: hermiticity residual " +
                            std::to_string(hres) + " exceeds tolerance");
  }
  const Eigen::Vector4d ev = hermitian4_eigenvalues_raw(rho.m);
  return Spectrum4{{ev(3), ev(2), ev(1), ev(0)}};
}

Spectrum4 d7_eigenvalues(const D7Params& d) { return branch_spectrum(coords_from_d7(d)); }

Spectrum4 d7_pt_eigenvalues(const D7Params& d) {
  return branch_spectrum(pt_coords(coords_from_d7(d)));
}

PhcVerdict classify_phc(const DensityMatrix4& rho, double tol) {
  const ValidationReport rep = validate_density(rho, tol);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "classify_phc: invalid state (hermiticity " << rep.hermiticity_residual
       << ", trace deviation " << rep.trace_deviation << ", min eigenvalue "
       << rep.min_eigenvalue << ", purity " << rep.purity << ")";
    throw InvalidStateError(os.str());
  }

  const Spectrum4 pt = eigenvalues_hermitian4(partial_transpose(rho, 2), tol);
  PhcVerdict v;
  v.min_pt_eigenvalue = pt.min();
  v.tolerance_used = tol;
  if (v.min_pt_eigenvalue < -tol)
    v.label = Region::EntangledLike;
  else if (std::abs(v.min_pt_eigenvalue) <= tol)
    v.label = Region::LightLike;
  else
    v.label = Region::SeparableLike;
  return v;
}

}  // namespace qmink
