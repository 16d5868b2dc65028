#include "qmink/state_core.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "qmink/ppt_spectra.hpp"

namespace qmink {

namespace {

bool all_finite(const FanoParams& f) {
  return f.p1.allFinite() && f.p2.allFinite() && f.m.allFinite();
}

void require_hermitian_trace(const DensityMatrix4& rho, const char* who) {
  const double hres = rho.hermiticity_residual();
  const double tdev = rho.trace_deviation();
  if (!(hres <= kDefaultTol) || !(tdev <= kDefaultTol)) {
    std::ostringstream os;
    os << who << ": matrix is not a unit-trace Hermitian operator"
       << " (hermiticity residual " << hres << ", trace deviation " << tdev << ")";
    throw InvalidStateError(os.str());
  }
}

}  // namespace

double DensityMatrix4::trace_deviation() const {
  return std::abs(m.trace() - Complex(1.0, 0.0));
}

double DensityMatrix4::hermiticity_residual() const {
  return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

Eigen::Matrix4cd fano_matrix(const FanoParams& f) {
  const double p1x = f.p1.x(), p1y = f.p1.y(), p1z = f.p1.z();
  const double p2x = f.p2.x(), p2y = f.p2.y(), p2z = f.p2.z();
  const double mxx = f.m(0, 0), mxy = f.m(0, 1), mxz = f.m(0, 2);
  const double myx = f.m(1, 0), myy = f.m(1, 1), myz = f.m(1, 2);
  const double mzx = f.m(2, 0), mzy = f.m(2, 1), mzz = f.m(2, 2);

  Eigen::Matrix4cd r;
  r(0, 0) = 0.25 * (1 + p1z + p2z + mzz);
  r(0, 1) = 0.25 * Complex(p2x + mzx, -(p2y + mzy));
  r(0, 2) = 0.25 * Complex(p1x + mxz, -(p1y + myz));
  r(0, 3) = 0.25 * Complex(mxx - myy, -(mxy + myx));
  r(1, 1) = 0.25 * (1 + p1z - p2z - mzz);
  r(1, 2) = 0.25 * Complex(mxx + myy, mxy - myx);
  r(1, 3) = 0.25 * Complex(p1x - mxz, -(p1y - myz));
  r(2, 2) = 0.25 * (1 - p1z + p2z - mzz);
  r(2, 3) = 0.25 * Complex(p2x - mzx, -(p2y - mzy));
  r(3, 3) = 0.25 * (1 - p1z - p2z + mzz);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) r(i, j) = std::conj(r(j, i));
  return r;
}

FanoParams embed_d7(const D7Params& d) {
  FanoParams f;
  f.p1 = Eigen::Vector3d(0, 0, d.p1z);
  f.p2 = Eigen::Vector3d(0, 0, d.p2z);
  f.m(0, 0) = d.mxx;
  f.m(0, 1) = d.mxy;
  f.m(1, 0) = d.myx;
  f.m(1, 1) = d.myy;
  f.m(2, 2) = d.mzz;
  return f;
}

DensityMatrix4 compose_from_fano(const FanoParams& f) {
  if (!all_finite(f)) throw DomainError("compose_from_fano: non-finite parameters");
  DensityMatrix4 rho{fano_matrix(f)};
  const double min_eig = hermitian4_eigenvalues_raw(rho.m)(0);
  if (min_eig < -kDefaultTol) {
    std::ostringstream os;
    os << "compose_from_fano: not positive semidefinite (min eigenvalue " << min_eig << ")";
    throw NonPositiveError(os.str());
  }
  return rho;
}

FanoParams decompose_to_fano(const DensityMatrix4& rho) {
  require_hermitian_trace(rho, "decompose_to_fano");
  const auto& r = rho.m;

  FanoParams f;
  f.p1.x() = 2 * (r(0, 2) + r(1, 3)).real();
  f.p1.y() = -2 * (r(0, 2) + r(1, 3)).imag();
  f.p1.z() = 2 * (r(0, 0) + r(1, 1)).real() - 1;
  f.p2.x() = 2 * (r(0, 1) + r(2, 3)).real();
  f.p2.y() = -2 * (r(0, 1) + r(2, 3)).imag();
  f.p2.z() = 2 * (r(0, 0) + r(2, 2)).real() - 1;

  f.m(0, 0) = 2 * (r(0, 3) + r(1, 2)).real();
  f.m(0, 1) = 2 * (r(1, 2) + r(3, 0)).imag();
  f.m(0, 2) = 2 * (r(0, 2) - r(1, 3)).real();
  f.m(1, 0) = 2 * (r(3, 0) + r(2, 1)).imag();
  f.m(1, 1) = 2 * (r(1, 2) - r(0, 3)).real();
  f.m(1, 2) = 2 * (r(1, 3) - r(0, 2)).imag();
  f.m(2, 0) = 2 * (r(0, 1) - r(2, 3)).real();
  f.m(2, 1) = 2 * (r(2, 3) - r(0, 1)).imag();
  f.m(2, 2) = 1 - 2 * (r(1, 1) + r(2, 2)).real();
  return f;
}

Qubit2x2 reduce_qubit(const DensityMatrix4& rho, int which) {
  if (which != 1 && which != 2) throw DomainError("reduce_qubit: which must be 1 or 2");
  require_hermitian_trace(rho, "reduce_qubit");
  const auto& r = rho.m;
  Qubit2x2 q;
  if (which == 1) {
    q.m << r(0, 0) + r(1, 1), r(0, 2) + r(1, 3),
           r(2, 0) + r(3, 1), r(2, 2) + r(3, 3);
  } else {
    q.m << r(0, 0) + r(2, 2), r(0, 1) + r(2, 3),
           r(1, 0) + r(3, 2), r(1, 1) + r(3, 3);
  }
  return q;
}

D7Params project_d7(const FanoParams& f, double tol) {
  struct Entry {
    const char* name;
    double value;
  };
  const Entry off_pattern[] = {
      {"P1x", f.p1.x()}, {"P1y", f.p1.y()}, {"P2x", f.p2.x()}, {"P2y", f.p2.y()},
      {"Mxz", f.m(0, 2)}, {"Mzx", f.m(2, 0)}, {"Myz", f.m(1, 2)}, {"Mzy", f.m(2, 1)},
  };
  std::ostringstream bad;
  int n_bad = 0;
  for (const auto& e : off_pattern) {
    if (std::abs(e.value) > tol) {
      if (n_bad++) bad << ", ";
      bad << e.name << "=" << e.value;
    }
  }
  if (n_bad > 0) {
    throw NotD7ClassError("project_d7: off-pattern entries exceed tolerance " +
                          std::to_string(tol) + ": " + bad.str());
  }
  return D7Params{f.p1.z(), f.p2.z(), f.m(0, 0), f.m(1, 1), f.m(0, 1), f.m(1, 0), f.m(2, 2)};
}

DensityMatrix4 compose_d7(const D7Params& d) { return compose_from_fano(embed_d7(d)); }

ValidationReport validate_density(const DensityMatrix4& rho, double tol) {
  ValidationReport rep;
  rep.hermiticity_residual = rho.hermiticity_residual();
  rep.trace_deviation = rho.trace_deviation();
  rep.hermitian_ok = rep.hermiticity_residual <= tol;
  rep.trace_ok = rep.trace_deviation <= tol;

  // Report eigenvalues of the Hermitian part so the check stays total even
  // for slightly (or badly) non-Hermitian input.
  const Eigen::Matrix4cd herm = 0.5 * (rho.m + rho.m.adjoint().eval());
  rep.min_eigenvalue = hermitian4_eigenvalues_raw(herm)(0);
  rep.psd_ok = rep.min_eigenvalue >= -tol;

  rep.purity = (rho.m * rho.m).trace().real();
  rep.purity_ok = rep.purity <= 1 + tol;
  return rep;
}

}  // namespace qmink
