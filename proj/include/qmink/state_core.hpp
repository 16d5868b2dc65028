#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qmink/errors.hpp"

namespace qmink {

/// Default tolerance for invariant checks (hermiticity, trace, positivity).
inline constexpr double kDefaultTol = 1e-9;
/// Tolerance for algebraic identities (roundtrips, dual-route comparisons).
inline constexpr double kAlgebraTol = 1e-12;

using Complex = std::complex<double>;

/// Two-qubit density matrix in the computational basis |00>,|01>,|10>,|11>,
/// with qubit 1 as the left tensor factor.
///
/// The struct does not enforce positivity: partial transposes and boundary
/// states travel through the same type. validate_density reports every
/// invariant; each operation checks exactly what it needs.
struct DensityMatrix4 {
  Eigen::Matrix4cd m{Eigen::Matrix4cd::Zero()};

  /// |Tr(m) - 1|
  double trace_deviation() const;
  /// max entrywise |m - m^H|
  double hermiticity_residual() const;
};

/// Bloch polarization vectors of both qubits plus the 3x3 correlation matrix;
/// the fifteen real parameters of a general two-qubit state.
struct FanoParams {
  Eigen::Vector3d p1{Eigen::Vector3d::Zero()};
  Eigen::Vector3d p2{Eigen::Vector3d::Zero()};
  Eigen::Matrix3d m{Eigen::Matrix3d::Zero()};
};

/// The seven free parameters of the z-aligned block-pattern class: both
/// polarizations along z, correlations restricted to the xy block plus zz.
/// Plain aggregate; positivity of the composed matrix is checked by the
/// composition paths, not here.
struct D7Params {
  double p1z = 0;
  double p2z = 0;
  double mxx = 0;
  double myy = 0;
  double mxy = 0;
  double myx = 0;
  double mzz = 0;
};

/// Single-qubit density matrix.
struct Qubit2x2 {
  Eigen::Matrix2cd m{Eigen::Matrix2cd::Zero()};
};

struct ValidationReport {
  double hermiticity_residual = 0;
  double trace_deviation = 0;
  double min_eigenvalue = 0;
  double purity = 0;  // Tr(rho^2)
  bool hermitian_ok = false;
  bool trace_ok = false;
  bool psd_ok = false;
  bool purity_ok = false;

  bool ok() const { return hermitian_ok && trace_ok && psd_ok && purity_ok; }
};

/// Raw Fano-form matrix build. Hermitian and unit-trace by construction;
/// no positivity check (the parameter cube contains non-states).
Eigen::Matrix4cd fano_matrix(const FanoParams& f);

/// Zero-pad the seven-parameter class into the full Fano parameter set.
FanoParams embed_d7(const D7Params& d);

/// Build the density matrix of a Fano parameter set and verify positivity.
/// Throws NonPositiveError if any eigenvalue falls below -kDefaultTol,
/// DomainError on non-finite input.
DensityMatrix4 compose_from_fano(const FanoParams& f);

/// Extract polarization vectors and correlation matrix from the matrix
/// entries. Requires hermiticity and unit trace (InvalidStateError);
/// positivity is not required, so partial transposes and boundary states
/// decompose fine.
FanoParams decompose_to_fano(const DensityMatrix4& rho);

/// Partial trace over the other qubit; `which` selects the kept qubit (1|2).
Qubit2x2 reduce_qubit(const DensityMatrix4& rho, int which);

/// Accept a Fano set into the seven-parameter class if every off-pattern
/// entry is at most tol in magnitude; otherwise throws NotD7ClassError
/// listing the offending entries.
D7Params project_d7(const FanoParams& f, double tol = kDefaultTol);

/// Compose the seven-parameter class; identical arithmetic to
/// compose_from_fano(embed_d7(d)).
DensityMatrix4 compose_d7(const D7Params& d);

/// Report-style check of all density-matrix invariants. Never throws.
ValidationReport validate_density(const DensityMatrix4& rho, double tol = kDefaultTol);

}  // namespace qmink
