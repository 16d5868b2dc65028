#pragma once

#include <array>

#include "qmink/cmm_geometry.hpp"
#include "qmink/state_core.hpp"

namespace qmink {

/// Four real eigenvalues, sorted descending. Sum equals the trace of the
/// source matrix; for a valid density matrix all values lie in [-tol, 1+tol].
struct Spectrum4 {
  std::array<double, 4> values{};

  double min() const { return values[3]; }
  double max() const { return values[0]; }
  double sum() const { return values[0] + values[1] + values[2] + values[3]; }
};

/// Separability verdict from the sign of the smallest eigenvalue of the
/// partially transposed matrix (the negativity indicator).
struct PhcVerdict {
  Region label = Region::SeparableLike;
  double min_pt_eigenvalue = 0;
  double tolerance_used = 0;
};

/// Ascending eigenvalues of a 4x4 Hermitian matrix; no input checks.
/// Single numeric path shared by positivity checks and spectra.
Eigen::Vector4d hermitian4_eigenvalues_raw(const Eigen::Matrix4cd& m);

/// Transpose the indices of one qubit only: within each 2x2 sub-block for
/// qubit 2, across sub-blocks for qubit 1. Output is Hermitian with the
/// same trace but need not be positive; applying it twice restores the
/// input bit-exactly.
DensityMatrix4 partial_transpose(const DensityMatrix4& rho, int qubit = 2);

/// Parameter-level image of the qubit-2 partial transposition: a reflection
/// that negates P2y and the y-column of the correlation matrix.
FanoParams reflect_fano(const FanoParams& f);

/// Numeric spectrum, sorted descending. Throws NotHermitianError when the
/// hermiticity residual exceeds tol.
Spectrum4 eigenvalues_hermitian4(const DensityMatrix4& rho, double tol = kDefaultTol);

/// Closed-form spectrum of the seven-parameter class, from the coordinate
/// split (t_minus +- X1)/2, (t_plus +- X2)/2.
Spectrum4 d7_eigenvalues(const D7Params& d);

/// Closed-form spectrum of the partial transpose: the same split after the
/// v/w coordinate swap.
Spectrum4 d7_pt_eigenvalues(const D7Params& d);

/// Requires a valid density matrix (InvalidStateError otherwise).
PhcVerdict classify_phc(const DensityMatrix4& rho, double tol = kDefaultTol);

}  // namespace qmink
