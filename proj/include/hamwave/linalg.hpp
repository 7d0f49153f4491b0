#pragma once

#include <string>
#include <vector>

#include "hamwave/spectral.hpp"

namespace hamwave {

/// Dense symmetric discretization of a linearized operator.
///
/// `form` is the bilinear form, <H u, v> = u^T form v. `l2` and `x` are the Gram
/// matrices of the L2 pairing and of the energy-space inner product on the same
/// coordinates.
struct OperatorMatrix {
  std::string name;
  std::string state;
  Mat form;
  Mat l2;
  Mat x;
  double symmetry_defect = 0.0;

  Eigen::Index dim() const { return form.rows(); }
  /// Quadratic form <H u, u>.
  double quadratic(const Vec& u) const { return u.dot(form * u); }
};

/// Checks ||F - F^T||_max <= tol ||F||_max (SymmetryDefect otherwise), then
/// stores the symmetrized form.
OperatorMatrix make_operator(std::string name, std::string state, Mat form, Mat l2, Mat x,
                             double tol = 1e-8);

struct EigenPairs {
  Vec values;   ///< ascending
  Mat vectors;  ///< columns normalized in the metric
};

/// Solves form v = lambda metric v for symmetric form and positive definite metric.
EigenPairs generalized_eigen(const Mat& form, const Mat& metric);

/// Minimum of <H v, v> / ||v||_X^2 over v X-orthogonal to every constraint.
/// Throws DegenerateConstraints when the constraints are (numerically) dependent.
double constrained_rayleigh_min(const OperatorMatrix& m, const std::vector<Vec>& constraints);

/// Report of the lowest part of the spectrum in a chosen metric.
struct SpectralReport {
  Vec eigenvalues;        ///< lowest k, ascending
  Mat eigenvectors;       ///< matching columns, unit norm in the X inner product
  int negative_count = 0;
  int near_zero_count = 0;
  double mu_sq = 0.0;     ///< magnitude of the negative eigenvalue
  Vec chi;                ///< unit negative eigenvector (X norm)
  double zero_eigenvalue = 0.0;
  double zero_alignment = 0.0;  ///< |cos| between zero-mode eigenvector and generator
  double gap = 0.0;             ///< smallest eigenvalue above the zero mode
  double zero_tol = 0.0;
  bool configuration_ok = false;
  std::string verdict;
};

enum class SpectralMetric { L2, X };

/// Eigendecomposition plus the one-negative / one-zero / positive-remainder check.
/// The zero mode is the eigenvalue closest to zero; its eigenvector is compared
/// with `generator` by the metric cosine. Throws SpectralConfigViolation when the
/// counts differ, unless `throw_on_violation` is false.
SpectralReport analyze_spectrum(const OperatorMatrix& m, const Vec& generator, SpectralMetric metric,
                                int keep, double zero_tol, bool throw_on_violation = true);

}  // namespace hamwave
