#pragma once

#include <vector>

#include "hamwave/spectral.hpp"
#include "hamwave/vortex.hpp"

namespace hamwave {

/// Dirichlet-Neumann operator G(eta) phi = grad_perp (harmonic extension of phi),
/// for the fluid below the graph of eta (infinite depth), by the flattening
/// expansion truncated at total order M in eta.
///
/// The harmonic extension is written as sum_k psi_k exp(|k| x2 + i k x1) with
/// psi = psi_0 + ... + psi_M, psi_0 = phi and psi_n = -sum_{l=1..n} eta^l/l! |D|^l psi_{n-l}.
/// The operator works on the subspace without the mean and Nyquist modes.
class DNOperator {
 public:
  explicit DNOperator(const RealField& eta, int M = 4);

  const RealField& eta() const { return eta_; }
  int order() const { return M_; }

  /// Throws NonZeroMean when |mean phi| > 1e-10 max|phi|, ExpansionDiverging when
  /// a term of the series is no smaller than the previous one.
  RealField apply(const RealField& phi) const;
  /// Same, with the mean of phi projected out instead of checked.
  RealField apply_projected(const RealField& phi) const;
  /// ||G_n(eta) phi||_L2 for n = 0..M.
  std::vector<double> term_norms(const RealField& phi) const;

  /// grad of the (order-M) harmonic extension at an interior point below the surface.
  Vec2 interior_gradient(const RealField& phi, double x1, double x2) const;

  /// Dense operator matrix on grid values.
  Mat matrix() const;

 private:
  struct Expansion {
    std::vector<CVec> psi_hat;  ///< psi_0 .. psi_M, half spectrum
    std::vector<Vec> terms;     ///< G_0 phi .. G_M phi
  };
  Expansion expand(const Vec& phi) const;
  void check_terms(const std::vector<Vec>& terms) const;

  RealField eta_;
  int M_;
  Vec eta_x_;
  std::vector<Vec> eta_pow_;  ///< eta^l / l!
  Vec kabs_;                  ///< |k| on the half spectrum, Nyquist zeroed
};

/// Zeroes the mean and Nyquist modes.
RealField project_mean_nyquist(const RealField& f);

}  // namespace hamwave
