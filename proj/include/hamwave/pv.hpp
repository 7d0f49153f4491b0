#pragma once

#include <vector>

#include "hamwave/dn.hpp"
#include "hamwave/linalg.hpp"
#include "hamwave/vortex.hpp"

namespace hamwave {

/// Capillary-gravity water wave over infinite depth with a point vortex of strength eps.
struct PVParams {
  double g = 1.0;
  double b = 1.0;
  double eps = 1e-2;
  /// Vortex depth; the traveling waves carry the vortex at (0, -a).
  double a = 1.0;
  /// |eps| ceiling for the small-amplitude branch.
  double eps_ceiling = 0.1;

  /// Throws InvalidParameter.
  void validate() const;
};

/// State u = (eta, phi, xbar). phi is mean-zero.
struct PVState {
  RealField eta;
  RealField phi;
  Vec2 xbar{0.0, -1.0};

  explicit PVState(const Grid& g) : eta(g), phi(g) {}
  PVState(RealField e, RealField p, Vec2 x) : eta(std::move(e)), phi(std::move(p)), xbar(x) {}
  const Grid& grid() const { return eta.grid; }
  /// xbar2 < eta(xbar1) < -xbar2, with eta(xbar1) from the trigonometric interpolant.
  bool admissible() const;
};

/// A covector (eta, phi, xbar components), e.g. a gradient in the L2 pairing.
struct PVCovector {
  RealField eta;
  RealField phi;
  Vec2 xbar = Vec2::Zero();

  explicit PVCovector(const Grid& g) : eta(g), phi(g) {}
  /// <w, u> = int w_eta u_eta + int w_phi u_phi + w_xbar . u_xbar.
  double pair(const PVState& u) const;
  /// Norm in H^-1 x H^-1/2 x R^2 (the phi part taken on mean-zero fields).
  double dual_norm() const;
};

struct PVWave {
  PVParams params;
  RealField eta;  ///< even
  RealField phi;  ///< odd
  double c = 0.0;
  Vec2 xbar{0.0, -1.0};
  int M = 4;
  double res_F1 = 0.0, res_F2 = 0.0, res_F3 = 0.0;  ///< max norms
  int newton_steps = 0;

  explicit PVWave(const Grid& g) : eta(g), phi(g) {}
  const Grid& grid() const { return eta.grid; }
  PVState state() const { return PVState(eta, phi, xbar); }
};

/// (1 / 4 pi^2) (g - b d^2)^-1 [(x^2 - a^2) / (x^2 + a^2)^2] by Fourier inversion on the grid.
RealField eta2_spectral(const Grid& grid, double a, double g, double b);
/// Same profile on the line through f(z) = -e^z E1(z): (1 / 4 pi^2 b) Re[(f(w) + f(-w)) / 2]
/// with w = sqrt(g / b) (x + i a).
double eta2_closed_form(double x, double a, double g, double b);
/// -e^z E1(z) for z off the negative real axis.
cplx neg_exp_E1(cplx z);

/// eta = eps^2 eta2, phi = 0, c = -eps / (4 pi a), xbar = (0, -a).
PVWave asymptotic_guess(const PVParams& params, const Grid& grid);

struct PVResidual {
  RealField F1, F2;
  double F3 = 0.0;
  double max_norm() const;
};

/// Traveling-wave residuals for the wave's (eta, phi, c) and parameters, DN and
/// interior gradient at order M.
PVResidual residual_F(const PVWave& wave, int M);

struct NewtonOptions {
  int M = 4;
  double tol = 1e-12;
  int max_iter = 20;
  /// Finite-difference step for the Jacobian columns.
  double fd_step = 1e-7;
};

/// Newton on (eta even, phi odd, c) from `initial` (the asymptotic guess when null).
/// Throws NoConvergence, JacobianSingular.
PVWave solve_traveling_wave(const PVParams& params, const Grid& grid, const NewtonOptions& opt = {},
                            const PVWave* initial = nullptr);

double pv_energy(const PVState& u, const PVParams& params, int M = 4);
double pv_momentum(const PVState& u, const PVParams& params, int M = 4);

struct PVGradients {
  PVCovector E;
  PVCovector P;
};
PVGradients pv_gradients(const PVState& u, const PVParams& params, int M = 4);

/// d''(c) = -<DP(U), d_a U> / d_a c along the branch at fixed eps, central
/// differences with step h_rel * a.
double pv_d_second(const PVParams& params, const Grid& grid, const NewtonOptions& opt = {}, double h_rel = 1e-3);

/// Discrete H_c in coordinates q = (eta in `eta_basis`, phi in `phi_basis`, xbar),
/// dimension 2N - 1.
struct PVLinearization {
  OperatorMatrix op;
  Mat eta_basis;            ///< N x (N-1), the constant then phi_basis (no Nyquist mode)
  Mat phi_basis;            ///< N x (N-2), l2-orthonormal cos/sin modes 1..N/2-1
  Vec generator;            ///< T'(0)U = (-eta', -phi', e1) in coordinates
  Vec momentum_covector;    ///< DP(U) as a row acting on coordinates
  Eigen::Matrix2d A33;      ///< the one used
  Eigen::Matrix2d A33_general;
  Eigen::Matrix2d A33_simplified;
  bool used_simplified = false;
  double dn_symmetry_defect = 0.0;

  Vec to_coords(const PVState& du) const;
  PVState from_coords(const Vec& q, const Grid& g) const;
};

/// A33 choice: Auto uses the diagonal simplification when eta is even and xbar1 = 0.
enum class A33Form { Auto, General, Simplified };

PVLinearization assemble_pv_Hc(const PVWave& wave, int M = 4, A33Form form = A33Form::Auto);

/// One negative, one zero (aligned with the translation generator), positive rest,
/// in the X metric H^1 x H^1/2 x R^2.
SpectralReport pv_spectral_report(const PVLinearization& lin, const PVWave& wave, double zero_tol,
                                  bool throw_on_violation = true);

/// Constraint vectors for the constrained Rayleigh quotient: X^-1 DP(U) and T'(0)U.
std::vector<Vec> pv_constraints(const PVLinearization& lin);

}  // namespace hamwave
