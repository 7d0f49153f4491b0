#pragma once

#include <string>
#include <vector>

#include "hamwave/linalg.hpp"
#include "hamwave/spectral.hpp"

namespace hamwave {

/// Dispersion order alpha and power p of u_t = d/dx(Lambda^alpha u - u^p),
/// Lambda = |d/dx|.
struct ModelParams {
  double alpha = 2.0;
  int p = 2;

  /// Throws InvalidParameter outside alpha in (1/3, 2] and the admissible p window.
  void validate() const;
  /// 2/(p-1) - 1/alpha; d'(c) scales like c to this power.
  double scaling_exponent() const { return 2.0 / (p - 1) - 1.0 / alpha; }
};

/// Solution of Q + Lambda^alpha Q = Q^p on a periodic grid.
struct GroundState {
  ModelParams params;
  Grid grid;
  RealField Q;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Pointwise Q^p (collocation; the profile is assumed resolved).
RealField power(const RealField& u, int p);

/// L2 norm of Q + Lambda^alpha Q - Q^p.
double ground_state_residual(const RealField& Q, const ModelParams& params);

/// One Petviashvili update, with the even projection applied.
RealField petviashvili_step(const RealField& Q, const ModelParams& params);

/// Petviashvili iteration from 1.5 exp(-x^2/4). Throws NoConvergence when the
/// budget runs out or the residual stagnates, CollapseToZero when iterates vanish.
GroundState solve_ground_state(const ModelParams& params, const Grid& grid, double tol = 1e-12,
                               int max_iter = 2000);

struct SolitonFamily {
  GroundState ground;
  /// Largest admissible effective spacing c^(1/alpha) dx of a rescaled profile.
  double max_scaled_dx = 0.5;
};

/// U_c(x) = c^(1/(p-1)) Q(c^(1/alpha) x) on `grid`, by trigonometric interpolation of Q.
RealField scale_to_speed(const SolitonFamily& family, double c, const Grid& grid);
RealField scale_to_speed(const SolitonFamily& family, double c);
/// dU_c/dc by central differences with step 1e-3 c.
RealField speed_derivative(const SolitonFamily& family, double c, const Grid& grid);

double energy(const RealField& u, const ModelParams& params);
/// Lambda^alpha u - u^p.
RealField energy_gradient(const RealField& u, const ModelParams& params);
/// -(1/2) int u^2.
double momentum(const RealField& u);

struct DPrime {
  double closed_form;  ///< (1/2) c^e ||Q||^2
  double quadrature;   ///< -P(U_c) on the family grid
};
DPrime d_prime(const SolitonFamily& family, double c);

/// Central difference of d'. Each d' is the quadrature of U_c sampled on its
/// natural grid (half-length L c^(-1/alpha)), where the samples are exact rescalings of Q.
double d_second(const SolitonFamily& family, double c, double h);
/// (2/(p-1) - 1/alpha) d'(c) / c with the closed-form d'.
double d_second_closed_form(const SolitonFamily& family, double c);

enum class Verdict { Stable, Unstable, Critical };
std::string to_string(Verdict v);
Verdict classify_stability(const ModelParams& params);

/// H_c v = Lambda^alpha v - p U_c^(p-1) v + c v.
RealField apply_linearized(const RealField& Uc, const ModelParams& params, double c, const RealField& v);
/// Dense matrix of H_c built from its action on basis vectors. The X inner
/// product is H^(alpha/2).
OperatorMatrix assemble_linearized(const SolitonFamily& family, double c, const Grid& grid);

/// L2 spectrum of H_c with the one-negative / one-zero check against U_c'.
SpectralReport spectral_report(const OperatorMatrix& matrix, const SolitonFamily& family, double c, int keep = 8,
                               double zero_tol = 1e-6, bool throw_on_violation = true);

/// Weinstein functional; throws ZeroField for u = 0.
double weinstein(const RealField& u, const ModelParams& params);

/// Constraint vectors I^{-1} grad P(U_c) and T'(0) U_c = -U_c'.
std::vector<Vec> fkdv_constraints(const SolitonFamily& family, double c, const Grid& grid);

}  // namespace hamwave
