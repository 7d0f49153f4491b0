#pragma once

#include <Eigen/Dense>
#include <array>

#include "hamwave/spectral.hpp"

namespace hamwave {

using Vec2 = Eigen::Vector2d;

/// Closed-form values of the vortex/mirror pair at one point.
///
/// With z = x1 + i x2, F = Theta - i Gamma is holomorphic away from the vortex
/// and its mirror, and likewise Fx = Xi - i (Gamma1 + Gamma2). Spatial gradients
/// follow from F' = Theta_x1 - i Theta_x2.
struct VortexPoint {
  double Theta1 = 0, Theta2 = 0, Gamma1 = 0, Gamma2 = 0;
  cplx dF, d2F, d3F;
  cplx dFx, d2Fx, d3Fx;

  double Theta() const { return Theta1 - Theta2; }
  double Gamma() const { return Gamma1 - Gamma2; }
  double Xi() const { return Theta1 + Theta2; }
  Vec2 grad_Theta() const { return {dF.real(), -dF.imag()}; }
  Vec2 grad_Gamma() const { return {-dF.imag(), -dF.real()}; }
  /// xi = (Theta_x1, Xi_x2) = -grad_xbar Theta.
  Vec2 xi() const { return {dF.real(), -dFx.imag()}; }
};

/// Point vortex at xbar (xbar2 < 0) and its mirror at (xbar1, -xbar2).
struct VortexFields {
  Vec2 xbar{0.0, -1.0};
  /// Evaluations closer than this to the vortex or the mirror throw SingularEvaluation.
  double exclusion = 1e-6;

  VortexFields() = default;
  VortexFields(Vec2 center, double exclusion_radius = 1e-6);

  Vec2 mirror() const { return {xbar(0), -xbar(1)}; }
  VortexPoint at(double x1, double x2) const;

  /// Gamma2(xbar) = log(2 |xbar2|) / (2 pi).
  double gamma2_at_center() const;
  /// d/dx1 Theta2 at xbar, -1/(4 pi xbar2).
  double dtheta2_dx1_at_center() const;
  /// Spatial Hessian of Gamma2 at xbar.
  Eigen::Matrix2d hess_gamma2_at_center() const;
};

/// Vortex quantities sampled along the graph x2 = eta(x1). The grad_perp and
/// grad_top operators are (-eta' d1 + d2) and (d1 + eta' d2) restricted to S.
/// Entries of 3-arrays indexed by (11, 12, 22) hold components of the symmetric
/// xbar-Hessians.
struct SurfaceTraces {
  Vec Theta, Gamma, Xi;
  Vec Tx, Ty;                 ///< grad Theta
  Vec Txy, Tyy_alongS;        ///< Theta_x1x2 and (Theta_x2|_S)'
  Vec nTheta, tTheta;         ///< grad_perp Theta, grad_top Theta
  std::array<Vec, 2> xi;      ///< xi_i|_S
  std::array<Vec, 2> nxi;     ///< grad_perp xi_i
  std::array<Vec, 2> txi;     ///< grad_top xi_i = (xi_i|_S)'
  std::array<Vec, 3> D2Theta; ///< D^2_xbar Theta
  std::array<Vec, 3> D2Gamma; ///< D^2_xbar Gamma
  std::array<Vec, 3> nD2Theta;///< grad_perp of D^2_xbar Theta
  std::array<Vec, 2> xi_x1;   ///< d/dx1 of xi_i (spatial)
  std::array<Vec, 2> xi_x2;   ///< d/dx2 of xi_i (spatial)
};

/// `eta_x` is the spectral derivative of eta. Throws SingularEvaluation when a
/// surface point enters the exclusion disk of the vortex or its mirror.
SurfaceTraces surface_traces(const VortexFields& v, const RealField& eta, const Vec& eta_x);

}  // namespace hamwave
