#include "hamwave/vortex.hpp"

#include <cmath>
#include <sstream>

namespace hamwave {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
const cplx I(0.0, 1.0);
}  // namespace

VortexFields::VortexFields(Vec2 center, double exclusion_radius) : xbar(center), exclusion(exclusion_radius) {
  if (!(center(1) < 0.0)) throw Error(ErrorKind::InvalidParameter, "vortex must lie below x2 = 0");
}

VortexPoint VortexFields::at(double x1, double x2) const {
  const double d1 = x1 - xbar(0), d2 = x2 - xbar(1);
  const double m2 = x2 + xbar(1);  // x2 minus the mirror height -xbar2
  const double r = std::hypot(d1, d2), rm = std::hypot(d1, m2);
  if (r < exclusion || rm < exclusion) {
    std::ostringstream os;
    os << "point (" << x1 << ", " << x2 << ") within " << exclusion << " of the vortex pair";
    throw Error(ErrorKind::SingularEvaluation, os.str());
  }
  VortexPoint p;
  // Half-angle forms; the cuts run straight down from the vortex and straight up from the mirror.
  p.Theta1 = -std::atan2(d1, d2) / kTwoPi;
  p.Theta2 = std::atan2(d1, -m2) / kTwoPi;
  p.Gamma1 = std::log(r) / kTwoPi;
  p.Gamma2 = std::log(rm) / kTwoPi;

  const cplx a1 = 1.0 / cplx(d1, d2);
  const cplx b1 = 1.0 / cplx(d1, m2);
  const cplx a2 = a1 * a1, b2 = b1 * b1;
  const cplx A1 = -I / kTwoPi * a1, B1 = -I / kTwoPi * b1;
  const cplx A2 = I / kTwoPi * a2, B2 = I / kTwoPi * b2;
  const cplx A3 = -I / M_PI * a2 * a1, B3 = -I / M_PI * b2 * b1;
  p.dF = A1 - B1;
  p.d2F = A2 - B2;
  p.d3F = A3 - B3;
  p.dFx = A1 + B1;
  p.d2Fx = A2 + B2;
  p.d3Fx = A3 + B3;
  return p;
}

double VortexFields::gamma2_at_center() const { return std::log(2.0 * std::abs(xbar(1))) / kTwoPi; }

double VortexFields::dtheta2_dx1_at_center() const { return -1.0 / (2.0 * kTwoPi * xbar(1)); }

Eigen::Matrix2d VortexFields::hess_gamma2_at_center() const {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  const double s = 1.0 / (4.0 * kTwoPi * xbar(1) * xbar(1));
  h(0, 0) = s;
  h(1, 1) = -s;
  return h;
}

SurfaceTraces surface_traces(const VortexFields& v, const RealField& eta, const Vec& eta_x) {
  const Grid& g = eta.grid;
  const int N = g.N();
  SurfaceTraces s;
  auto alloc = [N](Vec& x) { x.resize(N); };
  for (Vec* x : {&s.Theta, &s.Gamma, &s.Xi, &s.Tx, &s.Ty, &s.Txy, &s.Tyy_alongS, &s.nTheta, &s.tTheta}) alloc(*x);
  for (int i = 0; i < 2; ++i)
    for (Vec* x : {&s.xi[i], &s.nxi[i], &s.txi[i], &s.xi_x1[i], &s.xi_x2[i]}) alloc(*x);
  for (int i = 0; i < 3; ++i)
    for (Vec* x : {&s.D2Theta[i], &s.D2Gamma[i], &s.nD2Theta[i]}) alloc(*x);

  for (int j = 0; j < N; ++j) {
    const double e1 = eta_x(j);
    VortexPoint p = v.at(g.x(j), eta.v(j));
    s.Theta(j) = p.Theta();
    s.Gamma(j) = p.Gamma();
    s.Xi(j) = p.Xi();
    s.Tx(j) = p.dF.real();
    s.Ty(j) = -p.dF.imag();
    s.Txy(j) = -p.d2F.imag();
    s.Tyy_alongS(j) = -p.d2F.imag() - e1 * p.d2F.real();
    s.nTheta(j) = -e1 * s.Tx(j) + s.Ty(j);
    s.tTheta(j) = s.Tx(j) + e1 * s.Ty(j);

    // xi_i = Re h_i with h_1 = F', h_2 = i Fx'.
    const cplx hp[2] = {p.d2F, I * p.d2Fx};
    const cplx h0[2] = {p.dF, I * p.dFx};
    for (int i = 0; i < 2; ++i) {
      s.xi[i](j) = h0[i].real();
      s.xi_x1[i](j) = hp[i].real();
      s.xi_x2[i](j) = -hp[i].imag();
      s.nxi[i](j) = -e1 * hp[i].real() - hp[i].imag();
      s.txi[i](j) = hp[i].real() - e1 * hp[i].imag();
    }
    // D^2_xbar F entries and their z-derivatives.
    const cplx H[3] = {p.d2F, I * p.d2Fx, -p.d2F};
    const cplx Hp[3] = {p.d3F, I * p.d3Fx, -p.d3F};
    for (int i = 0; i < 3; ++i) {
      s.D2Theta[i](j) = H[i].real();
      s.D2Gamma[i](j) = -H[i].imag();
      s.nD2Theta[i](j) = -e1 * Hp[i].real() - Hp[i].imag();
    }
  }
  return s;
}

}  // namespace hamwave
