#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hamwave/dn.hpp"
#include "hamwave/vortex.hpp"

using namespace hamwave;

namespace {

std::vector<Vec2> admissible_points(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u1(-5.0, 5.0), u2(-3.0, 0.5);
  std::vector<Vec2> pts;
  while ((int)pts.size() < n) {
    Vec2 p(u1(rng), u2(rng));
    if ((p - Vec2(0, -1)).norm() > 0.5 && (p - Vec2(0, 1)).norm() > 0.5) pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST(Vortex, HarmonicAndConjugate) {
  VortexFields v(Vec2(0.0, -1.0));
  const double h = 4e-3;
  for (const Vec2& p : admissible_points(100, 3)) {
    auto T = [&](double dx, double dy) { return v.at(p(0) + dx, p(1) + dy).Theta(); };
    auto G = [&](double dx, double dy) { return v.at(p(0) + dx, p(1) + dy).Gamma(); };
    // Theta jumps by one across the cuts; stay away from them for the stencil.
    if (std::abs(p(0)) < 0.01) continue;
    // Five-point Laplacian at h and h/2, Richardson-combined: the h^2 error term
    // cancels and double rounding stays near 1e-11.
    auto lap = [&](auto&& f, double s) { return (f(s, 0) + f(-s, 0) + f(0, s) + f(0, -s) - 4 * f(0, 0)) / (s * s); };
    EXPECT_LT(std::abs((4 * lap(T, h / 2) - lap(T, h)) / 3), 1e-8) << p.transpose();
    EXPECT_LT(std::abs((4 * lap(G, h / 2) - lap(G, h)) / 3), 1e-8);

    VortexPoint q = v.at(p(0), p(1));
    Vec2 gT = q.grad_Theta(), gG = q.grad_Gamma();
    // grad Theta = grad_perp Gamma = (-Gamma_y, Gamma_x)
    EXPECT_LT((gT - Vec2(-gG(1), gG(0))).norm(), 1e-10);
    // closed-form gradient against central differences
    const double hd = 1e-5;
    Vec2 fd((T(hd, 0) - T(-hd, 0)) / (2 * hd), (T(0, hd) - T(0, -hd)) / (2 * hd));
    EXPECT_LT((fd - gT).norm(), 1e-8);
    Vec2 fdG((G(hd, 0) - G(-hd, 0)) / (2 * hd), (G(0, hd) - G(0, -hd)) / (2 * hd));
    EXPECT_LT((fdG - gG).norm(), 1e-8);
  }
}

TEST(Vortex, XbarDerivatives) {
  // xi = -grad_xbar Theta and the xbar-Hessians, against differences in the center.
  const Vec2 c(0.3, -1.2);
  const double h = 1e-4;
  for (const Vec2& p : admissible_points(30, 5)) {
    if (std::abs(p(0) - c(0)) < 0.05) continue;
    VortexPoint q = VortexFields(c).at(p(0), p(1));
    auto Th = [&](double d1, double d2) { return VortexFields(c + Vec2(d1, d2)).at(p(0), p(1)).Theta(); };
    Vec2 grad((Th(h, 0) - Th(-h, 0)) / (2 * h), (Th(0, h) - Th(0, -h)) / (2 * h));
    EXPECT_LT((q.xi() + grad).norm(), 1e-7);

    const Grid g(10.0, 8);
    RealField eta = RealField::from_function(g, [&](double) { return p(1); });
    Vec eta_x = Vec::Zero(g.N());
    // single point via a flat surface through p: shift x1 so that grid point 0 sits at p(0)
    VortexFields vs(c - Vec2(p(0) + g.L(), 0.0));
    SurfaceTraces s = surface_traces(vs, eta, eta_x);
    auto Tc = [&](double d1, double d2) {
      return VortexFields(vs.xbar + Vec2(d1, d2)).at(g.x(0), p(1)).Theta();
    };
    auto Gc = [&](double d1, double d2) {
      return VortexFields(vs.xbar + Vec2(d1, d2)).at(g.x(0), p(1)).Gamma();
    };
    const double H = 1e-3;
    auto hess = [&](auto&& f) {
      std::array<double, 3> r;
      r[0] = (f(H, 0) - 2 * f(0, 0) + f(-H, 0)) / (H * H);
      r[1] = (f(H, H) - f(H, -H) - f(-H, H) + f(-H, -H)) / (4 * H * H);
      r[2] = (f(0, H) - 2 * f(0, 0) + f(0, -H)) / (H * H);
      return r;
    };
    auto hT = hess(Tc), hG = hess(Gc);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(s.D2Theta[i](0), hT[i], 1e-5) << i;
      EXPECT_NEAR(s.D2Gamma[i](0), hG[i], 1e-5) << i;
    }
  }
}

TEST(Vortex, MirrorAndAxisValues) {
  const double a = 1.3;
  VortexFields v(Vec2(0.0, -a));
  for (double x : {-7.0, -1.0, -0.2, 0.0, 0.4, 3.0, 20.0}) {
    VortexPoint p = v.at(x, 0.0);
    EXPECT_LT(std::abs(p.Gamma()), 1e-15);
    double expect = -(2.0 / M_PI) * std::atan(x / (std::sqrt(x * x + a * a) + a));
    EXPECT_NEAR(p.Theta(), expect, 1e-14) << x;
    EXPECT_NEAR(p.Theta2, -p.Theta1, 1e-15);
  }
  EXPECT_NEAR(v.gamma2_at_center(), std::log(2 * a) / (2 * M_PI), 1e-15);
  // Gamma2 and d/dx1 Theta2 at the center against the pointwise evaluator of the mirror
  const double h = 1e-5;
  auto G2 = [&](double d1, double d2) {
    double r = std::hypot(d1, -a + d2 - a);
    return std::log(r) / (2 * M_PI);
  };
  EXPECT_NEAR(v.hess_gamma2_at_center()(0, 0), (G2(h, 0) - 2 * G2(0, 0) + G2(-h, 0)) / (h * h), 1e-4);
  EXPECT_NEAR(v.hess_gamma2_at_center()(1, 1), (G2(0, h) - 2 * G2(0, 0) + G2(0, -h)) / (h * h), 1e-4);
  EXPECT_NEAR(v.dtheta2_dx1_at_center(), 1.0 / (4 * M_PI * a), 1e-15);
  EXPECT_THROW(v.at(0.0, -a + 1e-8), Error);
  EXPECT_THROW(VortexFields(Vec2(0.0, 0.5)), Error);
}

TEST(Vortex, SurfaceIdentities) {
  // Tangential derivatives of traces along a curved surface, by differences of the
  // pointwise evaluator; includes grad_perp Theta_x1 = (Theta_x2|_S)'.
  const Grid g(6.4, 64);
  VortexFields v(Vec2(0.0, -1.0));
  auto eta = [](double x) { return 0.05 * std::exp(-x * x / 4) - 0.02 * std::exp(-x * x); };
  auto deta = [](double x) { return -0.025 * x * std::exp(-x * x / 4) + 0.04 * x * std::exp(-x * x); };
  RealField e = RealField::from_function(g, eta);
  Vec ex(g.N());
  for (int j = 0; j < g.N(); ++j) ex(j) = deta(g.x(j));
  SurfaceTraces s = surface_traces(v, e, ex);
  const double h = 1e-5;
  for (int j = 0; j < g.N(); ++j) {
    const double x = g.x(j);
    VortexPoint p = v.at(x + h, eta(x + h)), m = v.at(x - h, eta(x - h));
    EXPECT_NEAR((p.grad_Theta()(1) - m.grad_Theta()(1)) / (2 * h), s.Tyy_alongS(j), 1e-8);
    EXPECT_NEAR(s.Tyy_alongS(j), s.nxi[0](j), 1e-12);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR((p.xi()(i) - m.xi()(i)) / (2 * h), s.txi[i](j), 1e-8) << i;
    EXPECT_NEAR((p.Theta() - m.Theta()) / (2 * h), s.tTheta(j), 1e-8);
  }
  Vec nTx = -ex.cwiseProduct(s.xi_x1[0]) + s.xi_x2[0];
  EXPECT_LT((nTx - s.nxi[0]).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DN, FlatSurfaceIsAbsoluteDerivative) {
  const Grid g(10.0, 64);
  for (int M : {0, 1, 4}) {
    DNOperator G(RealField(g), M);
    for (int n : {1, 5, 31}) {
      const double k = g.k_of_mode(n);
      auto c = RealField::from_function(g, [&](double x) { return std::cos(k * x); });
      EXPECT_LT((G.apply(c).v - k * c.v).cwiseAbs().maxCoeff(), 1e-12) << M << " " << n;
    }
  }
  auto one = RealField::from_function(g, [](double) { return 1.0; });
  EXPECT_THROW(DNOperator(RealField(g)).apply(one), Error);
}

TEST(DN, ExactHarmonicOracle) {
  const Grid g(2 * M_PI, 128);
  auto eta = RealField::from_function(g, [](double x) { return 0.01 * (0.6 * std::cos(x) + 0.4 * std::sin(2 * x)); });
  Vec ex = derivative(eta).v;
  for (int n : {1, 3, 6}) {
    const double k = g.k_of_mode(n);
    Vec phi(g.N()), expect(g.N());
    for (int j = 0; j < g.N(); ++j) {
      double x = g.x(j), e = std::exp(k * eta.v(j));
      phi(j) = e * std::cos(k * x);
      expect(j) = k * e * (ex(j) * std::sin(k * x) + std::cos(k * x));
    }
    DNOperator G(eta, 4);
    RealField r = G.apply_projected(RealField(g, phi));
    EXPECT_LT((r.v - expect).cwiseAbs().maxCoeff(), 1e-6) << n;
  }
}

TEST(DN, InteriorGradientOfHarmonicExtension) {
  const Grid g(2 * M_PI, 128);
  auto eta = RealField::from_function(g, [](double x) { return 0.01 * std::cos(x); });
  const double k = g.k_of_mode(2);
  Vec phi(g.N());
  for (int j = 0; j < g.N(); ++j) phi(j) = std::exp(k * eta.v(j)) * std::sin(k * g.x(j));
  DNOperator G(eta, 4);
  for (double y : {-0.5, -1.0}) {
    Vec2 grad = G.interior_gradient(RealField(g, phi), 0.3, y);
    Vec2 expect(k * std::exp(k * y) * std::cos(k * 0.3), k * std::exp(k * y) * std::sin(k * 0.3));
    EXPECT_LT((grad - expect).norm(), 1e-8);
  }
}

TEST(DN, SelfAdjointNonnegativeAndFirstOrder) {
  const Grid g(12.8, 128);
  auto eta = RealField::from_function(g, [](double x) { return 0.03 * std::exp(-x * x / 3) + 0.01 * std::sin(4 * M_PI * x / 12.8); });
  DNOperator G(eta, 4);
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  auto random_field = [&] {
    Vec v(g.N());
    for (int j = 0; j < g.N(); ++j) v(j) = 0.0;
    for (int m = 1; m < 12; ++m) {
      double a = nd(rng), b = nd(rng), k = g.k_of_mode(m);
      for (int j = 0; j < g.N(); ++j) v(j) += a * std::cos(k * g.x(j)) + b * std::sin(k * g.x(j));
    }
    return RealField(g, v);
  };
  for (int t = 0; t < 5; ++t) {
    RealField f = random_field(), h = random_field();
    double lhs = inner(G.apply(f), h), rhs = inner(f, G.apply(h));
    EXPECT_LT(std::abs(lhs - rhs), 1e-8 * std::abs(lhs) + 1e-12);
    EXPECT_GT(inner(G.apply(f), f), 0.0);
  }
  // Dense matrix restricted to modes below N/3, where products do not alias.
  Mat A = G.matrix();
  Mat B(g.N(), 2 * (g.N() / 3));
  for (int m = 1; m <= g.N() / 3; ++m)
    for (int j = 0; j < g.N(); ++j) {
      B(j, 2 * m - 2) = std::cos(g.k_of_mode(m) * g.x(j));
      B(j, 2 * m - 1) = std::sin(g.k_of_mode(m) * g.x(j));
    }
  Mat Ar = B.transpose() * A * B;
  EXPECT_LT((Ar - Ar.transpose()).cwiseAbs().maxCoeff(), 1e-8 * Ar.cwiseAbs().maxCoeff());

  // Linear term in eta: (G(t eta) - G(0)) / t -> -d eta d - |D| eta |D|
  RealField f = random_field();
  const double t = 1e-4;
  RealField teta = t * eta;
  RealField d1 = (1.0 / t) * (DNOperator(teta, 4).apply(f) - DNOperator(RealField(g), 4).apply(f));
  RealField df = derivative(f);
  auto absD = [&](const RealField& u) { return apply_multiplier(u, MultiplierSymbol::abs_power(1.0)); };
  RealField etadf(g, eta.v.cwiseProduct(df.v));
  RealField etaDf(g, eta.v.cwiseProduct(absD(f).v));
  RealField g1 = project_mean_nyquist((-1.0) * derivative(etadf) - absD(etaDf));
  EXPECT_LT((d1.v - g1.v).cwiseAbs().maxCoeff(), 1e-3 * g1.max_norm());
}

TEST(DN, DivergenceGuard) {
  const Grid g(2 * M_PI, 128);
  auto eta = RealField::from_function(g, [](double x) { return 1.5 * std::cos(x); });
  auto phi = RealField::from_function(g, [](double x) { return std::cos(20 * x); });
  EXPECT_THROW(DNOperator(eta, 6).apply(phi), Error);
  auto small = RealField::from_function(g, [](double x) { return 0.01 * std::cos(x); });
  auto norms = DNOperator(small, 4).term_norms(phi);
  for (size_t n = 1; n < norms.size(); ++n) EXPECT_LT(norms[n], norms[n - 1]);
}
