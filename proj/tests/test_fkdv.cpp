#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hamwave/fkdv.hpp"

using namespace hamwave;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

const SolitonFamily& kdv_family() {
  static SolitonFamily fam{solve_ground_state({2.0, 2}, Grid(50.0, 1024))};
  return fam;
}

RealField smooth_random(const Grid& g, unsigned seed, bool even = false) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a[4], c[4], w[4];
  for (int i = 0; i < 4; ++i) {
    a[i] = u(rng);
    c[i] = even ? 0.0 : 3.0 * u(rng);
    w[i] = 1.0 + 0.5 * (u(rng) + 1.0);
  }
  return RealField::from_function(g, [&](double x) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      s += a[i] * std::exp(-(x - c[i]) * (x - c[i]) / (w[i] * w[i]));
      if (even) s += a[i] * std::exp(-(x + c[i]) * (x + c[i]) / (w[i] * w[i]));
    }
    return s;
  });
}

}  // namespace

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW((ModelParams{2.0, 6}.validate()));
  EXPECT_NO_THROW((ModelParams{0.4, 2}.validate()));
  EXPECT_THROW((ModelParams{0.3, 2}.validate()), Error);
  EXPECT_THROW((ModelParams{2.5, 2}.validate()), Error);
  EXPECT_THROW((ModelParams{0.5, 3}.validate()), Error);  // p < 3 required
  EXPECT_THROW((ModelParams{2.0, 1}.validate()), Error);
}

TEST(GroundState, KdvMatchesSech2) {
  const auto& fam = kdv_family();
  const Grid& g = fam.ground.grid;
  double err = 0.0;
  for (int j = 0; j < g.N(); ++j) {
    double s = sech(g.x(j) / 2);
    err = std::max(err, std::abs(fam.ground.Q.v(j) - 1.5 * s * s));
  }
  EXPECT_LT(err, 1e-8);
  EXPECT_LT(fam.ground.residual_norm, 1e-11);
  EXPECT_LT(even_defect(fam.ground.Q), 1e-12);
  // single positive peak at x = 0
  Eigen::Index imax;
  fam.ground.Q.v.maxCoeff(&imax);
  EXPECT_EQ(imax, g.N() / 2);
  EXPECT_GT(fam.ground.Q.v.minCoeff(), -1e-14);
}

TEST(GroundState, ExactProfileIsFixedPoint) {
  Grid g(50.0, 1024);
  auto Q = RealField::from_function(g, [](double x) { return 1.5 * sech(x / 2) * sech(x / 2); });
  RealField next = petviashvili_step(Q, {2.0, 2});
  EXPECT_LT((next.v - Q.v).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GroundState, BenjaminOnoAlgebraicProfile) {
  GroundState gs = solve_ground_state({1.0, 2}, Grid(200.0, 4096));
  double err = 0.0;
  for (int j = 0; j < gs.grid.N(); ++j) {
    double x = gs.grid.x(j);
    err = std::max(err, std::abs(gs.Q.v(j) - 2.0 / (1.0 + x * x)));
  }
  EXPECT_LT(err, 1e-3);
}

TEST(GroundState, CollapseAndBudget) {
  EXPECT_THROW(solve_ground_state({2.0, 2}, Grid(50.0, 1024), 1e-30, 5), Error);
  try {
    solve_ground_state({2.0, 2}, Grid(50.0, 1024), 1e-30, 5);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
  }
}

TEST(Scaling, IdentityAmplitudeAndNorm) {
  const auto& fam = kdv_family();
  EXPECT_EQ((scale_to_speed(fam, 1.0).v - fam.ground.Q.v).cwiseAbs().maxCoeff(), 0.0);
  RealField U4 = scale_to_speed(fam, 4.0);
  EXPECT_NEAR(U4.v(fam.ground.grid.N() / 2), 6.0, 1e-8);
  double q2 = std::pow(l2_norm(fam.ground.Q), 2);
  EXPECT_NEAR(q2, 6.0, 1e-10);
  double u2 = std::pow(l2_norm(scale_to_speed(fam, 2.0)), 2);
  EXPECT_NEAR(u2, std::pow(2.0, 1.5) * 6.0, 1e-8 * u2);
  EXPECT_THROW(scale_to_speed(fam, 1e4), Error);
  EXPECT_THROW(scale_to_speed(fam, -1.0), Error);
}

TEST(Functionals, EnergyMomentum) {
  const auto& fam = kdv_family();
  const ModelParams pr{2.0, 2};
  RealField zero(fam.ground.grid);
  EXPECT_EQ(energy(zero, pr), 0.0);
  EXPECT_EQ(momentum(zero), 0.0);
  EXPECT_NEAR(momentum(fam.ground.Q), -3.0, 1e-10);

  auto u = smooth_random(fam.ground.grid, 3);
  EXPECT_NEAR(momentum(translate(u, 1.7)), momentum(u), 1e-12 * std::abs(momentum(u)));

  // refinement oracle: the same profile on a grid twice as fine
  const Grid fine(50.0, 2048);
  auto Qf = RealField::from_function(fine, [](double x) { return 1.5 * sech(x / 2) * sech(x / 2); });
  double Ec = energy(fam.ground.Q, pr), Ef = energy(Qf, pr);
  EXPECT_NEAR(Ec, Ef, 1e-10 * std::abs(Ef));
}

TEST(Functionals, EnergyGradientSecondOrder) {
  const Grid g(20.0, 256);
  for (ModelParams pr : {ModelParams{2.0, 2}, ModelParams{1.0, 3}, ModelParams{0.6, 2}}) {
    auto u = smooth_random(g, 5);
    auto v = smooth_random(g, 6);
    double exact = inner(energy_gradient(u, pr), v);
    double errs[3];
    double hs[3] = {1e-2, 5e-3, 2.5e-3};
    for (int i = 0; i < 3; ++i) {
      double h = hs[i];
      double fd = (energy(u + h * v, pr) - energy(u - h * v, pr)) / (2 * h);
      errs[i] = std::abs(fd - exact);
    }
    double order = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
    EXPECT_GE(order, 1.9) << "alpha=" << pr.alpha << " p=" << pr.p;
  }
}

TEST(MomentOfInstability, DPrimeValues) {
  const auto& fam = kdv_family();
  DPrime d1 = d_prime(fam, 1.0);
  EXPECT_NEAR(d1.closed_form, 3.0, 1e-10);
  EXPECT_NEAR(d1.quadrature, 3.0, 1e-10);
  for (double c : {0.5, 1.0, 2.0, 4.0}) {
    DPrime d = d_prime(fam, c);
    EXPECT_NEAR(d.quadrature, d.closed_form, 1e-8 * d.closed_form) << "c=" << c;
    EXPECT_NEAR(d.closed_form / d1.closed_form, std::pow(c, 1.5), 1e-12 * std::pow(c, 1.5));
  }
  SolitonFamily bo{solve_ground_state({1.0, 2}, Grid(200.0, 4096))};
  EXPECT_NEAR(d_prime(bo, 1.0).quadrature, M_PI, 1e-3 * M_PI);
}

TEST(MomentOfInstability, DSecondValues) {
  const auto& fam = kdv_family();
  EXPECT_NEAR(d_second(fam, 1.0, 1e-3), 4.5, 1e-6 * 4.5);
  SolitonFamily crit{solve_ground_state({1.0, 3}, Grid(100.0, 2048))};
  EXPECT_LT(std::abs(d_second(crit, 1.0, 1e-3)), 1e-8);
  EXPECT_EQ(classify_stability({1.0, 3}), Verdict::Critical);
}

TEST(MomentOfInstability, SignMatrix) {
  struct Case {
    ModelParams pr;
    Grid g;
    Verdict expected;
  };
  const std::vector<Case> cases = {
      {{2.0, 2}, Grid(40.0, 512), Verdict::Stable},    {{2.0, 4}, Grid(40.0, 512), Verdict::Stable},
      {{2.0, 6}, Grid(40.0, 512), Verdict::Unstable},  {{1.0, 2}, Grid(200.0, 4096), Verdict::Stable},
      {{1.0, 3}, Grid(200.0, 4096), Verdict::Critical}, {{0.6, 2}, Grid(200.0, 4096), Verdict::Stable},
      {{0.4, 2}, Grid(200.0, 4096), Verdict::Unstable},
  };
  for (const auto& cs : cases) {
    SCOPED_TRACE("alpha=" + std::to_string(cs.pr.alpha) + " p=" + std::to_string(cs.pr.p));
    EXPECT_EQ(classify_stability(cs.pr), cs.expected);
    SolitonFamily fam{solve_ground_state(cs.pr, cs.g)};
    double num = d_second(fam, 1.0, 1e-3);
    double closed = d_second_closed_form(fam, 1.0);
    double e = cs.pr.scaling_exponent();
    if (cs.expected == Verdict::Critical) {
      EXPECT_LT(std::abs(num), 1e-8);
    } else {
      EXPECT_EQ(num > 0, e > 0);
      EXPECT_NEAR(num, closed, 1e-6 * std::abs(closed));
    }
  }
}

TEST(Linearized, ZeroModeAndDIdentity) {
  const auto& fam = kdv_family();
  const Grid& g = fam.ground.grid;
  const ModelParams pr{2.0, 2};
  for (double c : {1.0, 2.0}) {
    RealField U = scale_to_speed(fam, c, g);
    RealField dU = derivative(U);
    EXPECT_LT(l2_norm(apply_linearized(U, pr, c, dU)), 1e-6 * l2_norm(dU));
    RealField dc = speed_derivative(fam, c, g);
    double q = inner(apply_linearized(U, pr, c, dc), dc);
    double d2 = d_second(fam, c, 1e-3 * c);
    EXPECT_NEAR(q, -d2, 1e-4 * d2) << "c=" << c;
  }
}

TEST(Linearized, MatrixMatchesAction) {
  SolitonFamily fam{solve_ground_state({2.0, 3}, Grid(20.0, 128))};
  const Grid& g = fam.ground.grid;
  OperatorMatrix m = assemble_linearized(fam, 1.5, g);
  EXPECT_LT(m.symmetry_defect, 1e-8);
  RealField U = scale_to_speed(fam, 1.5, g);
  for (unsigned s = 0; s < 3; ++s) {
    auto v = smooth_random(g, 20 + s);
    Vec viaM = m.form * v.v / g.dx();
    RealField direct = apply_linearized(U, fam.ground.params, 1.5, v);
    EXPECT_LT((viaM - direct.v).cwiseAbs().maxCoeff(), 1e-10 * direct.max_norm());
  }
}

TEST(Spectrum, KdvConfiguration) {
  const auto& fam = kdv_family();
  OperatorMatrix m = assemble_linearized(fam, 1.0, fam.ground.grid);
  SpectralReport r = spectral_report(m, fam, 1.0);
  EXPECT_NEAR(r.eigenvalues(0), -1.25, 1e-4);
  EXPECT_LT(std::abs(r.zero_eigenvalue), 1e-6);
  EXPECT_GT(r.zero_alignment, 0.999);
  EXPECT_GE(r.gap, 0.75 - 1e-3);
  EXPECT_EQ(r.negative_count, 1);
  EXPECT_NEAR(r.chi.dot(m.x * r.chi), 1.0, 1e-10);
  EXPECT_EQ(r.verdict, "Stable");

  // mu_c^2 scales linearly in c
  OperatorMatrix m4 = assemble_linearized(fam, 4.0, fam.ground.grid);
  SpectralReport r4 = spectral_report(m4, fam, 4.0);
  EXPECT_NEAR(r4.mu_sq, 4.0 * r.mu_sq, 1e-4 * r4.mu_sq);

  // constrained minimum
  auto cons = fkdv_constraints(fam, 1.0, fam.ground.grid);
  EXPECT_GT(constrained_rayleigh_min(m, cons), 0.0);
  EXPECT_LT(constrained_rayleigh_min(m, {cons[1]}), 0.0);
  double unc = generalized_eigen(m.form, m.l2).values(0);
  EXPECT_NEAR(unc, -1.25, 1e-4);
  EXPECT_THROW(constrained_rayleigh_min(m, {cons[0], 2.0 * cons[0]}), Error);
}

TEST(Spectrum, DoubledResolutionOracle) {
  SolitonFamily coarse{solve_ground_state({2.0, 2}, Grid(30.0, 256))};
  SolitonFamily fine{solve_ground_state({2.0, 2}, Grid(30.0, 512))};
  auto rc = spectral_report(assemble_linearized(coarse, 1.0, coarse.ground.grid), coarse, 1.0);
  auto rf = spectral_report(assemble_linearized(fine, 1.0, fine.ground.grid), fine, 1.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(rc.eigenvalues(i), rf.eigenvalues(i), 1e-6);
}

TEST(Spectrum, ConfigurationAcrossCases) {
  struct Case {
    ModelParams pr;
    Grid g;
  };
  const std::vector<Case> cases = {
      {{2.0, 4}, Grid(20.0, 512)}, {{2.0, 6}, Grid(20.0, 512)}, {{1.0, 2}, Grid(25.0, 1024)},
      {{0.6, 2}, Grid(10.0, 1024)},
  };
  for (const auto& cs : cases) {
    SCOPED_TRACE("alpha=" + std::to_string(cs.pr.alpha) + " p=" + std::to_string(cs.pr.p));
    SolitonFamily fam{solve_ground_state(cs.pr, cs.g)};
    SpectralReport r = spectral_report(assemble_linearized(fam, 1.0, cs.g), fam, 1.0, 8, 1e-6, false);
    EXPECT_TRUE(r.configuration_ok) << r.negative_count << " " << r.near_zero_count << " " << r.gap << " "
                                    << r.zero_eigenvalue;
    EXPECT_GT(r.zero_alignment, 0.99);
  }
}

TEST(Weinstein, InvariancesAndCriticality) {
  const Grid g(40.0, 1024);
  const ModelParams pr{2.0, 3};
  auto f = [](double x) { return std::exp(-x * x / 4.0) * (1.0 + 0.3 * std::sin(x)); };
  auto u = RealField::from_function(g, f);
  EXPECT_NEAR(weinstein(2.0 * u, pr), weinstein(u, pr), 1e-10 * weinstein(u, pr));
  auto u2 = RealField::from_function(g, [&](double x) { return f(2.0 * x); });
  EXPECT_NEAR(weinstein(u2, pr), weinstein(u, pr), 1e-8 * weinstein(u, pr));
  EXPECT_THROW(weinstein(RealField(g), pr), Error);

  SolitonFamily fam{solve_ground_state(pr, g)};
  auto v = smooth_random(g, 10, true);
  double J0 = weinstein(fam.ground.Q, pr);
  double d1 = std::abs(weinstein(fam.ground.Q + 1e-2 * v, pr) - J0);
  double d2 = std::abs(weinstein(fam.ground.Q + 5e-3 * v, pr) - J0);
  EXPECT_NEAR(std::log2(d1 / d2), 2.0, 0.1);
}
