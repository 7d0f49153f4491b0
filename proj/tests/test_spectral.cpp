#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "hamwave/spectral.hpp"

using namespace hamwave;

namespace {

// Random real trigonometric polynomial with modes |n| <= nmax.
RealField random_band_limited(const Grid& g, int nmax, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> a(nmax + 1), b(nmax + 1);
  for (int n = 0; n <= nmax; ++n) {
    a[n] = nd(rng) / (1.0 + n);
    b[n] = nd(rng) / (1.0 + n);
  }
  return RealField::from_function(g, [&](double x) {
    double s = a[0];
    for (int n = 1; n <= nmax; ++n) s += a[n] * std::cos(g.k_of_mode(n) * x) + b[n] * std::sin(g.k_of_mode(n) * x);
    return s;
  });
}

RealField zero_mean(RealField f) {
  f.v.array() -= f.v.mean();
  return f;
}

// Direct O(N^2) DFT coefficient of mode n, phases relative to x_0 = -L.
cplx direct_dft(const Vec& f, int n) {
  const int N = static_cast<int>(f.size());
  cplx s = 0.0;
  for (int j = 0; j < N; ++j) s += f(j) * std::polar(1.0, -2.0 * M_PI * n * j / N);
  return s;
}

}  // namespace

TEST(Grid, Invariants) {
  Grid g(10.0, 64);
  EXPECT_DOUBLE_EQ(g.dx() * g.N(), 20.0);
  Vec k = g.wavenumbers();
  for (int i = 1; i < g.N(); ++i) EXPECT_GT(k(i), k(i - 1));
  EXPECT_DOUBLE_EQ(k(0), -M_PI * 32 / 10.0);
  EXPECT_THROW(Grid(1.0, 7), Error);
  EXPECT_THROW(Grid(1.0, 6), Error);
  EXPECT_THROW(Grid(-1.0, 16), Error);
}

TEST(Transform, PureCosineHitsSinglePair) {
  Grid g(5.0, 64);
  auto f = RealField::from_function(g, [&](double x) { return std::cos(M_PI * x / g.L()); });
  SpectralField s = transform(f);
  double top = s.c.cwiseAbs().maxCoeff();
  for (int n = -32; n < 32; ++n) {
    if (std::abs(n) == 1)
      EXPECT_NEAR(std::abs(s.at(n)), 32.0, 1e-12);
    else
      EXPECT_LT(std::abs(s.at(n)) / top, 1e-13);
  }
  EXPECT_LT(s.hermitian_defect(), 1e-12);
}

TEST(Transform, RoundtripAndParseval) {
  Grid g(30.0, 512);
  auto f = random_band_limited(g, 40, 7);
  RealField back = inverse(transform(f));
  EXPECT_LT((back.v - f.v).cwiseAbs().maxCoeff() / f.max_norm(), 1e-12);

  auto sech = RealField::from_function(g, [](double x) { return 1.0 / std::cosh(x); });
  SpectralField s = transform(sech);
  double lhs = sech.v.squaredNorm() * g.dx();
  double rhs = s.c.squaredNorm() * 2.0 * g.L() / (double(g.N()) * g.N());
  EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
  EXPECT_NEAR(lhs, 2.0, 1e-12);  // int sech^2 = 2
}

TEST(Multiplier, AbsoluteValueAndDerivativeOnPureModes) {
  Grid g(4.0, 64);
  const double k = M_PI / g.L() * 3;
  auto c = RealField::from_function(g, [&](double x) { return std::cos(k * x); });
  auto s = RealField::from_function(g, [&](double x) { return std::sin(k * x); });
  RealField a = apply_multiplier(c, MultiplierSymbol::abs_power(1.0));
  EXPECT_LT((a.v - k * c.v).cwiseAbs().maxCoeff(), 1e-12 * k);
  RealField d = apply_multiplier(s, MultiplierSymbol::derivative());
  EXPECT_LT((d.v - k * c.v).cwiseAbs().maxCoeff(), 1e-12 * k);
}

TEST(Multiplier, AbsIsHilbertOfDerivative) {
  Grid g(10.0, 256);
  auto f = random_band_limited(g, 60, 11);
  RealField direct = apply_multiplier(f, MultiplierSymbol::abs_power(1.0));
  RealField composed = apply_multiplier(apply_multiplier(f, MultiplierSymbol::derivative()), MultiplierSymbol::hilbert());
  EXPECT_LT((direct.v - composed.v).cwiseAbs().maxCoeff() / direct.max_norm(), 1e-12);
}

TEST(Multiplier, ZeroModePolicies) {
  Grid g(10.0, 64);
  auto f = RealField::from_function(g, [&](double x) { return 1.0 + std::cos(M_PI * x / g.L()); });
  EXPECT_THROW(apply_multiplier(f, MultiplierSymbol::abs_power(-1.0)), Error);
  try {
    apply_multiplier(f, MultiplierSymbol::abs_power(-1.0));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroModeRejected);
  }
  MultiplierSymbol m = MultiplierSymbol::bessel_power(2.0);
  m.zero_mode = ZeroModePolicy::zero;
  RealField z = apply_multiplier(f, m);
  EXPECT_LT(std::abs(mean(z)), 1e-14);
  RealField e = apply_multiplier(f, MultiplierSymbol::bessel_power(2.0));
  EXPECT_NEAR(mean(e), 1.0, 1e-14);
  RealField zm = zero_mean(f);
  EXPECT_NO_THROW(apply_multiplier(zm, MultiplierSymbol::abs_power(-1.0)));
}

TEST(Multiplier, AdjointnessAndComposition) {
  Grid g(10.0, 128);
  auto f = random_band_limited(g, 50, 1);
  auto h = random_band_limited(g, 50, 2);
  auto even = MultiplierSymbol::bessel_power(1.3);
  auto odd = MultiplierSymbol::derivative();
  double scale = l2_norm(f) * l2_norm(h);
  EXPECT_NEAR(inner(apply_multiplier(f, even), h), inner(f, apply_multiplier(h, even)), 1e-12 * scale * 10);
  EXPECT_NEAR(inner(apply_multiplier(f, odd), h), -inner(f, apply_multiplier(h, odd)), 1e-12 * scale * 30);

  MultiplierSymbol prod;
  prod.symbol = [](double k) { return cplx(0.0, k) * std::pow(1.0 + k * k, 0.65); };
  prod.odd = true;
  RealField two = apply_multiplier(apply_multiplier(f, even), odd);
  RealField one = apply_multiplier(f, prod);
  EXPECT_LT((two.v - one.v).cwiseAbs().maxCoeff() / one.max_norm(), 1e-12);
}

TEST(Sobolev, ZeroSingleModeAndSech) {
  Grid g(50.0, 1024);
  RealField z(g);
  for (double s : {-1.0, 0.0, 0.5, 1.0, 2.0}) EXPECT_EQ(sobolev_norm(z, s, false), 0.0);

  const double k = M_PI / g.L() * 5;
  auto c = RealField::from_function(g, [&](double x) { return std::cos(k * x); });
  double l2 = l2_norm(c);
  for (double s : {-0.5, 0.5, 1.0, 1.5}) {
    double hs = sobolev_norm(c, s, true);
    EXPECT_NEAR(hs * hs, std::pow(k, 2 * s) * l2 * l2, 1e-12 * hs * hs);
  }

  auto sech = RealField::from_function(g, [](double x) { return 1.0 / std::cosh(x); });
  EXPECT_NEAR(sobolev_norm(sech, 1.0, false), std::sqrt(8.0 / 3.0), 1e-12);
  EXPECT_THROW(sobolev_norm(sech, -0.5, true), Error);
}

TEST(Translate, GroupLaws) {
  Grid g(8.0, 128);
  auto f = random_band_limited(g, 40, 3);
  EXPECT_LT((translate(f, 0.0).v - f.v).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((translate(f, 2 * g.L()).v - f.v).cwiseAbs().maxCoeff() / f.max_norm(), 1e-12);
  RealField ab = translate(translate(f, 0.37), 1.91);
  RealField direct = translate(f, 2.28);
  EXPECT_LT((ab.v - direct.v).cwiseAbs().maxCoeff() / f.max_norm(), 1e-12);
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    double n0 = sobolev_norm(f, s, false);
    EXPECT_NEAR(sobolev_norm(translate(f, 1.234), s, false), n0, 1e-12 * n0);
  }
  // A grid-aligned shift is an index rotation.
  RealField r = translate(f, 3 * g.dx());
  EXPECT_NEAR(r.v(10), f.v(7), 1e-12 * f.max_norm());
}

TEST(Dealias, IdempotentAndFineGridProduct) {
  Grid g(10.0, 256);
  auto f = random_band_limited(g, 120, 4);
  RealField d = dealias(f);
  EXPECT_LT((dealias(d).v - d.v).cwiseAbs().maxCoeff(), 1e-14);
  auto b = random_band_limited(g, g.dealias_cutoff(), 5);
  EXPECT_LT((dealias(b).v - b.v).cwiseAbs().maxCoeff() / b.max_norm(), 1e-13);

  // Product of two band-limited fields: exact coefficients from a 2N grid by direct DFT.
  auto h = random_band_limited(g, g.dealias_cutoff(), 6);
  RealField prod(g, b.v.cwiseProduct(h.v));
  SpectralField coarse = transform(dealias(prod));
  Grid fine(g.L(), 2 * g.N());
  auto bf = resample_scaled(b, fine, 1.0);
  auto hf = resample_scaled(h, fine, 1.0);
  Vec pf = bf.v.cwiseProduct(hf.v);
  double scale = coarse.c.cwiseAbs().maxCoeff();
  for (int n = 0; n <= g.dealias_cutoff(); n += 7) {
    cplx exact = direct_dft(pf, n) / 2.0;  // same continuum coefficient on a grid twice as fine
    EXPECT_LT(std::abs(coarse.at(n) - exact) / scale, 1e-12) << "mode " << n;
  }
}

TEST(Symmetry, EvenOddProjections) {
  Grid g(6.0, 64);
  auto f = random_band_limited(g, 20, 8);
  RealField e = symmetrize_even(f), o = symmetrize_odd(f);
  EXPECT_LT(even_defect(e), 1e-15);
  EXPECT_LT(odd_defect(o), 1e-15);
  EXPECT_LT((e.v + o.v - f.v).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Io, CsvRoundtrip) {
  Grid g(3.0, 16);
  auto f = random_band_limited(g, 5, 9);
  std::string path = ::testing::TempDir() + "field.csv";
  write_csv(path, f);
  RealField r = read_csv(path);
  EXPECT_EQ(r.grid, g);
  EXPECT_EQ((r.v - f.v).cwiseAbs().maxCoeff(), 0.0);
  write_spectrum_csv(::testing::TempDir() + "spec.csv", transform(f));
  std::remove(path.c_str());
}
