#include "hamwave/dn.hpp"

#include <cmath>
#include <sstream>

namespace hamwave {

RealField project_mean_nyquist(const RealField& f) {
  CVec fh = fft::forward(f.v);
  fh(0) = 0.0;
  fh(fh.size() - 1) = 0.0;
  return RealField(f.grid, fft::backward(fh, f.grid.N()));
}

DNOperator::DNOperator(const RealField& eta, int M) : eta_(eta), M_(M) {
  if (M < 0) throw Error(ErrorKind::InvalidParameter, "DN expansion order must be >= 0");
  if (!eta.finite()) throw Error(ErrorKind::InvalidParameter, "non-finite surface");
  const Grid& g = eta.grid;
  eta_x_ = derivative(eta).v;
  eta_pow_.resize(M + 1);
  eta_pow_[0] = Vec::Ones(g.N());
  for (int l = 1; l <= M; ++l) eta_pow_[l] = eta_pow_[l - 1].cwiseProduct(eta.v) / l;
  kabs_.resize(g.half());
  for (int n = 0; n < g.half(); ++n) kabs_(n) = g.k_of_mode(n);
  kabs_(g.half() - 1) = 0.0;
}

DNOperator::Expansion DNOperator::expand(const Vec& phi) const {
  const int N = eta_.grid.N();
  const cplx I(0.0, 1.0);
  auto mult = [&](const CVec& h, int power, bool deriv) {
    CVec out = h;
    for (Eigen::Index n = 0; n < h.size(); ++n) {
      double k = kabs_(n);
      cplx m = std::pow(k, power);
      if (deriv) m *= I * k;
      out(n) *= m;
    }
    return fft::backward(out, N);
  };

  Expansion ex;
  ex.psi_hat.resize(M_ + 1);
  // Dp[j][m] = |D|^m psi_j, Dd[j][l] = |D|^l d/dx psi_j
  std::vector<std::vector<Vec>> Dp(M_ + 1), Dd(M_ + 1);
  for (int n = 0; n <= M_; ++n) {
    if (n == 0) {
      ex.psi_hat[0] = fft::forward(phi);
    } else {
      Vec psi = Vec::Zero(N);
      for (int l = 1; l <= n; ++l) psi -= eta_pow_[l].cwiseProduct(Dp[n - l][l]);
      ex.psi_hat[n] = fft::forward(psi);
    }
    ex.psi_hat[n](0) = 0.0;
    ex.psi_hat[n](ex.psi_hat[n].size() - 1) = 0.0;
    Dp[n].resize(M_ - n + 2);
    for (int m = 1; m <= M_ - n + 1; ++m) Dp[n][m] = mult(ex.psi_hat[n], m, false);
    Dd[n].resize(std::max(M_ - n, 0));
    for (int l = 0; l <= M_ - 1 - n; ++l) Dd[n][l] = mult(ex.psi_hat[n], l, true);
  }
  ex.terms.resize(M_ + 1);
  for (int n = 0; n <= M_; ++n) {
    Vec t = Vec::Zero(N);
    for (int j = 0; j <= n; ++j) t += eta_pow_[n - j].cwiseProduct(Dp[j][n - j + 1]);
    if (n >= 1) {
      Vec s = Vec::Zero(N);
      for (int j = 0; j <= n - 1; ++j) s += eta_pow_[n - 1 - j].cwiseProduct(Dd[j][n - 1 - j]);
      t -= eta_x_.cwiseProduct(s);
    }
    ex.terms[n] = std::move(t);
  }
  return ex;
}

void DNOperator::check_terms(const std::vector<Vec>& terms) const {
  const double t0 = terms[0].norm();
  for (size_t n = 2; n < terms.size(); ++n) {
    double prev = terms[n - 1].norm(), cur = terms[n].norm();
    if (prev > 1e-13 * t0 && cur >= prev) {
      std::ostringstream os;
      os << "DN series term " << n << " (" << cur << ") >= term " << n - 1 << " (" << prev << ")";
      throw Error(ErrorKind::ExpansionDiverging, os.str());
    }
  }
}

RealField DNOperator::apply_projected(const RealField& phi) const {
  if (phi.grid != eta_.grid) throw Error(ErrorKind::InvalidParameter, "DN operator: grid mismatch");
  Expansion ex = expand(phi.v);
  check_terms(ex.terms);
  Vec sum = Vec::Zero(phi.v.size());
  for (const Vec& t : ex.terms) sum += t;
  return project_mean_nyquist(RealField(phi.grid, sum));
}

RealField DNOperator::apply(const RealField& phi) const {
  double m = mean(phi);
  if (std::abs(m) > 1e-10 * std::max(phi.max_norm(), 1e-300)) {
    std::ostringstream os;
    os << "DN operator applied to a field with mean " << m;
    throw Error(ErrorKind::NonZeroMean, os.str());
  }
  return apply_projected(phi);
}

std::vector<double> DNOperator::term_norms(const RealField& phi) const {
  Expansion ex = expand(phi.v);
  std::vector<double> out;
  for (const Vec& t : ex.terms) out.push_back(std::sqrt(eta_.grid.dx()) * t.norm());
  return out;
}

Vec2 DNOperator::interior_gradient(const RealField& phi, double x1, double x2) const {
  const Grid& g = eta_.grid;
  if (!(x2 < eta_.v.minCoeff())) throw Error(ErrorKind::InvalidParameter, "interior point above the surface");
  Expansion ex = expand(phi.v);
  check_terms(ex.terms);
  CVec psi = CVec::Zero(g.half());
  for (const CVec& p : ex.psi_hat) psi += p;
  const cplx I(0.0, 1.0);
  cplx gx = 0.0, gy = 0.0;
  for (int n = 1; n < g.half() - 1; ++n) {
    const double k = kabs_(n);
    cplx w = psi(n) * std::exp(k * x2) * std::exp(I * k * (x1 + g.L()));
    gx += I * k * w;
    gy += k * w;
  }
  const double s = 2.0 / g.N();
  return {s * gx.real(), s * gy.real()};
}

Mat DNOperator::matrix() const {
  const int N = eta_.grid.N();
  Mat A(N, N);
  RealField e(eta_.grid);
  for (int j = 0; j < N; ++j) {
    e.v.setZero();
    e.v(j) = 1.0;
    A.col(j) = apply_projected(e).v;
  }
  return A;
}

}  // namespace hamwave
