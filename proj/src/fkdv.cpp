#include "hamwave/fkdv.hpp"

#include <cmath>
#include <sstream>

namespace hamwave {

void ModelParams::validate() const {
  if (!(alpha > 1.0 / 3.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "alpha=" << alpha << " outside (1/3, 2]";
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
  if (p <= 1) throw Error(ErrorKind::InvalidParameter, "p must exceed 1");
  if (alpha < 1.0 && !(p < (1.0 + alpha) / (1.0 - alpha))) {
    std::ostringstream os;
    os << "p=" << p << " not below (1+alpha)/(1-alpha)=" << (1.0 + alpha) / (1.0 - alpha);
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

RealField power(const RealField& u, int p) {
  RealField r(u.grid);
  r.v = u.v.array().pow(p);
  return r;
}

namespace {

CVec one_plus_lambda(const Grid& g, double alpha) {
  MultiplierSymbol m;
  m.symbol = [alpha](double k) { return cplx(1.0 + std::pow(std::abs(k), alpha), 0.0); };
  return sample_symbol(g, m);
}

CVec lambda_symbol(const Grid& g, double alpha) {
  return sample_symbol(g, MultiplierSymbol::abs_power(alpha));
}

}  // namespace

double ground_state_residual(const RealField& Q, const ModelParams& params) {
  Vec r = apply_sampled(Q.v, one_plus_lambda(Q.grid, params.alpha)) - Q.v.array().pow(params.p).matrix();
  return std::sqrt(r.squaredNorm() * Q.grid.dx());
}

namespace {

struct StepResult {
  RealField Q;
  double M;
};

StepResult petviashvili_update(const RealField& Q, const ModelParams& params, const CVec& L1) {
  const Grid& g = Q.grid;
  Vec Qp = Q.v.array().pow(params.p);
  CVec Qh = fft::forward(Q.v);
  CVec Qph = fft::forward(Qp);
  double num = fft::backward(CVec(Qh.array() * L1.array()), g.N()).dot(Q.v);
  double den = Qp.dot(Q.v);
  if (!(den > 0.0) || !std::isfinite(num / den))
    throw Error(ErrorKind::CollapseToZero, "stabilizing factor undefined (iterate vanished)");
  double M = num / den;
  double gamma = static_cast<double>(params.p) / (params.p - 1);
  Qph.array() /= L1.array();
  RealField next(g, std::pow(M, gamma) * fft::backward(Qph, g.N()));
  return {symmetrize_even(next), M};
}

}  // namespace

RealField petviashvili_step(const RealField& Q, const ModelParams& params) {
  return petviashvili_update(Q, params, one_plus_lambda(Q.grid, params.alpha)).Q;
}

GroundState solve_ground_state(const ModelParams& params, const Grid& grid, double tol, int max_iter) {
  params.validate();
  const CVec L1 = one_plus_lambda(grid, params.alpha);
  RealField Q = RealField::from_function(grid, [](double x) { return 1.5 * std::exp(-x * x / 4.0); });
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 1; it <= max_iter; ++it) {
    Q = petviashvili_update(Q, params, L1).Q;
    if (Q.max_norm() < 1e-10 || !Q.finite())
      throw Error(ErrorKind::CollapseToZero, "Petviashvili iterates vanished");
    double res = ground_state_residual(Q, params);
    if (res <= tol) return GroundState{params, grid, Q, res, it};
    if (res < 0.99 * best) {
      best = res;
      since_best = 0;
    } else if (++since_best > 200) {
      std::ostringstream os;
      os << "residual stagnated at " << best << " after " << it << " iterations";
      throw Error(ErrorKind::NoConvergence, os.str());
    }
  }
  std::ostringstream os;
  os << "iteration budget " << max_iter << " exhausted, residual " << best;
  throw Error(ErrorKind::NoConvergence, os.str());
}

RealField scale_to_speed(const SolitonFamily& family, double c, const Grid& grid) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidParameter, "speed must be positive");
  const ModelParams& pr = family.ground.params;
  const double stretch = std::pow(c, 1.0 / pr.alpha);
  if (stretch * grid.dx() > family.max_scaled_dx) {
    std::ostringstream os;
    os << "c=" << c << ": effective spacing " << stretch * grid.dx() << " exceeds " << family.max_scaled_dx;
    throw Error(ErrorKind::UnderResolved, os.str());
  }
  if (c == 1.0 && grid == family.ground.grid) return family.ground.Q;
  // Q is treated as vanishing outside its own box.
  RealField U = resample_scaled(family.ground.Q, grid, stretch, false);
  U.v *= std::pow(c, 1.0 / (pr.p - 1));
  return U;
}

RealField scale_to_speed(const SolitonFamily& family, double c) {
  return scale_to_speed(family, c, family.ground.grid);
}

RealField speed_derivative(const SolitonFamily& family, double c, const Grid& grid) {
  const double h = 1e-3 * c;
  RealField d = scale_to_speed(family, c + h, grid) - scale_to_speed(family, c - h, grid);
  d.v /= 2.0 * h;
  return d;
}

double energy(const RealField& u, const ModelParams& params) {
  double lin = sobolev_norm(u, 0.5 * params.alpha, true);
  double nl = u.v.array().pow(params.p + 1).sum() * u.grid.dx() / (params.p + 1);
  return 0.5 * lin * lin - nl;
}

RealField energy_gradient(const RealField& u, const ModelParams& params) {
  RealField r(u.grid, apply_sampled(u.v, lambda_symbol(u.grid, params.alpha)));
  r.v -= u.v.array().pow(params.p).matrix();
  return r;
}

double momentum(const RealField& u) { return -0.5 * u.v.squaredNorm() * u.grid.dx(); }

DPrime d_prime(const SolitonFamily& family, double c) {
  const ModelParams& pr = family.ground.params;
  double q2 = family.ground.Q.v.squaredNorm() * family.ground.grid.dx();
  DPrime d;
  d.closed_form = 0.5 * std::pow(c, pr.scaling_exponent()) * q2;
  d.quadrature = -momentum(scale_to_speed(family, c));
  return d;
}

namespace {

double d_prime_natural_grid(const SolitonFamily& family, double c) {
  const ModelParams& pr = family.ground.params;
  const Grid& g = family.ground.grid;
  Grid gc(g.L() * std::pow(c, -1.0 / pr.alpha), g.N());
  RealField U(gc, std::pow(c, 1.0 / (pr.p - 1)) * family.ground.Q.v);
  return -momentum(U);
}

}  // namespace

double d_second(const SolitonFamily& family, double c, double h) {
  if (!(h > 0.0 && h < 0.5 * c)) throw Error(ErrorKind::InvalidParameter, "need 0 < h < c/2");
  return (d_prime_natural_grid(family, c + h) - d_prime_natural_grid(family, c - h)) / (2.0 * h);
}

double d_second_closed_form(const SolitonFamily& family, double c) {
  const ModelParams& pr = family.ground.params;
  return pr.scaling_exponent() * d_prime(family, c).closed_form / c;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Critical: return "Critical";
  }
  return "Unknown";
}

Verdict classify_stability(const ModelParams& params) {
  params.validate();
  double e = params.scaling_exponent();
  if (std::abs(e) < 1e-12) return Verdict::Critical;
  return e > 0 ? Verdict::Stable : Verdict::Unstable;
}

RealField apply_linearized(const RealField& Uc, const ModelParams& params, double c, const RealField& v) {
  RealField r(v.grid, apply_sampled(v.v, lambda_symbol(v.grid, params.alpha)));
  r.v.array() += (c - params.p * Uc.v.array().pow(params.p - 1)) * v.v.array();
  return r;
}

OperatorMatrix assemble_linearized(const SolitonFamily& family, double c, const Grid& grid) {
  const ModelParams& pr = family.ground.params;
  RealField U = scale_to_speed(family, c, grid);
  const int N = grid.N();
  const double dx = grid.dx();
  const CVec lam = lambda_symbol(grid, pr.alpha);
  const CVec bes = sample_symbol(grid, MultiplierSymbol::bessel_power(pr.alpha));
  const Vec pot = c - pr.p * U.v.array().pow(pr.p - 1);
  Mat A(N, N), S(N, N);
  Vec e = Vec::Zero(N);
  for (int j = 0; j < N; ++j) {
    e(j) = 1.0;
    A.col(j) = apply_sampled(e, lam);
    A(j, j) += pot(j);
    S.col(j) = apply_sampled(e, bes);
    e(j) = 0.0;
  }
  std::ostringstream state;
  state << "alpha=" << pr.alpha << " p=" << pr.p << " c=" << c << " L=" << grid.L() << " N=" << N;
  Mat X = dx * 0.5 * (S + S.transpose());
  return make_operator("H_c", state.str(), dx * A, dx * Mat::Identity(N, N), std::move(X));
}

SpectralReport spectral_report(const OperatorMatrix& matrix, const SolitonFamily& family, double c, int keep,
                               double zero_tol, bool throw_on_violation) {
  // The L2 Gram matrix is dx times the identity, which fixes the grid.
  const int N = static_cast<int>(matrix.dim());
  const Grid& g = family.ground.grid;
  const double dx = matrix.l2(0, 0);
  Grid mg = (N == g.N() && std::abs(dx - g.dx()) < 1e-14 * g.dx()) ? g : Grid(0.5 * dx * N, N);
  RealField dU = derivative(scale_to_speed(family, c, mg));
  SpectralReport rep = analyze_spectrum(matrix, dU.v, SpectralMetric::L2, keep, zero_tol, throw_on_violation);
  rep.verdict = to_string(classify_stability(family.ground.params));
  return rep;
}

double weinstein(const RealField& u, const ModelParams& params) {
  double l2 = l2_norm(u);
  if (l2 == 0.0) throw Error(ErrorKind::ZeroField, "Weinstein functional of the zero field");
  const double a = params.alpha;
  const int p = params.p;
  double hdot = sobolev_norm(u, 0.5 * a, true);
  double lp = u.v.array().abs().pow(p + 1).sum() * u.grid.dx();
  return std::pow(hdot, (p - 1) / a) * std::pow(l2, p + 1 - (p - 1) / a) / lp;
}

std::vector<Vec> fkdv_constraints(const SolitonFamily& family, double c, const Grid& grid) {
  const ModelParams& pr = family.ground.params;
  RealField U = scale_to_speed(family, c, grid);
  RealField n = apply_multiplier(U, MultiplierSymbol::bessel_power(-pr.alpha));
  n.v = -n.v;
  RealField t = derivative(U);
  t.v = -t.v;
  return {n.v, t.v};
}

}  // namespace hamwave
