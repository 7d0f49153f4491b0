#include "hamwave/pv.hpp"

#include <cmath>
#include <sstream>

namespace hamwave {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

double trap(const Vec& f, double dx) { return dx * f.sum(); }

Vec ddx(const Vec& f, const Grid& g) { return derivative(RealField(g, f)).v; }

/// Everything evaluated along the surface of a state.
struct Surface {
  VortexFields vf;
  DNOperator G;
  Vec ex;       ///< eta'
  Vec px;       ///< phi'
  Vec Gphi;
  SurfaceTraces tr;

  Surface(const PVState& u, int M)
      : vf(u.xbar), G(u.eta, M), ex(ddx(u.eta.v, u.grid())), px(ddx(u.phi.v, u.grid())),
        Gphi(G.apply(u.phi).v), tr(surface_traces(vf, u.eta, ex)) {}
};

void require_admissible(const PVState& u) {
  if (!u.admissible()) {
    std::ostringstream os;
    os << "state outside the admissible set (xbar = " << u.xbar.transpose() << ")";
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

Vec eta_gradient(const PVState& u, const Surface& s, const PVParams& p) {
  const Grid& g = u.grid();
  const double eps = p.eps;
  Vec j2 = (1.0 + s.ex.array().square()).matrix();
  Vec kin = (s.px.array().square() - 2.0 * s.ex.array() * s.px.array() * s.Gphi.array() - s.Gphi.array().square()) /
            (2.0 * j2.array());
  Vec curv = ddx((s.ex.array() / j2.array().sqrt()).matrix(), g);
  Vec grad2 = (s.tr.Tx.array().square() + s.tr.Ty.array().square()).matrix();
  return kin + p.g * u.eta.v - p.b * curv + eps * s.px.cwiseProduct(s.tr.Tx) + 0.5 * eps * eps * grad2;
}

}  // namespace

void PVParams::validate() const {
  if (!(g > 0) || !(b > 0) || !(a > 0)) throw Error(ErrorKind::InvalidParameter, "g, b, a must be positive");
  if (!std::isfinite(eps) || std::abs(eps) > eps_ceiling) {
    std::ostringstream os;
    os << "|eps| = " << std::abs(eps) << " above the small-amplitude ceiling " << eps_ceiling;
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

bool PVState::admissible() const {
  if (!(xbar(1) < 0)) return false;
  double e = evaluate_at(eta, xbar(0));
  return xbar(1) < e && e < -xbar(1);
}

double PVCovector::pair(const PVState& u) const {
  const double dx = eta.grid.dx();
  return dx * eta.v.dot(u.eta.v) + dx * phi.v.dot(u.phi.v) + xbar.dot(u.xbar);
}

double PVCovector::dual_norm() const {
  double a = sobolev_norm(eta, -1.0, false);
  double b = sobolev_norm(project_mean_nyquist(phi), -0.5, true);
  return std::sqrt(a * a + b * b + xbar.squaredNorm());
}

// ---------------------------------------------------------------------------
// eta2

RealField eta2_spectral(const Grid& grid, double a, double g, double b) {
  auto rhs = RealField::from_function(grid, [a](double x) {
    double d = x * x + a * a;
    return (x * x - a * a) / (d * d) / (4.0 * M_PI * M_PI);
  });
  // Same discrete second derivative as the residual (two first derivatives, so the
  // Nyquist mode sees g alone).
  CVec h = fft::forward(rhs.v);
  for (int n = 0; n < h.size(); ++n) {
    double k = n + 1 < h.size() ? grid.k_of_mode(n) : 0.0;
    h(n) /= g + b * k * k;
  }
  return RealField(grid, fft::backward(h, grid.N()));
}

cplx neg_exp_E1(cplx z) {
  if (z.real() <= 0.0 && z.imag() == 0.0) throw Error(ErrorKind::InvalidParameter, "E1 branch cut");
  if (std::abs(z) <= 8.0) {
    // (gamma + log z) e^z - sum_k H_k z^k / k!
    cplx term = 1.0, sum = 0.0;
    double H = 0.0;
    for (int k = 1; k < 200; ++k) {
      term *= z / double(k);
      H += 1.0 / k;
      cplx t = H * term;
      sum += t;
      if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return (kEulerGamma + std::log(z)) * std::exp(z) - sum;
  }
  // Even continued fraction, modified Lentz:
  // e^z E1(z) = 1/(z+1-) 1/(z+3-) 4/(z+5-) 9/(z+7-) ...
  const double tiny = 1e-300;
  cplx bb = z + 1.0;
  cplx C = 1.0 / tiny, D = 1.0 / bb, h = D;
  for (int i = 1; i < 100000; ++i) {
    double an = -double(i) * i;
    bb += 2.0;
    D = 1.0 / (an * D + bb);
    C = bb + an / C;
    cplx del = C * D;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return -h;
  }
  throw Error(ErrorKind::NoConvergence, "E1 continued fraction");
}

double eta2_closed_form(double x, double a, double g, double b) {
  const double s = std::sqrt(g / b);
  cplx w(s * x, s * a);
  cplx val = 0.5 * (neg_exp_E1(w) + neg_exp_E1(-w));
  return val.real() / (4.0 * M_PI * M_PI * b);
}

PVWave asymptotic_guess(const PVParams& params, const Grid& grid) {
  params.validate();
  PVWave w(grid);
  w.params = params;
  w.eta = params.eps * params.eps * eta2_spectral(grid, params.a, params.g, params.b);
  w.c = -params.eps / (4.0 * M_PI * params.a);
  w.xbar = Vec2(0.0, -params.a);
  return w;
}

// ---------------------------------------------------------------------------
// residuals and Newton

double PVResidual::max_norm() const { return std::max({F1.max_norm(), F2.max_norm(), std::abs(F3)}); }

PVResidual residual_F(const PVWave& wave, int M) {
  PVState u = wave.state();
  require_admissible(u);
  const PVParams& p = wave.params;
  Surface s(u, M);
  const double eps = p.eps, c = wave.c;
  PVResidual r{RealField(wave.grid()), RealField(wave.grid()), 0.0};
  r.F1.v = eta_gradient(u, s, p) - c * s.px - eps * c * s.tr.Tx;
  r.F2.v = c * s.ex + s.Gphi + eps * s.tr.nTheta;
  Vec2 grad = s.G.interior_gradient(u.phi, u.xbar(0), u.xbar(1));
  r.F3 = c - grad(0) + eps * s.vf.dtheta2_dx1_at_center();
  return r;
}

namespace {

struct Reduction {
  int N, h;
  std::vector<int> even, odd;
  explicit Reduction(int n) : N(n), h(n / 2) {
    for (int j = h; j < N; ++j) even.push_back(j);
    even.push_back(0);
    for (int j = h + 1; j < N; ++j) odd.push_back(j);
  }
  int size() const { return int(even.size() + odd.size()) + 1; }

  Vec pack(const PVWave& w) const {
    Vec z(size());
    int k = 0;
    for (int j : even) z(k++) = w.eta.v(j);
    for (int j : odd) z(k++) = w.phi.v(j);
    z(k) = w.c;
    return z;
  }
  void unpack(const Vec& z, PVWave& w) const {
    int k = 0;
    for (int j : even) {
      w.eta.v(j) = z(k);
      w.eta.v((N - j) % N) = z(k);
      ++k;
    }
    w.phi.v.setZero();
    for (int j : odd) {
      w.phi.v(j) = z(k);
      w.phi.v(N - j) = -z(k);
      ++k;
    }
    w.c = z(k);
  }
  Vec residual(const PVWave& w, int M) const {
    PVResidual r = residual_F(w, M);
    Vec out(size());
    int k = 0;
    for (int j : even) out(k++) = r.F1.v(j);
    for (int j : odd) out(k++) = r.F2.v(j);
    out(k) = r.F3;
    return out;
  }
};

void record_residuals(PVWave& w, int M) {
  PVResidual r = residual_F(w, M);
  w.res_F1 = r.F1.max_norm();
  w.res_F2 = r.F2.max_norm();
  w.res_F3 = std::abs(r.F3);
}

}  // namespace

PVWave solve_traveling_wave(const PVParams& params, const Grid& grid, const NewtonOptions& opt,
                            const PVWave* initial) {
  params.validate();
  if (grid.dx() > 0.5 * std::min(params.a, std::sqrt(params.b / params.g))) {
    std::ostringstream os;
    os << "grid spacing " << grid.dx() << " does not resolve min(a, sqrt(b/g))";
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
  PVWave w = initial ? *initial : asymptotic_guess(params, grid);
  w.params = params;
  w.M = opt.M;
  w.xbar = Vec2(0.0, -params.a);
  if (w.grid() != grid) throw Error(ErrorKind::InvalidParameter, "initial wave on a different grid");
  w.eta = symmetrize_even(w.eta);
  w.phi = symmetrize_odd(w.phi);

  Reduction red(grid.N());
  Vec z = red.pack(w);
  red.unpack(z, w);
  Vec R = red.residual(w, opt.M);
  double rn = R.cwiseAbs().maxCoeff();
  int it = 0;
  while (rn > opt.tol) {
    if (it >= opt.max_iter) {
      std::ostringstream os;
      os << "Newton: residual " << rn << " after " << it << " steps";
      throw Error(ErrorKind::NoConvergence, os.str());
    }
    const int n = red.size();
    Mat J(n, n);
    PVWave wp = w;
    for (int i = 0; i < n; ++i) {
      Vec zp = z;
      zp(i) += opt.fd_step;
      red.unpack(zp, wp);
      J.col(i) = (red.residual(wp, opt.M) - R) / opt.fd_step;
    }
    Eigen::PartialPivLU<Mat> lu(J);
    if (!(lu.rcond() > 1e-14)) {
      std::ostringstream os;
      os << "Newton Jacobian reciprocal condition " << lu.rcond();
      throw Error(ErrorKind::JacobianSingular, os.str());
    }
    Vec dz = lu.solve(-R);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 12; ++k, lambda *= 0.5) {
      Vec zt = z + lambda * dz;
      red.unpack(zt, wp);
      if (!wp.state().admissible()) continue;
      Vec Rt;
      try {
        Rt = red.residual(wp, opt.M);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ExpansionDiverging) continue;
        throw;
      }
      double rt = Rt.cwiseAbs().maxCoeff();
      if (rt < rn) {
        z = zt;
        R = Rt;
        rn = rt;
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted) {
      std::ostringstream os;
      os << "Newton: no decrease from residual " << rn << " at step " << it;
      throw Error(ErrorKind::NoConvergence, os.str());
    }
    red.unpack(z, w);
  }
  w.newton_steps = it;
  record_residuals(w, opt.M);
  return w;
}

// ---------------------------------------------------------------------------
// energy, momentum, gradients

double pv_energy(const PVState& u, const PVParams& p, int M) {
  require_admissible(u);
  Surface s(u, M);
  const double dx = u.grid().dx(), eps = p.eps;
  double K0 = 0.5 * trap(u.phi.v.cwiseProduct(s.Gphi), dx);
  double K1 = trap(u.phi.v.cwiseProduct(s.tr.nTheta), dx);
  double K2 = 0.5 * (trap(s.tr.Theta.cwiseProduct(s.tr.nTheta), dx) + s.vf.gamma2_at_center());
  Vec v = 0.5 * p.g * u.eta.v.array().square() + p.b * ((1.0 + s.ex.array().square()).sqrt() - 1.0);
  return K0 + eps * K1 + eps * eps * K2 + trap(v, dx);
}

double pv_momentum(const PVState& u, const PVParams& p, int M) {
  require_admissible(u);
  Vec ex = ddx(u.eta.v, u.grid());
  VortexFields vf(u.xbar);
  SurfaceTraces tr = surface_traces(vf, u.eta, ex);
  (void)M;
  return p.eps * u.xbar(1) - trap(ex.cwiseProduct(u.phi.v + p.eps * tr.Theta), u.grid().dx());
}

PVGradients pv_gradients(const PVState& u, const PVParams& p, int M) {
  require_admissible(u);
  const Grid& g = u.grid();
  const double dx = g.dx(), eps = p.eps;
  Surface s(u, M);
  const SurfaceTraces& t = s.tr;
  PVGradients out{PVCovector(g), PVCovector(g)};
  out.E.eta.v = eta_gradient(u, s, p);
  out.E.phi = project_mean_nyquist(RealField(g, s.Gphi + eps * t.nTheta));
  for (int i = 0; i < 2; ++i) {
    Vec nthx = t.Theta.cwiseProduct(t.nxi[i]) + t.xi[i].cwiseProduct(t.nTheta);
    out.E.xbar(i) = -0.5 * eps * eps * trap(nthx, dx) - eps * trap(u.phi.v.cwiseProduct(t.nxi[i]), dx);
  }
  out.E.xbar(1) -= eps * eps * s.vf.dtheta2_dx1_at_center();

  out.P.eta.v = s.px + eps * t.Tx;
  out.P.phi = project_mean_nyquist(RealField(g, -s.ex));
  out.P.xbar = Vec2(0.0, eps);
  for (int i = 0; i < 2; ++i) out.P.xbar(i) += eps * trap(s.ex.cwiseProduct(t.xi[i]), dx);
  return out;
}

// ---------------------------------------------------------------------------
// d''

double pv_d_second(const PVParams& params, const Grid& grid, const NewtonOptions& opt, double h_rel) {
  params.validate();
  const double h = h_rel * params.a;
  PVParams pp = params, pm = params;
  pp.a += h;
  pm.a -= h;
  if (!(pm.a > 0)) throw Error(ErrorKind::InvalidParameter, "a - h_a must stay positive");
  PVWave w0 = solve_traveling_wave(params, grid, opt);
  PVWave wp = solve_traveling_wave(pp, grid, opt, &w0);
  PVWave wm = solve_traveling_wave(pm, grid, opt, &w0);
  PVState du(grid);
  du.eta.v = (wp.eta.v - wm.eta.v) / (2 * h);
  du.phi.v = (wp.phi.v - wm.phi.v) / (2 * h);
  du.xbar = Vec2(0.0, -1.0);
  double dc = (wp.c - wm.c) / (2 * h);
  PVGradients gr = pv_gradients(w0.state(), params, opt.M);
  return -gr.P.pair(du) / dc;
}

// ---------------------------------------------------------------------------
// H_c

namespace {

Mat derivative_matrix(const Grid& g) {
  const int N = g.N();
  Mat D(N, N);
  RealField e(g);
  for (int j = 0; j < N; ++j) {
    e.v.setZero();
    e.v(j) = 1.0;
    D.col(j) = derivative(e).v;
  }
  return D;
}

Mat multiplier_matrix(const Grid& g, const MultiplierSymbol& m) {
  const int N = g.N();
  Mat A(N, N);
  RealField e(g);
  for (int j = 0; j < N; ++j) {
    e.v.setZero();
    e.v(j) = 1.0;
    A.col(j) = apply_multiplier(e, m).v;
  }
  return A;
}

Mat phi_basis(const Grid& g) {
  const int N = g.N();
  Mat B(N, N - 2);
  const double s = std::sqrt(2.0 / N);
  for (int n = 1; n < N / 2; ++n) {
    const double k = g.k_of_mode(n);
    for (int j = 0; j < N; ++j) {
      B(j, 2 * n - 2) = s * std::cos(k * g.x(j));
      B(j, 2 * n - 1) = s * std::sin(k * g.x(j));
    }
  }
  return B;
}

Eigen::Matrix2d sym2(const std::array<double, 3>& e) {
  Eigen::Matrix2d m;
  m << e[0], e[1], e[1], e[2];
  return m;
}

}  // namespace

Vec PVLinearization::to_coords(const PVState& du) const {
  const int N = du.grid().N();
  Vec q(2 * N - 1);
  q.head(N - 1) = eta_basis.transpose() * du.eta.v;
  q.segment(N - 1, N - 2) = phi_basis.transpose() * du.phi.v;
  q.tail(2) = du.xbar;
  return q;
}

PVState PVLinearization::from_coords(const Vec& q, const Grid& g) const {
  const int N = g.N();
  PVState u(g);
  u.eta.v = eta_basis * q.head(N - 1);
  u.phi.v = phi_basis * q.segment(N - 1, N - 2);
  u.xbar = q.tail(2);
  return u;
}

PVLinearization assemble_pv_Hc(const PVWave& wave, int M, A33Form form) {
  const Grid& g = wave.grid();
  const int N = g.N();
  const double dx = g.dx(), eps = wave.params.eps, c = wave.c;
  const PVParams& p = wave.params;
  PVState u0 = wave.state();
  require_admissible(u0);

  PVLinearization lin;
  lin.phi_basis = phi_basis(g);
  const Mat& B = lin.phi_basis;
  lin.eta_basis.resize(N, N - 1);
  lin.eta_basis.col(0).setConstant(1.0 / std::sqrt(double(N)));
  lin.eta_basis.rightCols(N - 2) = B;

  DNOperator G(u0.eta, M);
  Mat Gm = G.matrix();
  Mat Gb = B.transpose() * Gm * B;
  lin.dn_symmetry_defect = (Gb - Gb.transpose()).cwiseAbs().maxCoeff() / Gb.cwiseAbs().maxCoeff();
  Gb = (0.5 * (Gb + Gb.transpose())).eval();
  Eigen::LLT<Mat> Gchol(Gb);
  if (Gchol.info() != Eigen::Success) throw Error(ErrorKind::SpectralConfigViolation, "DN matrix not positive");
  auto Ginv = [&](const Vec& f) -> Vec { return B * Gchol.solve(B.transpose() * f); };

  // phi_* = -G^-1 (c eta' + eps grad_perp Theta)
  Vec ex = ddx(u0.eta.v, g);
  VortexFields vf(u0.xbar);
  SurfaceTraces t = surface_traces(vf, u0.eta, ex);
  PVState us = u0;
  us.phi.v = -Ginv(c * ex + eps * t.nTheta);
  Vec px = ddx(us.phi.v, g);
  Vec Gphi = G.apply_projected(us.phi).v;

  Vec j2 = (1.0 + ex.array().square()).matrix();
  Vec a2 = ((Gphi + ex.cwiseProduct(px)).array() / j2.array()).matrix();
  Vec a1 = px - ex.cwiseProduct(a2);
  Vec b1 = a1 + eps * t.Tx - c * Vec::Ones(N);
  Vec b2 = a2 + eps * t.Ty;
  Vec b2x = ddx(b2, g);

  Mat Dx = derivative_matrix(g);

  // L v = G(a2 eta) + (b1 eta)' + eps grad_perp xi . xbar
  Mat Lm(N, N + 2);
  Lm.leftCols(N) = Gm * a2.asDiagonal() + Dx * b1.asDiagonal();
  for (int i = 0; i < 2; ++i) Lm.col(N + i) = eps * t.nxi[i];
  Mat Lb = B.transpose() * Lm;
  Mat W = Gchol.solve(Lb);

  // A(v)
  Mat A = Mat::Zero(N + 2, N + 2);
  Vec wcurv = (p.b / j2.array().pow(1.5)).matrix();
  Mat DB1 = Dx * b1.asDiagonal();
  Mat GinvDB1(N, N);
  {
    Mat coeff = Gchol.solve(B.transpose() * DB1);
    GinvDB1 = B * coeff;
  }
  A.topLeftCorner(N, N) = dx * (Mat((p.g * Vec::Ones(N) + b2x.cwiseProduct(b1)).asDiagonal()) +
                                Dx.transpose() * wcurv.asDiagonal() * Dx - DB1.transpose() * GinvDB1);
  std::array<Vec, 2> Ginv_nxi;
  for (int i = 0; i < 2; ++i) {
    Ginv_nxi[i] = Ginv(t.nxi[i]);
    Vec col = eps * dx * b1.cwiseProduct(ddx(Ginv_nxi[i], g) - t.txi[i]);
    A.block(0, N + i, N, 1) = col;
    A.block(N + i, 0, 1, N) = col.transpose();
  }

  // D^2_xbar E_c(u_*)
  // Hessian in xbar of the point term Gamma2(xbar)/2, with the mirror moving along.
  // Twice the spatial Hessian of Gamma2 at xbar would add eps^2/(4 pi xbar2^2) in the
  // (1,1) entry, which breaks translation invariance (it vanishes identically at a flat surface).
  Eigen::Matrix2d hess_gamma = Eigen::Matrix2d::Zero();
  hess_gamma(1, 1) = -1.0 / (8.0 * M_PI * u0.xbar(1) * u0.xbar(1));
  std::array<double, 3> phiterm{}, thetaterm{};
  for (int e = 0; e < 3; ++e) {
    phiterm[e] = trap(Gphi.cwiseProduct(t.D2Theta[e]) + px.cwiseProduct(t.D2Gamma[e]), dx);
    thetaterm[e] = trap(t.nTheta.cwiseProduct(t.D2Theta[e]) + t.tTheta.cwiseProduct(t.D2Gamma[e]), dx);
  }
  Eigen::Matrix2d nxi_xi, nxi_Ginv;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      nxi_xi(i, j) = 0.5 * trap(t.nxi[i].cwiseProduct(t.xi[j]) + t.nxi[j].cwiseProduct(t.xi[i]), dx);
      nxi_Ginv(i, j) = 0.5 * trap(t.nxi[i].cwiseProduct(Ginv_nxi[j]) + t.nxi[j].cwiseProduct(Ginv_nxi[i]), dx);
    }
  Eigen::Matrix2d D2E = 2 * eps * eps * hess_gamma - eps * sym2(phiterm) + eps * eps * nxi_xi -
                        0.5 * eps * eps * sym2(thetaterm);
  lin.A33_general = D2E - eps * eps * nxi_Ginv;
  lin.A33_simplified = 2 * eps * eps * hess_gamma - eps * sym2(phiterm) + eps * eps * (nxi_xi - nxi_Ginv);
  bool symmetric = std::abs(u0.xbar(0)) == 0.0 && even_defect(u0.eta) < 1e-10;
  lin.used_simplified = form == A33Form::Simplified || (form == A33Form::Auto && symmetric);
  lin.A33 = lin.used_simplified ? lin.A33_simplified : lin.A33_general;
  A.bottomRightCorner(2, 2) = lin.A33;

  // Full form in (eta, beta, xbar) coordinates. The eta Nyquist mode is left out:
  // the curvature term cannot see it, so it would only add a spurious eigenvalue
  // g / (1 + k_Nyq^2) near zero.
  const int nv = N + 1, nb = N - 2, n = nv + nb;
  Mat V = Mat::Zero(N + 2, nv);
  V.topLeftCorner(N, N - 1) = lin.eta_basis;
  V.bottomRightCorner(2, 2).setIdentity();
  Mat F = Mat::Zero(n, n);
  std::vector<int> vi(nv);
  for (int j = 0; j < N - 1; ++j) vi[j] = j;
  vi[N - 1] = n - 2;
  vi[N] = n - 1;
  Mat LbV = Lb * V;
  Mat Fvv = V.transpose() * (A + dx * Lb.transpose() * W) * V;
  Mat Fvb = -dx * LbV.transpose();
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) F(vi[i], vi[j]) = Fvv(i, j);
    for (int k = 0; k < nb; ++k) {
      F(vi[i], N - 1 + k) = Fvb(i, k);
      F(N - 1 + k, vi[i]) = Fvb(i, k);
    }
  }
  F.block(N - 1, N - 1, nb, nb) = dx * Gb;

  // X: dx (1 + k^2) on eta, dx |k| on beta, identity on xbar; the bases are l2-orthonormal.
  Mat X = Mat::Zero(n, n), L2 = Mat::Zero(n, n);
  X(0, 0) = dx;
  for (int k = 0; k < nb; ++k) {
    const double kn = g.k_of_mode(k / 2 + 1);
    X(1 + k, 1 + k) = dx * (1.0 + kn * kn);
    X(N - 1 + k, N - 1 + k) = dx * kn;
  }
  X.bottomRightCorner(2, 2).setIdentity();
  L2.diagonal().head(n - 2).setConstant(dx);
  L2.diagonal().tail(2).setOnes();

  std::ostringstream st;
  st << "eps=" << eps << " a=" << -u0.xbar(1) << " c=" << c;
  lin.op = make_operator("pv_Hc", st.str(), F, L2, X);

  PVState gen(g);
  gen.eta.v = -ex;
  gen.phi.v = -ddx(u0.phi.v, g);
  gen.xbar = Vec2(1.0, 0.0);
  lin.generator = lin.to_coords(gen);

  PVGradients gr = pv_gradients(u0, p, M);
  lin.momentum_covector.resize(n);
  lin.momentum_covector.head(N - 1) = dx * lin.eta_basis.transpose() * gr.P.eta.v;
  lin.momentum_covector.segment(N - 1, N - 2) = dx * B.transpose() * gr.P.phi.v;
  lin.momentum_covector.tail(2) = gr.P.xbar;
  return lin;
}

std::vector<Vec> pv_constraints(const PVLinearization& lin) {
  Vec c1 = lin.op.x.ldlt().solve(lin.momentum_covector);
  return {c1, lin.generator};
}

SpectralReport pv_spectral_report(const PVLinearization& lin, const PVWave& wave, double zero_tol,
                                  bool throw_on_violation) {
  (void)wave;
  SpectralReport rep = analyze_spectrum(lin.op, lin.generator, SpectralMetric::X, 8, zero_tol, throw_on_violation);
  if (rep.configuration_ok) {
    double m = constrained_rayleigh_min(lin.op, pv_constraints(lin));
    rep.verdict = m > 0 ? "Stable" : "Inconclusive";
  } else {
    rep.verdict = "ConfigurationViolated";
  }
  return rep;
}

}  // namespace hamwave
