#include "hamwave/pv_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hamwave {

namespace {

double trap(const Vec& f, double dx) { return dx * f.sum(); }

RealField remove_mean(const RealField& f) {
  RealField out = f;
  out.v.array() -= mean(f);
  return out;
}

void check_admissible(const PVState& u) {
  if (!u.admissible()) {
    std::ostringstream os;
    os << "state outside the admissible set (xbar = " << u.xbar.transpose() << ")";
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

PVState axpy(const PVState& u, const PVState& k, double h) {
  PVState w = u;
  w.eta.v += h * k.eta.v;
  w.phi.v += h * k.phi.v;
  w.xbar += h * k.xbar;
  return w;
}

}  // namespace

PVState pv_rhs(const PVState& u, const PVParams& p, int M) {
  check_admissible(u);
  const Grid& g = u.grid();
  const double eps = p.eps;
  DNOperator G(u.eta, M);
  Vec Gphi = G.apply_projected(u.phi).v;
  Vec ex = derivative(u.eta).v, px = derivative(u.phi).v;
  VortexFields vf(u.xbar);
  SurfaceTraces t = surface_traces(vf, u.eta, ex);

  PVState out(g);
  out.eta.v = Gphi + eps * t.nTheta;

  out.xbar = G.interior_gradient(u.phi, u.xbar(0), u.xbar(1));
  out.xbar(0) -= eps * vf.dtheta2_dx1_at_center();

  Vec j2 = (1.0 + ex.array().square()).matrix();
  Vec curv = derivative(RealField(g, (ex.array() / j2.array().sqrt()).matrix())).v;
  Vec bern = (px.array().square() - 2.0 * ex.array() * px.array() * Gphi.array() - Gphi.array().square()) /
             (2.0 * j2.array());
  out.phi.v = -bern - p.g * u.eta.v + p.b * curv - eps * px.cwiseProduct(t.Tx) -
              0.5 * eps * eps * (t.Tx.array().square() + t.Ty.array().square()).matrix() +
              eps * (out.xbar(0) * t.xi[0] + out.xbar(1) * t.xi[1]);
  out.phi = remove_mean(out.phi);
  return out;
}

PVState apply_poisson(const PVState& u, const PVCovector& w, const PVParams& p) {
  check_admissible(u);
  const Grid& g = u.grid();
  const double eps = p.eps, dx = g.dx();
  double m = mean(w.phi);
  if (std::abs(m) > 1e-10 * std::max(w.phi.max_norm(), 1e-300)) {
    std::ostringstream os;
    os << "Poisson map applied to a covector whose phi part has mean " << m;
    throw Error(ErrorKind::NonZeroMean, os.str());
  }
  if (eps == 0.0 && w.xbar.squaredNorm() > 0.0)
    throw Error(ErrorKind::InvalidParameter, "at eps = 0 the Poisson map has no xbar block");

  Vec ex = derivative(u.eta).v;
  SurfaceTraces t = surface_traces(VortexFields(u.xbar), u.eta, ex);
  const Vec& Tx = t.xi[0];  // Theta_x1 on S
  const Vec& Xy = t.xi[1];  // Xi_x2 on S
  const double a1 = trap(w.phi.v.cwiseProduct(Tx), dx), a2 = trap(w.phi.v.cwiseProduct(Xy), dx);

  PVState out(g);
  out.eta = w.phi;
  out.phi.v = -w.eta.v + eps * (a2 * Tx - a1 * Xy) + w.xbar(1) * Tx - w.xbar(0) * Xy;
  out.phi = remove_mean(out.phi);
  out.xbar = Vec2(a2, -a1);
  if (eps != 0.0) out.xbar += Vec2(w.xbar(1), -w.xbar(0)) / eps;
  return out;
}

PVState pv_hamiltonian_rhs(const PVState& u, const PVParams& p, int M) {
  return apply_poisson(u, pv_gradients(u, p, M).E, p);
}

PVState translation_generator(const PVState& u) {
  PVState out(u.grid());
  out.eta.v = -derivative(u.eta).v;
  out.phi.v = -derivative(u.phi).v;
  out.xbar = Vec2(1.0, 0.0);
  return out;
}

PVState translate(const PVState& u, double s) {
  return PVState(translate(u.eta, s), translate(u.phi, s), u.xbar + Vec2(s, 0.0));
}

PVOrbitalFit pv_orbital_distance(const PVState& u, const PVWave& wave) {
  const Grid& g = u.grid();
  if (g != wave.grid()) throw Error(ErrorKind::InvalidParameter, "pv_orbital_distance: grid mismatch");
  const int N = g.N(), H = g.half();
  const double scale = 2.0 * g.L() / (double(N) * N);
  Vec w1 = sobolev_weights(g, 1.0, false), wh = sobolev_weights(g, 0.5, true);
  CVec eh = fft::forward(u.eta.v), Eh = fft::forward(wave.eta.v);
  CVec ph = fft::forward(u.phi.v), Ph = fft::forward(wave.phi.v);
  // phi is taken modulo constants
  ph(0) = Ph(0) = 0.0;

  auto rho = [&](double s) {
    double ae = 0.0, ap = 0.0;
    for (int n = 0; n < H; ++n) {
      double k = g.k_of_mode(n);
      cplx e = (n == H - 1) ? cplx(std::cos(k * s), 0.0) : std::polar(1.0, -k * s);
      double m = (n == 0 || n == H - 1) ? 1.0 : 2.0;
      ae += m * w1(n) * std::norm(eh(n) * e - Eh(n));
      ap += m * wh(n) * std::norm(ph(n) * e - Ph(n));
    }
    return std::sqrt(std::max(0.0, ae * scale)) + std::sqrt(std::max(0.0, ap * scale)) +
           (u.xbar + Vec2(s, 0.0) - wave.xbar).norm();
  };

  // The xbar term is not periodic in s, so scan one period around the shift that
  // matches the vortex positions.
  const double centre = wave.xbar(0) - u.xbar(0), h = 0.25 * g.dx();
  double best = centre, fbest = rho(centre);
  for (int i = -4 * N; i <= 4 * N; ++i) {
    double s = centre + i * h, f = rho(s);
    if (f < fbest) fbest = f, best = s;
  }
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best - h, hi = best + h;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo), f1 = rho(x1), f2 = rho(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(best)); ++it) {
    if (f1 < f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - gr * (hi - lo), f1 = rho(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + gr * (hi - lo), f2 = rho(x2);
    }
  }
  PVOrbitalFit fit;
  fit.shift = 0.5 * (lo + hi);
  fit.distance = rho(fit.shift);
  if (fbest < fit.distance) fit.distance = fbest, fit.shift = best;
  return fit;
}

void PVEvolutionConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidParameter, "dt must be >= 0");
  if (!(T_final > 0.0) || !std::isfinite(T_final)) throw Error(ErrorKind::InvalidParameter, "T must be > 0");
  if (stride < 1) throw Error(ErrorKind::InvalidParameter, "stride must be >= 1");
  if (M < 0) throw Error(ErrorKind::InvalidParameter, "M must be >= 0");
  if (!(exclusion > 0.0 && exclusion < 1.0)) throw Error(ErrorKind::InvalidParameter, "exclusion must lie in (0, 1)");
  if (!(blowup_factor > 1.0)) throw Error(ErrorKind::InvalidParameter, "blowup_factor must exceed 1");
}

double pv_default_dt(const Grid& g, const PVParams& params) {
  return 0.1 * std::pow(g.dx(), 1.5) / std::sqrt(params.b);
}

double vortex_surface_separation(const PVState& u) {
  const Grid& g = u.grid();
  double d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.N(); ++j) {
    double x = g.x(j) - u.xbar(0);
    // nearest periodic image of the vortex column
    x -= 2.0 * g.L() * std::round(x / (2.0 * g.L()));
    d = std::min({d, std::hypot(x, u.eta.v(j) - u.xbar(1)), std::hypot(x, u.eta.v(j) + u.xbar(1))});
  }
  return d;
}

std::vector<PVTrajectorySample> pv_evolve(const PVState& u0, const PVParams& p, const PVEvolutionConfig& cfg,
                                          const PVWave* wave) {
  p.validate();
  cfg.validate();
  check_admissible(u0);
  const Grid& g = u0.grid();
  const double dt0 = cfg.dt > 0.0 ? cfg.dt : pv_default_dt(g, p);
  const int steps = std::max(1, int(std::ceil(cfg.T_final / dt0 - 1e-9)));
  const double dt = cfg.T_final / steps;
  const double depth = -u0.xbar(1);
  const double min_sep = cfg.exclusion * depth;
  const double ceiling = cfg.blowup_factor * std::max(u0.eta.max_norm(), depth);

  std::vector<PVTrajectorySample> out;
  auto sample = [&](const PVState& u, double t) {
    PVTrajectorySample s;
    s.t = t;
    s.E = pv_energy(u, p, cfg.M);
    s.P = pv_momentum(u, p, cfg.M);
    s.xbar = u.xbar;
    if (wave) {
      PVOrbitalFit f = pv_orbital_distance(u, *wave);
      s.rho = f.distance;
      s.shift = f.shift;
    }
    if (cfg.keep_states) s.state = u;
    out.push_back(std::move(s));
  };

  if (double sep = vortex_surface_separation(u0); sep < min_sep) {
    std::ostringstream os;
    os << "initial vortex-surface separation " << sep << " below " << min_sep;
    throw Error(ErrorKind::AdmissibilityLost, os.str());
  }
  PVState u = u0;
  u.phi = remove_mean(u.phi);
  sample(u, 0.0);
  for (int n = 1; n <= steps; ++n) {
    PVState k1 = pv_rhs(u, p, cfg.M);
    PVState k2 = pv_rhs(axpy(u, k1, 0.5 * dt), p, cfg.M);
    PVState k3 = pv_rhs(axpy(u, k2, 0.5 * dt), p, cfg.M);
    PVState k4 = pv_rhs(axpy(u, k3, dt), p, cfg.M);
    u.eta.v += dt / 6.0 * (k1.eta.v + 2.0 * k2.eta.v + 2.0 * k3.eta.v + k4.eta.v);
    u.phi.v += dt / 6.0 * (k1.phi.v + 2.0 * k2.phi.v + 2.0 * k3.phi.v + k4.phi.v);
    u.xbar += dt / 6.0 * (k1.xbar + 2.0 * k2.xbar + 2.0 * k3.xbar + k4.xbar);
    const double t = n * dt;

    if (!u.eta.finite() || !u.phi.finite() || !u.xbar.allFinite() || u.eta.max_norm() > ceiling) {
      std::ostringstream os;
      os << "surface amplitude left the ceiling " << ceiling << " at t = " << t;
      throw Error(ErrorKind::BlowupDetected, os.str());
    }
    double sep = vortex_surface_separation(u);
    if (!u.admissible() || sep < min_sep) {
      std::ostringstream os;
      os << "vortex-surface separation " << sep << " below " << min_sep << " at t = " << t;
      throw Error(ErrorKind::AdmissibilityLost, os.str());
    }
    if (n % cfg.stride == 0 || n == steps) sample(u, t);
  }
  return out;
}

void write_pv_trajectory_csv(const std::string& path, const std::vector<PVTrajectorySample>& samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  out << std::setprecision(17) << "t,E,P,xbar1,xbar2,rho,shift\n";
  for (const auto& s : samples)
    out << s.t << ',' << s.E << ',' << s.P << ',' << s.xbar(0) << ',' << s.xbar(1) << ',' << s.rho << ',' << s.shift
        << '\n';
}

}  // namespace hamwave
