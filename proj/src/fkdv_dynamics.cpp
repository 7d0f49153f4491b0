#include "hamwave/fkdv_dynamics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace hamwave {

void EvolutionConfig::validate() const {
  if (dt < 0.0 || !std::isfinite(dt)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
  if (!(T_final > 0.0)) throw Error(ErrorKind::InvalidParameter, "T_final must be positive");
  if (dt > 0.0 && T_final < dt) throw Error(ErrorKind::InvalidParameter, "T_final must be at least dt");
  if (stride < 1) throw Error(ErrorKind::InvalidParameter, "stride must be >= 1");
  if (integrator != "etdrk4") throw Error(ErrorKind::InvalidParameter, "unknown integrator " + integrator);
}

double default_dt(const Grid& g, double alpha) { return 0.2 * std::pow(g.dx(), alpha); }

namespace {

CVec dispersion_symbol(const Grid& g, double alpha) {
  MultiplierSymbol m;
  m.symbol = [alpha](double k) { return cplx(0.0, k * std::pow(std::abs(k), alpha)); };
  m.odd = true;
  return sample_symbol(g, m);
}

// -i k on the retained band, zero above the 2/3 cutoff when dealiasing.
CVec nonlinear_symbol(const Grid& g, bool dealias) {
  CVec s = sample_symbol(g, MultiplierSymbol::derivative());
  s = -s;
  if (dealias)
    for (int n = g.dealias_cutoff() + 1; n < g.half(); ++n) s(n) = 0.0;
  return s;
}

double band_fraction(const CVec& vh, const Grid& g) {
  const int H = g.half();
  double total = 0.0, band = 0.0;
  for (int n = 0; n < H; ++n) {
    double w = (n == 0 || n == H - 1) ? 1.0 : 2.0;
    double e = w * std::norm(vh(n));
    total += e;
    if (n > g.N() / 4 && n <= g.dealias_cutoff()) band += e;
  }
  return total > 0 ? band / total : 0.0;
}

}  // namespace

RealField rhs(const RealField& u, const ModelParams& params, bool dealias) {
  const Grid& g = u.grid;
  CVec uh = fft::forward(u.v);
  CVec ph = fft::forward(Vec(u.v.array().pow(params.p)));
  CVec out = dispersion_symbol(g, params.alpha).array() * uh.array() +
             nonlinear_symbol(g, dealias).array() * ph.array();
  return RealField(g, fft::backward(out, g.N()));
}

OrbitalFit orbital_distance(const RealField& u, const RealField& U, double s) {
  const Grid& g = u.grid;
  if (g != U.grid) throw Error(ErrorKind::InvalidParameter, "orbital_distance: grid mismatch");
  const int N = g.N(), H = g.half();
  const double scale = 2.0 * g.L() / (double(N) * N);
  Vec w = sobolev_weights(g, s, false);
  CVec uh = fft::forward(u.v), Uh = fft::forward(U.v);
  // C_n = w_n u_n conj(U_n); the Nyquist term is left out of the fit.
  CVec C(H);
  for (int n = 0; n < H; ++n) C(n) = (n == 0 ? 1.0 : 2.0) * w(n) * uh(n) * std::conj(Uh(n));
  C(H - 1) = 0.0;

  // corr(sigma_m) = Re sum_n C_n exp(-i k_n sigma_m), sigma_m = m dx.
  CVec Cfull = C;
  Cfull(0) *= 2.0;  // backward() doubles paired modes only
  Vec corr = fft::backward(CVec(Cfull.conjugate()), N) * (N / 2.0);
  Eigen::Index m;
  corr.maxCoeff(&m);
  double sigma = m * g.dx();
  if (sigma > g.L()) sigma -= 2.0 * g.L();
  const double coarse = sigma;

  auto derivs = [&](double sg, double& d1, double& d2) {
    d1 = d2 = 0.0;
    for (int n = 1; n < H - 1; ++n) {
      double k = g.k_of_mode(n);
      cplx t = C(n) * std::polar(1.0, -k * sg);
      d1 += (cplx(0.0, -k) * t).real();
      d2 += (-k * k * t).real();
    }
  };
  // Orthogonality residual scale: ||U'||_X ||U||_X.
  double ref = 0.0;
  for (int n = 1; n < H - 1; ++n) {
    double k = g.k_of_mode(n);
    ref += 2.0 * w(n) * k * k * std::norm(Uh(n));
  }
  ref = std::sqrt(ref) * std::sqrt(std::abs(corr.maxCoeff())) + 1e-300;

  OrbitalFit fit;
  bool converged = false;
  for (int it = 0; it < 30; ++it) {
    double d1, d2;
    derivs(sigma, d1, d2);
    if (std::abs(d1) <= 1e-14 * ref) {
      converged = true;
      break;
    }
    if (!(d2 < 0.0)) break;
    double step = -d1 / d2;
    if (std::abs(step) > 2.0 * g.dx()) step = std::copysign(2.0 * g.dx(), step);
    sigma += step;
    if (std::abs(sigma - coarse) > 4.0 * g.dx()) break;
  }
  if (!converged) {
    double d1, d2;
    derivs(sigma, d1, d2);
    converged = std::abs(d1) <= 1e-10 * ref;
  }
  if (!converged) {
    sigma = coarse;
    fit.newton_stall = true;
  }
  fit.shift = sigma;
  double acc = 0.0;
  for (int n = 0; n < H; ++n) {
    double k = g.k_of_mode(n);
    cplx ph = (n == H - 1) ? cplx(std::cos(k * sigma), 0.0) : std::polar(1.0, -k * sigma);
    double wt = (n == 0 || n == H - 1) ? 1.0 : 2.0;
    acc += wt * w(n) * std::norm(uh(n) * ph - Uh(n));
  }
  fit.distance = std::sqrt(std::max(0.0, acc * scale));
  return fit;
}

namespace {

struct Etd {
  CVec E, E2, Q, f1, f2, f3;
};

Etd etd_coefficients(const CVec& Lsym, double h) {
  const int H = static_cast<int>(Lsym.size());
  const int M = 64;
  Etd c{CVec(H), CVec(H), CVec(H), CVec(H), CVec(H), CVec(H)};
  for (int n = 0; n < H; ++n) {
    cplx Lh = h * Lsym(n);
    c.E(n) = std::exp(Lh);
    c.E2(n) = std::exp(0.5 * Lh);
    cplx q = 0, a = 0, b = 0, d = 0;
    for (int j = 0; j < M; ++j) {
      cplx z = Lh + std::polar(1.0, 2.0 * M_PI * (j + 0.5) / M);
      cplx ez = std::exp(z), z3 = z * z * z;
      q += (std::exp(0.5 * z) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (z - 2.0)) / z3;
      d += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    c.Q(n) = h * q / double(M);
    c.f1(n) = h * a / double(M);
    c.f2(n) = h * b / double(M);
    c.f3(n) = h * d / double(M);
    // Real-valued operators: keep the exact zero mode.
    if (Lsym(n) == cplx(0.0, 0.0)) {
      c.Q(n) = 0.5 * h;
      c.f1(n) = h / 6.0;
      c.f2(n) = h / 6.0;
      c.f3(n) = h / 6.0;
    }
  }
  return c;
}

}  // namespace

std::vector<TrajectorySample> evolve(const RealField& u0, const ModelParams& params, const EvolutionConfig& config,
                                     const RealField* reference, const SampleObserver& observer) {
  config.validate();
  params.validate();
  const Grid& g = u0.grid;
  if (!u0.finite()) throw Error(ErrorKind::InvalidParameter, "initial data not finite");
  if (spectral_tail_fraction(u0) > 1e-8)
    throw Error(ErrorKind::ResolutionLoss, "initial data carries more than 1e-8 of its energy above N/3");

  const double dt0 = config.dt > 0.0 ? config.dt : default_dt(g, params.alpha);
  const long nsteps = std::max(1L, std::lround(std::ceil(config.T_final / dt0 - 1e-9)));
  const double h = config.T_final / nsteps;
  const CVec Lsym = dispersion_symbol(g, params.alpha);
  const CVec Nsym = nonlinear_symbol(g, config.dealias);
  const Etd c = etd_coefficients(Lsym, h);
  const double ceiling = config.blowup_factor * std::max(u0.max_norm(), 1e-300);
  const int N = g.N();
  const int p = params.p;

  auto Nh = [&](const CVec& vh) {
    Vec v = fft::backward(vh, N);
    CVec r = fft::forward(Vec(v.array().pow(p)));
    return CVec(Nsym.array() * r.array());
  };

  std::vector<TrajectorySample> out;
  auto sample = [&](double t, const CVec& vh) {
    TrajectorySample s;
    s.t = t;
    RealField u(g, fft::backward(vh, N));
    s.E = energy(u, params);
    s.P = momentum(u);
    s.mass = integral(u);
    if (reference) {
      OrbitalFit f = orbital_distance(u, *reference, 0.5 * params.alpha);
      s.rho = f.distance;
      s.shift = f.shift;
      s.newton_stall = f.newton_stall;
    }
    if (config.keep_fields) s.u = std::move(u);
    out.push_back(s);
    return observer ? observer(out.back()) : true;
  };

  CVec v = fft::forward(u0.v);
  if (!sample(0.0, v)) return out;
  for (long step = 1; step <= nsteps; ++step) {
    CVec Nv = Nh(v);
    CVec a = c.E2.array() * v.array() + c.Q.array() * Nv.array();
    CVec Na = Nh(a);
    CVec b = c.E2.array() * v.array() + c.Q.array() * Na.array();
    CVec Nb = Nh(b);
    CVec cc = c.E2.array() * a.array() + c.Q.array() * (2.0 * Nb.array() - Nv.array());
    CVec Nc = Nh(cc);
    v = c.E.array() * v.array() + c.f1.array() * Nv.array() + 2.0 * c.f2.array() * (Na.array() + Nb.array()) +
        c.f3.array() * Nc.array();

    const double t = step * h;
    if (step % config.stride == 0 || step == nsteps) {
      Vec u = fft::backward(v, N);
      if (!u.allFinite() || u.cwiseAbs().maxCoeff() > ceiling) {
        std::ostringstream os;
        os << "max norm exceeded " << ceiling << " at t=" << t;
        throw Error(ErrorKind::BlowupDetected, os.str());
      }
      double tail = band_fraction(v, g);
      if (tail > config.tail_threshold) {
        std::ostringstream os;
        os << "spectral band fraction " << tail << " at t=" << t;
        throw Error(ErrorKind::ResolutionLoss, os.str());
      }
      if (!sample(t, v)) return out;
    }
  }
  return out;
}

std::string to_string(PerturbationDirection d) {
  return d == PerturbationDirection::RandomEven ? "random_even" : "negative_mode";
}

std::string to_string(ExperimentVerdict v) {
  switch (v) {
    case ExperimentVerdict::Bounded: return "Bounded";
    case ExperimentVerdict::Escaped: return "Escaped";
    case ExperimentVerdict::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

RealField random_even_direction(const Grid& g, double alpha, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int K = 4;
  double amp[K], ctr[K], wid[K];
  for (int i = 0; i < K; ++i) {
    amp[i] = 2.0 * uni(rng) - 1.0;
    ctr[i] = 4.0 * uni(rng);
    wid[i] = 1.0 + uni(rng);
  }
  RealField d = RealField::from_function(g, [&](double x) {
    double s = 0.0;
    for (int i = 0; i < K; ++i) {
      double a = (x - ctr[i]) / wid[i], b = (x + ctr[i]) / wid[i];
      s += amp[i] * (std::exp(-a * a) + std::exp(-b * b));
    }
    return s;
  });
  d = symmetrize_even(d);
  d.v /= sobolev_norm(d, 0.5 * alpha, false);
  return d;
}

ExperimentReport stability_experiment(const SolitonFamily& family, double c, const ExperimentConfig& config,
                                      const SpectralReport* spectrum) {
  if (!(config.delta >= 0.0)) throw Error(ErrorKind::InvalidParameter, "delta must be nonnegative");
  const ModelParams& pr = family.ground.params;
  const Grid& g = family.ground.grid;
  RealField U = scale_to_speed(family, c, g);

  RealField dir(g);
  if (config.direction == PerturbationDirection::RandomEven) {
    dir = random_even_direction(g, pr.alpha, config.seed);
  } else {
    if (!spectrum || spectrum->chi.size() != g.N())
      throw Error(ErrorKind::InvalidParameter, "negative_mode direction needs a spectral report on the family grid");
    dir = RealField(g, spectrum->chi);
    if (inner(dir, U) < 0) dir.v = -dir.v;
  }

  ExperimentReport rep;
  rep.params = pr;
  rep.c = c;
  rep.config = config;
  const double escape = config.K_escape * config.delta;
  bool escaped = false;
  auto observer = [&](const TrajectorySample& s) {
    rep.sup_rho = std::max(rep.sup_rho, s.rho);
    rep.t_end = s.t;
    if (config.delta > 0 && s.rho > escape) {
      escaped = true;
      rep.t_exit = s.t;
      return false;
    }
    return true;
  };
  RealField u0 = U + config.delta * dir;
  try {
    rep.trajectory = evolve(u0, pr, config.evolution, &U, observer);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BlowupDetected) throw;
    rep.blowup = true;
    escaped = true;
    rep.reason = e.what();
  }
  if (escaped) {
    rep.verdict = ExperimentVerdict::Escaped;
    if (rep.reason.empty()) rep.reason = "orbital distance exceeded K_escape*delta";
  } else if (rep.sup_rho < config.K_stable * std::max(config.delta, 1e-300) || config.delta == 0.0) {
    rep.verdict = ExperimentVerdict::Bounded;
    rep.reason = "orbital distance stayed below K_stable*delta";
  } else {
    rep.verdict = ExperimentVerdict::Indeterminate;
    rep.reason = "orbital distance between the two thresholds";
  }
  return rep;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectorySample>& samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  out << std::setprecision(17) << "t,E,P,mass,rho,shift\n";
  for (const auto& s : samples)
    out << s.t << ',' << s.E << ',' << s.P << ',' << s.mass << ',' << s.rho << ',' << s.shift << '\n';
}

}  // namespace hamwave
