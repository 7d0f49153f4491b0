#include "hamwave/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

namespace hamwave {

namespace {

struct Plans {
  fftw_plan r2c;
  fftw_plan c2r;
};

// The FFTW planner is not re-entrant; execution with the new-array interface is.
const Plans& plans_for(int N) {
  static std::mutex mu;
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(N);
  fftw_complex* out = fftw_alloc_complex(N / 2 + 1);
  Plans p;
  p.r2c = fftw_plan_dft_r2c_1d(N, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_1d(N, out, in, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  return cache.emplace(N, p).first->second;
}

}  // namespace

Grid::Grid(double L, int N) : L_(L), N_(N), dx_(2.0 * L / N) {
  if (!(L > 0.0) || !std::isfinite(L))
    throw Error(ErrorKind::InvalidParameter, "grid half-length must be positive");
  if (N < 8 || N % 2 != 0)
    throw Error(ErrorKind::InvalidParameter, "grid size must be even and >= 8");
}

double Grid::k_of_mode(int n) const { return M_PI * n / L_; }

Vec Grid::points() const {
  Vec x(N_);
  for (int j = 0; j < N_; ++j) x(j) = this->x(j);
  return x;
}

Vec Grid::wavenumbers() const {
  Vec k(N_);
  for (int i = 0; i < N_; ++i) k(i) = k_of_mode(i - N_ / 2);
  return k;
}

RealField::RealField(const Grid& g, Vec values) : grid(g), v(std::move(values)) {
  if (v.size() != g.N()) throw Error(ErrorKind::InvalidParameter, "sample count does not match grid");
}

RealField RealField::from_function(const Grid& g, const std::function<double(double)>& f) {
  RealField r(g);
  for (int j = 0; j < g.N(); ++j) r.v(j) = f(g.x(j));
  return r;
}

RealField& RealField::operator+=(const RealField& o) {
  v += o.v;
  return *this;
}
RealField& RealField::operator-=(const RealField& o) {
  v -= o.v;
  return *this;
}
RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }

double SpectralField::hermitian_defect() const {
  const int N = grid.N();
  double scale = c.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (int n = 1; n < N / 2; ++n) d = std::max(d, std::abs(at(-n) - std::conj(at(n))));
  d = std::max(d, std::abs(at(0).imag()));
  d = std::max(d, std::abs(at(-N / 2).imag()));
  return d / scale;
}

MultiplierSymbol MultiplierSymbol::abs_power(double s) {
  MultiplierSymbol m;
  if (s == 0.0) {
    m.symbol = [](double) { return cplx(1.0, 0.0); };
    return m;
  }
  m.symbol = [s](double k) { return cplx(std::pow(std::abs(k), s), 0.0); };
  m.zero_mode = s < 0 ? ZeroModePolicy::reject : ZeroModePolicy::evaluate;
  return m;
}

MultiplierSymbol MultiplierSymbol::bessel_power(double s) {
  MultiplierSymbol m;
  m.symbol = [s](double k) { return cplx(std::pow(1.0 + k * k, 0.5 * s), 0.0); };
  return m;
}

MultiplierSymbol MultiplierSymbol::derivative() {
  MultiplierSymbol m;
  m.symbol = [](double k) { return cplx(0.0, k); };
  m.odd = true;
  return m;
}

MultiplierSymbol MultiplierSymbol::hilbert() {
  MultiplierSymbol m;
  m.symbol = [](double k) { return cplx(0.0, k > 0 ? -1.0 : (k < 0 ? 1.0 : 0.0)); };
  m.odd = true;
  return m;
}

namespace fft {

CVec forward(const Vec& f) {
  const int N = static_cast<int>(f.size());
  CVec out(N / 2 + 1);
  fftw_execute_dft_r2c(plans_for(N).r2c, const_cast<double*>(f.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Vec backward(const CVec& fh, int N) {
  CVec tmp = fh;  // c2r overwrites its input
  Vec out(N);
  fftw_execute_dft_c2r(plans_for(N).c2r, reinterpret_cast<fftw_complex*>(tmp.data()), out.data());
  out /= static_cast<double>(N);
  return out;
}

}  // namespace fft

CVec sample_symbol(const Grid& g, const MultiplierSymbol& m) {
  const int H = g.half();
  CVec mh(H);
  for (int n = 0; n < H; ++n) mh(n) = m.symbol(g.k_of_mode(n));
  if (m.zero_mode != ZeroModePolicy::evaluate) mh(0) = 0.0;
  if (m.odd) mh(H - 1) = 0.0;
  // The Nyquist coefficient of a real field is real; keep the symbol real there.
  mh(H - 1) = cplx(mh(H - 1).real(), 0.0);
  return mh;
}

Vec apply_sampled(const Vec& f, const CVec& mh) {
  CVec fh = fft::forward(f);
  fh.array() *= mh.array();
  return fft::backward(fh, static_cast<int>(f.size()));
}

SpectralField transform(const RealField& f) {
  const int N = f.grid.N();
  CVec fh = fft::forward(f.v);
  SpectralField s{f.grid, CVec(N)};
  for (int n = 0; n <= N / 2; ++n) {
    if (n < N / 2) s.c(n + N / 2) = fh(n);
    if (n > 0) s.c(-n + N / 2) = std::conj(fh(n));
  }
  return s;
}

RealField inverse(const SpectralField& s) {
  const int N = s.grid.N();
  CVec fh(N / 2 + 1);
  for (int n = 0; n < N / 2; ++n) fh(n) = s.at(n);
  fh(N / 2) = cplx(s.at(-N / 2).real(), 0.0);
  return RealField(s.grid, fft::backward(fh, N));
}

double mean(const RealField& f) { return f.v.mean(); }

void require_zero_mean(const RealField& f, const char* where) {
  if (std::abs(mean(f)) > tol::zero_mode * std::max(f.max_norm(), 1e-300))
    throw Error(ErrorKind::ZeroModeRejected, std::string(where) + ": input has nonzero mean");
}

RealField apply_multiplier(const RealField& f, const MultiplierSymbol& m) {
  if (m.zero_mode == ZeroModePolicy::reject && f.max_norm() > 0.0) require_zero_mean(f, "apply_multiplier");
  return RealField(f.grid, apply_sampled(f.v, sample_symbol(f.grid, m)));
}

Vec sobolev_weights(const Grid& g, double s, bool homogeneous) {
  const int H = g.half();
  Vec w(H);
  for (int n = 0; n < H; ++n) {
    double k = g.k_of_mode(n);
    if (homogeneous)
      w(n) = (n == 0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(std::abs(k), 2.0 * s);
    else
      w(n) = std::pow(1.0 + k * k, s);
  }
  return w;
}

namespace {

double weighted_sum(const CVec& a, const CVec& b, const Vec& w, const Grid& g) {
  const int H = g.half();
  double acc = w(0) * (a(0) * std::conj(b(0))).real();
  for (int n = 1; n < H - 1; ++n) acc += 2.0 * w(n) * (a(n) * std::conj(b(n))).real();
  acc += w(H - 1) * (a(H - 1) * std::conj(b(H - 1))).real();
  return acc * 2.0 * g.L() / (static_cast<double>(g.N()) * g.N());
}

}  // namespace

double sobolev_inner(const RealField& f, const RealField& g, double s, bool homogeneous) {
  if (homogeneous && s < 0) {
    require_zero_mean(f, "sobolev_inner");
    require_zero_mean(g, "sobolev_inner");
  }
  Vec w = sobolev_weights(f.grid, s, homogeneous);
  return weighted_sum(fft::forward(f.v), fft::forward(g.v), w, f.grid);
}

double sobolev_norm(const RealField& f, double s, bool homogeneous) {
  if (homogeneous && s < 0) require_zero_mean(f, "sobolev_norm");
  Vec w = sobolev_weights(f.grid, s, homogeneous);
  CVec fh = fft::forward(f.v);
  return std::sqrt(std::max(0.0, weighted_sum(fh, fh, w, f.grid)));
}

RealField translate(const RealField& f, double s) {
  const Grid& g = f.grid;
  CVec fh = fft::forward(f.v);
  const int H = g.half();
  for (int n = 0; n < H - 1; ++n) fh(n) *= std::polar(1.0, -g.k_of_mode(n) * s);
  fh(H - 1) *= std::cos(g.k_of_mode(H - 1) * s);
  return RealField(g, fft::backward(fh, g.N()));
}

RealField dealias(const RealField& f) {
  CVec fh = fft::forward(f.v);
  for (int n = f.grid.dealias_cutoff() + 1; n < fh.size(); ++n) fh(n) = 0.0;
  return RealField(f.grid, fft::backward(fh, f.grid.N()));
}

double spectral_tail_fraction(const RealField& f) {
  CVec fh = fft::forward(f.v);
  const int H = f.grid.half();
  double total = 0.0, tail = 0.0;
  for (int n = 0; n < H; ++n) {
    double w = (n == 0 || n == H - 1) ? 1.0 : 2.0;
    double e = w * std::norm(fh(n));
    total += e;
    if (n > f.grid.dealias_cutoff()) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

RealField derivative(const RealField& f) { return apply_multiplier(f, MultiplierSymbol::derivative()); }

double integral(const RealField& f) { return f.v.sum() * f.grid.dx(); }

double inner(const RealField& f, const RealField& g) { return f.v.dot(g.v) * f.grid.dx(); }

double l2_norm(const RealField& f) { return std::sqrt(inner(f, f)); }

namespace {

double interpolate(const CVec& fh, const Grid& g, double x) {
  const int N = g.N();
  const int H = g.half();
  double xi = x + g.L();
  // exp(i k_n xi) by rotation; the accumulated drift is O(N eps).
  const cplx step = std::polar(1.0, g.k_of_mode(1) * xi);
  cplx rot = step;
  double acc = fh(0).real();
  for (int n = 1; n < H - 1; ++n) {
    acc += 2.0 * (fh(n) * rot).real();
    rot *= step;
  }
  acc += fh(H - 1).real() * std::cos(g.k_of_mode(H - 1) * xi);
  return acc / N;
}

}  // namespace

double evaluate_at(const RealField& f, double x) { return interpolate(fft::forward(f.v), f.grid, x); }

RealField resample_scaled(const RealField& f, const Grid& target, double scale, bool periodic) {
  CVec fh = fft::forward(f.v);
  RealField out(target);
  for (int j = 0; j < target.N(); ++j) {
    double y = scale * target.x(j);
    out.v(j) = (periodic || std::abs(y) <= f.grid.L()) ? interpolate(fh, f.grid, y) : 0.0;
  }
  return out;
}

namespace {
inline int mirror(int j, int N) { return (N - j) % N; }
}  // namespace

double even_defect(const RealField& f) {
  const int N = f.grid.N();
  double d = 0.0;
  for (int j = 0; j < N; ++j) d = std::max(d, std::abs(f.v(j) - f.v(mirror(j, N))));
  double s = f.max_norm();
  return s > 0 ? d / s : 0.0;
}

double odd_defect(const RealField& f) {
  const int N = f.grid.N();
  double d = 0.0;
  for (int j = 0; j < N; ++j) d = std::max(d, std::abs(f.v(j) + f.v(mirror(j, N))));
  double s = f.max_norm();
  return s > 0 ? d / s : 0.0;
}

RealField symmetrize_even(const RealField& f) {
  const int N = f.grid.N();
  RealField r(f.grid);
  for (int j = 0; j < N; ++j) r.v(j) = 0.5 * (f.v(j) + f.v(mirror(j, N)));
  return r;
}

RealField symmetrize_odd(const RealField& f) {
  const int N = f.grid.N();
  RealField r(f.grid);
  for (int j = 0; j < N; ++j) r.v(j) = 0.5 * (f.v(j) - f.v(mirror(j, N)));
  return r;
}

void write_csv(const std::string& path, const RealField& f) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  out << std::setprecision(17) << "x,value\n";
  for (int j = 0; j < f.grid.N(); ++j) out << f.grid.x(j) << ',' << f.v(j) << '\n';
}

void write_spectrum_csv(const std::string& path, const SpectralField& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  out << std::setprecision(17) << "n,re,im\n";
  const int N = s.grid.N();
  for (int n = -N / 2; n < N / 2; ++n) out << n << ',' << s.at(n).real() << ',' << s.at(n).imag() << '\n';
}

RealField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,value", 0) != 0) throw Error(ErrorKind::IoError, path + ": expected header x,value");
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, v;
    char comma;
    if (!(ss >> x >> comma >> v) || comma != ',') throw Error(ErrorKind::IoError, path + ": bad row '" + line + "'");
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.empty()) throw Error(ErrorKind::IoError, path + ": no rows");
  Grid g(-xs.front(), static_cast<int>(xs.size()));
  return RealField(g, Eigen::Map<Vec>(vs.data(), static_cast<Eigen::Index>(vs.size())));
}

}  // namespace hamwave
