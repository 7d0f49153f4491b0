#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

#include "hamwave/errors.hpp"

namespace hamwave {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;

namespace tol {
inline constexpr double roundtrip = 1e-12;
inline constexpr double symmetry = 1e-12;
inline constexpr double zero_mode = 1e-12;
inline constexpr double tail_exponential = 1e-10;
inline constexpr double tail_algebraic = 1e-6;
}  // namespace tol

/// Uniform periodic grid on [-L, L) with N points, x_j = -L + j dx.
class Grid {
 public:
  Grid(double L, int N);

  double L() const { return L_; }
  int N() const { return N_; }
  double dx() const { return dx_; }
  double x(int j) const { return -L_ + j * dx_; }
  /// Wavenumber of signed mode n.
  double k_of_mode(int n) const;
  /// Signed mode at FFT-ordered index j (0..N-1).
  int mode(int j) const { return j < N_ / 2 ? j : j - N_; }
  /// Number of half-spectrum coefficients, N/2 + 1.
  int half() const { return N_ / 2 + 1; }
  /// Largest retained mode under the 2/3 rule.
  int dealias_cutoff() const { return N_ / 3; }

  Vec points() const;
  /// k_n for n = -N/2 .. N/2-1, ascending.
  Vec wavenumbers() const;

  bool operator==(const Grid& o) const { return L_ == o.L_ && N_ == o.N_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  double L_;
  int N_;
  double dx_;
};

/// Real samples on a grid.
struct RealField {
  Grid grid;
  Vec v;

  explicit RealField(const Grid& g) : grid(g), v(Vec::Zero(g.N())) {}
  RealField(const Grid& g, Vec values);
  static RealField from_function(const Grid& g, const std::function<double(double)>& f);

  bool finite() const { return v.allFinite(); }
  double max_norm() const { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

  RealField& operator+=(const RealField& o);
  RealField& operator-=(const RealField& o);
  RealField& operator*=(double a) {
    v *= a;
    return *this;
  }
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double s, RealField a);

/// Full DFT coefficients f_n = sum_j f_j exp(-2 pi i n j / N), stored for
/// n = -N/2 .. N/2-1 (index n + N/2). Phases are relative to x_0 = -L.
struct SpectralField {
  Grid grid;
  CVec c;

  cplx at(int n) const { return c(n + grid.N() / 2); }
  /// max |c(-n) - conj c(n)| over paired modes, relative to max |c|.
  double hermitian_defect() const;
};

enum class ZeroModePolicy { evaluate, zero, reject };

/// Fourier multiplier m(k). Symbols must satisfy m(-k) = conj m(k) so real
/// fields map to real fields. Odd symbols have the unpaired Nyquist mode zeroed.
struct MultiplierSymbol {
  std::function<cplx(double)> symbol;
  ZeroModePolicy zero_mode = ZeroModePolicy::evaluate;
  bool odd = false;

  /// |k|^s; s < 0 forces the reject policy.
  static MultiplierSymbol abs_power(double s);
  /// <k>^s = (1 + k^2)^(s/2).
  static MultiplierSymbol bessel_power(double s);
  /// i k.
  static MultiplierSymbol derivative();
  /// -i sgn(k).
  static MultiplierSymbol hilbert();
};

namespace fft {
/// Half spectrum (n = 0 .. N/2) of a real sample vector.
CVec forward(const Vec& f);
/// Inverse of forward for a given even N.
Vec backward(const CVec& fh, int N);
}  // namespace fft

/// Samples the symbol on the half spectrum with zero-mode and Nyquist rules applied
/// (reject is mapped to a zeroed output mode; the input check is the caller's job).
CVec sample_symbol(const Grid& g, const MultiplierSymbol& m);
/// Applies a presampled half-spectrum symbol.
Vec apply_sampled(const Vec& f, const CVec& mh);

SpectralField transform(const RealField& f);
RealField inverse(const SpectralField& s);

RealField apply_multiplier(const RealField& f, const MultiplierSymbol& m);

/// Throws ZeroModeRejected when |mean| > 1e-12 max|f|.
void require_zero_mean(const RealField& f, const char* where);
double mean(const RealField& f);

double sobolev_norm(const RealField& f, double s, bool homogeneous);
double sobolev_inner(const RealField& f, const RealField& g, double s, bool homogeneous);
/// Per-mode weights w_n of the squared norm on the half spectrum, so that
/// ||f||^2 = (2L/N^2) * (w_0 |f_0|^2 + 2 sum_{0<n<N/2} w_n |f_n|^2 + w_{N/2} |f_{N/2}|^2).
Vec sobolev_weights(const Grid& g, double s, bool homogeneous);

/// f(x - s): phase factor exp(-i k s).
RealField translate(const RealField& f, double s);
/// Keeps modes |n| <= N/3.
RealField dealias(const RealField& f);
/// Fraction of the L2 energy carried by modes |n| > N/3.
double spectral_tail_fraction(const RealField& f);

RealField derivative(const RealField& f);
double integral(const RealField& f);
double inner(const RealField& f, const RealField& g);
double l2_norm(const RealField& f);

/// Trigonometric interpolant of f at an arbitrary point (periodic).
double evaluate_at(const RealField& f, double x);
/// Trigonometric interpolant of f evaluated at each point of `target` after the
/// affine map x -> scale * x. With `periodic` false, points mapped outside
/// [-L, L] of the source grid get 0 instead of the periodic image.
RealField resample_scaled(const RealField& f, const Grid& target, double scale, bool periodic = true);

double even_defect(const RealField& f);
double odd_defect(const RealField& f);
RealField symmetrize_even(const RealField& f);
RealField symmetrize_odd(const RealField& f);

/// CSV with header `x,value`, 17 significant digits.
void write_csv(const std::string& path, const RealField& f);
/// CSV with header `n,re,im`.
void write_spectrum_csv(const std::string& path, const SpectralField& s);
/// Reads an `x,value` CSV; the grid is inferred from the first point and the count.
RealField read_csv(const std::string& path);

}  // namespace hamwave
