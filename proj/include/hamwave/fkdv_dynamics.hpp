#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hamwave/fkdv.hpp"

namespace hamwave {

struct EvolutionConfig {
  double dt = 0.0;  ///< 0 selects default_dt
  double T_final = 1.0;
  int stride = 1;   ///< steps between samples
  bool dealias = true;
  std::string integrator = "etdrk4";
  double blowup_factor = 1e3;    ///< ceiling = factor * ||u0||_inf
  double tail_threshold = 1e-6;  ///< spectral energy fraction in N/4 < |n| <= N/3
  bool keep_fields = false;

  void validate() const;
};

/// 0.2 dx^alpha.
double default_dt(const Grid& g, double alpha);

struct TrajectorySample {
  double t = 0.0;
  std::optional<RealField> u;
  double E = 0.0;
  double P = 0.0;
  double mass = 0.0;
  double rho = 0.0;
  double shift = 0.0;
  bool newton_stall = false;
};

/// d/dx(Lambda^alpha u - u^p); the power is dealiased when requested.
RealField rhs(const RealField& u, const ModelParams& params, bool dealias = true);

/// Result of fitting the orbit {translate(U, s)}.
struct OrbitalFit {
  double distance = 0.0;
  /// Shift s with translate(u, s) closest to U; u = translate(U, a) gives s = -a.
  double shift = 0.0;
  bool newton_stall = false;
};

/// Coarse FFT cross-correlation in the H^s inner product, refined by Newton on
/// <translate(u, s) - U, U'>_{H^s} = 0. Distance is ||translate(u, s) - U||_{H^s}.
OrbitalFit orbital_distance(const RealField& u, const RealField& U, double s);

/// Called at every sample; returning false stops the run early.
using SampleObserver = std::function<bool(const TrajectorySample&)>;

/// Exponential RK4 (contour-integral phi functions) with the linear symbol
/// i k |k|^alpha treated exactly. When `reference` is given, each sample carries
/// the orbital distance to it in H^(alpha/2). Throws BlowupDetected and ResolutionLoss.
std::vector<TrajectorySample> evolve(const RealField& u0, const ModelParams& params, const EvolutionConfig& config,
                                     const RealField* reference = nullptr, const SampleObserver& observer = {});

enum class PerturbationDirection { RandomEven, NegativeMode };
std::string to_string(PerturbationDirection d);

struct ExperimentConfig {
  double delta = 1e-3;
  PerturbationDirection direction = PerturbationDirection::RandomEven;
  std::uint64_t seed = 1;
  double K_stable = 10.0;
  double K_escape = 100.0;
  EvolutionConfig evolution;
};

enum class ExperimentVerdict { Bounded, Escaped, Indeterminate };
std::string to_string(ExperimentVerdict v);

struct ExperimentReport {
  ModelParams params;
  double c = 1.0;
  ExperimentConfig config;
  ExperimentVerdict verdict = ExperimentVerdict::Indeterminate;
  double sup_rho = 0.0;
  double t_end = 0.0;
  double t_exit = -1.0;  ///< first time rho exceeded K_escape delta
  bool blowup = false;
  std::string reason;
  std::vector<TrajectorySample> trajectory;
};

/// Even, smooth, unit-X-norm random perturbation (sum of mirrored Gaussians).
RealField random_even_direction(const Grid& g, double alpha, std::uint64_t seed);

/// Evolves U_c + delta * direction on the family grid and classifies the orbit
/// excursion. NegativeMode needs the spectral report of H_c on that grid.
ExperimentReport stability_experiment(const SolitonFamily& family, double c, const ExperimentConfig& config,
                                      const SpectralReport* spectrum = nullptr);

void write_trajectory_csv(const std::string& path, const std::vector<TrajectorySample>& samples);

}  // namespace hamwave
