#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hamwave/pv.hpp"

namespace hamwave {

/// Time derivatives of (eta, phi, xbar) from the surface-vortex equations: kinematic
/// condition, Bernoulli along the surface with the eps xi . d/dt xbar coupling, and
/// vortex advection by the irrotational part minus the mirror self-drift.
/// The phi tendency is returned mean-free.
PVState pv_rhs(const PVState& u, const PVParams& params, int M = 4);

/// J(u) w for a covector w = (w_eta, w_phi, w_xbar). w_phi must be mean-free
/// (NonZeroMean otherwise). At eps = 0 only w_xbar = 0 is allowed.
PVState apply_poisson(const PVState& u, const PVCovector& w, const PVParams& params);

/// J(u) DE(u), the Hamiltonian route to the same tendencies as pv_rhs.
PVState pv_hamiltonian_rhs(const PVState& u, const PVParams& params, int M = 4);

/// (-eta', -phi', e1).
PVState translation_generator(const PVState& u);

/// (eta(. - s), phi(. - s), xbar + s e1).
PVState translate(const PVState& u, double s);

struct PVOrbitalFit {
  double distance = 0.0;
  /// translate(u, shift) is closest to the wave; u = translate(wave, s0) gives shift = -s0.
  double shift = 0.0;
};

/// min over s of ||eta(. - s) - eta_c||_H1 + ||phi(. - s) - phi_c||_H1/2 + |xbar + s e1 - xbar_c|
/// (the sum of norms, not of squares). Grid scan, then golden section.
PVOrbitalFit pv_orbital_distance(const PVState& u, const PVWave& wave);

struct PVEvolutionConfig {
  double dt = 0.0;  ///< 0 selects 0.1 dx^(3/2) / sqrt(b)
  double T_final = 5.0;
  int stride = 10;
  int M = 4;
  /// Abort when the surface comes closer than this fraction of the initial depth
  /// to the vortex or its mirror.
  double exclusion = 0.2;
  double blowup_factor = 1e3;  ///< ceiling on max|eta| relative to max(|eta0|, depth)
  bool keep_states = false;

  void validate() const;
};

double pv_default_dt(const Grid& g, const PVParams& params);

struct PVTrajectorySample {
  double t = 0.0;
  double E = 0.0;
  double P = 0.0;
  Vec2 xbar = Vec2::Zero();
  double rho = 0.0;
  double shift = 0.0;
  std::optional<PVState> state;
};

/// Classical RK4. Samples every `stride` steps and at the end; rho is measured
/// against `wave` when given. Throws AdmissibilityLost and BlowupDetected.
std::vector<PVTrajectorySample> pv_evolve(const PVState& u0, const PVParams& params, const PVEvolutionConfig& config,
                                          const PVWave* wave = nullptr);

/// Smallest distance from the surface graph to the vortex or its mirror.
double vortex_surface_separation(const PVState& u);

void write_pv_trajectory_csv(const std::string& path, const std::vector<PVTrajectorySample>& samples);

}  // namespace hamwave
