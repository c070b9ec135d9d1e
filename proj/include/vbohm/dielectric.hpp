// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vbohm/quadrature.hpp"

namespace vbohm::dielectric {

using Complex = std::complex<double>;

/// Gaussian momentum occupancy f0(v) = c exp(-v^2/kappa^2), all in Hartree a.u.
///
/// The closed-form response absorbs c. Matching its k -> 0 limit to the Drude
/// form fixes omega_p^2 = kappa^3/sqrt(pi), i.e. c = 1/(4 pi^3) and
/// n = kappa^3 / (4 pi^{3/2}).
class OccupancyModel {
public:
  explicit OccupancyModel(double kappa);

  double kappa() const { return kappa_; }
  double implied_plasma_freq_sq() const;
  double implied_plasma_freq() const;
  double implied_density() const;
  /// Normalisation constant c of f0, consistent with implied_density().
  double normalization() const;

private:
  double kappa_;
};

/// Probe frequency omega + i gamma.
struct ComplexFrequency {
  double omega = 0.0;
  double gamma = 0.0;
  Complex value() const { return {omega, gamma}; }
};

enum class Model { quantum, classical, drude, numeric };

std::string_view to_string(Model model);
/// Throws DomainError for unknown names.
Model model_from_string(std::string_view name);

struct DielectricSample {
  double k = 0.0;
  ComplexFrequency freq;
  Complex epsilon;
  double loss = 0.0;
};

/// Row-major loss values: values[i * omega_axis.size() + j] belongs to
/// (k_axis[i], omega_axis[j]).
struct LossGrid {
  std::vector<double> k_axis;
  std::vector<double> omega_axis;
  double gamma = 0.0;
  std::vector<double> values;
  Model model = Model::quantum;

  double at(std::size_t ik, std::size_t iw) const { return values[ik * omega_axis.size() + iw]; }
};

/// Closed-form RPA response for Gaussian occupancy,
/// eps = 1 + kappa^2/(i k^3) [w(u + z') - w(u - z')], u = omega_c/(k kappa), z' = k/(2 kappa).
Complex epsilon_quantum(double k, ComplexFrequency freq, const OccupancyModel& occ);

/// Small-z' (Vlasov) limit, eps = 1 + kappa/(i k^2) w'(u).
Complex epsilon_classical(double k, ComplexFrequency freq, const OccupancyModel& occ);

/// eps = 1 - omega_p^2/omega_c^2. gamma = 0 is admitted here.
Complex epsilon_drude(ComplexFrequency freq, double plasma_freq_sq);

/// Direct quadrature of the RPA velocity integral.
///
/// The transverse velocity components integrate out analytically for a
/// Gaussian f0, leaving
///
///   eps = 1 + kappa^2/(pi k^2) int dv [g(v + k) - g(v)] / (omega_c - k v - k^2/2),
///   g(v) = exp(-v^2/kappa^2),
///
/// with v the velocity component along k. The pole at v0 = (omega - k^2/2)/k
/// is subtracted and integrated analytically; the remainder goes through
/// adaptive Gauss-Kronrod with the interval split at v0, -k and 0.
/// `settings.abs_tol` is the absolute tolerance on eps.
Complex epsilon_rpa_numeric(double k, ComplexFrequency freq, const OccupancyModel& occ,
                            const quad::Settings& settings = {});

/// Im(-1/eps). Throws DomainError for eps == 0.
double loss(Complex epsilon);

/// Dispatches on model; drude uses occ.implied_plasma_freq_sq().
Complex epsilon(Model model, double k, ComplexFrequency freq, const OccupancyModel& occ);
DielectricSample sample(Model model, double k, ComplexFrequency freq, const OccupancyModel& occ);

/// Evaluates the loss on every (k, omega). The result does not depend on
/// `workers`; each worker fills a fixed, disjoint set of rows.
LossGrid scan_loss_grid(std::span<const double> k_axis, std::span<const double> omega_axis,
                        double gamma, const OccupancyModel& occ, Model model,
                        unsigned workers = 1);

struct SumRuleResult {
  double value = 0.0;     // int_0^omega_max omega Im[-1/eps] d omega
  double error = 0.0;     // quadrature error estimate
  double omega_max = 0.0; // upper limit actually used
  double expected = 0.0;  // (pi/2) omega_p^2
};

/// Default upper limit: k^2/2 + 8 k kappa + 10 omega_p, past the particle-hole
/// continuum and the plasmon.
double default_sumrule_cutoff(double k, const OccupancyModel& occ);

SumRuleResult fsum_rule(double k, const OccupancyModel& occ, double gamma, Model model,
                        std::optional<double> omega_max = std::nullopt,
                        const quad::Settings& settings = {1e-9, 1e-9, 20000});

/// argmax over omega in [omega_lo, omega_hi] of the loss. A coarse grid of
/// `coarse_points` seeds a golden-section refinement on the continuous model.
/// Throws SearchError when the grid maximum sits on the window edge.
double bethe_ridge_peak(double k, const OccupancyModel& occ, double gamma, double omega_lo,
                        double omega_hi, Model model = Model::quantum, int coarse_points = 2001);

} // namespace vbohm::dielectric
