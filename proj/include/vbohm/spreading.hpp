// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vbohm::spreading {

/// Free Gaussian packet with widths in a.u. (m = hbar = 1).
class PacketParams {
public:
  PacketParams(double sigma_x0, double sigma_p);

  double sigma_x0() const { return sigma_x0_; }
  double sigma_p() const { return sigma_p_; }
  /// Spreading rate sigma_p / (m sigma_x0).
  double alpha() const { return sigma_p_ / sigma_x0_; }
  double uncertainty_product() const { return sigma_p_ * sigma_x0_; }
  /// sigma_p sigma_x0 = hbar/2 to 1e-12.
  bool minimal_uncertainty() const;

private:
  double sigma_x0_;
  double sigma_p_;
};

/// paper: s = alpha (1 + (alpha t)^2)^{-1/2}.
/// exact: s = alpha (1 + (alpha t)^2)^{-1}, the rate with s^2 = sigma''/sigma,
///        for which x'' = s^2 x reproduces sigma_quantum exactly.
enum class SVariant { paper, exact };

std::string_view to_string(SVariant v);
SVariant variant_from_string(std::string_view name);

/// sigma_x0 sqrt(1 + (alpha t)^2).
double sigma_quantum(double t, const PacketParams& params);

double s_of_t(double t, const PacketParams& params, SVariant variant);

/// int_0^t s_paper dt' = asinh(alpha t).
double integrated_paper_rate(double t, const PacketParams& params);

/// sigma_x0 cosh(int_0^t s_paper dt'), evaluated as sigma_x0 cosh(asinh(alpha t)).
double cosh_spreading(double t, const PacketParams& params);

/// c(t) solving c'' = s(t)^2 c, c(0) = 1, c'(0) = 0 (adaptive Dormand-Prince, rel tol 1e-12).
/// Every trajectory of the ensemble obeys x(t) = x(0) c(t).
double spreading_factor(double t, const PacketParams& params, SVariant variant);

/// c_hbar = s^2 sigma^4 / 2.
double match_c_hbar(double sigma, double s_value);

/// Bohm potential of rho ~ exp(-x^2 / (2 sigma^2)): (2 sigma^2 - x^2) / (8 sigma^4).
double gaussian_bohm_potential(double x, double sigma);

struct SigmaEstimate {
  double t = 0.0;
  double sigma = 0.0;
  double standard_error = 0.0;
};

struct EnsembleRun {
  PacketParams params{1.0, 0.5};
  std::size_t n_particles = 0;
  std::uint64_t seed = 0;
  std::vector<double> t_samples;
  SVariant variant = SVariant::paper;
  std::vector<SigmaEstimate> sigma_estimates;
};

inline constexpr int default_bootstrap_resamples = 200;

/// Samples x(0) ~ N(0, sigma_x0^2) with zero initial velocity and integrates
/// x'' = s(t)^2 x for every particle (Dormand-Prince, rel tol 1e-8). Reports
/// the sample standard deviation at each t with a bootstrap standard error.
///
/// Draws come from rng::CounterStream: stream 0 gives the initial positions
/// (particle i uses counters 2i, 2i+1), stream 1 + b gives the indices of
/// bootstrap resample b. Output is identical for any `workers`.
EnsembleRun simulate_ensemble(const PacketParams& params, std::size_t n_particles,
                              std::uint64_t seed, std::span<const double> t_samples,
                              SVariant variant, unsigned workers = 1,
                              int bootstrap_resamples = default_bootstrap_resamples);

/// Side-by-side numbers for the classical reconstruction of the Bohm potential.
struct DiscrepancyRow {
  double t = 0.0;
  double sigma_quantum = 0.0;   // free-packet law
  double sigma_cosh = 0.0;      // sigma_x0 cosh(int s_paper)
  double sigma_paper_ode = 0.0; // sigma_x0 c(t) with c'' = s_paper^2 c
  double sigma_exact_ode = 0.0; // sigma_x0 c(t) with c'' = s_exact^2 c
  double s_paper = 0.0;
  double s_exact = 0.0;
  double c_hbar = 0.0;          // s_paper^2 sigma_quantum^4 / 2
};

struct DiscrepancyReport {
  double c_hbar_target = 0.5; // hbar^2 / 2m
  std::vector<DiscrepancyRow> rows;
  // Gaussian Q = -c_hbar (sqrt rho)'' / sqrt rho written as a + b x^2:
  // the quoted form c_hbar/sigma^4 (x^2 - sigma^2) against direct differentiation.
  double quoted_q_offset = 0.0;    // -c_hbar / sigma^2
  double quoted_q_curvature = 0.0; // c_hbar / sigma^4
  double direct_q_offset = 0.0;    // c_hbar / (2 sigma^2)
  double direct_q_curvature = 0.0; // -c_hbar / (4 sigma^4)
};

/// Uses c_hbar = 1/2 and sigma = sigma_x0 for the Gaussian comparison.
DiscrepancyReport discrepancy_report(const PacketParams& params, std::span<const double> t_samples);

} // namespace vbohm::spreading
