// SPDX-License-Identifier: Apache-2.0
#include "vbohm/spreading.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "vbohm/errors.hpp"
#include "vbohm/ode.hpp"
#include "vbohm/rng.hpp"

namespace vbohm::spreading {

namespace {

void require_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be >= 0");
}

double sample_std(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

} // namespace

PacketParams::PacketParams(double sigma_x0, double sigma_p) : sigma_x0_(sigma_x0), sigma_p_(sigma_p) {
  if (!(sigma_x0 > 0.0) || !std::isfinite(sigma_x0))
    throw DomainError("PacketParams: sigma_x0 must be > 0");
  if (!(sigma_p > 0.0) || !std::isfinite(sigma_p))
    throw DomainError("PacketParams: sigma_p must be > 0");
}

bool PacketParams::minimal_uncertainty() const {
  return std::abs(uncertainty_product() - 0.5) <= 1e-12;
}

std::string_view to_string(SVariant v) { return v == SVariant::paper ? "paper" : "exact"; }

SVariant variant_from_string(std::string_view name) {
  if (name == "paper") return SVariant::paper;
  if (name == "exact") return SVariant::exact;
  throw DomainError("unknown s(t) variant '" + std::string(name) + "'");
}

double sigma_quantum(double t, const PacketParams& params) {
  require_time(t, "sigma_quantum");
  const double at = params.alpha() * t;
  return params.sigma_x0() * std::sqrt(1.0 + at * at);
}

double s_of_t(double t, const PacketParams& params, SVariant variant) {
  require_time(t, "s_of_t");
  const double a = params.alpha();
  const double g = 1.0 + (a * t) * (a * t);
  return variant == SVariant::paper ? a / std::sqrt(g) : a / g;
}

double integrated_paper_rate(double t, const PacketParams& params) {
  require_time(t, "integrated_paper_rate");
  return std::asinh(params.alpha() * t);
}

double cosh_spreading(double t, const PacketParams& params) {
  return params.sigma_x0() * std::cosh(integrated_paper_rate(t, params));
}

double spreading_factor(double t, const PacketParams& params, SVariant variant) {
  require_time(t, "spreading_factor");
  auto rhs = [&](double tt, const ode::State<2>& y) -> ode::State<2> {
    const double s = s_of_t(tt, params, variant);
    return {y[1], s * s * y[0]};
  };
  ode::Settings settings;
  settings.rel_tol = 1e-12;
  settings.abs_tol = 1e-15;
  auto stepper = ode::make_stepper<2>(rhs, settings);
  return stepper.advance({1.0, 0.0}, 0.0, t)[0];
}

double match_c_hbar(double sigma, double s_value) {
  if (!(sigma > 0.0) || !(s_value > 0.0))
    throw DomainError("match_c_hbar: sigma and s must be > 0");
  const double s2 = sigma * sigma;
  return 0.5 * s_value * s_value * s2 * s2;
}

double gaussian_bohm_potential(double x, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_bohm_potential: sigma must be > 0");
  const double s2 = sigma * sigma;
  return (2.0 * s2 - x * x) / (8.0 * s2 * s2);
}

EnsembleRun simulate_ensemble(const PacketParams& params, std::size_t n_particles,
                              std::uint64_t seed, std::span<const double> t_samples,
                              SVariant variant, unsigned workers, int bootstrap_resamples) {
  if (n_particles < 1000) throw DomainError("simulate_ensemble: need at least 1000 particles");
  if (t_samples.empty()) throw DomainError("simulate_ensemble: no sample times");
  for (std::size_t i = 0; i < t_samples.size(); ++i) {
    if (!(t_samples[i] >= 0.0) || !std::isfinite(t_samples[i]) ||
        (i > 0 && !(t_samples[i] > t_samples[i - 1])))
      throw DomainError("simulate_ensemble: sample times must be >= 0 and increasing");
  }
  if (bootstrap_resamples < 2) throw DomainError("simulate_ensemble: need >= 2 bootstrap resamples");

  const std::size_t n_times = t_samples.size();
  // positions[j * n + i]: particle i at time j.
  std::vector<double> positions(n_times * n_particles);
  const rng::CounterStream initial(seed, 0);

  auto rhs = [&params, variant](double t, const ode::State<2>& y) -> ode::State<2> {
    const double s = s_of_t(t, params, variant);
    return {y[1], s * s * y[0]};
  };
  ode::Settings settings;
  settings.rel_tol = 1e-8;
  settings.abs_tol = 1e-12 * params.sigma_x0();
  settings.initial_step = 1e-2 / params.alpha();

  workers = std::clamp<unsigned>(workers, 1u, 64u);
  std::vector<std::string> failures(workers);
  auto run_block = [&](unsigned w) {
    const std::size_t begin = n_particles * w / workers;
    const std::size_t end = n_particles * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      ode::State<2> y{params.sigma_x0() * initial.normal(i), 0.0};
      double t = 0.0;
      auto stepper = ode::make_stepper<2>(rhs, settings);
      try {
        for (std::size_t j = 0; j < n_times; ++j) {
          y = stepper.advance(y, t, t_samples[j]);
          t = t_samples[j];
          positions[j * n_particles + i] = y[0];
        }
      } catch (const std::exception& e) {
        failures[w] = "simulate_ensemble: trajectory " + std::to_string(i) + ": " + e.what();
        return;
      }
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (!f.empty()) throw IntegrationError(f);

  EnsembleRun run{params, n_particles, seed, {t_samples.begin(), t_samples.end()}, variant, {}};
  run.sigma_estimates.resize(n_times);
  std::vector<std::vector<double>> boot(n_times, std::vector<double>(bootstrap_resamples));
  std::vector<double> resample(n_particles);
  std::vector<std::size_t> index(n_particles);
  for (int b = 0; b < bootstrap_resamples; ++b) {
    const rng::CounterStream draws(seed, 1 + static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < n_particles; ++i) {
      index[i] = std::min(n_particles - 1,
                          static_cast<std::size_t>(draws.uniform(i) * static_cast<double>(n_particles)));
    }
    for (std::size_t j = 0; j < n_times; ++j) {
      const double* row = positions.data() + j * n_particles;
      for (std::size_t i = 0; i < n_particles; ++i) resample[i] = row[index[i]];
      boot[j][b] = sample_std(resample);
    }
  }
  for (std::size_t j = 0; j < n_times; ++j) {
    const std::span<const double> row(positions.data() + j * n_particles, n_particles);
    run.sigma_estimates[j] = {t_samples[j], sample_std(row), sample_std(boot[j])};
  }
  return run;
}

DiscrepancyReport discrepancy_report(const PacketParams& params, std::span<const double> t_samples) {
  DiscrepancyReport report;
  for (double t : t_samples) {
    DiscrepancyRow row;
    row.t = t;
    row.sigma_quantum = sigma_quantum(t, params);
    row.sigma_cosh = cosh_spreading(t, params);
    row.sigma_paper_ode = params.sigma_x0() * spreading_factor(t, params, SVariant::paper);
    row.sigma_exact_ode = params.sigma_x0() * spreading_factor(t, params, SVariant::exact);
    row.s_paper = s_of_t(t, params, SVariant::paper);
    row.s_exact = s_of_t(t, params, SVariant::exact);
    row.c_hbar = match_c_hbar(row.sigma_quantum, row.s_paper);
    report.rows.push_back(row);
  }
  const double c = report.c_hbar_target;
  const double s2 = params.sigma_x0() * params.sigma_x0();
  report.quoted_q_offset = -c / s2;
  report.quoted_q_curvature = c / (s2 * s2);
  report.direct_q_offset = c / (2.0 * s2);
  report.direct_q_curvature = -c / (4.0 * s2 * s2);
  return report;
}

} // namespace vbohm::spreading
