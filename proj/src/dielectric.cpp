// SPDX-License-Identifier: Apache-2.0
#include "vbohm/dielectric.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "vbohm/errors.hpp"
#include "vbohm/specfun.hpp"

namespace vbohm::dielectric {

namespace {

constexpr Complex I{0.0, 1.0};

void require_probe(double k, ComplexFrequency freq, const char* who) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError(std::string(who) + ": k must be > 0");
  if (!(freq.gamma > 0.0) || !std::isfinite(freq.gamma) || !std::isfinite(freq.omega))
    throw DomainError(std::string(who) + ": gamma must be > 0 and omega finite");
}

std::string coords(double k, double omega) {
  return " at (k = " + std::to_string(k) + ", omega = " + std::to_string(omega) + ")";
}

} // namespace

OccupancyModel::OccupancyModel(double kappa) : kappa_(kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("OccupancyModel: kappa must be > 0");
}

double OccupancyModel::implied_plasma_freq_sq() const {
  return kappa_ * kappa_ * kappa_ * std::numbers::inv_sqrtpi;
}

double OccupancyModel::implied_plasma_freq() const { return std::sqrt(implied_plasma_freq_sq()); }

double OccupancyModel::implied_density() const {
  return implied_plasma_freq_sq() / (4.0 * std::numbers::pi);
}

double OccupancyModel::normalization() const {
  const double pi = std::numbers::pi;
  return 1.0 / (4.0 * pi * pi * pi);
}

std::string_view to_string(Model model) {
  switch (model) {
  case Model::quantum: return "quantum";
  case Model::classical: return "classical";
  case Model::drude: return "drude";
  case Model::numeric: return "numeric";
  }
  return "unknown";
}

Model model_from_string(std::string_view name) {
  if (name == "quantum") return Model::quantum;
  if (name == "classical") return Model::classical;
  if (name == "drude") return Model::drude;
  if (name == "numeric") return Model::numeric;
  throw DomainError("unknown dielectric model '" + std::string(name) + "'");
}

Complex epsilon_quantum(double k, ComplexFrequency freq, const OccupancyModel& occ) {
  require_probe(k, freq, "epsilon_quantum");
  const double kappa = occ.kappa();
  const Complex u = freq.value() / (k * kappa);
  const double zp = k / (2.0 * kappa);
  const Complex dw = specfun::faddeeva(u + zp) - specfun::faddeeva(u - zp);
  return 1.0 + kappa * kappa / (I * k * k * k) * dw;
}

Complex epsilon_classical(double k, ComplexFrequency freq, const OccupancyModel& occ) {
  require_probe(k, freq, "epsilon_classical");
  const double kappa = occ.kappa();
  const Complex u = freq.value() / (k * kappa);
  return 1.0 + kappa / (I * k * k) * specfun::faddeeva_derivative(u);
}

Complex epsilon_drude(ComplexFrequency freq, double plasma_freq_sq) {
  if (!(plasma_freq_sq > 0.0)) throw DomainError("epsilon_drude: plasma_freq_sq must be > 0");
  if (freq.gamma < 0.0) throw DomainError("epsilon_drude: gamma must be >= 0");
  const Complex wc = freq.value();
  if (wc == 0.0) throw DomainError("epsilon_drude: omega_c = 0");
  return 1.0 - plasma_freq_sq / (wc * wc);
}

Complex epsilon_rpa_numeric(double k, ComplexFrequency freq, const OccupancyModel& occ,
                            const quad::Settings& settings) {
  require_probe(k, freq, "epsilon_rpa_numeric");
  // Real f0 gives eps(k, -omega + i gamma) = conj eps(k, omega + i gamma).
  if (freq.omega < 0.0) return std::conj(epsilon_rpa_numeric(k, {-freq.omega, freq.gamma}, occ, settings));

  const double kappa = occ.kappa();
  const double prefactor = kappa * kappa / (std::numbers::pi * k * k);
  const Complex a = Complex{freq.omega - 0.5 * k * k, freq.gamma};
  const double v0 = a.real() / k;

  auto g = [kappa](double v) { return std::exp(-(v * v) / (kappa * kappa)); };
  auto h = [&](double v) { return g(v + k) - g(v); };

  const double reach = 7.5 * kappa;
  const double lo = -k - reach;
  const double hi = reach;

  std::vector<double> points{lo, -k, 0.0, hi};
  const bool subtract = v0 > lo && v0 < hi;
  const double h0 = subtract ? h(v0) : 0.0;
  if (subtract) points.push_back(v0);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  quad::Settings scaled = settings;
  scaled.abs_tol = settings.abs_tol / prefactor;

  auto integrand = [&](double v) -> Complex { return (h(v) - h0) / (a - k * v); };
  quad::Result<Complex> res;
  try {
    res = quad::integrate<Complex>(integrand, std::span<const double>(points), scaled);
  } catch (const NumericError& e) {
    throw NumericError(std::string("epsilon_rpa_numeric: ") + e.what() + coords(k, freq.omega),
                       e.estimate() * prefactor);
  }

  Complex integral = res.value;
  if (subtract) {
    // int_lo^hi dv / (a - k v); Im(a - k v) = gamma > 0 keeps the log on one branch.
    integral += h0 * (std::log(a - k * lo) - std::log(a - k * hi)) / k;
  }
  return 1.0 + prefactor * integral;
}

double loss(Complex epsilon) {
  if (epsilon == 0.0) throw DomainError("loss: epsilon = 0");
  return (-1.0 / epsilon).imag();
}

Complex epsilon(Model model, double k, ComplexFrequency freq, const OccupancyModel& occ) {
  switch (model) {
  case Model::quantum: return epsilon_quantum(k, freq, occ);
  case Model::classical: return epsilon_classical(k, freq, occ);
  case Model::drude: return epsilon_drude(freq, occ.implied_plasma_freq_sq());
  case Model::numeric: return epsilon_rpa_numeric(k, freq, occ);
  }
  throw DomainError("epsilon: unknown model");
}

DielectricSample sample(Model model, double k, ComplexFrequency freq, const OccupancyModel& occ) {
  const Complex eps = epsilon(model, k, freq, occ);
  return {k, freq, eps, loss(eps)};
}

LossGrid scan_loss_grid(std::span<const double> k_axis, std::span<const double> omega_axis,
                        double gamma, const OccupancyModel& occ, Model model, unsigned workers) {
  auto check_axis = [](std::span<const double> axis, const char* name) {
    if (axis.empty()) throw DomainError(std::string("scan_loss_grid: empty ") + name + " axis");
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (!std::isfinite(axis[i]) || axis[i] < 0.0)
        throw DomainError(std::string("scan_loss_grid: ") + name + " axis must be finite and >= 0");
      if (i > 0 && !(axis[i] > axis[i - 1]))
        throw DomainError(std::string("scan_loss_grid: ") + name + " axis not strictly increasing");
    }
  };
  check_axis(k_axis, "k");
  check_axis(omega_axis, "omega");
  if (k_axis.front() <= 0.0) throw DomainError("scan_loss_grid: k axis must be > 0");
  if (!(gamma > 0.0)) throw DomainError("scan_loss_grid: gamma must be > 0");

  LossGrid grid;
  grid.k_axis.assign(k_axis.begin(), k_axis.end());
  grid.omega_axis.assign(omega_axis.begin(), omega_axis.end());
  grid.gamma = gamma;
  grid.model = model;
  grid.values.assign(k_axis.size() * omega_axis.size(), 0.0);

  const std::size_t rows = k_axis.size();
  const std::size_t cols = omega_axis.size();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(rows));

  // One slot per worker; after joining, the error from the lowest row wins so
  // the reported failure is also independent of scheduling.
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_rows(workers, rows);

  auto fill_rows = [&](unsigned worker) {
    for (std::size_t i = worker; i < rows; i += workers) {
      for (std::size_t j = 0; j < cols; ++j) {
        try {
          const double l = loss(epsilon(model, k_axis[i], {omega_axis[j], gamma}, occ));
          if (!std::isfinite(l)) throw NumericError("non-finite loss");
          grid.values[i * cols + j] = l;
        } catch (const std::exception& e) {
          if (i < error_rows[worker]) {
            error_rows[worker] = i;
            errors[worker] = std::make_exception_ptr(
                NumericError(std::string("scan_loss_grid: ") + e.what() + coords(k_axis[i], omega_axis[j])));
          }
          return;
        }
      }
    }
  };

  if (workers == 1) {
    fill_rows(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(fill_rows, w);
    for (auto& t : pool) t.join();
  }

  std::size_t first = rows;
  std::exception_ptr failure;
  for (unsigned w = 0; w < workers; ++w) {
    if (errors[w] && error_rows[w] < first) {
      first = error_rows[w];
      failure = errors[w];
    }
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

double default_sumrule_cutoff(double k, const OccupancyModel& occ) {
  return 0.5 * k * k + 8.0 * k * occ.kappa() + 10.0 * occ.implied_plasma_freq();
}

SumRuleResult fsum_rule(double k, const OccupancyModel& occ, double gamma, Model model,
                        std::optional<double> omega_max, const quad::Settings& settings) {
  if (!(k > 0.0)) throw DomainError("fsum_rule: k must be > 0");
  if (!(gamma > 0.0)) throw DomainError("fsum_rule: gamma must be > 0");
  const double upper = omega_max.value_or(default_sumrule_cutoff(k, occ));
  if (!(upper > 0.0)) throw DomainError("fsum_rule: omega_max must be > 0");

  // Pre-split finely enough that a plasmon peak of width ~gamma cannot hide
  // between the initial Kronrod nodes.
  const double width = std::min(upper / 64.0, 25.0 * gamma);
  const auto pieces = static_cast<std::size_t>(std::ceil(upper / width));
  std::vector<double> points(pieces + 1);
  for (std::size_t i = 0; i <= pieces; ++i) points[i] = upper * static_cast<double>(i) / pieces;

  auto integrand = [&](double w) { return w * loss(epsilon(model, k, {w, gamma}, occ)); };
  quad::Result<double> res;
  try {
    res = quad::integrate<double>(integrand, std::span<const double>(points), settings);
  } catch (const NumericError& e) {
    throw NumericError(std::string("fsum_rule: ") + e.what(), e.estimate());
  }
  return {res.value, res.error, upper, 0.5 * std::numbers::pi * occ.implied_plasma_freq_sq()};
}

double bethe_ridge_peak(double k, const OccupancyModel& occ, double gamma, double omega_lo,
                        double omega_hi, Model model, int coarse_points) {
  if (!(omega_hi > omega_lo) || omega_lo < 0.0)
    throw DomainError("bethe_ridge_peak: need 0 <= omega_lo < omega_hi");
  if (coarse_points < 3) throw DomainError("bethe_ridge_peak: need at least 3 grid points");
  if (!(gamma > 0.0)) throw DomainError("bethe_ridge_peak: gamma must be > 0");

  auto f = [&](double w) { return loss(epsilon(model, k, {w, gamma}, occ)); };
  const double step = (omega_hi - omega_lo) / (coarse_points - 1);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < coarse_points; ++i) {
    const double v = f(omega_lo + i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0 || best == coarse_points - 1)
    throw SearchError("bethe_ridge_peak: loss maximum on the window edge, no interior peak");

  // Golden-section search on the bracketing cells.
  constexpr double inv_phi = 0.6180339887498949;
  double a = omega_lo + (best - 1) * step;
  double b = omega_lo + (best + 1) * step;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

} // namespace vbohm::dielectric
