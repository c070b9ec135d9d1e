// SPDX-License-Identifier: Apache-2.0
#include "vbohm/bohm1d.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "vbohm/errors.hpp"
#include "vbohm/ode.hpp"

namespace vbohm::bohm1d {

namespace {

using Complex = std::complex<double>;

constexpr double edge_potential_tol = 1e-10;
constexpr double rescale_threshold = 1e100;

ode::Settings shooting_settings() {
  ode::Settings s;
  s.rel_tol = 1e-10;
  s.abs_tol = 1e-14;
  s.initial_step = 1e-3;
  return s;
}

double grid_spacing(std::span<const double> x) { return (x.back() - x.front()) / (x.size() - 1); }

// Second derivative on a uniform grid: 4th-order central in the interior,
// 5-point one-sided at the two outermost samples of each end.
std::vector<double> second_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d2(n);
  const double c = 1.0 / (12.0 * h * h);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d2[i] = c * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
  d2[0] = c * (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]);
  d2[1] = c * (11.0 * f[0] - 20.0 * f[1] + 6.0 * f[2] + 4.0 * f[3] - f[4]);
  d2[n - 1] = c * (35.0 * f[n - 1] - 104.0 * f[n - 2] + 114.0 * f[n - 3] - 56.0 * f[n - 4] +
                   11.0 * f[n - 5]);
  d2[n - 2] = c * (11.0 * f[n - 1] - 20.0 * f[n - 2] + 6.0 * f[n - 3] + 4.0 * f[n - 4] - f[n - 5]);
  return d2;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

int count_sign_changes(std::span<const double> a, double threshold) {
  int changes = 0;
  int last_sign = 0;
  for (double v : a) {
    if (std::abs(v) <= threshold) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

struct EnergyWindow {
  double v_min;
  double v_top;
};

EnergyWindow energy_window(const PotentialWell& well, std::span<const double> x) {
  double v_min = std::numeric_limits<double>::infinity();
  for (double xi : x) v_min = std::min(v_min, well(xi));
  return {v_min, std::min(well(x.front()), well(x.back()))};
}

void check_grid(double half_width, int points, const char* who) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw DomainError(std::string(who) + ": domain half width must be > 0");
  if (points < 5) throw DomainError(std::string(who) + ": need at least 5 grid points");
}

std::size_t argmin_potential(const PotentialWell& well, std::span<const double> x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (well(x[i]) < well(x[best])) best = i;
  // Keep the matching point off the outermost samples.
  return std::clamp<std::size_t>(best, 2, x.size() - 3);
}

// Integrates the linear equation A'' = 2 (V - E) A from one edge of the grid to
// index `stop`, starting from the decaying solution exp(-q |x|). When `store`
// is given, the amplitude at every visited grid point is written into it.
ode::State<2> shoot_from_edge(const PotentialWell& well, double energy, std::span<const double> x,
                              std::size_t stop, bool from_left, std::vector<double>* store) {
  auto rhs = [&well, energy](double t, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], 2.0 * (well(t) - energy) * y[0]};
  };
  auto stepper = ode::make_stepper<2>(rhs, shooting_settings());

  const std::size_t n = x.size();
  const std::size_t start = from_left ? 0 : n - 1;
  const double q = std::sqrt(std::max(0.0, 2.0 * (well(x[start]) - energy)));
  ode::State<2> y{1.0, from_left ? q : -q};
  if (store) (*store)[start] = y[0];

  std::size_t i = start;
  while (i != stop) {
    const std::size_t next = from_left ? i + 1 : i - 1;
    y = stepper.advance(y, x[i], x[next]);
    i = next;
    if (store) (*store)[i] = y[0];
    const double size = std::max(std::abs(y[0]), std::abs(y[1]));
    if (size > rescale_threshold) {
      y[0] /= size;
      y[1] /= size;
      if (store) {
        if (from_left)
          for (std::size_t j = 0; j <= i; ++j) (*store)[j] /= size;
        else
          for (std::size_t j = i; j < n; ++j) (*store)[j] /= size;
      }
    }
  }
  return y;
}

// Normalised Wronskian of the left and right edge solutions at the matching
// point; zero exactly at an eigenvalue, continuous in E.
double matching_function(const PotentialWell& well, double energy, std::span<const double> x,
                         std::size_t match) {
  const auto l = shoot_from_edge(well, energy, x, match, true, nullptr);
  const auto r = shoot_from_edge(well, energy, x, match, false, nullptr);
  const double w = l[1] * r[0] - r[1] * l[0];
  return w / (std::hypot(l[0], l[1]) * std::hypot(r[0], r[1]));
}

// Illinois regula falsi on a sign-changing bracket.
template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb, double tol) {
  int side = 0;
  for (int iter = 0; iter < 200 && std::abs(b - a) > tol; ++iter) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc > 0.0) == (fb > 0.0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (a + b);
}

double trapezoid_integral(std::span<const double> f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

} // namespace

// ---------------------------------------------------------------------------
// PotentialWell

PotentialWell PotentialWell::analytic(double v0, double half_width, int exponent) {
  if (!std::isfinite(v0)) throw DomainError("PotentialWell: v0 must be finite");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw DomainError("PotentialWell: L must be > 0");
  if (exponent < 2 || exponent % 2 != 0)
    throw DomainError("PotentialWell: exponent n must be even and >= 2");
  PotentialWell w;
  w.v0_ = v0;
  w.half_width_ = half_width;
  w.exponent_ = exponent;
  return w;
}

PotentialWell PotentialWell::tabulated(std::vector<double> x, std::vector<double> v) {
  if (x.size() != v.size()) throw DomainError("PotentialWell: x and V tables differ in length");
  if (x.size() < 4) throw DomainError("PotentialWell: need at least 4 tabulated points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(v[i]))
      throw DomainError("PotentialWell: non-finite tabulated value");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw DomainError("PotentialWell: tabulated x not strictly increasing");
  }
  // Natural cubic spline: tridiagonal solve for the knot second derivatives.
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0), diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = x[i] - x[i - 1];
    const double factor = lower / diag[i - 1];
    diag[i] -= factor * upper[i - 1];
    rhs[i] -= factor * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    if (i == 1) break;
  }
  PotentialWell w;
  w.tabulated_x_ = std::move(x);
  w.tabulated_v_ = std::move(v);
  w.spline_m_ = std::move(m);
  return w;
}

double PotentialWell::operator()(double x) const {
  if (is_analytic()) {
    const double r2 = (x / half_width_) * (x / half_width_);
    const double p = std::pow(r2, exponent_ / 2);
    return v0_ * std::exp(-p);
  }
  const auto& tx = tabulated_x_;
  const auto& tv = tabulated_v_;
  if (x <= tx.front()) return tv.front();
  if (x >= tx.back()) return tv.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(tx.begin(), tx.end(), x) - tx.begin());
  const std::size_t lo = hi - 1;
  const double h = tx[hi] - tx[lo];
  const double a = (tx[hi] - x) / h;
  const double b = (x - tx[lo]) / h;
  return a * tv[lo] + b * tv[hi] +
         ((a * a * a - a) * spline_m_[lo] + (b * b * b - b) * spline_m_[hi]) * h * h / 6.0;
}

// ---------------------------------------------------------------------------

std::vector<double> uniform_grid(double half_width, int points) {
  check_grid(half_width, points, "uniform_grid");
  std::vector<double> x(points);
  for (int i = 0; i < points; ++i)
    x[i] = -half_width + 2.0 * half_width * static_cast<double>(i) / (points - 1);
  return x;
}

std::vector<double> quantum_potential_from_amplitude(std::span<const double> amplitude,
                                                     double spacing) {
  if (amplitude.size() < 5) throw DomainError("quantum_potential: need at least 5 grid points");
  if (!(spacing > 0.0)) throw DomainError("quantum_potential: spacing must be > 0");
  const auto d2 = second_derivative(amplitude, spacing);
  std::vector<double> q(amplitude.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (amplitude[i] != 0.0) q[i] = -0.5 * d2[i] / amplitude[i];
  return q;
}

std::vector<double> quantum_potential(std::span<const double> density, double spacing) {
  if (density.size() < 5) throw DomainError("quantum_potential: need at least 5 grid points");
  std::vector<double> a(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (!(density[i] > 0.0))
      throw DomainError("quantum_potential: density must be strictly positive (sample " +
                        std::to_string(i) + ")");
    a[i] = std::sqrt(density[i]);
  }
  return quantum_potential_from_amplitude(a, spacing);
}

std::vector<double> classical_density(double energy, std::span<const double> vt, double k_const,
                                      std::span<const double> x_grid) {
  if (!(energy > 0.0)) throw DomainError("classical_density: E must be > 0");
  if (!x_grid.empty() && x_grid.size() != vt.size())
    throw DomainError("classical_density: x grid and V_T differ in length");
  std::vector<double> rho(vt.size());
  const double numerator = k_const * std::sqrt(energy);
  for (std::size_t i = 0; i < vt.size(); ++i) {
    const double kinetic = energy - vt[i];
    if (!(kinetic > 0.0)) {
      const double where = x_grid.empty() ? static_cast<double>(i) : x_grid[i];
      throw TurningPointError("classical_density: E <= V_T at " +
                                  std::string(x_grid.empty() ? "sample " : "x = ") +
                                  std::to_string(where),
                              where);
    }
    rho[i] = numerator / std::sqrt(kinetic);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Bound states

StationarySolution solve_bound_state(const PotentialWell& well, int node_count,
                                     double domain_half_width, int grid_points) {
  check_grid(domain_half_width, grid_points, "solve_bound_state");
  if (node_count < 0) throw DomainError("solve_bound_state: node count must be >= 0");
  const auto x = uniform_grid(domain_half_width, grid_points);
  const double h = grid_spacing(x);
  if (well.is_analytic() && (std::abs(well(x.front())) >= edge_potential_tol ||
                             std::abs(well(x.back())) >= edge_potential_tol))
    throw DomainError("solve_bound_state: |V| >= 1e-10 at the domain edge, enlarge the domain");

  const auto window = energy_window(well, x);
  if (!(window.v_top > window.v_min))
    throw NoSuchStateError("solve_bound_state: potential has no well below its edge value");
  const std::size_t match = argmin_potential(well, x);
  auto f = [&](double e) { return matching_function(well, e, x, match); };

  for (int scan_points : {200, 2000}) {
    std::vector<std::pair<double, double>> brackets;
    double e_prev = 0.0, f_prev = 0.0;
    for (int j = 0; j < scan_points; ++j) {
      const double e =
          window.v_min + (window.v_top - window.v_min) * (j + 1.0) / (scan_points + 1.0);
      const double fe = f(e);
      if (j > 0 && (fe > 0.0) != (f_prev > 0.0)) brackets.emplace_back(e_prev, e);
      e_prev = e;
      f_prev = fe;
    }
    if (static_cast<int>(brackets.size()) <= node_count)
      throw NoSuchStateError("solve_bound_state: well supports only " +
                             std::to_string(brackets.size()) + " bound state(s), requested node count " +
                             std::to_string(node_count));

    auto [ea, eb] = brackets[node_count];
    const double energy = refine_root(f, ea, eb, f(ea), f(eb), 1e-13);

    std::vector<double> left(x.size(), 0.0), right(x.size(), 0.0);
    const auto l = shoot_from_edge(well, energy, x, match, true, &left);
    const auto r = shoot_from_edge(well, energy, x, match, false, &right);
    const double rn = std::hypot(r[0], r[1]);
    const double scale = std::abs(r[0]) > 0.5 * rn ? l[0] / r[0] : l[1] / r[1];

    StationarySolution sol;
    sol.x_grid = x;
    sol.kind = SolutionKind::bound;
    sol.energy = energy;
    sol.k_const = 0.0;
    sol.amplitude.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      sol.amplitude[i] = i <= match ? left[i] : scale * right[i];

    // Positive lobe first on the left, unit norm.
    double norm2 = 0.0;
    {
      std::vector<double> a2(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) a2[i] = sol.amplitude[i] * sol.amplitude[i];
      norm2 = trapezoid_integral(a2, h);
    }
    const double peak = max_abs(sol.amplitude);
    double sign = 1.0;
    for (double a : sol.amplitude) {
      if (std::abs(a) > 1e-3 * peak) {
        sign = a > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    const double factor = sign / std::sqrt(norm2);
    for (double& a : sol.amplitude) a *= factor;

    const double amax = max_abs(sol.amplitude);
    if (count_sign_changes(sol.amplitude, 1e-10 * amax) != node_count) continue;

    sol.amplitude_floor = amplitude_floor_ratio * amax;
    sol.q_of_x = quantum_potential_from_amplitude(sol.amplitude, h);
    sol.vt_of_x.assign(x.size(), energy); // K = 0
    return sol;
  }
  throw NumericError("solve_bound_state: could not isolate the state with " +
                     std::to_string(node_count) + " nodes");
}

double numerov_bound_oracle(const PotentialWell& well, int node_count, double domain_half_width,
                            int grid_points) {
  check_grid(domain_half_width, grid_points, "numerov_bound_oracle");
  if (node_count < 0) throw DomainError("numerov_bound_oracle: node count must be >= 0");
  const auto x = uniform_grid(domain_half_width, grid_points);
  const double h = grid_spacing(x);
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = well(x[i]);
  const auto window = energy_window(well, x);
  if (!(window.v_top > window.v_min))
    throw NoSuchStateError("numerov_bound_oracle: potential has no well below its edge value");

  // psi'' = g psi with g = 2 (V - E); psi(-X) = 0. Returns interior node count.
  const double c = h * h / 12.0;
  auto nodes = [&](double e) {
    double prev = 0.0, cur = 1e-30;
    double g_prev = 2.0 * (v[0] - e), g_cur = 2.0 * (v[1] - e);
    int count = 0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      const double g_next = 2.0 * (v[i + 1] - e);
      const double next =
          (2.0 * cur * (1.0 + 5.0 * c * g_cur) - prev * (1.0 - c * g_prev)) / (1.0 - c * g_next);
      if ((next > 0.0 && cur < 0.0) || (next < 0.0 && cur > 0.0)) ++count;
      prev = cur;
      cur = next;
      g_prev = g_cur;
      g_cur = g_next;
      if (std::abs(cur) > rescale_threshold) {
        prev /= rescale_threshold;
        cur /= rescale_threshold;
      }
    }
    return count;
  };

  double lo = window.v_min;
  double hi = window.v_top;
  if (nodes(hi) <= node_count)
    throw NoSuchStateError("numerov_bound_oracle: no state with " + std::to_string(node_count) +
                           " nodes below the edge potential");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (nodes(mid) > node_count)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Scattering

namespace {

struct EnvelopeFit {
  double mean, amplitude, residual_rms;
};

// Least-squares fit of rho(x) = C + D cos(2kx) + F sin(2kx) on a free region.
EnvelopeFit fit_standing_wave(std::span<const double> x, std::span<const double> rho, double k) {
  const double centre = 0.5 * (x.front() + x.back());
  double m[3][3] = {};
  double b[3] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double phi[3] = {1.0, std::cos(2.0 * k * (x[i] - centre)), std::sin(2.0 * k * (x[i] - centre))};
    for (int r = 0; r < 3; ++r) {
      b[r] += phi[r] * rho[i];
      for (int c = 0; c < 3; ++c) m[r][c] += phi[r] * phi[c];
    }
  }
  // Gaussian elimination with partial pivoting.
  int order[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[order[r]][col]) > std::abs(m[order[piv]][col])) piv = r;
    std::swap(order[col], order[piv]);
    const int p = order[col];
    if (m[p][col] == 0.0) throw AnalysisError("scattering: singular envelope fit");
    for (int r = col + 1; r < 3; ++r) {
      const int rr = order[r];
      const double f = m[rr][col] / m[p][col];
      for (int c = col; c < 3; ++c) m[rr][c] -= f * m[p][c];
      b[rr] -= f * b[p];
    }
  }
  double coef[3];
  for (int col = 2; col >= 0; --col) {
    const int p = order[col];
    double s = b[p];
    for (int c = col + 1; c < 3; ++c) s -= m[p][c] * coef[c];
    coef[col] = s / m[p][col];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double model = coef[0] + coef[1] * std::cos(2.0 * k * (x[i] - centre)) +
                         coef[2] * std::sin(2.0 * k * (x[i] - centre));
    ss += (rho[i] - model) * (rho[i] - model);
  }
  return {coef[0], std::hypot(coef[1], coef[2]), std::sqrt(ss / x.size())};
}

} // namespace

std::pair<StationarySolution, ScatteringCoefficients>
solve_scattering(const PotentialWell& well, double incident_k, double k_const,
                 double domain_half_width, int grid_points) {
  check_grid(domain_half_width, grid_points, "solve_scattering");
  if (!(incident_k > 0.0)) throw DomainError("solve_scattering: incident k must be > 0");
  if (!(k_const > 0.0)) throw DomainError("solve_scattering: K must be > 0");
  const auto x = uniform_grid(domain_half_width, grid_points);
  const double h = grid_spacing(x);
  if (std::abs(well(x.front())) >= edge_potential_tol || std::abs(well(x.back())) >= edge_potential_tol)
    throw DomainError("solve_scattering: |V| >= 1e-10 at the domain edge, enlarge the domain");

  const double energy = 0.5 * incident_k * incident_k;
  const double k2 = k_const * k_const;
  auto rhs = [&well, energy, k2](double t, const ode::State<2>& y) -> ode::State<2> {
    const double a = y[0];
    const double a3 = a * a * a;
    return {y[1], -2.0 * (energy - well(t)) * a + 2.0 * energy * k2 / a3};
  };
  auto stepper = ode::make_stepper<2>(rhs, shooting_settings());

  const std::size_t n = x.size();
  std::vector<double> amp(n);
  ode::State<2> y{std::sqrt(k_const), 0.0};
  amp[n - 1] = y[0];
  for (std::size_t i = n - 1; i > 0; --i) {
    try {
      y = stepper.advance(y, x[i], x[i - 1]);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string("solve_scattering: ") + e.what());
    }
    if (!(y[0] > 0.0) || !std::isfinite(y[0]) || !std::isfinite(y[1]))
      throw IntegrationError("solve_scattering: amplitude collapsed near x = " + std::to_string(x[i - 1]));
    amp[i - 1] = y[0];
  }

  // Incident side: the free region on the left.
  std::size_t free_end = 0;
  while (free_end < n && std::abs(well(x[free_end])) < edge_potential_tol) ++free_end;
  const double period = std::numbers::pi / incident_k;
  if (free_end < 16 || x[free_end - 1] - x.front() < period)
    throw AnalysisError("solve_scattering: incident-side free region shorter than one density period");

  std::vector<double> rho(free_end);
  for (std::size_t i = 0; i < free_end; ++i) rho[i] = amp[i] * amp[i];
  const auto fit = fit_standing_wave(std::span<const double>(x).first(free_end), rho, incident_k);
  const double rho_max = fit.mean + fit.amplitude;
  const double rho_min = fit.mean - fit.amplitude;
  if (!(rho_min > 0.0) || fit.residual_rms > 1e-6 * fit.mean)
    throw AnalysisError("solve_scattering: incident-side density is not a clean standing wave");

  const double ratio = std::sqrt(rho_max / rho_min);
  const double r_abs = (ratio - 1.0) / (ratio + 1.0);
  ScatteringCoefficients coeffs;
  coeffs.incident_k = incident_k;
  coeffs.reflection = r_abs * r_abs;
  coeffs.transmission = 1.0 - coeffs.reflection;

  StationarySolution sol;
  sol.x_grid = x;
  sol.amplitude = std::move(amp);
  sol.energy = energy;
  sol.k_const = k_const;
  sol.kind = SolutionKind::scattering;
  sol.amplitude_floor = amplitude_floor_ratio * max_abs(sol.amplitude);
  sol.q_of_x = quantum_potential_from_amplitude(sol.amplitude, h);
  sol.vt_of_x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = sol.amplitude[i] * sol.amplitude[i];
    sol.vt_of_x[i] = energy * (1.0 - k2 / (a2 * a2));
  }
  return {std::move(sol), coeffs};
}

TransferMatrixResult transfer_matrix_oracle(const PotentialWell& well, double incident_k,
                                            std::span<const double> x_grid, int cells) {
  if (!(incident_k > 0.0)) throw DomainError("transfer_matrix_oracle: incident k must be > 0");
  if (x_grid.size() < 2) throw DomainError("transfer_matrix_oracle: need at least 2 grid points");
  if (cells < 1) throw DomainError("transfer_matrix_oracle: need at least one cell");
  const double energy = 0.5 * incident_k * incident_k;
  const Complex i_unit{0.0, 1.0};
  const double k = incident_k;

  // Extent of the potential on the sampling grid.
  std::size_t first = x_grid.size(), last = 0;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (std::abs(well(x_grid[i])) > 1e-14) {
      first = std::min(first, i);
      last = i;
    }
  }

  TransferMatrixResult out;
  out.coefficients.incident_k = incident_k;
  if (first == x_grid.size()) {
    out.coefficients.reflection = 0.0;
    out.coefficients.transmission = 1.0;
    out.density.assign(x_grid.size(), 1.0);
    return out;
  }
  const double a = x_grid[first > 0 ? first - 1 : 0];
  const double b = x_grid[std::min(last + 1, x_grid.size() - 1)];
  const double d = (b - a) / cells;

  // psi and psi' at every cell boundary, propagated from the transmitted side
  // where psi = exp(ik(x - b)).
  std::vector<Complex> psi(cells + 1), dpsi(cells + 1), kcell(cells);
  psi[cells] = 1.0;
  dpsi[cells] = i_unit * k;
  auto propagate_back = [](Complex p, Complex dp, Complex kc, double dist, Complex& p_out, Complex& dp_out) {
    if (kc == 0.0) {
      p_out = p - dp * dist;
      dp_out = dp;
      return;
    }
    const Complex c = std::cos(kc * dist);
    const Complex s = std::sin(kc * dist);
    p_out = p * c - dp * s / kc;
    dp_out = p * kc * s + dp * c;
  };
  for (int j = cells - 1; j >= 0; --j) {
    const double mid = a + (j + 0.5) * d;
    kcell[j] = std::sqrt(Complex(2.0 * (energy - well(mid)), 0.0));
    propagate_back(psi[j + 1], dpsi[j + 1], kcell[j], d, psi[j], dpsi[j]);
  }

  // Decompose on the incident side: psi = A e^{ikx} + B e^{-ikx}.
  const Complex incoming = 0.5 * (psi[0] + dpsi[0] / (i_unit * k));
  const Complex reflected = 0.5 * (psi[0] - dpsi[0] / (i_unit * k));
  const double in2 = std::norm(incoming);
  out.coefficients.transmission = 1.0 / in2;
  out.coefficients.reflection = std::norm(reflected) / in2;

  out.density.resize(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double xi = x_grid[i];
    Complex p, dp;
    if (xi >= b) {
      p = std::exp(i_unit * k * (xi - b));
    } else if (xi < a) {
      propagate_back(psi[0], dpsi[0], Complex(k, 0.0), a - xi, p, dp);
    } else {
      auto j = static_cast<int>((xi - a) / d);
      j = std::clamp(j, 0, cells - 1);
      const double right = a + (j + 1) * d;
      propagate_back(psi[j + 1], dpsi[j + 1], kcell[j], right - xi, p, dp);
    }
    out.density[i] = std::norm(p);
  }
  return out;
}

} // namespace vbohm::bohm1d
