// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace vbohm::bohm1d {

/// V(x) = v0 * exp(-(x/L)^n), or a tabulated potential interpolated by a
/// natural cubic spline (clamped to the end values outside the table).
class PotentialWell {
public:
  /// n must be even and >= 2, L > 0.
  static PotentialWell analytic(double v0, double half_width, int exponent = 16);
  /// x strictly increasing, at least 4 samples.
  static PotentialWell tabulated(std::vector<double> x, std::vector<double> v);

  double operator()(double x) const;

  bool is_analytic() const { return tabulated_x_.empty(); }
  double v0() const { return v0_; }
  double half_width() const { return half_width_; }
  int exponent() const { return exponent_; }
  const std::vector<double>& table_x() const { return tabulated_x_; }
  const std::vector<double>& table_v() const { return tabulated_v_; }

private:
  PotentialWell() = default;

  double v0_ = 0.0;
  double half_width_ = 1.0;
  int exponent_ = 16;
  std::vector<double> tabulated_x_;
  std::vector<double> tabulated_v_;
  std::vector<double> spline_m_; // second derivatives at the knots
};

enum class SolutionKind { bound, scattering };

struct StationarySolution {
  std::vector<double> x_grid;
  std::vector<double> amplitude; // A(x)
  double energy = 0.0;
  double k_const = 0.0; // K, transmitted density for scattering states, 0 for bound states
  SolutionKind kind = SolutionKind::bound;
  std::vector<double> q_of_x;  // -(1/2) A''/A
  std::vector<double> vt_of_x; // E (1 - K^2/A^4)
  double amplitude_floor = 0.0; // q and vt are meaningful only where |A| > floor

  bool resolved(std::size_t i) const { return std::abs(amplitude[i]) > amplitude_floor; }
};

struct ScatteringCoefficients {
  double reflection = 0.0;
  double transmission = 0.0;
  double incident_k = 0.0;
};

/// Relative amplitude floor below which Q and V_T are not evaluated.
inline constexpr double amplitude_floor_ratio = 1e-6;

std::vector<double> uniform_grid(double half_width, int points);

/// Q = -(1/2) (sqrt rho)'' / sqrt rho on a uniform grid with the given spacing.
/// Fourth-order central differences inside, five-point one-sided stencils on
/// the two outermost points at each end.
std::vector<double> quantum_potential(std::span<const double> density, double spacing);

/// Same operator applied to a signed amplitude; samples with A == 0 get Q = 0.
std::vector<double> quantum_potential_from_amplitude(std::span<const double> amplitude,
                                                     double spacing);

/// rho = K sqrt(E) / sqrt(E - V_T). Throws TurningPointError naming the first
/// x (or sample index when x_grid is empty) with E <= V_T.
std::vector<double> classical_density(double energy, std::span<const double> vt, double k_const,
                                      std::span<const double> x_grid = {});

/// Bound state of -(1/2) A'' = [E(1 - K^2/A^4) - V] A with K = 0, by shooting
/// from both edges with decaying boundary conditions and matching at the
/// potential minimum. The result has node_count nodes and int A^2 dx = 1.
StationarySolution solve_bound_state(const PotentialWell& well, int node_count,
                                     double domain_half_width, int grid_points);

/// Scattering state for a wave incident from the left, integrated backwards
/// from the transmitted side where A = sqrt(K), A' = 0.
std::pair<StationarySolution, ScatteringCoefficients>
solve_scattering(const PotentialWell& well, double incident_k, double k_const,
                 double domain_half_width, int grid_points);

/// Linear Schroedinger eigenvalue by Numerov integration and bisection on the
/// node count (Dirichlet walls at +-domain_half_width).
double numerov_bound_oracle(const PotentialWell& well, int node_count, double domain_half_width,
                            int grid_points);

struct TransferMatrixResult {
  ScatteringCoefficients coefficients;
  std::vector<double> density; // |psi|^2 at x_grid, unit transmitted density
};

/// Piecewise-constant (midpoint) discretisation of V over the part of
/// [x_grid.front(), x_grid.back()] where |V| > 1e-14, propagated with exact
/// 2x2 transfer matrices.
TransferMatrixResult transfer_matrix_oracle(const PotentialWell& well, double incident_k,
                                            std::span<const double> x_grid, int cells = 40000);

} // namespace vbohm::bohm1d
