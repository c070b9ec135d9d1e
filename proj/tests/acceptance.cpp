// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance               run all
//   acceptance --criterion N run one; exit status 1 when it fails
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "faddeeva_oracle.hpp"
#include "vbohm/bohm1d.hpp"
#include "vbohm/cli.hpp"
#include "vbohm/dielectric.hpp"
#include "vbohm/specfun.hpp"
#include "vbohm/spreading.hpp"
#include "vbohm/units.hpp"

using namespace vbohm;
using nlohmann::json;
using Complex = std::complex<double>;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Detail {
public:
  template <class T>
  Detail& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

private:
  std::ostringstream os_;
};

json run_cli(std::vector<std::string> args, int& code) {
  args.insert(args.begin(), "vbohm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return code == 0 ? json::parse(out.str()) : json();
}

// --------------------------------------------------------------------------

Verdict bound_state_energy() {
  int code = 0;
  const auto doc = run_cli({"bound", "--v0", "-0.5", "--L", "2", "--n", "16", "--nodes", "0"}, code);
  if (code != 0) return {false, "cli exit " + std::to_string(code)};
  const double e = doc["outputs"]["energy_au"];
  const double diff = doc["outputs"]["energy_difference_au"];
  Detail d;
  d << "E = " << e << ", |E - E_numerov| = " << std::abs(diff);
  return {e >= -0.37 && e <= -0.35 && std::abs(diff) <= 1e-6, d.str()};
}

Verdict scattering_state() {
  int code = 0;
  const auto doc = run_cli({"scatter", "--v0", "-0.5", "--L", "2", "--n", "16", "--k", "1.5"}, code);
  if (code != 0) return {false, "cli exit " + std::to_string(code)};
  const double r = doc["outputs"]["reflection"], t = doc["outputs"]["transmission"];
  const double rms = doc["outputs"]["rms_density_difference"];
  Detail d;
  d << "R = " << r << ", |R + T - 1| = " << std::abs(r + t - 1.0) << ", rms density diff = " << rms;
  return {std::abs(r + t - 1.0) <= 1e-8 && rms <= 1e-6, d.str()};
}

Verdict bohm_identity() {
  std::vector<bohm1d::PotentialWell> wells{bohm1d::PotentialWell::analytic(-0.5, 2.0, 16)};
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> depth(-2.0, -0.1), width(1.0, 4.0);
  for (int i = 0; i < 5; ++i) wells.push_back(bohm1d::PotentialWell::analytic(depth(gen), width(gen), 16));

  double worst = 0.0;
  for (const auto& w : wells) {
    const auto s = bohm1d::solve_bound_state(w, 0, 16.0, 6401);
    double amax = 0.0;
    for (double a : s.amplitude) amax = std::max(amax, std::abs(a));
    for (std::size_t i = 0; i < s.x_grid.size(); ++i)
      if (std::abs(s.amplitude[i]) > 1e-6 * amax)
        worst = std::max(worst, std::abs(s.q_of_x[i] + w(s.x_grid[i]) - s.energy));
  }
  Detail d;
  d << "max |Q + V - E| = " << worst << " over " << wells.size() << " wells";
  return {worst <= 1e-5, d.str()};
}

Verdict faddeeva_accuracy() {
  std::mt19937_64 gen(1234567);
  std::uniform_real_distribution<double> log_r(-3.0, 4.0), arg(0.0, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    Complex z = std::polar(std::pow(10.0, log_r(gen)), arg(gen));
    z = {z.real(), std::max(0.0, z.imag())};
    const Complex want = testing::faddeeva_oracle(z);
    worst = std::max(worst, std::abs(specfun::faddeeva(z) - want) / std::abs(want));
  }
  double seam = 0.0;
  for (int j = 0; j <= 200; ++j) {
    const double phi = std::numbers::pi * j / 200.0;
    for (double r : {specfun::taylor_radius, specfun::cf_radius}) {
      for (double eps : {-1e-12, 1e-12}) {
        Complex z = std::polar(r + eps, phi);
        z = {z.real(), std::max(0.0, z.imag())};
        const Complex want = testing::faddeeva_oracle(z);
        seam = std::max(seam, std::abs(specfun::faddeeva(z) - want) / std::abs(want));
        const Complex a = r == specfun::taylor_radius ? specfun::branch::taylor(z) : specfun::branch::trapezoid(z);
        const Complex b = r == specfun::taylor_radius ? specfun::branch::trapezoid(z)
                                                      : specfun::branch::continued_fraction(z);
        seam = std::max(seam, std::abs(a - b) / std::abs(want));
      }
    }
  }
  Detail d;
  d << "max rel err = " << worst << " (500 points), seam = " << seam;
  return {worst <= 1e-10 && seam <= 1e-11, d.str()};
}

Verdict drude_anchoring() {
  const dielectric::OccupancyModel occ(1.0);
  const double wp = occ.implied_plasma_freq();
  const double gamma = 1e-6;
  // Relative to the Drude term wp^2/wc^2: eps itself vanishes at w = wp, where
  // the thermal shift ~ (3/2)(k kappa / w)^2 makes |eps|-relative errors unbounded.
  double worst = 0.0, worst_eps = 0.0;
  for (int i = 0; i <= 450; ++i) {
    const double w = (0.5 + 0.01 * i) * wp;
    const Complex wc{w, gamma};
    const Complex term = occ.implied_plasma_freq_sq() / (wc * wc);
    const Complex drude = 1.0 - term;
    const Complex eps = dielectric::epsilon_quantum(1e-3, {w, gamma}, occ);
    worst = std::max(worst, std::abs(eps - drude) / std::abs(term));
    worst_eps = std::max(worst_eps, std::abs(eps - drude) / std::abs(drude));
  }
  Detail d;
  d << "max |eps - eps_drude| / |wp^2/wc^2| = " << worst << " (relative to |eps_drude|: " << worst_eps
    << ", singular at w = wp)";
  return {worst <= 1e-3, d.str()};
}

Verdict small_k_agreement_and_ridge() {
  const dielectric::OccupancyModel occ(1.0);
  const double gamma = units::ev_to_hartree(0.1);
  const int n = 501;
  const double step = 10.0 / (n - 1);
  auto row = [&](dielectric::Model m, double k) {
    std::vector<double> out;
    for (int j = 0; j < n; ++j) out.push_back(dielectric::loss(dielectric::epsilon(m, k, {j * step, gamma}, occ)));
    return out;
  };
  auto argmax = [&](const std::vector<double>& v) {
    return step * static_cast<double>(std::max_element(v.begin(), v.end()) - v.begin());
  };

  const auto q02 = row(dielectric::Model::quantum, 0.2), c02 = row(dielectric::Model::classical, 0.2);
  const double peak = *std::max_element(q02.begin(), q02.end());
  double diff = 0.0;
  for (int j = 0; j < n; ++j) diff = std::max(diff, std::abs(q02[j] - c02[j]));
  const double rel = diff / peak;

  const double q_peak = argmax(row(dielectric::Model::quantum, 3.0));
  const double c_peak = argmax(row(dielectric::Model::classical, 3.0));
  const bool a = rel <= 0.02;
  const bool b = std::abs(q_peak - 4.5) <= 2.0 * gamma + step;
  const bool c = std::abs(c_peak - 4.5) > 10.0 * gamma;
  Detail d;
  d << "k=0.2 max loss diff / peak = " << rel << (a ? " ok" : " >2%") << "; k=3 quantum peak " << q_peak
    << " (|peak-4.5| = " << std::abs(q_peak - 4.5) << ", limit " << 2.0 * gamma + step << (b ? " ok" : " exceeded")
    << "); classical peak " << c_peak << (c ? " displaced ok" : " not displaced");
  return {a && b && c, d.str()};
}

Verdict fsum() {
  const dielectric::OccupancyModel occ(1.0);
  const double expected = 0.5 * std::sqrt(std::numbers::pi);
  double worst = 0.0;
  for (auto m : {dielectric::Model::quantum, dielectric::Model::classical})
    for (double k : {0.3, 1.0, 3.0}) {
      const auto r = dielectric::fsum_rule(k, occ, 1e-3, m);
      worst = std::max(worst, std::abs(r.value - expected) / expected);
    }
  Detail d;
  d << "max rel deviation = " << worst;
  return {worst <= 1e-2, d.str()};
}

Verdict closed_form_vs_quadrature() {
  std::mt19937_64 gen(8080);
  std::uniform_real_distribution<double> lk(-1.3, 0.7), lkap(-0.5, 0.5), lg(-3.0, -0.5), u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double k = std::pow(10.0, lk(gen));
    const dielectric::OccupancyModel occ(std::pow(10.0, lkap(gen)));
    const double scale = 0.5 * k * k + 3.0 * k * occ.kappa() + 2.0 * occ.implied_plasma_freq();
    const dielectric::ComplexFrequency f{scale * u(gen), std::pow(10.0, lg(gen))};
    const Complex a = dielectric::epsilon_rpa_numeric(k, f, occ);
    const Complex b = dielectric::epsilon_quantum(k, f, occ);
    worst = std::max(worst, std::abs(a - b));
  }
  Detail d;
  d << "max |eps_numeric - eps_closed| = " << worst;
  return {worst <= 1e-7, d.str()};
}

Verdict spreading_ensemble() {
  const spreading::PacketParams p(1.0, 0.5);
  const double alpha = p.alpha();
  double ident = 0.0;
  for (double at = 0.0; at <= 100.0; at += 0.01) {
    const double t = at / alpha;
    ident = std::max(ident, std::abs(spreading::cosh_spreading(t, p) - spreading::sigma_quantum(t, p)) /
                                spreading::sigma_quantum(t, p));
  }
  std::vector<double> ts;
  for (double at : {0.5, 1.0, 2.0, 4.0}) ts.push_back(at / alpha);

  const auto exact = spreading::simulate_ensemble(p, 100000, 2024, ts, spreading::SVariant::exact);
  double exact_z = 0.0;
  for (const auto& e : exact.sigma_estimates)
    exact_z = std::max(exact_z, std::abs(e.sigma - spreading::sigma_quantum(e.t, p)) / e.standard_error);

  const auto paper = spreading::simulate_ensemble(p, 100000, 2024, ts, spreading::SVariant::paper);
  double paper_z = 0.0;
  for (const auto& e : paper.sigma_estimates)
    paper_z = std::max(paper_z, std::abs(e.sigma - p.sigma_x0() * spreading::spreading_factor(e.t, p, spreading::SVariant::paper)) /
                                    e.standard_error);

  const auto report = spreading::discrepancy_report(p, ts);
  std::printf("  discrepancy report (c_hbar target %.3g):\n", report.c_hbar_target);
  std::printf("  %8s %12s %12s %12s %12s %10s\n", "t", "sigma_q", "sigma_cosh", "paper_ode", "exact_ode", "c_hbar");
  for (const auto& r : report.rows)
    std::printf("  %8.3f %12.8f %12.8f %12.8f %12.8f %10.6f\n", r.t, r.sigma_quantum, r.sigma_cosh,
                r.sigma_paper_ode, r.sigma_exact_ode, r.c_hbar);
  std::printf("  gaussian Q: quoted %+.4f %+.4f x^2, direct %+.4f %+.4f x^2\n", report.quoted_q_offset,
              report.quoted_q_curvature, report.direct_q_offset, report.direct_q_curvature);

  Detail d;
  d << "cosh/asinh max rel = " << ident << "; exact variant max |z| = " << exact_z
    << "; paper variant vs scalar ODE max |z| = " << paper_z;
  return {ident <= 1e-12 && exact_z <= 3.0 && paper_z <= 3.0 && !report.rows.empty(), d.str()};
}

Verdict symmetry_passivity() {
  std::mt19937_64 gen(424242);
  std::uniform_real_distribution<double> lk(-2.0, 1.0), lw(-2.0, 1.5), lkap(-0.7, 0.7), lg(-4.0, 0.0), u(0.0, 1.0);
  std::uniform_int_distribution<unsigned> workers(2, 8);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const double k = std::pow(10.0, lk(gen));
    const dielectric::OccupancyModel occ(std::pow(10.0, lkap(gen)));
    const double w = std::pow(10.0, lw(gen));
    const double g = std::pow(10.0, lg(gen));
    bool ok = true;
    for (auto m : {dielectric::Model::quantum, dielectric::Model::classical, dielectric::Model::drude}) {
      const Complex pos = dielectric::epsilon(m, k, {w, g}, occ);
      const Complex neg = dielectric::epsilon(m, k, {-w, g}, occ);
      ok = ok && std::abs(neg - std::conj(pos)) <= 1e-12 * std::abs(pos);
      ok = ok && dielectric::loss(pos) >= -1e-12;
    }
    if (i % 10 == 0) {
      std::vector<double> ks{k, 1.3 * k, 2.1 * k}, ws;
      for (int j = 0; j < 7; ++j) ws.push_back(w * (0.2 + 0.3 * j));
      const auto m = u(gen) < 0.5 ? dielectric::Model::quantum : dielectric::Model::classical;
      const auto one = dielectric::scan_loss_grid(ks, ws, g, occ, m, 1);
      const auto many = dielectric::scan_loss_grid(ks, ws, g, occ, m, workers(gen));
      ok = ok && one.values == many.values;
    }
    failures += ok ? 0 : 1;
  }
  Detail d;
  d << failures << " failures in 1000 cases";
  return {failures == 0, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

} // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  const std::vector<Criterion> criteria{
      {1, "bound state energy and Numerov agreement", 1.0, bound_state_energy},
      {2, "scattering flux and transfer-matrix density", 1.0, scattering_state},
      {3, "Q + V = E on bound states", 60.0, bohm_identity},
      {4, "Faddeeva accuracy and seams", 10.0, faddeeva_accuracy},
      {5, "small-k limit matches Drude", 1.0, drude_anchoring},
      {6, "quantum/classical agreement at small k, ridge at large k", 30.0, small_k_agreement_and_ridge},
      {7, "f-sum rule", 60.0, fsum},
      {8, "closed form vs direct quadrature", 60.0, closed_form_vs_quadrature},
      {9, "ensemble spreading", 120.0, spreading_ensemble},
      {10, "symmetry, passivity, grid determinism", 60.0, symmetry_passivity},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = v.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %2d %s: %s | %s | %.2f s (limit %.0f s)%s\n", c.id, pass ? "PASS" : "FAIL", c.name,
                v.detail.c_str(), secs, c.limit_seconds, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
