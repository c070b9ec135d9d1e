// SPDX-License-Identifier: Apache-2.0
#include "vbohm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vbohm/bohm1d.hpp"
#include "vbohm/dielectric.hpp"
#include "vbohm/errors.hpp"
#include "vbohm/spreading.hpp"
#include "vbohm/units.hpp"

namespace vbohm::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

double parse_number(std::string_view text, std::string_view what) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    throw UsageError(std::string(what) + ": not a finite number: '" + std::string(text) + "'");
  return value;
}

// Typed access to the raw parameter map.
class Params {
public:
  explicit Params(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }
  const std::string& text(const std::string& key) const { return raw_.at(key); }

  double number(const std::string& key) const {
    if (!has(key)) throw UsageError("--" + key + " is required");
    return parse_number(text(key), "--" + key);
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw UsageError("--" + key + ": expected an integer");
    return static_cast<long>(v);
  }
  std::string word(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

private:
  const std::map<std::string, std::string>& raw_;
};

double positive(double v, std::string_view what) {
  if (!(v > 0.0)) throw UsageError(std::string(what) + " must be > 0");
  return v;
}

double non_negative(double v, std::string_view what) {
  if (!(v >= 0.0)) throw UsageError(std::string(what) + " must be >= 0");
  return v;
}

void exclusive(const Params& p, std::initializer_list<const char*> keys) {
  int given = 0;
  std::string names;
  for (const char* k : keys) {
    given += p.has(k) ? 1 : 0;
    names += names.empty() ? std::string("--") + k : std::string(", --") + k;
  }
  if (given > 1) throw UsageError("only one of " + names + " may be given");
}

double resolve_kappa(const Params& p) {
  exclusive(p, {"kappa", "t-ev", "t-kelvin"});
  if (p.has("t-ev")) return units::kappa_from_temperature(positive(p.number("t-ev"), "--t-ev"));
  if (p.has("t-kelvin"))
    return units::kappa_from_temperature(
        units::kelvin_to_ev(positive(p.number("t-kelvin"), "--t-kelvin")));
  return positive(p.number("kappa", 1.0), "--kappa");
}

double resolve_gamma(const Params& p, double fallback_ev) {
  exclusive(p, {"gamma", "gamma-ev"});
  if (p.has("gamma")) return positive(p.number("gamma"), "--gamma");
  return positive(units::ev_to_hartree(p.number("gamma-ev", fallback_ev)), "--gamma-ev");
}

unsigned resolve_workers(const Params& p) {
  const long w = p.integer("workers", 1);
  if (w < 1 || w > 1024) throw UsageError("--workers must be in [1, 1024]");
  return static_cast<unsigned>(w);
}

std::vector<dielectric::Model> resolve_models(const Params& p, const std::string& fallback,
                                              bool allow_both) {
  const std::string name = p.word("model", fallback);
  if (allow_both && name == "both") return {dielectric::Model::quantum, dielectric::Model::classical};
  try {
    return {dielectric::model_from_string(name)};
  } catch (const DomainError&) {
    throw UsageError("--model: unknown model '" + name + "'");
  }
}

fs::path default_dir() {
  const char* env = std::getenv(output_dir_env);
  return (env && *env) ? fs::path(env) : fs::path(".");
}

void ensure_parent(const fs::path& file) {
  const fs::path parent = file.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw UsageError("cannot create directory " + parent.string() + ": " + ec.message());
}

void write_file(const fs::path& file, const std::string& content) {
  ensure_parent(file);
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw UsageError("cannot open " + file.string() + " for writing");
  os << content;
  os.close();
  if (!os) throw UsageError("write to " + file.string() + " failed");
}

// Inserts "_tag" before the extension.
fs::path tagged(const fs::path& file, const std::string& tag) {
  fs::path out = file;
  out.replace_filename(file.stem().string() + "_" + tag + file.extension().string());
  return out;
}

class CsvWriter {
public:
  explicit CsvWriter(std::initializer_list<const char*> columns) {
    os_ << "# columns:";
    bool first = true;
    for (const char* c : columns) {
      os_ << (first ? " " : ", ") << c;
      first = false;
    }
    os_ << '\n';
  }
  void comment(const std::string& line) { os_ << "# " << line << '\n'; }
  void row(std::initializer_list<double> values) { row("", values); }
  void row(const std::string& label, std::initializer_list<double> values) {
    bool first = label.empty();
    os_ << label;
    for (double v : values) {
      if (!first) os_ << ',';
      os_ << format_double(v);
      first = false;
    }
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

private:
  std::ostringstream os_;
};

ordered_json document(const ordered_json& inputs, const ordered_json& outputs) {
  ordered_json doc;
  doc["schema"] = 1;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  return doc;
}

void emit_summary(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
  } else {
    write_file(cfg.output_path, text);
  }
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------- dielectric

int run_eps_point(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  const auto models = resolve_models(p, "quantum", false);
  const double kappa = resolve_kappa(p);
  const double gamma = resolve_gamma(p, 0.1);
  const double k = positive(p.number("k"), "--k");
  const double omega = p.number("omega");
  const dielectric::OccupancyModel occ(kappa);
  const auto s = dielectric::sample(models[0], k, {omega, gamma}, occ);

  if (cfg.format == Format::csv) {
    CsvWriter csv({"k_au", "omega_au", "gamma_au", "eps_re", "eps_im", "loss"});
    csv.row({k, omega, gamma, s.epsilon.real(), s.epsilon.imag(), s.loss});
    emit_summary(cfg, csv.str(), out);
    return exit_ok;
  }
  ordered_json in{{"model", std::string(dielectric::to_string(models[0]))},
                  {"k_au", k}, {"omega_au", omega}, {"gamma_au", gamma}, {"kappa_au", kappa}};
  ordered_json res{{"epsilon_re", s.epsilon.real()}, {"epsilon_im", s.epsilon.imag()}, {"loss", s.loss},
                   {"plasma_freq_au", occ.implied_plasma_freq()}};
  emit_summary(cfg, dump(document(in, res)), out);
  return exit_ok;
}

std::string fig2_script(const std::vector<fs::path>& files, const std::vector<std::string>& labels,
                        const std::vector<double>& k_axis) {
  std::ostringstream gp;
  gp << "# gnuplot: false colour loss function Im(-1/eps) over (omega, k)\n";
  gp << "set datafile separator ','\n";
  gp << "set datafile commentschars '#'\n";
  gp << "set terminal pngcairo size " << 700 * files.size() << ",600\n";
  gp << "set output 'fig2.png'\n";
  gp << "set multiplot layout 1," << files.size() << "\n";
  gp << "set xlabel 'omega (a.u.)'\nset ylabel 'k (a.u.)'\n";
  gp << "set logscale cb\nset cbrange [1e-4:*]\n";
  gp << "set yrange [" << format_double(k_axis.front()) << ":" << format_double(k_axis.back()) << "]\n";
  gp << "set palette rgbformulae 33,13,10\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    gp << "set title '" << labels[i] << "'\n";
    gp << "plot '" << files[i].filename().string()
       << "' using 2:1:($3 > 1e-4 ? $3 : 1e-4) with image notitle, "
       << "(x > 0 ? sqrt(2*x) : 1/0) with lines lc 'white' dt 2 title 'omega = k^2/2'\n";
  }
  gp << "unset multiplot\n";
  return gp.str();
}

int run_eps_scan(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  const auto models = resolve_models(p, "quantum", true);
  const double kappa = resolve_kappa(p);
  const double gamma = resolve_gamma(p, 0.1);
  const unsigned workers = resolve_workers(p);
  if (!p.has("k")) throw UsageError("--k range is required");
  if (!p.has("omega")) throw UsageError("--omega range is required");
  const auto k_axis = parse_range(p.text("k"));
  const auto omega_axis = parse_range(p.text("omega"));
  for (double k : k_axis) positive(k, "--k values");
  if (cfg.emit_plot_script && cfg.format != Format::csv)
    throw UsageError("--emit-plot-script needs --format csv");

  const std::string ext = cfg.format == Format::csv ? ".csv" : ".json";
  const dielectric::OccupancyModel occ(kappa);

  std::vector<fs::path> files;
  std::vector<std::string> labels;
  ordered_json listing = ordered_json::array();
  for (auto model : models) {
    const std::string name(dielectric::to_string(model));
    fs::path file;
    if (cfg.output_path.empty())
      file = default_dir() / ("loss_" + name + ext);
    else
      file = models.size() > 1 ? tagged(cfg.output_path, name) : cfg.output_path;

    const auto grid = dielectric::scan_loss_grid(k_axis, omega_axis, gamma, occ, model, workers);

    if (cfg.format == Format::csv) {
      CsvWriter csv({"k_au", "omega_au", "loss"});
      csv.comment("model " + name + ", kappa_au " + format_double(kappa) + ", gamma_au " +
                  format_double(gamma));
      for (std::size_t i = 0; i < k_axis.size(); ++i)
        for (std::size_t j = 0; j < omega_axis.size(); ++j)
          csv.row({k_axis[i], omega_axis[j], grid.at(i, j)});
      write_file(file, csv.str());
    } else {
      ordered_json rows = ordered_json::array();
      for (std::size_t i = 0; i < k_axis.size(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < omega_axis.size(); ++j) row.push_back(grid.at(i, j));
        rows.push_back(std::move(row));
      }
      ordered_json in{{"model", name}, {"kappa_au", kappa}, {"gamma_au", gamma},
                      {"k_au", k_axis}, {"omega_au", omega_axis}};
      write_file(file, dump(document(in, {{"loss", rows}})));
    }
    files.push_back(file);
    labels.push_back(name);
    listing.push_back({{"model", name}, {"path", file.string()}});
  }

  ordered_json summary{{"files", listing}};
  if (cfg.emit_plot_script) {
    const fs::path script = files.front().parent_path() / "fig2.gp";
    write_file(script, fig2_script(files, labels, k_axis));
    summary["plot_script"] = script.string();
  }
  out << dump(document({{"k_count", k_axis.size()}, {"omega_count", omega_axis.size()},
                        {"kappa_au", kappa}, {"gamma_au", gamma}},
                       summary));
  return exit_ok;
}

int run_sumrule(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  const auto models = resolve_models(p, "both", true);
  const double kappa = resolve_kappa(p);
  const double gamma = resolve_gamma(p, 0.1);
  const double k = positive(p.number("k"), "--k");
  std::optional<double> omega_max;
  if (p.has("omega-max")) omega_max = positive(p.number("omega-max"), "--omega-max");
  const dielectric::OccupancyModel occ(kappa);

  ordered_json res = ordered_json::object();
  CsvWriter csv({"model", "value", "error", "omega_max_au", "expected", "relative_deviation"});
  for (auto model : models) {
    const auto r = dielectric::fsum_rule(k, occ, gamma, model, omega_max);
    const double dev = (r.value - r.expected) / r.expected;
    res[std::string(dielectric::to_string(model))] = {
        {"value", r.value}, {"error", r.error}, {"omega_max_au", r.omega_max},
        {"expected", r.expected}, {"relative_deviation", dev}};
    csv.row(std::string(dielectric::to_string(model)), {r.value, r.error, r.omega_max, r.expected, dev});
  }
  if (cfg.format == Format::csv) {
    emit_summary(cfg, csv.str(), out);
  } else {
    ordered_json in{{"k_au", k}, {"kappa_au", kappa}, {"gamma_au", gamma}};
    if (omega_max) in["omega_max_au"] = *omega_max;
    emit_summary(cfg, dump(document(in, res)), out);
  }
  return exit_ok;
}

int run_ridge(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  const auto models = resolve_models(p, "quantum", true);
  const double kappa = resolve_kappa(p);
  const double gamma = resolve_gamma(p, 0.1);
  const double k = positive(p.number("k"), "--k");
  const dielectric::OccupancyModel occ(kappa);
  const double lo = non_negative(p.number("omega-min", 0.0), "--omega-min");
  const double hi = p.number("omega-max", dielectric::default_sumrule_cutoff(k, occ));
  if (!(hi > lo)) throw UsageError("--omega-max must exceed --omega-min");
  const long coarse = p.integer("points", 2001);
  if (coarse < 3) throw UsageError("--points must be >= 3");

  ordered_json res = ordered_json::object();
  CsvWriter csv({"model", "peak_omega_au", "bethe_omega_au", "offset_au", "offset_over_gamma"});
  for (auto model : models) {
    const double peak = dielectric::bethe_ridge_peak(k, occ, gamma, lo, hi, model, static_cast<int>(coarse));
    const double bethe = 0.5 * k * k;
    res[std::string(dielectric::to_string(model))] = {
        {"peak_omega_au", peak}, {"bethe_omega_au", bethe}, {"offset_au", peak - bethe},
        {"offset_over_gamma", (peak - bethe) / gamma}};
    csv.row(std::string(dielectric::to_string(model)), {peak, bethe, peak - bethe, (peak - bethe) / gamma});
  }
  if (cfg.format == Format::csv) {
    emit_summary(cfg, csv.str(), out);
  } else {
    ordered_json in{{"k_au", k}, {"kappa_au", kappa}, {"gamma_au", gamma},
                    {"omega_min_au", lo}, {"omega_max_au", hi}};
    emit_summary(cfg, dump(document(in, res)), out);
  }
  return exit_ok;
}

int run_drude(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  exclusive(p, {"plasma-freq", "kappa", "t-ev", "t-kelvin"});
  double wp2 = 0.0;
  if (p.has("plasma-freq")) {
    const double wp = positive(p.number("plasma-freq"), "--plasma-freq");
    wp2 = wp * wp;
  } else {
    wp2 = dielectric::OccupancyModel(resolve_kappa(p)).implied_plasma_freq_sq();
  }
  exclusive(p, {"gamma", "gamma-ev"});
  double gamma = 0.0;
  if (p.has("gamma")) gamma = non_negative(p.number("gamma"), "--gamma");
  if (p.has("gamma-ev")) gamma = non_negative(units::ev_to_hartree(p.number("gamma-ev")), "--gamma-ev");
  const double omega = p.number("omega");
  if (omega == 0.0 && gamma == 0.0) throw UsageError("omega + i gamma must be non-zero");
  const auto eps = dielectric::epsilon_drude({omega, gamma}, wp2);
  const double l = dielectric::loss(eps);

  if (cfg.format == Format::csv) {
    CsvWriter csv({"omega_au", "gamma_au", "plasma_freq_sq_au", "eps_re", "eps_im", "loss"});
    csv.row({omega, gamma, wp2, eps.real(), eps.imag(), l});
    emit_summary(cfg, csv.str(), out);
  } else {
    ordered_json in{{"omega_au", omega}, {"gamma_au", gamma}, {"plasma_freq_sq_au", wp2}};
    emit_summary(cfg, dump(document(in, {{"epsilon_re", eps.real()}, {"epsilon_im", eps.imag()}, {"loss", l}})), out);
  }
  return exit_ok;
}

// ---------------------------------------------------------------- bohm1d

bohm1d::PotentialWell resolve_well(const Params& p, ordered_json& inputs) {
  if (p.has("potential-file")) {
    for (const char* k : {"v0", "L", "n"})
      if (p.has(k)) throw UsageError(std::string("--") + k + " conflicts with --potential-file");
    const std::string path = p.text("potential-file");
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read potential file " + path);
    auto [x, v] = read_potential_table(in);
    inputs["potential_file"] = path;
    try {
      return bohm1d::PotentialWell::tabulated(std::move(x), std::move(v));
    } catch (const DomainError& e) {
      throw UsageError(std::string("potential file ") + path + ": " + e.what());
    }
  }
  const double v0 = p.number("v0", -0.5);
  const double L = positive(p.number("L", 2.0), "--L");
  const long n = p.integer("n", 16);
  if (n < 2 || n % 2 != 0 || n > 256) throw UsageError("--n must be even, in [2, 256]");
  inputs["v0_au"] = v0;
  inputs["L_au"] = L;
  inputs["n"] = n;
  return bohm1d::PotentialWell::analytic(v0, L, static_cast<int>(n));
}

std::pair<double, int> resolve_domain(const Params& p, ordered_json& inputs, double fallback_x,
                                      long fallback_points) {
  const double X = positive(p.number("half-width", fallback_x), "--half-width");
  const long points = p.integer("points", fallback_points);
  if (points < 5 || points > 50'000'000) throw UsageError("--points must be in [5, 5e7]");
  inputs["half_width_au"] = X;
  inputs["points"] = points;
  return {X, static_cast<int>(points)};
}

fs::path profile_path(const RunConfig& cfg, const std::string& stem) {
  if (cfg.format == Format::csv && !cfg.output_path.empty()) return cfg.output_path;
  return default_dir() / (stem + ".csv");
}

std::string fig1_script(const fs::path& data, bool scattering) {
  std::ostringstream gp;
  gp << "# gnuplot: potential, amplitude and density of the stationary state\n";
  gp << "set datafile separator ','\n";
  gp << "set datafile commentschars '#'\n";
  gp << "set terminal pngcairo size 800,600\n";
  gp << "set output '" << data.stem().string() << ".png'\n";
  gp << "set xlabel 'x (a.u.)'\nset key top left\n";
  const std::string f = "'" + data.filename().string() + "'";
  if (scattering) {
    gp << "set ylabel 'density, V (a.u.)'\n";
    gp << "plot " << f << " using 1:2 with lines lw 2 title 'V(x)', \\\n"
       << "     " << f << " using 1:4 with lines lw 2 title 'rho(x)', \\\n"
       << "     " << f << " using 1:5 with points pt 7 ps 0.2 title 'rho transfer matrix'\n";
  } else {
    gp << "set ylabel 'A(x), V (a.u.)'\n";
    gp << "plot " << f << " using 1:2 with lines lw 2 title 'V(x)', \\\n"
       << "     " << f << " using 1:3 with lines lw 2 title 'A(x)', \\\n"
       << "     " << f << " using 1:5 with lines dt 2 title 'Q(x)'\n";
  }
  return gp.str();
}

int run_bound(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  ordered_json in;
  const auto well = resolve_well(p, in);
  const long nodes = p.integer("nodes", 0);
  if (nodes < 0 || nodes > 10000) throw UsageError("--nodes must be in [0, 10000]");
  in["nodes"] = nodes;
  const auto [X, points] = resolve_domain(p, in, 12.0, 4801);

  const auto sol = bohm1d::solve_bound_state(well, static_cast<int>(nodes), X, points);
  const double e_numerov = bohm1d::numerov_bound_oracle(well, static_cast<int>(nodes), X, points);

  double max_identity = 0.0;
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i)
    if (sol.resolved(i))
      max_identity = std::max(max_identity, std::abs(sol.q_of_x[i] + well(sol.x_grid[i]) - sol.energy));

  CsvWriter csv({"x_au", "v_au", "amplitude", "density", "q_au"});
  csv.comment("energy_au " + format_double(sol.energy));
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i) {
    const double a = sol.amplitude[i];
    csv.row({sol.x_grid[i], well(sol.x_grid[i]), a, a * a, sol.resolved(i) ? sol.q_of_x[i] : NAN});
  }

  ordered_json res{{"energy_au", sol.energy},
                   {"energy_ev", units::hartree_to_ev(sol.energy)},
                   {"numerov_energy_au", e_numerov},
                   {"energy_difference_au", sol.energy - e_numerov},
                   {"max_identity_residual_au", max_identity}};

  const bool want_profile = cfg.emit_plot_script || cfg.format == Format::csv;
  if (want_profile) {
    if (cfg.format == Format::csv && cfg.output_path.empty() && !cfg.emit_plot_script) {
      out << csv.str();
      return exit_ok;
    }
    const fs::path data = profile_path(cfg, "bound");
    write_file(data, csv.str());
    res["profile"] = data.string();
    if (cfg.emit_plot_script) {
      const fs::path script = data.parent_path() / "fig1_bound.gp";
      write_file(script, fig1_script(data, false));
      res["plot_script"] = script.string();
    }
  }
  if (cfg.format == Format::json)
    emit_summary(cfg, dump(document(in, res)), out);
  else
    out << dump(document(in, res));
  return exit_ok;
}

int run_scatter(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  ordered_json in;
  const auto well = resolve_well(p, in);
  const double k = positive(p.number("k", 1.5), "--k");
  const double K = positive(p.number("k-const", 1.0), "--k-const");
  in["k_au"] = k;
  in["energy_au"] = 0.5 * k * k;
  in["k_const"] = K;
  const auto [X, points] = resolve_domain(p, in, 12.0, 4801);

  const auto [sol, coef] = bohm1d::solve_scattering(well, k, K, X, points);
  const auto tm = bohm1d::transfer_matrix_oracle(well, k, sol.x_grid);

  double sq = 0.0;
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i) {
    const double d = sol.amplitude[i] * sol.amplitude[i] / K - tm.density[i];
    sq += d * d;
  }
  const double rms = std::sqrt(sq / static_cast<double>(sol.x_grid.size()));

  CsvWriter csv({"x_au", "v_au", "amplitude", "density", "density_transfer_matrix", "q_au"});
  csv.comment("reflection " + format_double(coef.reflection) + ", transmission " +
              format_double(coef.transmission));
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i) {
    const double a = sol.amplitude[i];
    csv.row({sol.x_grid[i], well(sol.x_grid[i]), a, a * a, K * tm.density[i],
             sol.resolved(i) ? sol.q_of_x[i] : NAN});
  }

  ordered_json res{{"reflection", coef.reflection},
                   {"transmission", coef.transmission},
                   {"transfer_matrix_reflection", tm.coefficients.reflection},
                   {"transfer_matrix_transmission", tm.coefficients.transmission},
                   {"rms_density_difference", rms}};

  const bool want_profile = cfg.emit_plot_script || cfg.format == Format::csv;
  if (want_profile) {
    if (cfg.format == Format::csv && cfg.output_path.empty() && !cfg.emit_plot_script) {
      out << csv.str();
      return exit_ok;
    }
    const fs::path data = profile_path(cfg, "scatter");
    write_file(data, csv.str());
    res["profile"] = data.string();
    if (cfg.emit_plot_script) {
      const fs::path script = data.parent_path() / "fig1_scatter.gp";
      write_file(script, fig1_script(data, true));
      res["plot_script"] = script.string();
    }
  }
  if (cfg.format == Format::json)
    emit_summary(cfg, dump(document(in, res)), out);
  else
    out << dump(document(in, res));
  return exit_ok;
}

// ---------------------------------------------------------------- spreading

int run_spread(const RunConfig& cfg, std::ostream& out) {
  const Params p(cfg.parameters);
  const double sx = positive(p.number("sigma-x0", 1.0), "--sigma-x0");
  const double sp = positive(p.number("sigma-p", 0.5 / sx), "--sigma-p");
  const spreading::PacketParams params(sx, sp);
  const long n = p.integer("particles", 100000);
  if (n < 1000 || n > 100'000'000) throw UsageError("--particles must be in [1000, 1e8]");
  const long seed = p.integer("seed", 1);
  if (seed < 0) throw UsageError("--seed must be >= 0");
  const long boot = p.integer("bootstrap", spreading::default_bootstrap_resamples);
  if (boot < 2 || boot > 100000) throw UsageError("--bootstrap must be in [2, 1e5]");
  const unsigned workers = resolve_workers(p);

  std::vector<double> times;
  if (p.has("t")) {
    times = p.text("t").find(':') != std::string::npos ? parse_range(p.text("t")) : parse_list(p.text("t"));
  } else {
    for (double at : {0.5, 1.0, 2.0, 4.0}) times.push_back(at / params.alpha());
  }
  for (double t : times) non_negative(t, "--t values");

  std::vector<spreading::SVariant> variants;
  const std::string vname = p.word("variant", "both");
  if (vname == "both") {
    variants = {spreading::SVariant::paper, spreading::SVariant::exact};
  } else {
    try {
      variants = {spreading::variant_from_string(vname)};
    } catch (const DomainError&) {
      throw UsageError("--variant: unknown variant '" + vname + "'");
    }
  }

  std::vector<spreading::EnsembleRun> runs;
  for (auto v : variants)
    runs.push_back(spreading::simulate_ensemble(params, static_cast<std::size_t>(n),
                                                static_cast<std::uint64_t>(seed), times, v, workers,
                                                static_cast<int>(boot)));
  const auto report = spreading::discrepancy_report(params, times);

  ordered_json in{{"sigma_x0_au", sx}, {"sigma_p_au", sp}, {"alpha_au", params.alpha()},
                  {"particles", n}, {"seed", seed}, {"bootstrap", boot}, {"t_au", times}};
  ordered_json ens = ordered_json::object();
  for (const auto& r : runs) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < r.sigma_estimates.size(); ++i) {
      const auto& e = r.sigma_estimates[i];
      const double ode = sx * spreading::spreading_factor(e.t, params, r.variant);
      rows.push_back({{"t_au", e.t}, {"sigma", e.sigma}, {"standard_error", e.standard_error},
                      {"sigma_scalar_ode", ode}, {"sigma_quantum", spreading::sigma_quantum(e.t, params)}});
    }
    ens[std::string(spreading::to_string(r.variant))] = rows;
  }
  ordered_json disc_rows = ordered_json::array();
  for (const auto& row : report.rows)
    disc_rows.push_back({{"t_au", row.t}, {"sigma_quantum", row.sigma_quantum},
                         {"sigma_cosh", row.sigma_cosh}, {"sigma_paper_ode", row.sigma_paper_ode},
                         {"sigma_exact_ode", row.sigma_exact_ode}, {"s_paper", row.s_paper},
                         {"s_exact", row.s_exact}, {"c_hbar", row.c_hbar}});
  ordered_json disc{{"c_hbar_target", report.c_hbar_target},
                    {"rows", disc_rows},
                    {"gaussian_q_quoted", {{"offset", report.quoted_q_offset}, {"curvature", report.quoted_q_curvature}}},
                    {"gaussian_q_direct", {{"offset", report.direct_q_offset}, {"curvature", report.direct_q_curvature}}}};
  ordered_json res{{"ensemble", ens}, {"discrepancy", disc}};

  CsvWriter csv({"t_au", "alpha_t", "sigma_quantum", "sigma_cosh", "sigma_paper_ode", "sigma_exact_ode",
                 "sigma_ens_paper", "se_ens_paper", "sigma_ens_exact", "se_ens_exact", "s_paper", "s_exact",
                 "c_hbar"});
  auto ens_value = [&](spreading::SVariant v, std::size_t i, bool se) {
    for (const auto& r : runs)
      if (r.variant == v) return se ? r.sigma_estimates[i].standard_error : r.sigma_estimates[i].sigma;
    return static_cast<double>(NAN);
  };
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    csv.row({row.t, params.alpha() * row.t, row.sigma_quantum, row.sigma_cosh, row.sigma_paper_ode,
             row.sigma_exact_ode, ens_value(spreading::SVariant::paper, i, false),
             ens_value(spreading::SVariant::paper, i, true), ens_value(spreading::SVariant::exact, i, false),
             ens_value(spreading::SVariant::exact, i, true), row.s_paper, row.s_exact, row.c_hbar});
  }

  if (cfg.format == Format::csv) {
    emit_summary(cfg, csv.str(), out);
  } else {
    emit_summary(cfg, dump(document(in, res)), out);
  }
  if (cfg.emit_plot_script) {
    const fs::path data = profile_path(cfg, "spread");
    if (!(cfg.format == Format::csv && !cfg.output_path.empty())) write_file(data, csv.str());
    std::ostringstream gp;
    gp << "# gnuplot: packet width against time\n"
       << "set datafile separator ','\nset datafile commentschars '#'\n"
       << "set terminal pngcairo size 800,600\nset output 'spread.png'\n"
       << "set xlabel 't (a.u.)'\nset ylabel 'sigma (a.u.)'\nset key top left\n"
       << "f = '" << data.filename().string() << "'\n"
       << "plot f using 1:3 with lines lw 2 title 'free packet', \\\n"
       << "     f using 1:5 with lines title 'paper s(t), scalar ODE', \\\n"
       << "     f using 1:7:8 with yerrorbars title 'ensemble, paper s(t)', \\\n"
       << "     f using 1:9:10 with yerrorbars title 'ensemble, exact s(t)'\n";
    write_file(data.parent_path() / "spread.gp", gp.str());
  }
  return exit_ok;
}

// ---------------------------------------------------------------- parsing

struct Flag {
  const char* name;
  const char* help;
};

const std::vector<Flag>& medium_flags() {
  static const std::vector<Flag> f{
      {"kappa", "Gaussian occupancy width kappa (a.u.); default 1"},
      {"t-ev", "temperature k_B T in eV, sets kappa = sqrt(2 T)"},
      {"t-kelvin", "temperature in K, sets kappa = sqrt(2 k_B T)"},
      {"gamma", "damping Gamma (a.u.)"},
      {"gamma-ev", "damping Gamma in eV; default 0.1"},
  };
  return f;
}

const std::vector<Flag>& well_flags() {
  static const std::vector<Flag> f{
      {"v0", "well depth v0 in V = v0 exp(-(x/L)^n) (a.u.); default -0.5"},
      {"L", "well half width L (a.u.); default 2"},
      {"n", "even exponent n; default 16"},
      {"potential-file", "tabulated potential: two columns x_au V_au, '#' comments"},
      {"half-width", "domain half width X (a.u.); default 12"},
      {"points", "grid points on [-X, X]; default 4801"},
  };
  return f;
}

struct Subcommand {
  const char* name;
  const char* help;
  std::vector<Flag> flags;
};

std::vector<Subcommand> subcommands() {
  auto with = [](std::vector<Flag> base, const std::vector<Flag>& extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };
  return {
      {"eps-point", "dielectric function and loss at one (k, omega)",
       with({{"model", "quantum | classical | drude | numeric; default quantum"},
             {"k", "wave number (a.u.)"},
             {"omega", "frequency (a.u.)"}},
            medium_flags())},
      {"eps-scan", "loss function Im(-1/eps) on a (k, omega) grid",
       with({{"model", "quantum | classical | drude | numeric | both; default quantum"},
             {"k", "wave number range start:stop:count (a.u.)"},
             {"omega", "frequency range start:stop:count (a.u.)"},
             {"workers", "worker threads; output does not depend on it"}},
            medium_flags())},
      {"sumrule", "f-sum integral of omega Im(-1/eps) against (pi/2) omega_p^2",
       with({{"model", "quantum | classical | drude | numeric | both; default both"},
             {"k", "wave number (a.u.)"},
             {"omega-max", "upper integration limit (a.u.); default k^2/2 + 8 k kappa + 10 omega_p"}},
            medium_flags())},
      {"ridge", "frequency of the loss maximum at fixed k, against k^2/2",
       with({{"model", "quantum | classical | drude | numeric | both; default quantum"},
             {"k", "wave number (a.u.)"},
             {"omega-min", "search window start (a.u.); default 0"},
             {"omega-max", "search window end (a.u.); default k^2/2 + 8 k kappa + 10 omega_p"},
             {"points", "coarse grid points before refinement; default 2001"}},
            medium_flags())},
      {"drude", "Drude dielectric function 1 - omega_p^2/(omega + i gamma)^2",
       {{"omega", "frequency (a.u.)"},
        {"plasma-freq", "plasma frequency (a.u.); default from --kappa"},
        {"kappa", "occupancy width giving omega_p^2 = kappa^3/sqrt(pi) (a.u.); default 1"},
        {"t-ev", "temperature k_B T in eV"},
        {"t-kelvin", "temperature in K"},
        {"gamma", "damping (a.u.); default 0"},
        {"gamma-ev", "damping in eV"}}},
      {"bound", "bound state of the Bohmian stationary equation (K = 0), with Numerov check",
       with({{"nodes", "number of nodes; default 0"}}, well_flags())},
      {"scatter", "scattering state incident from the left, with transfer-matrix check",
       with({{"k", "incident wave number (a.u.); default 1.5"},
             {"k-const", "transmitted density K; default 1"}},
            well_flags())},
      {"spread", "classical ensemble reconstruction of free Gaussian spreading",
       {{"sigma-x0", "initial width (a.u.); default 1"},
        {"sigma-p", "momentum width (a.u.); default 1/(2 sigma-x0)"},
        {"particles", "ensemble size; default 100000"},
        {"seed", "random seed; default 1"},
        {"t", "times (a.u.): comma list or start:stop:count; default alpha t = 0.5,1,2,4"},
        {"variant", "s(t) variant paper | exact | both; default both"},
        {"bootstrap", "bootstrap resamples; default 200"},
        {"workers", "worker threads; output does not depend on it"}}},
  };
}

} // namespace

std::vector<double> parse_range(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
      text.find(':', c2 + 1) != std::string_view::npos)
    throw UsageError("range must be start:stop:count, got '" + std::string(text) + "'");
  const double a = parse_number(text.substr(0, c1), "range start");
  const double b = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "range stop");
  const double c = parse_number(text.substr(c2 + 1), "range count");
  if (c != std::floor(c) || c < 1 || c > 1e8) throw UsageError("range count must be an integer in [1, 1e8]");
  const auto n = static_cast<std::size_t>(c);
  if (n == 1) {
    if (a != b) throw UsageError("range with count 1 needs start == stop");
    return {a};
  }
  if (!(b > a)) throw UsageError("range stop must exceed start");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start),
                               "list value"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  if (value == 0.0) value = 0.0; // drop the sign of -0
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

std::pair<std::vector<double>, std::vector<double>> read_potential_table(std::istream& in) {
  std::vector<double> xs, vs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> cols;
    for (std::string tok; ls >> tok;) cols.push_back(tok);
    if (cols.empty()) continue;
    if (cols.size() != 2)
      throw UsageError("potential table line " + std::to_string(lineno) + ": expected 2 columns");
    xs.push_back(parse_number(cols[0], "potential table x"));
    vs.push_back(parse_number(cols[1], "potential table V"));
  }
  return {std::move(xs), std::move(vs)};
}

ParseOutcome parse_arguments(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dielectric response, Bohmian stationary states and packet spreading.\n"
               "All inputs are Hartree atomic units unless the flag ends in -ev or -kelvin."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vbohm 1.0.0");

  std::string output;
  std::string format = "json";
  bool plot = false;

  const auto defs = subcommands();
  std::vector<std::map<std::string, std::string>> values(defs.size());
  std::vector<std::pair<CLI::App*, std::vector<std::pair<std::string, CLI::Option*>>>> apps;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    CLI::App* sub = app.add_subcommand(defs[i].name, defs[i].help);
    std::vector<std::pair<std::string, CLI::Option*>> opts;
    for (const auto& f : defs[i].flags) {
      CLI::Option* o = sub->add_option(std::string("--") + f.name, values[i][f.name], f.help);
      opts.emplace_back(f.name, o);
    }
    sub->add_option("-o,--output", output, "output file; default stdout or $" + std::string(output_dir_env));
    sub->add_option("--format", format, "csv | json; default json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--emit-plot-script", plot, "also write a gnuplot script next to the data");
    apps.emplace_back(sub, std::move(opts));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? exit_ok : exit_usage};
  }

  RunConfig cfg;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    if (!apps[i].first->parsed()) continue;
    cfg.subcommand = defs[i].name;
    for (const auto& [name, opt] : apps[i].second)
      if (opt->count() > 0) cfg.parameters[name] = values[i][name];
  }
  cfg.output_path = output;
  cfg.format = format == "csv" ? Format::csv : Format::json;
  cfg.emit_plot_script = plot;
  return {cfg, exit_ok};
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string& s = cfg.subcommand;
  try {
    if (s == "eps-point") return run_eps_point(cfg, out);
    if (s == "eps-scan") return run_eps_scan(cfg, out);
    if (s == "sumrule") return run_sumrule(cfg, out);
    if (s == "ridge") return run_ridge(cfg, out);
    if (s == "drude") return run_drude(cfg, out);
    if (s == "bound") return run_bound(cfg, out);
    if (s == "scatter") return run_scatter(cfg, out);
    if (s == "spread") return run_spread(cfg, out);
    err << "error: unknown subcommand '" << s << "'\n";
    return exit_usage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error in " << s << ": " << e.what() << '\n';
    return exit_numeric;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto parsed = parse_arguments(argc, argv, out, err);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

} // namespace vbohm::cli
