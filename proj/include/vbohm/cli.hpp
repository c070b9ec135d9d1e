// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vbohm::cli {

enum class Format { csv, json };

/// Parsed command line. `parameters` holds the raw flag values keyed by the
/// long flag name without dashes; run() validates and converts them.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> parameters;
  std::filesystem::path output_path; // empty: stdout / default directory
  Format format = Format::json;
  bool emit_plot_script = false;
};

/// Bad flag value or combination; maps to exit status 1.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numeric = 2;

/// Default directory for data files and plot scripts when no -o is given.
inline constexpr const char* output_dir_env = "VBOHM_OUTPUT_DIR";

struct ParseOutcome {
  std::optional<RunConfig> config; // empty when parsing finished the run (help, error)
  int exit_code = exit_ok;
};

ParseOutcome parse_arguments(int argc, const char* const* argv, std::ostream& out,
                             std::ostream& err);

/// Executes a parsed configuration. Summary documents go to `out` unless an
/// output path takes them.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_arguments followed by run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "start:stop:count", endpoints inclusive; count 1 requires start == stop.
std::vector<double> parse_range(std::string_view text);

/// Comma separated list of numbers.
std::vector<double> parse_list(std::string_view text);

/// 17 significant digits, '.' as decimal separator regardless of locale.
std::string format_double(double value);

/// Two whitespace separated columns (x, V); '#' starts a comment.
std::pair<std::vector<double>, std::vector<double>> read_potential_table(std::istream& in);

} // namespace vbohm::cli
