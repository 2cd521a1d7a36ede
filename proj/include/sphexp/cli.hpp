// sphexp/cli.hpp
//
// Command-line front end. Every command writes data to `out` (or the
// --output file) and human-readable causes to `err`.
#ifndef SPHEXP_CLI_HPP
#define SPHEXP_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sphexp::cli {

enum class Command { exp, fourier, diagnose, converge, bench };
enum class BackendChoice { mc, series, oracle, all };
enum class Format { json, csv };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int bad_matrix_file = 2;
inline constexpr int not_hermitian = 3;
inline constexpr int truncation_cap = 4;
inline constexpr int diagnostic_failed = 5;
}  // namespace exit_code

struct RunConfig {
  Command command = Command::exp;
  BackendChoice backend = BackendChoice::series;
  std::string input_path;
  /// 0 selects the command default (1e6 for diagnose, 1e5 otherwise).
  std::int64_t samples = 0;
  double target_abs_err = 1e-10;
  std::uint64_t seed = 42;
  int streams = 1;
  int threads = 1;
  Format output_format = Format::json;
  std::string output_path;  // empty: stdout
};

std::int64_t effective_samples(const RunConfig& cfg);

int cmd_exp(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses arguments (argv[0] is the program name) and dispatches. Reads the
/// THREADS environment variable for the worker-thread cap.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sphexp::cli

#endif  // SPHEXP_CLI_HPP
