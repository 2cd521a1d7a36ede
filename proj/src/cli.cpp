#include "sphexp/cli.hpp"

#include "sphexp/conversion_identity.hpp"
#include "sphexp/linalg.hpp"
#include "sphexp/matrix_io.hpp"
#include "sphexp/mc_estimator.hpp"
#include "sphexp/random_matrix.hpp"
#include "sphexp/series.hpp"
#include "sphexp/sphere.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace sphexp::cli {

namespace {

using nlohmann::json;
using Report = EstimateReport<double>;
using Hermitian = HermitianMatrix<double>;

/// Column-oriented result table rendered as CSV or as a JSON array of rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add(std::vector<json> row) { rows.push_back(std::move(row)); }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
      arr.push_back(std::move(obj));
    }
    return arr;
  }

  void to_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) os << ',';
        if (row[c].is_string())
          os << row[c].get<std::string>();
        else
          os << row[c].dump();
      }
      os << '\n';
    }
  }
};

std::vector<BackendChoice> expand(BackendChoice b) {
  if (b == BackendChoice::all) return {BackendChoice::oracle, BackendChoice::series, BackendChoice::mc};
  return {b};
}

const char* name_of(BackendChoice b) {
  switch (b) {
    case BackendChoice::mc: return "mc";
    case BackendChoice::series: return "series";
    case BackendChoice::oracle: return "oracle";
    case BackendChoice::all: return "all";
  }
  return "?";
}

const char* name_of(Command c) {
  switch (c) {
    case Command::exp: return "exp";
    case Command::fourier: return "fourier";
    case Command::diagnose: return "diagnose";
    case Command::converge: return "converge";
    case Command::bench: return "bench";
  }
  return "?";
}

SamplerConfig sampler_of(const RunConfig& cfg) { return {cfg.seed, cfg.streams, cfg.threads}; }

/// Output sink: the --output file when given, otherwise `out`.
class Sink {
public:
  Sink(const RunConfig& cfg, std::ostream& out) : out_(&out) {
    if (!cfg.output_path.empty()) {
      file_.open(cfg.output_path);
      if (!file_) throw Error("io_error", "cannot write " + cfg.output_path);
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

private:
  std::ofstream file_;
  std::ostream* out_;
};

void emit(const RunConfig& cfg, std::ostream& out, const json& doc, const Table& table) {
  Sink sink(cfg, out);
  if (cfg.output_format == Format::json)
    sink.stream() << doc.dump(2) << '\n';
  else
    table.to_csv(sink.stream());
}

Hermitian load_hermitian(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw Error("bad_matrix_file", "--input is required");
  return Hermitian(read_matrix_file(cfg.input_path));
}

double max_unitarity_defect(const MatrixXcd& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

std::uint64_t fnv1a(const MatrixXcd& m) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const double parts[2] = {m.data()[k].real(), m.data()[k].imag()};
    unsigned char bytes[sizeof parts];
    std::memcpy(bytes, parts, sizeof parts);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

Report oracle_report(const Hermitian& a, bool fourier) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.value = fourier ? expm_oracle_fourier(a) : expm_oracle(a);
  rep.entry_error = RealMatrix<double>::Zero(a.dim(), a.dim());
  rep.backend = Backend::oracle;
  rep.fourier = fourier;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Report evaluate(BackendChoice b, const Hermitian& a, bool fourier, const RunConfig& cfg) {
  switch (b) {
    case BackendChoice::mc:
      return fourier ? expm_fourier_mode(a, effective_samples(cfg), sampler_of(cfg))
                     : expm_monte_carlo(a, effective_samples(cfg), sampler_of(cfg));
    case BackendChoice::series:
      return fourier ? expm_series_fourier(a, cfg.target_abs_err) : expm_series(a, cfg.target_abs_err);
    default:
      return oracle_report(a, fourier);
  }
}

json report_json(const Report& rep, const char* backend) {
  json j = {{"backend", backend},
            {"value", matrix_to_json(rep.value)},
            {"abs_error_estimate", rep.abs_error_estimate},
            {"samples_or_terms", rep.samples_or_terms},
            {"seed", rep.seed ? json(*rep.seed) : json(nullptr)},
            {"wall_time", rep.wall_time},
            {"fourier", rep.fourier}};
  if (rep.fourier) j["unitarity_defect"] = max_unitarity_defect(rep.value);
  return j;
}

int fail(std::ostream& err, int code, const std::string& message) {
  err << "sphexp: " << message << '\n';
  return code;
}

/// Maps library errors onto the documented exit codes.
template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const Error& e) {
    if (e.code() == "bad_matrix_file") return fail(err, exit_code::bad_matrix_file, e.what());
    if (e.code() == "not_hermitian") return fail(err, exit_code::not_hermitian, e.what());
    if (e.code() == "truncation_cap") return fail(err, exit_code::truncation_cap, e.what());
    if (e.code() == "dim_mismatch" || e.code() == "non_finite")
      return fail(err, exit_code::bad_matrix_file, std::string("bad_matrix_file: ") + e.what());
    return fail(err, exit_code::usage, e.what());
  }
}

int exp_like(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool fourier) {
  return guarded(err, [&] {
    const Hermitian a = load_hermitian(cfg);
    std::vector<std::pair<BackendChoice, Report>> results;
    for (auto b : expand(cfg.backend)) results.emplace_back(b, evaluate(b, a, fourier, cfg));

    json doc = {{"command", name_of(cfg.command)}, {"dim", a.dim()}, {"reports", json::array()}};
    Table table{{"backend", "row", "col", "re", "im", "entry_error"}, {}};
    for (const auto& [b, rep] : results) {
      doc["reports"].push_back(report_json(rep, name_of(b)));
      for (Eigen::Index i = 0; i < rep.value.rows(); ++i)
        for (Eigen::Index k = 0; k < rep.value.cols(); ++k)
          table.add({name_of(b), i, k, rep.value(i, k).real(), rep.value(i, k).imag(), rep.entry_error(i, k)});
    }
    if (results.size() > 1) {
      json pairs = json::array();
      for (std::size_t x = 0; x < results.size(); ++x)
        for (std::size_t y = x + 1; y < results.size(); ++y)
          pairs.push_back({{"a", name_of(results[x].first)},
                           {"b", name_of(results[y].first)},
                           {"max_abs_deviation",
                            (results[x].second.value - results[y].second.value).cwiseAbs().maxCoeff()}});
      doc["pairwise"] = pairs;
    }
    emit(cfg, out, doc, table);
    return exit_code::ok;
  });
}

}  // namespace

std::int64_t effective_samples(const RunConfig& cfg) {
  if (cfg.samples > 0) return cfg.samples;
  return cfg.command == Command::diagnose ? 1000000 : 100000;
}

int cmd_exp(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return exp_like(cfg, out, err, cfg.command == Command::fourier);
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SamplerConfig sampler = sampler_of(cfg);
    const std::int64_t samples = effective_samples(cfg);
    Table table{{"check", "status", "detail"}, {}};
    std::vector<std::string> failing;
    auto record = [&](const std::string& check, bool pass, const std::string& detail) {
      table.add({check, pass ? "pass" : "FAIL", detail});
      if (!pass) failing.push_back(check);
    };

    {
      const auto sweep = sweep_conversion_identity(8, 20, [](int r) { return Rational(2 * r); });
      record("conversion_identity_d_eq_2r", sweep.all_hold(),
             std::to_string(sweep.holds) + "/" + std::to_string(sweep.cases) + " exact cases hold for r<=8 k<=20");
      const auto alt = sweep_conversion_identity(8, 20, [](int r) { return Rational(r, 2); });
      record("conversion_identity_r_eq_2d_rejected", !alt.all_hold(),
             "d=r/2 reading holds in " + std::to_string(alt.holds) + "/" + std::to_string(alt.cases) + " cases");
    }

    for (int r = 1; r <= 3; ++r) {
      for (int n = 1; n <= 2; ++n) {
        const auto rep = gaussian_vs_sphere_check(r, n, samples, sampler);
        std::ostringstream d;
        d << std::setprecision(6) << "ratio " << rep.checks.front().ratio << " expected "
          << rep.checks.front().expected_ratio << " max z " << rep.max_z_score;
        record("moment_ratio_r" + std::to_string(r) + "_N" + std::to_string(n), rep.max_z_score <= 3.0, d.str());
      }
    }

    {
      const Hermitian one(MatrixXcd::Constant(1, 1, 1.0));
      const auto rep = wrong_formula_demo(one, 1000, sampler);
      std::ostringstream d;
      d << std::setprecision(10) << "deviation " << rep.deviation << " (e = " << std::exp(1.0) << ")";
      record("wrong_formula_fails_as_expected_A_eq_1", rep.fails_as_expected, d.str());
    }
    {
      const Hermitian half(MatrixXcd(MatrixXcd::Identity(2, 2) * 0.5));
      const auto rep = wrong_formula_demo(half, samples, sampler);
      std::ostringstream d;
      d << std::setprecision(6) << rep.significance << " standard errors off; correct formula max z "
        << rep.correct_max_z;
      record("wrong_formula_fails_as_expected_A_eq_I_over_2", rep.fails_as_expected, d.str());
      record("derivative_formula_passes_A_eq_I_over_2", rep.correct_max_z <= 4.0, d.str());
    }
    {
      const auto a = random_hermitian<double>(4, 1.0, cfg.seed);
      const double gap = integrand_form_discrepancy(a, 1000, sampler);
      record("trace_and_vector_integrands_agree", gap <= 1.0, "max gap / rounding allowance " + std::to_string(gap));
    }

    json doc = {{"command", "diagnose"}, {"samples", samples}, {"rows", table.to_json()}};
    emit(cfg, out, doc, table);
    if (!failing.empty()) {
      std::string list;
      for (const auto& f : failing) list += (list.empty() ? "" : ", ") + f;
      return fail(err, exit_code::diagnostic_failed, "diagnostics failed: " + list);
    }
    return exit_code::ok;
  });
}

int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Hermitian a = load_hermitian(cfg);
    const MatrixXcd exact = expm_oracle(a);
    Table table{{"backend", "size", "max_abs_error", "predicted_error"}, {}};
    bool any = false;
    for (auto b : expand(cfg.backend)) {
      if (b == BackendChoice::mc) {
        any = true;
        const std::int64_t top = effective_samples(cfg);
        std::vector<std::int64_t> ladder;
        for (std::int64_t n = std::min<std::int64_t>(1000, top); n < top; n *= 2) ladder.push_back(n);
        ladder.push_back(top);
        for (auto n : ladder) {
          const auto rep = expm_monte_carlo(a, n, sampler_of(cfg));
          table.add({"mc", n, (rep.value - exact).cwiseAbs().maxCoeff(), rep.abs_error_estimate});
        }
      } else if (b == BackendChoice::series) {
        any = true;
        for (int k = 0; k <= 40; ++k) {
          const MatrixXcd v = expm_series_fixed(a.matrix(), k);
          table.add({"series", k, (v - exact).cwiseAbs().maxCoeff(), nullptr});
        }
      }
    }
    if (!any) return fail(err, exit_code::usage, "converge needs --backend mc, series or all");
    json doc = {{"command", "converge"}, {"dim", a.dim()}, {"rows", table.to_json()}};
    emit(cfg, out, doc, table);
    return exit_code::ok;
  });
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    struct Case {
      std::string name;
      Hermitian a;
    };
    std::vector<Case> suite;
    if (!cfg.input_path.empty()) {
      suite.push_back({cfg.input_path, load_hermitian(cfg)});
    } else {
      for (int r : {2, 4, 8, 16}) {
        const std::uint64_t seed = cfg.seed + std::uint64_t(r);
        suite.push_back({"random_r" + std::to_string(r), random_hermitian<double>(r, 2.0, seed)});
      }
    }

    Table table{{"matrix", "dim", "backend", "wall_time", "max_abs_error", "error_estimate", "samples_or_terms",
                 "value_hash"},
                {}};
    for (const auto& c : suite) {
      const MatrixXcd exact = expm_oracle(c.a);
      for (auto b : expand(cfg.backend)) {
        const Report rep = evaluate(b, c.a, false, cfg);
        std::ostringstream hash;
        hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a(rep.value);
        table.add({c.name, c.a.dim(), name_of(b), rep.wall_time, (rep.value - exact).cwiseAbs().maxCoeff(),
                   rep.abs_error_estimate, rep.samples_or_terms, hash.str()});
      }
    }
    json doc = {{"command", "bench"}, {"seed", cfg.seed}, {"rows", table.to_json()}};
    emit(cfg, out, doc, table);
    return exit_code::ok;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(int(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Exponential of a hermitian matrix through sphere integrals"};
  app.require_subcommand(1, 1);

  const std::map<std::string, BackendChoice> backends{{"mc", BackendChoice::mc},
                                                      {"series", BackendChoice::series},
                                                      {"oracle", BackendChoice::oracle},
                                                      {"all", BackendChoice::all}};
  const std::map<std::string, Format> formats{{"json", Format::json}, {"csv", Format::csv}};

  bool backend_given = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input_path, "Matrix JSON file");
    sub->add_option_function<std::string>(
           "--backend",
           [&](const std::string& s) {
             cfg.backend = backends.at(s);
             backend_given = true;
           },
           "mc|series|oracle|all")
        ->check(CLI::IsMember({"mc", "series", "oracle", "all"}));
    sub->add_option("--samples", cfg.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sub->add_option("--target-abs-err", cfg.target_abs_err, "Series accuracy target")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Sampler seed");
    sub->add_option("--streams", cfg.streams, "Deterministic substreams")->check(CLI::PositiveNumber);
    sub->add_option_function<std::string>(
           "--format", [&](const std::string& s) { cfg.output_format = formats.at(s); }, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", cfg.output_path, "Output file (default stdout)");
  };

  const std::pair<const char*, Command> commands[] = {{"exp", Command::exp},
                                                      {"fourier", Command::fourier},
                                                      {"diagnose", Command::diagnose},
                                                      {"converge", Command::converge},
                                                      {"bench", Command::bench}};
  const char* help[] = {"Compute e^A", "Compute e^{iA} with a unitarity report", "Run the identity diagnostics",
                        "Error versus samples or terms", "Timing and accuracy per backend"};
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    add_common(sub);
    sub->callback([&cfg, c = commands[i].second] { cfg.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    return fail(err, exit_code::usage, e.what());
  }

  if (const char* env = std::getenv("THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || t < 1) return fail(err, exit_code::usage, "THREADS must be a positive integer");
    cfg.threads = int(t);
  }
  if (!backend_given && (cfg.command == Command::bench || cfg.command == Command::converge))
    cfg.backend = cfg.command == Command::bench ? BackendChoice::all : BackendChoice::series;

  switch (cfg.command) {
    case Command::exp:
    case Command::fourier: return cmd_exp(cfg, out, err);
    case Command::diagnose: return cmd_diagnose(cfg, out, err);
    case Command::converge: return cmd_converge(cfg, out, err);
    case Command::bench: return cmd_bench(cfg, out, err);
  }
  return exit_code::usage;
}

}  // namespace sphexp::cli
