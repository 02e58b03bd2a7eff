#pragma once

// Command-line front end for fcwave: parses scenarios, runs the library and
// writes CSV / JSON / plot data. `run` is the whole program minus main() so
// tests can drive it with in-memory streams.

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcwave/fcwave.hpp"

namespace fcwave::cli {

using json = nlohmann::json;

enum ExitCode : int { kSuccess = 0, kInvalidParameters = 2, kCapReached = 3, kNumericFailure = 4 };

enum class Format { csv, json, plot };

// Thrown for flag-level validation failures; the message names the flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct RunReport {
  json scenario;
  std::optional<double> captured_mass;
  std::string argmax;
  double wall_time_s = 0.0;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;

  void print(std::ostream& err) const {
    err << "# run report\n";
    err << "scenario: " << scenario.dump() << "\n";
    if (captured_mass) err << "captured_mass: " << format_double(*captured_mass) << "\n";
    if (!argmax.empty()) err << "argmax: " << argmax << "\n";
    for (const auto& n : notes) err << n << "\n";
    err << "wall_time_s: " << wall_time_s << "\n";
    for (const auto& w : warnings) err << "warning: " << w << "\n";
  }
};

// ---------------------------------------------------------------- emitters
//
// Entries whose amplitude is exactly zero (parity-forbidden or orthogonal)
// are not written, except in the 2D plot grid, which stays rectangular.

inline void emit_spectrum(const Spectrum& s, Format format, const json& scenario, std::ostream& out) {
  switch (format) {
    case Format::csv:
      out << "n_prime,amplitude,probability\n";
      for (const auto& e : s.entries)
        if (e.amplitude != 0.0) out << e.n_prime << ',' << format_double(e.amplitude) << ',' << format_double(e.probability) << '\n';
      break;
    case Format::json: {
      json entries = json::array();
      for (const auto& e : s.entries)
        if (e.amplitude != 0.0)
          entries.push_back({{"n_prime", e.n_prime}, {"amplitude", e.amplitude}, {"probability", e.probability}});
      json doc{{"scenario", scenario},
               {"entries", std::move(entries)},
               {"captured_mass", s.captured_mass},
               {"argmax", s.entries.empty() ? json(nullptr) : json(s.argmax())}};
      out << doc.dump(2) << '\n';
      break;
    }
    case Format::plot:
      out << "# n_prime probability\n";
      for (const auto& e : s.entries)
        if (e.amplitude != 0.0) out << e.n_prime << ' ' << format_double(e.probability) << '\n';
      break;
  }
}

inline void emit_tensor(const CouplingTensor& t, Format format, const json& scenario, std::ostream& out) {
  switch (format) {
    case Format::csv:
      out << "nx_prime,ny_prime,amplitude,probability\n";
      for (ModeIndex i = 0; i < t.rows; ++i)
        for (ModeIndex j = 0; j < t.cols; ++j)
          if (t.at(i, j) != 0.0)
            out << i << ',' << j << ',' << format_double(t.at(i, j)) << ',' << format_double(t.probability(i, j))
              << '\n';
      break;
    case Format::json: {
      json entries = json::array();
      for (ModeIndex i = 0; i < t.rows; ++i)
        for (ModeIndex j = 0; j < t.cols; ++j)
          if (t.at(i, j) != 0.0)
            entries.push_back({{"nx_prime", i}, {"ny_prime", j}, {"amplitude", t.at(i, j)},
                             {"probability", t.probability(i, j)}});
      json argmax = nullptr;
      if (!t.values.empty()) {
        const auto [ai, aj] = t.argmax();
        argmax = json::array({ai, aj});
      }
      json doc{{"scenario", scenario},
               {"entries", std::move(entries)},
               {"captured_mass", t.captured_mass},
               {"argmax", std::move(argmax)}};
      out << doc.dump(2) << '\n';
      break;
    }
    case Format::plot:
      // gnuplot splot layout: one block per nx_prime.
      out << "# nx_prime ny_prime probability\n";
      for (ModeIndex i = 0; i < t.rows; ++i) {
        for (ModeIndex j = 0; j < t.cols; ++j) out << i << ' ' << j << ' ' << format_double(t.probability(i, j)) << '\n';
        out << '\n';
      }
      break;
  }
}

inline void emit_matrix(const CouplingMatrix& c, Format format, const json& scenario, std::ostream& out) {
  switch (format) {
    case Format::csv:
      out << "n,n_prime,amplitude,probability\n";
      for (ModeIndex n = 0; n < c.rows; ++n)
        for (ModeIndex m = 0; m < c.cols; ++m)
          out << n << ',' << m << ',' << format_double(c(n, m)) << ',' << format_double(c(n, m) * c(n, m)) << '\n';
      break;
    case Format::json: {
      json rows = json::array();
      for (ModeIndex n = 0; n < c.rows; ++n) {
        json row = json::array();
        for (ModeIndex m = 0; m < c.cols; ++m) row.push_back(c(n, m));
        rows.push_back(std::move(row));
      }
      json doc{{"scenario", scenario}, {"amplitudes", std::move(rows)}, {"orthogonality_defect", c.orthogonality_defect}};
      out << doc.dump(2) << '\n';
      break;
    }
    case Format::plot:
      out << "# n n_prime probability\n";
      for (ModeIndex n = 0; n < c.rows; ++n) {
        for (ModeIndex m = 0; m < c.cols; ++m) out << n << ' ' << m << ' ' << format_double(c(n, m) * c(n, m)) << '\n';
        out << '\n';
      }
      break;
  }
}

inline void emit_schmidt(const SchmidtReport& r, Format format, const json& scenario, std::ostream& out) {
  switch (format) {
    case Format::csv:
      out << "k,singular_value,weight\n";
      for (std::size_t k = 0; k < r.singular_values.size(); ++k) {
        const double s = r.singular_values[k];
        out << k << ',' << format_double(s) << ',' << format_double(s * s / r.captured_mass) << '\n';
      }
      break;
    case Format::json:
      out << json{{"scenario", scenario},
                  {"singular_values", r.singular_values},
                  {"captured_mass", r.captured_mass},
                  {"entropy", r.entropy}}
                 .dump(2)
          << '\n';
      break;
    case Format::plot:
      out << "# k singular_value\n";
      for (std::size_t k = 0; k < r.singular_values.size(); ++k)
        out << k << ' ' << format_double(r.singular_values[k]) << '\n';
      break;
  }
}

// ------------------------------------------------------------------ flags

struct CommonFlags {
  double eps = kDefaultEpsilon;
  int cap = static_cast<int>(kModeCap);
  std::string format = "csv";
  std::string out;
  std::string scenario;  // consumed before parsing; declared for --help
};

struct AxisFlags {
  std::optional<double> omega, omega_prime, d, ratio, D;
};

struct Flags1D {
  AxisFlags axis;
  int n = 0;
  int N = 20;
  int N_prime = 400;
};

struct Flags2D {
  AxisFlags x, y;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  int nx = 0;
  int ny = 0;
};

namespace detail {

inline void add_common(CLI::App* sub, CommonFlags& c) {
  sub->add_option("--eps", c.eps, "tail tolerance: stop when captured mass >= 1 - eps")->capture_default_str();
  sub->add_option("--cap", c.cap, "hard cap on final mode indices")->capture_default_str();
  sub->add_option("--format", c.format, "csv | json | plot")->capture_default_str();
  sub->add_option("--out", c.out, "output path (default: standard output)");
  sub->add_option("--scenario", c.scenario, "key = value file mirroring these flags; flags override it");
}

inline void add_axis(CLI::App* sub, AxisFlags& a, const std::string& suffix) {
  sub->add_option("--omega" + suffix, a.omega, "source frequency");
  sub->add_option("--omega-prime" + suffix, a.omega_prime, "target frequency");
  sub->add_option("--d" + suffix, a.d, "target axis displacement");
  sub->add_option("--ratio" + suffix, a.ratio, "omega'/omega (dimensionless; sets omega = 1)");
  sub->add_option("--D" + suffix, a.D, "omega d^2 (dimensionless; sets omega = 1)");
}

inline Format parse_format(const std::string& f) {
  if (f == "csv") return Format::csv;
  if (f == "json") return Format::json;
  if (f == "plot") return Format::plot;
  throw UsageError("--format: expected csv, json or plot, got '" + f + "'");
}

inline void check_common(const CommonFlags& c) {
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw UsageError("--eps: must be in (0, 1), got " + format_double(c.eps));
  if (c.cap < 1) throw UsageError("--cap: must be >= 1, got " + std::to_string(c.cap));
}

inline ModeIndex mode_flag(int value, const std::string& flag, int cap) {
  if (value < 0) throw UsageError(flag + ": mode index must be >= 0, got " + std::to_string(value));
  if (value > cap) throw UsageError(flag + ": mode index " + std::to_string(value) + " exceeds --cap " + std::to_string(cap));
  return static_cast<ModeIndex>(value);
}

struct ResolvedAxis {
  double omega = 1.0;
  double omega_prime = 1.0;
  double d = 0.0;
  bool dimensionless = false;
};

inline ResolvedAxis resolve_axis(const AxisFlags& a, const std::string& suffix) {
  const bool raw = a.omega || a.omega_prime || a.d;
  const bool dimless = a.ratio || a.D;
  if (raw && dimless)
    throw UsageError("--ratio" + suffix + "/--D" + suffix + " are mutually exclusive with --omega" + suffix +
                     "/--omega-prime" + suffix + "/--d" + suffix);
  ResolvedAxis r;
  if (dimless) {
    if (!a.ratio) throw UsageError("--ratio" + suffix + ": required with --D" + suffix);
    r.dimensionless = true;
    r.omega = 1.0;
    r.omega_prime = *a.ratio;
    const double D = a.D.value_or(0.0);
    if (!(D >= 0.0) || !std::isfinite(D)) throw UsageError("--D" + suffix + ": must be >= 0, got " + format_double(D));
    r.d = std::sqrt(D);
    if (!(r.omega_prime > 0.0) || !std::isfinite(r.omega_prime))
      throw UsageError("--ratio" + suffix + ": must be > 0, got " + format_double(r.omega_prime));
    return r;
  }
  if (!a.omega_prime) throw UsageError("--omega-prime" + suffix + " (or --ratio" + suffix + "): required");
  r.omega = a.omega.value_or(1.0);
  r.omega_prime = *a.omega_prime;
  r.d = a.d.value_or(0.0);
  if (!(r.omega > 0.0) || !std::isfinite(r.omega))
    throw UsageError("--omega" + suffix + ": must be > 0, got " + format_double(r.omega));
  if (!(r.omega_prime > 0.0) || !std::isfinite(r.omega_prime))
    throw UsageError("--omega-prime" + suffix + ": must be > 0, got " + format_double(r.omega_prime));
  if (!std::isfinite(r.d)) throw UsageError("--d" + suffix + ": must be finite");
  return r;
}

// Splices the key = value lines of a scenario file in as `--key value` right
// after the subcommand, so later command-line flags take precedence.
inline std::vector<std::string> expand_scenario(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--scenario") {
      if (i + 1 >= args.size()) throw UsageError("--scenario: missing path");
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--scenario=", 0) == 0) {
      path = args[i].substr(11);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw UsageError("--scenario: cannot read '" + path + "'");
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("--scenario: " + path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || value.empty())
      throw UsageError("--scenario: " + path + ":" + std::to_string(lineno) + ": expected key = value");
    if (key == "scenario") throw UsageError("--scenario: nested scenario files are not supported");
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  const auto pos = args.empty() ? args.begin() : args.begin() + 1;
  args.insert(pos, injected.begin(), injected.end());
  return args;
}

struct Output {
  std::ofstream file;
  std::ostream* stream = nullptr;

  explicit Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream = &fallback;
      return;
    }
    file.open(path, std::ios::binary);
    if (!file) throw UsageError("--out: cannot open '" + path + "' for writing");
    stream = &file;
  }
};

inline json axis_json(const ResolvedAxis& a) {
  return {{"omega", a.omega}, {"omega_prime", a.omega_prime}, {"d", a.d}};
}

inline std::pair<Waveguide2D, Waveguide2D> resolve_2d(const Flags2D& f, RunReport& report, json& scenario) {
  const auto x = resolve_axis(f.x, "-x");
  const auto y = resolve_axis(f.y, "-y");
  Waveguide2D source{x.omega, y.omega, f.gamma, 0.0, 0.0};
  Waveguide2D target{x.omega_prime, y.omega_prime, f.gamma_prime, x.d, y.d};
  try {
    source.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("--gamma: ") + e.what());
  }
  try {
    target.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("--gamma-prime: ") + e.what());
  }
  if (x.dimensionless || y.dimensionless)
    report.notes.push_back("note: dimensionless parameters mapped to omega = 1, d = sqrt(D)");
  scenario["x"] = axis_json(x);
  scenario["y"] = axis_json(y);
  scenario["gamma"] = f.gamma;
  scenario["gamma_prime"] = f.gamma_prime;
  return {source, target};
}

inline std::string pair_string(std::pair<ModeIndex, ModeIndex> p) {
  return "(" + std::to_string(p.first) + ", " + std::to_string(p.second) + ")";
}

}  // namespace detail

inline constexpr const char* kSubcommands[] = {"spectrum1d", "spectrum2d", "coupled2d", "matrix", "fc-estimate",
                                               "entropy"};

// Runs one command. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"Mode-energy distribution between displaced and stretched quadratic-index waveguides", "fcwave"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CommonFlags common;
  Flags1D f1;
  Flags2D f2;

  auto* spectrum1d_cmd = app.add_subcommand("spectrum1d", "probability spectrum over final modes, 1D");
  auto* spectrum2d_cmd = app.add_subcommand("spectrum2d", "separable 2D probability tensor (gamma = 0)");
  auto* coupled2d_cmd = app.add_subcommand("coupled2d", "2D tensor with cross-coupling, by quadrature");
  auto* matrix_cmd = app.add_subcommand("matrix", "coupling matrix <n|n'> for n <= N, n' <= N'");
  auto* fc_cmd = app.add_subcommand("fc-estimate", "semiclassical most-probable final mode, 1D");
  auto* entropy_cmd = app.add_subcommand("entropy", "Schmidt spectrum and entropy of a 2D transition");

  for (auto* sub : {spectrum1d_cmd, matrix_cmd, fc_cmd}) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(sub, common);
    detail::add_axis(sub, f1.axis, "");
    sub->add_option("--n", f1.n, "initial mode index")->capture_default_str();
  }
  matrix_cmd->add_option("--N", f1.N, "highest initial mode")->capture_default_str();
  matrix_cmd->add_option("--N-prime", f1.N_prime, "highest final mode")->capture_default_str();
  for (auto* sub : {spectrum2d_cmd, coupled2d_cmd, entropy_cmd}) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(sub, common);
    detail::add_axis(sub, f2.x, "-x");
    detail::add_axis(sub, f2.y, "-y");
    sub->add_option("--gamma", f2.gamma, "source cross-coupling (xy coefficient)")->capture_default_str();
    sub->add_option("--gamma-prime", f2.gamma_prime, "target cross-coupling (xy coefficient)")->capture_default_str();
    sub->add_option("--nx", f2.nx, "initial mode index along x")->capture_default_str();
    sub->add_option("--ny", f2.ny, "initial mode index along y")->capture_default_str();
  }

  RunReport report;
  try {
    auto expanded = detail::expand_scenario(std::move(args));
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParameters;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParameters;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  json scenario{{"command", command}, {"eps", common.eps}, {"cap", common.cap}, {"format", common.format}};

  auto finish = [&](int code) {
    report.scenario = scenario;
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.print(err);
    return code;
  };

  Format format = Format::csv;
  // Validation happens here, before any computation.
  try {
    format = detail::parse_format(common.format);
    detail::check_common(common);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParameters;
  }
  const auto cap = static_cast<ModeIndex>(common.cap);

  try {
    if (command == "spectrum1d" || command == "matrix" || command == "fc-estimate") {
      const auto axis = detail::resolve_axis(f1.axis, "");
      const ModeIndex n = detail::mode_flag(f1.n, "--n", common.cap);
      if (axis.dimensionless) report.notes.push_back("note: dimensionless parameters mapped to omega = 1, d = sqrt(D)");
      scenario["omega"] = axis.omega;
      scenario["omega_prime"] = axis.omega_prime;
      scenario["d"] = axis.d;
      scenario["n"] = n;
      const Transition1D t{{axis.omega, 0.0}, {axis.omega_prime, axis.d}, n};

      if (command == "fc-estimate") {
        const auto e = fc_estimate_detail(t);
        detail::Output o(common.out, out);
        if (format == Format::json) {
          *o.stream << json{{"scenario", scenario},
                            {"estimate", e.level},
                            {"transition_point", e.transition_point},
                            {"near_branch", e.near_branch},
                            {"far_branch", e.far_branch}}
                           .dump(2)
                    << '\n';
        } else {
          *o.stream << e.level << '\n';
        }
        report.notes.push_back("transition_point: " + format_double(e.transition_point));
        report.notes.push_back("near_branch_level: " + format_double(e.near_branch));
        report.notes.push_back("far_branch_level: " + format_double(e.far_branch));
        return finish(kSuccess);
      }

      if (command == "matrix") {
        const ModeIndex N = detail::mode_flag(f1.N, "--N", common.cap);
        const ModeIndex Np = detail::mode_flag(f1.N_prime, "--N-prime", common.cap);
        scenario["N"] = N;
        scenario["N_prime"] = Np;
        scenario.erase("n");
        detail::Output o(common.out, out);
        const auto c = coupling_matrix(t.source, t.target, N, Np, cap);
        emit_matrix(c, format, scenario, *o.stream);
        report.notes.push_back("orthogonality_defect: " + format_double(c.orthogonality_defect));
        for (const auto& w : c.warnings) report.warnings.push_back(w);
        return finish(kSuccess);
      }

      detail::Output o(common.out, out);
      try {
        const auto s = spectrum1d(t, common.eps, cap);
        emit_spectrum(s, format, scenario, *o.stream);
        report.captured_mass = s.captured_mass;
        const auto am = s.argmax();
        report.argmax = std::to_string(am) + " (probability " + format_double(s.entries[am].probability) + ")";
        return finish(kSuccess);
      } catch (const CapReached<Spectrum>& e) {
        const auto& s = e.partial();
        emit_spectrum(s, format, scenario, *o.stream);
        report.captured_mass = s.captured_mass;
        if (!s.entries.empty()) report.argmax = std::to_string(s.argmax());
        report.warnings.push_back(std::string("partial spectrum: ") + e.what());
        return finish(kCapReached);
      }
    }

    // 2D commands
    const ModeIndex nx = detail::mode_flag(f2.nx, "--nx", common.cap);
    const ModeIndex ny = detail::mode_flag(f2.ny, "--ny", common.cap);
    const auto [source, target] = detail::resolve_2d(f2, report, scenario);
    scenario["nx"] = nx;
    scenario["ny"] = ny;
    const bool separable = source.gamma == 0.0 && target.gamma == 0.0;
    if (command == "spectrum2d" && !separable)
      throw UsageError("--gamma/--gamma-prime: spectrum2d requires both to be 0; use coupled2d");
    if (!separable)
      report.notes.push_back("note: final indices label target normal modes along the rotated x and y axes");

    detail::Output o(common.out, out);
    auto compute = [&]() {
      if (command == "coupled2d" || !separable) return coupled_tensor(source, target, nx, ny, common.eps, cap);
      return spectrum2d_separable(source, target, nx, ny, common.eps, cap);
    };
    int code = kSuccess;
    CouplingTensor t;
    try {
      t = compute();
    } catch (const CapReached<CouplingTensor>& e) {
      t = e.partial();
      report.warnings.push_back(std::string("partial tensor: ") + e.what());
      code = kCapReached;
    }
    report.captured_mass = t.captured_mass;
    if (command == "entropy") {
      const auto r = schmidt_report(t);
      emit_schmidt(r, format, scenario, *o.stream);
      report.notes.push_back("entropy: " + format_double(r.entropy));
      report.notes.push_back("schmidt_rank_1e-10: " +
                             std::to_string(std::count_if(r.singular_values.begin(), r.singular_values.end(),
                                                          [&](double s) { return s > 1e-10 * r.singular_values[0]; })));
    } else {
      emit_tensor(t, format, scenario, *o.stream);
      if (!t.values.empty()) {
        const auto am = t.argmax();
        report.argmax = detail::pair_string(am) + " (probability " + format_double(t.probability(am.first, am.second)) + ")";
      }
    }
    return finish(code);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParameters;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParameters;
  } catch (const IndexOverflow& e) {
    err << "error: --cap: " << e.what() << "\n";
    return kInvalidParameters;
  } catch (const NumericOverflow& e) {
    err << "error: numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const ConvergenceError& e) {
    err << "error: numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace fcwave::cli
