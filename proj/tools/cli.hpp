#pragma once

// fisherspec command-line front end.
//
//   fisherspec susceptibility --preset sodium-d1 --density 2.5e16
//   fisherspec arm --preset sodium-d1 --density-list 2.5e15,2.5e16,2.5e17
//   fisherspec fisher --density 2.5e17 --n 2 --states noon,single-photons
//   fisherspec compare --density 2.5e17 --n 2
//   fisherspec optimize --density 2.5e17 --n 2,4,6,10 --seeds 0..4
//
// Detunings are read and written in units of gamma_s and Fisher information
// in units of gamma_s^-2; everything else is SI. Exit codes: 0 success,
// 1 usage error, 2 numeric invariant violation.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fisherspec/fisherspec.hpp>

#ifndef FISHERSPEC_VERSION
#define FISHERSPEC_VERSION "0.1.0"
#endif

namespace fisherspec::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "fisherspec " FISHERSPEC_VERSION;

/// Thrown for invalid command lines or inputs (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Detuning grid in units of gamma_s.
struct GridSpec {
  double min = -100.0;
  double max = 100.0;
  int points = 2001;

  [[nodiscard]] DetuningGrid to_grid(const Medium& m) const { return {min * m.gamma_s, max * m.gamma_s, points}; }
};

struct SweepSpec {
  std::string command;
  std::string preset = "sodium-d1";
  std::string medium_file;
  std::optional<double> density;
  std::vector<double> density_list;
  std::vector<int> n_values{2};
  GridSpec grid;
  std::vector<std::string> states;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string out_dir = ".";
  std::string format = "csv";
  bool complex_coeffs = false;
  bool per_dimension_rng = false;
  int threads = 1;
};

// ---------------------------------------------------------------------------
// parsing helpers

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("invalid ") + what + " '" + s + "'");
  }
}

inline long long to_integer(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("invalid ") + what + " '" + s + "'");
  }
}

/// "min:max:points" in units of gamma_s.
inline GridSpec parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--grid expects min:max:points, got '" + text + "'");
  GridSpec g{to_double(parts[0], "grid min"), to_double(parts[1], "grid max"),
             static_cast<int>(to_integer(parts[2], "grid point count"))};
  if (!std::isfinite(g.min) || !std::isfinite(g.max)) throw UsageError("grid range must be finite");
  if (g.points < 2) throw UsageError("grid needs at least 2 points");
  if (!(g.max > g.min)) throw UsageError("grid max must exceed grid min");
  return g;
}

/// "0..4", "1,3,7" or a mixture such as "0..2,9".
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(text, ',')) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const long long lo = to_integer(item.substr(0, dots), "seed");
      const long long hi = to_integer(item.substr(dots + 2), "seed");
      if (lo < 0 || hi < lo) throw UsageError("invalid seed range '" + item + "'");
      for (long long s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
    } else {
      const long long s = to_integer(item, "seed");
      if (s < 0) throw UsageError("seeds must be non-negative");
      out.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (out.empty()) throw UsageError("no seeds given");
  return out;
}

/// Coefficients from a file written by `optimize` (JSON) or a `k,psi_k`
/// CSV (optionally with a third imaginary-part column).
inline ProbeState load_custom_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open coefficient file '" + path + "'");
  std::vector<Complex> coeffs;
  if (fs::path(path).extension() == ".json") {
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("cannot parse '" + path + "': " + e.what());
    }
    const json& src = doc.contains("best") ? doc.at("best") : doc;
    if (!src.contains("coefficients_re")) throw UsageError("'" + path + "' has no coefficients_re array");
    const auto re = src.at("coefficients_re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (src.contains("coefficients_im")) im = src.at("coefficients_im").get<std::vector<double>>();
    if (im.size() != re.size()) throw UsageError("'" + path + "': real and imaginary parts differ in length");
    for (std::size_t i = 0; i < re.size(); ++i) coeffs.emplace_back(re[i], im[i]);
  } else {
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        header_seen = true;
        if (line.rfind("k,", 0) == 0) continue;
      }
      const auto cols = split(line, ',');
      if (cols.size() < 2) throw UsageError("'" + path + "': expected k,psi_k rows");
      const auto k = to_integer(cols[0], "coefficient index");
      if (k != static_cast<long long>(coeffs.size())) throw UsageError("'" + path + "': coefficient rows must be k = 0, 1, ...");
      coeffs.emplace_back(to_double(cols[1], "coefficient"), cols.size() > 2 ? to_double(cols[2], "coefficient") : 0.0);
    }
  }
  if (coeffs.empty()) throw UsageError("'" + path + "' contains no coefficients");
  try {
    return ProbeState::normalized(std::move(coeffs));
  } catch (const std::invalid_argument& e) {
    throw UsageError("'" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// output helpers

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Compact density label for file names: 2.5e+16 -> 2.5e16.
inline std::string density_tag(double density) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", density);
  std::string s = buf;
  if (auto p = s.find("e+"); p != std::string::npos) s.erase(p + 1, 1);
  return s;
}

/// Writes via a temporary file and a rename so readers never see a partial file.
inline void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw UsageError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

inline json medium_json(const Medium& m) {
  return json{{"mu_Cm", m.mu},
              {"gamma_s_per_s", m.gamma_s},
              {"omega0_rad_per_s", m.omega0},
              {"density_per_m3", m.density},
              {"length_m", m.length}};
}

inline std::string medium_comment(const SweepSpec& spec, const Medium& m) {
  std::ostringstream os;
  os << "# medium: " << (spec.medium_file.empty() ? "preset=" + spec.preset : "file=" + spec.medium_file)
     << " mu_Cm=" << fmt_double(m.mu) << " gamma_s_per_s=" << fmt_double(m.gamma_s)
     << " omega0_rad_per_s=" << fmt_double(m.omega0) << " density_per_m3=" << fmt_double(m.density)
     << " length_m=" << fmt_double(m.length) << "\n";
  return os.str();
}

/// CSV with '#' metadata lines, a one-line header and one row per sample.
class CsvWriter {
 public:
  CsvWriter(const SweepSpec& spec, const Medium& m, std::vector<std::string> extra_meta) {
    out_ << "# " << kVersion << "\n# command: " << spec.command << "\n" << medium_comment(spec, m);
    for (const auto& line : extra_meta) out_ << "# " << line << "\n";
  }

  void header(const std::vector<std::string>& cols) { row_strings(cols); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cols;
    cols.reserve(values.size());
    for (double v : values) cols.push_back(fmt_double(v));
    row_strings(cols);
  }

  void row_strings(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }

  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline json coefficients_json(const ProbeState& s) {
  std::vector<double> re;
  std::vector<double> im;
  for (const auto& c : s.coeffs()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return json{{"coefficients_re", re}, {"coefficients_im", im}};
}

// ---------------------------------------------------------------------------
// commands

struct Context {
  SweepSpec spec;
  Medium base;
  std::vector<Medium> media;  ///< one per requested density
  std::ostream* log = &std::cout;
};

inline Context make_context(const SweepSpec& spec, std::ostream& log) {
  Context ctx{spec, {}, {}, &log};
  try {
    ctx.base = spec.medium_file.empty() ? medium_preset(spec.preset) : load_medium_file(spec.medium_file);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<double> densities = spec.density_list;
  if (densities.empty()) densities.push_back(spec.density.value_or(ctx.base.density));
  for (double d : densities) {
    Medium m = ctx.base.with_density(d);
    try {
      m.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (!(m.omega0 + spec.grid.min * m.gamma_s > 0.0)) throw UsageError("grid extends below zero photon frequency");
    ctx.media.push_back(m);
  }
  return ctx;
}

inline int run_susceptibility(const Context& ctx) {
  const fs::path dir(ctx.spec.out_dir);
  json doc{{"version", kVersion}, {"command", ctx.spec.command}, {"results", json::array()}};
  for (const Medium& m : ctx.media) {
    const auto deltas = ctx.spec.grid.to_grid(m).values();
    CsvWriter csv(ctx.spec, m, {});
    csv.header({"delta_over_gamma_s", "chi_re", "chi_im", "dchi_re_dx", "dchi_im_dx"});
    json rows = json::array();
    for (double d : deltas) {
      const Susceptibility s = susceptibility(m, d);
      // derivatives with respect to x = delta / gamma_s (dimensionless)
      const std::vector<double> row{d / m.gamma_s, s.chi_re, s.chi_im, s.dchi_re * m.gamma_s, s.dchi_im * m.gamma_s};
      csv.row(row);
      rows.push_back(row);
    }
    if (ctx.spec.format == "json") {
      doc["results"].push_back({{"medium", medium_json(m)},
                                {"columns", {"delta_over_gamma_s", "chi_re", "chi_im", "dchi_re_dx", "dchi_im_dx"}},
                                {"rows", rows}});
    } else {
      write_atomic(dir / ("susceptibility_" + density_tag(m.density) + ".csv"), csv.str());
    }
  }
  if (ctx.spec.format == "json") write_atomic(dir / "susceptibility.json", doc.dump(2) + "\n");
  return 0;
}

inline int run_arm(const Context& ctx) {
  const fs::path dir(ctx.spec.out_dir);
  json doc{{"version", kVersion}, {"command", ctx.spec.command}, {"results", json::array()}};
  for (const Medium& m : ctx.media) {
    const auto deltas = ctx.spec.grid.to_grid(m).values();
    CsvWriter csv(ctx.spec, m, {});
    csv.header({"delta_over_gamma_s", "transmissivity", "phase_rad"});
    json rows = json::array();
    for (double d : deltas) {
      const ArmResponse a = arm_response(m, d);
      const std::vector<double> row{d / m.gamma_s, a.transmissivity, a.phase};
      csv.row(row);
      rows.push_back(row);
    }
    if (ctx.spec.format == "json") {
      doc["results"].push_back(
          {{"medium", medium_json(m)}, {"columns", {"delta_over_gamma_s", "transmissivity", "phase_rad"}}, {"rows", rows}});
    } else {
      write_atomic(dir / ("arm_" + density_tag(m.density) + ".csv"), csv.str());
    }
  }
  if (ctx.spec.format == "json") write_atomic(dir / "arm.json", doc.dump(2) + "\n");
  return 0;
}

inline PsoConfig make_pso_config(const SweepSpec& spec, const Medium& m, int n) {
  PsoConfig cfg = PsoConfig::defaults(m, n);
  cfg.objective_grid = spec.grid.to_grid(m);
  cfg.complex_coeffs = spec.complex_coeffs;
  cfg.swarm.per_dimension_rng = spec.per_dimension_rng;
  cfg.swarm.threads = spec.threads;
  return cfg;
}

inline json pso_config_json(const PsoConfig& cfg, const Medium& m) {
  return json{{"constriction", cfg.swarm.constriction},
              {"c_global", cfg.swarm.c_global},
              {"c_local", cfg.swarm.c_local},
              {"n_particles", cfg.swarm.n_particles},
              {"n_iterations", cfg.swarm.n_iterations},
              {"per_dimension_rng", cfg.swarm.per_dimension_rng},
              {"complex_coeffs", cfg.complex_coeffs},
              {"objective_grid", {{"min_over_gamma_s", cfg.objective_grid.min / m.gamma_s},
                                  {"max_over_gamma_s", cfg.objective_grid.max / m.gamma_s},
                                  {"points", cfg.objective_grid.points},
                                  {"refine_points", cfg.refine_points}}}};
}

/// Spot check of the closed form against the Fock-space oracle at one
/// detuning. Throws NumericInvariantError on drift above 1e-10.
inline void verify_against_oracle(const ProbeState& state, const Medium& m, double delta) {
  if (state.n_total() > kOracleMaxPhotons) return;
  const ArmResponse arm = arm_response(m, delta);
  const OutcomeDistribution closed = detection_distribution(state, arm);
  const OutcomeDistribution brute = distribution_oracle(state, arm);
  for (std::size_t i = 0; i < closed.outcomes().size(); ++i) {
    const double diff = std::abs(closed.outcomes()[i].prob - brute.outcomes()[i].prob);
    if (diff > 1e-10) throw NumericInvariantError("closed form drifts from the oracle by " + fmt_double(diff));
  }
}

struct NamedCurve {
  std::string name;
  ProbeState state;  ///< state fed to the interferometer (one copy for *-copies baselines)
  int copies = 1;
  FisherCurve curve;
  FisherPeak refined;
  std::optional<PsoResult> optimum;
  std::vector<PsoResult> runs;
};

inline NamedCurve evaluate_named_state(const std::string& name, int n, const Medium& m, const Context& ctx) {
  const DetuningGrid grid = ctx.spec.grid.to_grid(m);
  auto curve_of = [&](const std::string& label, const ProbeState& s, int copies) {
    NamedCurve nc{label, s, copies, {}, {}, std::nullopt, {}};
    const StateDetection det(s);
    const auto deltas = grid.values();
    nc.curve = copies_fisher(fisher_curve(det, m, deltas), copies);
    nc.refined = peak_fisher(det, m, grid);
    nc.refined.value *= copies;
    verify_against_oracle(s, m, nc.curve.peak_delta);
    return nc;
  };

  if (name == "single-photons") return curve_of(name, all_in_ensemble_arm(1), n);
  if (name == "noon") return curve_of(name, noon_state(n), 1);
  if (name == "noon-copies") return curve_of(name, noon_state(1), n);
  if (name == "all-in-arm") return curve_of(name, all_in_ensemble_arm(n), 1);
  if (name == "optimal") {
    const PsoConfig cfg = make_pso_config(ctx.spec, m, n);
    auto runs = optimize_state_seeds(m, cfg, ctx.spec.seeds);
    const auto best = best_result(runs);
    NamedCurve nc = curve_of(name, runs[best].best_state, 1);
    nc.optimum = runs[best];
    nc.runs = std::move(runs);
    return nc;
  }
  if (name.rfind("custom:", 0) == 0) {
    const ProbeState s = load_custom_state(name.substr(7));
    if (s.n_total() != n) {
      throw UsageError("custom state '" + name.substr(7) + "' has N = " + std::to_string(s.n_total()) +
                       " but --n is " + std::to_string(n));
    }
    return curve_of("custom-" + fs::path(name.substr(7)).stem().string(), s, 1);
  }
  throw UsageError("unknown state '" + name + "'");
}

inline void validate_state_names(const std::vector<std::string>& states, int n) {
  for (const auto& s : states) {
    const bool known = s == "single-photons" || s == "noon" || s == "noon-copies" || s == "all-in-arm" ||
                       s == "optimal" || s.rfind("custom:", 0) == 0;
    if (!known) throw UsageError("unknown state '" + s + "'");
    if (n < 1 && s != "optimal") throw UsageError("state '" + s + "' needs --n >= 1");
  }
}

inline int run_fisher_like(const Context& ctx, bool with_timing) {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepSpec& spec = ctx.spec;
  if (spec.states.empty()) throw UsageError("--states must list at least one state");
  for (int n : spec.n_values) validate_state_names(spec.states, n);

  const fs::path dir(spec.out_dir);
  json summary{{"version", kVersion},
               {"command", spec.command},
               {"grid", {{"min_over_gamma_s", spec.grid.min}, {"max_over_gamma_s", spec.grid.max}, {"points", spec.grid.points}}},
               {"seeds", spec.seeds},
               {"results", json::array()}};
  json curves_doc = json::array();

  for (const Medium& m : ctx.media) {
    const double g2 = m.gamma_s * m.gamma_s;
    for (int n : spec.n_values) {
      for (const auto& state_name : spec.states) {
        const NamedCurve nc = evaluate_named_state(state_name, n, m, ctx);
        const std::string stem = "fisher_" + nc.name + "_N" + std::to_string(n) + "_" + density_tag(m.density);

        std::vector<std::string> meta{"state: " + nc.name, "n_total: " + std::to_string(n),
                                      "copies: " + std::to_string(nc.copies)};
        if (nc.optimum) meta.push_back("seed: " + std::to_string(nc.optimum->seed));
        CsvWriter csv(spec, m, meta);
        csv.header({"delta_over_gamma_s", "fisher_gamma_s_sq"});
        json rows = json::array();
        for (std::size_t i = 0; i < nc.curve.deltas.size(); ++i) {
          const std::vector<double> row{nc.curve.deltas[i] / m.gamma_s, nc.curve.values[i] * g2};
          csv.row(row);
          rows.push_back(row);
        }
        if (spec.format == "json") {
          curves_doc.push_back({{"file_stem", stem}, {"columns", {"delta_over_gamma_s", "fisher_gamma_s_sq"}}, {"rows", rows}});
        } else {
          write_atomic(dir / (stem + ".csv"), csv.str());
        }

        json entry{{"state", nc.name},
                   {"n_total", n},
                   {"copies", nc.copies},
                   {"medium", medium_json(m)},
                   {"peak_fisher_gamma_s_sq", nc.curve.peak_value * g2},
                   {"peak_delta_over_gamma_s", nc.curve.peak_delta / m.gamma_s},
                   {"refined_peak_fisher_gamma_s_sq", nc.refined.value * g2},
                   {"refined_peak_delta_over_gamma_s", nc.refined.delta / m.gamma_s},
                   {"coefficients", coefficients_json(nc.state)}};
        if (nc.optimum) {
          entry["seed"] = nc.optimum->seed;
          entry["pso_config"] = pso_config_json(make_pso_config(spec, m, n), m);
          json per_seed = json::array();
          for (const auto& r : nc.runs) per_seed.push_back({{"seed", r.seed}, {"objective_gamma_s_sq", r.best_objective * g2}});
          entry["runs"] = per_seed;
        }
        summary["results"].push_back(entry);
        *ctx.log << nc.name << " N=" << n << " density=" << density_tag(m.density)
                 << " peak F*gamma_s^2=" << fmt_double(nc.refined.value * g2) << " at delta/gamma_s="
                 << fmt_double(nc.refined.delta / m.gamma_s) << "\n";
      }
    }
  }

  if (spec.format == "json") write_atomic(dir / (spec.command + "_curves.json"), curves_doc.dump(2) + "\n");
  write_atomic(dir / (spec.command + "_summary.json"), summary.dump(2) + "\n");
  if (with_timing) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_atomic(dir / (spec.command + "_timing.json"), json{{"wall_time_s", wall}}.dump(2) + "\n");
    *ctx.log << "wall time " << wall << " s\n";
  }
  return 0;
}

inline int run_optimize(const Context& ctx) {
  const SweepSpec& spec = ctx.spec;
  const fs::path dir(spec.out_dir);
  for (int n : spec.n_values) {
    if (n < 0) throw UsageError("--n must be non-negative");
  }
  for (const Medium& m : ctx.media) {
    const double g2 = m.gamma_s * m.gamma_s;
    for (int n : spec.n_values) {
      const PsoConfig cfg = make_pso_config(spec, m, n);
      const auto runs = optimize_state_seeds(m, cfg, spec.seeds);
      const auto best = best_result(runs);
      for (const auto& r : runs) {
        if (n >= 1) verify_against_oracle(r.best_state, m, r.best_peak_delta);
      }

      auto run_json = [&](const PsoResult& r, bool with_trace) {
        json j{{"seed", r.seed},
               {"objective_gamma_s_sq", r.best_objective * g2},
               {"peak_delta_over_gamma_s", r.best_peak_delta / m.gamma_s},
               {"evaluations", r.evaluations}};
        j.update(coefficients_json(r.best_state));
        if (with_trace) {
          std::vector<double> trace;
          for (double v : r.objective_trace) trace.push_back(v * g2);
          j["trace_gamma_s_sq"] = trace;
        }
        return j;
      };

      json doc{{"version", kVersion},
               {"command", spec.command},
               {"medium", medium_json(m)},
               {"n_total", n},
               {"pso_config", pso_config_json(cfg, m)},
               {"seeds", spec.seeds},
               {"best_seed", runs[best].seed},
               {"best", run_json(runs[best], false)},
               {"runs", json::array()}};
      for (const auto& r : runs) doc["runs"].push_back(run_json(r, true));

      const std::string stem = "N" + std::to_string(n) + "_" + density_tag(m.density);
      write_atomic(dir / ("optimize_" + stem + ".json"), doc.dump(2) + "\n");

      CsvWriter csv(spec, m, {"n_total: " + std::to_string(n), "seed: " + std::to_string(runs[best].seed),
                              "objective_gamma_s_sq: " + fmt_double(runs[best].best_objective * g2)});
      const bool complex_out = spec.complex_coeffs;
      csv.header(complex_out ? std::vector<std::string>{"k", "psi_k", "psi_k_im"} : std::vector<std::string>{"k", "psi_k"});
      const ProbeState& s = runs[best].best_state;
      for (int k = 0; k <= n; ++k) {
        const Complex c = s[static_cast<std::size_t>(k)];
        std::vector<std::string> row{std::to_string(k), fmt_double(c.real())};
        if (complex_out) row.push_back(fmt_double(c.imag()));
        csv.row_strings(row);
      }
      write_atomic(dir / ("optimal_coeffs_" + stem + ".csv"), csv.str());

      *ctx.log << "N=" << n << " density=" << density_tag(m.density) << " best seed " << runs[best].seed
               << " peak F*gamma_s^2=" << fmt_double(runs[best].best_objective * g2) << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// entry point

inline void add_common_options(CLI::App& sub, SweepSpec& spec, std::string& grid_text, std::string& density_list_text,
                               std::string& seeds_text, std::string& n_text, std::string& states_text,
                               std::optional<double>& density) {
  sub.add_option("--preset", spec.preset, "built-in medium preset")->check(CLI::IsMember({"sodium-d1"}));
  sub.add_option("--medium-file", spec.medium_file, "key-value medium file (overrides --preset)");
  sub.add_option("--density", density, "atom number density [m^-3]");
  sub.add_option("--density-list", density_list_text, "comma-separated densities [m^-3]");
  sub.add_option("--n", n_text, "total photon number(s), comma-separated");
  sub.add_option("--grid", grid_text, "detuning grid min:max:points in units of gamma_s");
  sub.add_option("--states", states_text,
                 "comma list of single-photons, noon, noon-copies, all-in-arm, optimal, custom:<file>");
  sub.add_option("--seeds", seeds_text, "PSO seeds, e.g. 0..4 or 1,5,9");
  sub.add_option("--out-dir", spec.out_dir, "output directory");
  sub.add_option("--format", spec.format, "curve output format")->check(CLI::IsMember({"csv", "json"}));
  sub.add_flag("--complex-coeffs", spec.complex_coeffs, "search complex coefficients");
  sub.add_flag("--per-dimension-rng", spec.per_dimension_rng, "draw PSO random factors per coordinate");
}

/// Parses and runs one command. Output files go to --out-dir; progress lines
/// to `out`, diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Fisher information of photon-counting spectroscopy in a lossy Mach-Zehnder interferometer", "fisherspec"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SweepSpec spec;
  spec.threads = default_thread_count();
  std::string grid_text;
  std::string density_list_text;
  std::string seeds_text;
  std::string n_text;
  std::string states_text;
  std::optional<double> density;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"susceptibility", "chi' and chi'' versus detuning"},
      {"arm", "transmissivity and phase shift versus detuning"},
      {"fisher", "Fisher information curves for the listed states"},
      {"compare", "Fisher curves of the reference states and the optimized state"},
      {"optimize", "particle-swarm search for the state with the largest peak Fisher information"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common_options(*sub, spec, grid_text, density_list_text, seeds_text, n_text, states_text, density);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    spec.command = app.get_subcommands().front()->get_name();
    spec.density = density;
    if (!grid_text.empty()) spec.grid = parse_grid(grid_text);
    if (!density_list_text.empty()) {
      for (const auto& d : split(density_list_text, ',')) spec.density_list.push_back(to_double(d, "density"));
    }
    if (!seeds_text.empty()) spec.seeds = parse_seeds(seeds_text);
    if (!n_text.empty()) {
      spec.n_values.clear();
      for (const auto& n : split(n_text, ',')) {
        const auto v = to_integer(n, "photon number");
        if (v < 0 || v > kMaxPhotons) throw UsageError("--n must lie in [0, " + std::to_string(kMaxPhotons) + "]");
        spec.n_values.push_back(static_cast<int>(v));
      }
      if (spec.n_values.empty()) throw UsageError("--n is empty");
    }
    if (!states_text.empty()) spec.states = split(states_text, ',');
    if (spec.command == "compare" && spec.states.empty()) spec.states = {"single-photons", "noon", "noon-copies", "optimal"};

    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec) throw UsageError("cannot create output directory '" + spec.out_dir + "': " + ec.message());

    const Context ctx = make_context(spec, out);
    if (spec.command == "susceptibility") return run_susceptibility(ctx);
    if (spec.command == "arm") return run_arm(ctx);
    if (spec.command == "fisher") return run_fisher_like(ctx, false);
    if (spec.command == "compare") return run_fisher_like(ctx, true);
    return run_optimize(ctx);
  } catch (const NumericInvariantError& e) {
    err << "numeric invariant violated: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fisherspec::cli
