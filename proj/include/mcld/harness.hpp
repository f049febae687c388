#pragma once

// Run configuration, config-file loading and the per-model drivers behind mcld-lab.
//
// Precedence: built-in defaults, then the JSON config file, then command-line flags.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcld/core.hpp"
#include "mcld/error.hpp"
#include "mcld/excursion_calculus.hpp"
#include "mcld/graph_models.hpp"
#include "mcld/interval_coalescent.hpp"
#include "mcld/io.hpp"
#include "mcld/mcld_markov.hpp"
#include "mcld/particle_system.hpp"
#include "mcld/path_samplers.hpp"
#include "mcld/replicas.hpp"
#include "mcld/suites.hpp"

namespace mcld {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSuiteFailure = 2, kExitIo = 3 };

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"mcld", "icld",     "particles", "tilt-shift",   "bmpd",
                                              "levy", "fp",       "ff",        "smoluchowski", "crossvalidate"};
  return names;
}

struct RunConfig {
  std::string model;
  std::vector<double> masses;
  std::optional<std::size_t> uniform;  ///< shorthand for `uniform` unit masses
  std::optional<double> lambda;        ///< unset: 1 for the models, pinned values for crossvalidate
  double horizon = 1.0;
  std::size_t replicas = 1;
  std::optional<std::uint64_t> seed;   ///< unset: 1 for the models, 20240601 for crossvalidate
  bool fresh_seed = false;
  // Grid paths.
  double h = 1e-3;
  double X = 10.0;
  double u = 0.0;
  double kappa = 1.0;
  double tau = 0.0;
  std::vector<double> c;
  // Graph models and the Smoluchowski solver.
  std::size_t n = 1000;
  std::size_t K = 200;
  double dt = 1e-3;
  std::size_t kmax = 20;
  // Output.
  std::string out = "out";
  std::string format = "csv";
  bool svg = false;
  // crossvalidate.
  std::vector<int> suites;
  bool inject_bug = false;
  unsigned threads = 1;

  double lambda_or_default() const { return lambda.value_or(1.0); }
  std::uint64_t seed_or_default() const { return seed.value_or(1); }

  /// Initial masses: explicit list, `uniform` unit masses, or 10 unit masses.
  MassVector initial_masses() const {
    if (!masses.empty()) return sort_desc(masses);
    return MassVector(std::vector<double>(uniform.value_or(10), 1.0));
  }
};

namespace detail {

template <class T>
T json_get(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace detail

/// Overlay the keys of a JSON object onto `cfg`. Unknown keys are rejected.
inline void apply_json(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  using detail::json_get;
  for (const auto& [key, v] : doc.items()) {
    if (key == "model") {
      cfg.model = json_get<std::string>(v, key);
    } else if (key == "masses") {
      cfg.masses = json_get<std::vector<double>>(v, key);
    } else if (key == "uniform") {
      cfg.uniform = json_get<std::size_t>(v, key);
    } else if (key == "lambda") {
      cfg.lambda = json_get<double>(v, key);
    } else if (key == "horizon") {
      cfg.horizon = json_get<double>(v, key);
    } else if (key == "replicas") {
      cfg.replicas = json_get<std::size_t>(v, key);
    } else if (key == "seed") {
      cfg.seed = json_get<std::uint64_t>(v, key);
    } else if (key == "fresh_seed") {
      cfg.fresh_seed = json_get<bool>(v, key);
    } else if (key == "h") {
      cfg.h = json_get<double>(v, key);
    } else if (key == "X") {
      cfg.X = json_get<double>(v, key);
    } else if (key == "u") {
      cfg.u = json_get<double>(v, key);
    } else if (key == "kappa") {
      cfg.kappa = json_get<double>(v, key);
    } else if (key == "tau") {
      cfg.tau = json_get<double>(v, key);
    } else if (key == "c") {
      cfg.c = json_get<std::vector<double>>(v, key);
    } else if (key == "n") {
      cfg.n = json_get<std::size_t>(v, key);
    } else if (key == "K") {
      cfg.K = json_get<std::size_t>(v, key);
    } else if (key == "dt") {
      cfg.dt = json_get<double>(v, key);
    } else if (key == "kmax") {
      cfg.kmax = json_get<std::size_t>(v, key);
    } else if (key == "out") {
      cfg.out = json_get<std::string>(v, key);
    } else if (key == "format") {
      cfg.format = json_get<std::string>(v, key);
    } else if (key == "svg") {
      cfg.svg = json_get<bool>(v, key);
    } else if (key == "suites") {
      if (v.is_string() && v.get<std::string>() == "all") {
        cfg.suites.clear();
        for (int id = 1; id <= kSuiteCount; ++id) cfg.suites.push_back(id);
      } else {
        cfg.suites = json_get<std::vector<int>>(v, key);
      }
    } else if (key == "inject_bug") {
      cfg.inject_bug = json_get<bool>(v, key);
    } else if (key == "threads") {
      cfg.threads = json_get<unsigned>(v, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

inline nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

inline void validate(const RunConfig& cfg) {
  const auto& names = model_names();
  if (std::find(names.begin(), names.end(), cfg.model) == names.end()) {
    throw ConfigError("unknown model '" + cfg.model + "'");
  }
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be positive");
  };
  if (cfg.lambda && (!(*cfg.lambda >= 0.0) || !std::isfinite(*cfg.lambda))) {
    throw ConfigError("lambda must be >= 0");
  }
  positive(cfg.horizon, "horizon");
  positive(cfg.h, "h");
  positive(cfg.X, "X");
  positive(cfg.dt, "dt");
  if (cfg.replicas < 1) throw ConfigError("replicas must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  if (cfg.n < 2) throw ConfigError("n must be >= 2");
  if (cfg.K < 2) throw ConfigError("K must be >= 2");
  if (cfg.kmax < 1) throw ConfigError("kmax must be >= 1");
  if (cfg.uniform && *cfg.uniform < 1) throw ConfigError("uniform must be >= 1");
  if (!cfg.masses.empty() && cfg.uniform) throw ConfigError("give either masses or uniform, not both");
  for (double m : cfg.masses) positive(m, "masses");
  if (cfg.kappa < 0.0) throw ConfigError("kappa must be >= 0");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
  for (int id : cfg.suites) {
    if (id < 1 || id > kSuiteCount) throw ConfigError("no suite " + std::to_string(id));
  }
  if (cfg.out.empty()) throw ConfigError("out must not be empty");
}

namespace detail {

struct Output {
  std::filesystem::path dir;
  bool json = false;
  std::ostream& log;

  void table(const Table& t) const {
    const auto path = write_table(dir, t, json);
    log << "wrote " << path.string() << "\n";
  }
  void text(const std::string& name, const std::string& body) const {
    const auto path = dir / name;
    write_text_file(path, body);
    log << "wrote " << path.string() << "\n";
  }
};

inline Table trajectory_table() { return Table{"trajectory", {"replica", "time", "event", "blocks"}, {}}; }
inline Table segments_table() { return Table{"segments", {"id", "t0", "y0", "slope"}, {}}; }
inline Table excursions_table() { return Table{"excursions", {"replica", "time", "left", "length", "level"}, {}}; }

inline long long ll(std::size_t k) { return static_cast<long long>(k); }

inline void add_excursions(Table& t, std::size_t replica, double time, const ExcursionList& ex) {
  for (const Excursion& e : ex) t.add({ll(replica), time, e.left, e.length, e.level});
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline void run_markov(const RunConfig& cfg, std::uint64_t seed, const Output& out) {
  const MassVector m0 = cfg.initial_masses();
  const double lambda = cfg.lambda_or_default();
  const bool icld = cfg.model == "icld";
  auto rows = run_replicas(
      cfg.replicas, seed,
      [&](RngStream& rng, std::size_t k) {
        std::vector<std::vector<Cell>> r;
        auto event_name = [](EventKind e) { return std::string(e == EventKind::Merge ? "merge" : "delete"); };
        if (icld) {
          const IcldTrajectory tr = icld_simulate(m0, lambda, cfg.horizon, rng);
          r.push_back({ll(k), 0.0, std::string("initial"), blocks_json(tr.initial.values())});
          for (std::size_t e = 0; e < tr.events.size(); ++e) {
            r.push_back({ll(k), tr.events[e].time, event_name(tr.events[e].kind), blocks_json(tr.states[e].values())});
          }
        } else {
          const Trajectory tr = simulate(m0, lambda, cfg.horizon, rng);
          r.push_back({ll(k), 0.0, std::string("initial"), blocks_json(tr.initial.values())});
          for (std::size_t e = 0; e < tr.events.size(); ++e) {
            r.push_back({ll(k), tr.events[e].time, event_name(tr.events[e].kind), blocks_json(tr.states[e].values())});
          }
        }
        return r;
      },
      cfg.threads);
  Table t = trajectory_table();
  std::vector<double> deletions;
  for (auto& r : rows) {
    double d = 0.0;
    for (auto& row : r) {
      d += std::get<std::string>(row[2]) == "delete";
      t.add(std::move(row));
    }
    deletions.push_back(d);
  }
  out.log << cfg.model << ": " << m0.size() << " blocks, lambda " << lambda << ", horizon " << cfg.horizon << ", "
          << cfg.replicas << " replicas, mean deletions " << mean_of(deletions) << "\n";
  out.table(t);
}

inline PathFigure figure_from(const ParticleState& s, double horizon, const std::string& title) {
  PathFigure fig;
  fig.segments = s.segments();
  fig.horizon = horizon;
  fig.title = title;
  const bool fire = s.mode().kind == ParticleMode::ForestFire;
  for (double d : s.death_times()) fig.final_end.push_back(fire || !std::isfinite(d) ? horizon : d);
  for (const ControlAtom& a : fire ? s.burns() : s.control().atoms()) fig.death_marks.push_back(a.time);
  return fig;
}

inline void add_segments(Table& t, const ParticleState& s) {
  for (const Segment& g : s.segments()) t.add({ll(g.id), g.t0, g.y0, g.slope});
}

inline void run_particles(const RunConfig& cfg, std::uint64_t seed, const Output& out) {
  const MassVector m0 = cfg.initial_masses();
  const double lambda = cfg.lambda_or_default();
  struct Result {
    std::vector<std::vector<Cell>> rows;
    std::optional<ParticleState> first;
    double phi;
    std::size_t final_blocks;
  };
  auto results = run_replicas(
      cfg.replicas, seed,
      [&](RngStream& rng, std::size_t k) {
        ParticleState s = init(m0, lambda, rng);
        if (k == 0) s.record_paths();
        Result r;
        r.rows.push_back({ll(k), 0.0, std::string("initial"), blocks_json(blocks(s).values())});
        while (s.has_next_event() && s.next_event().earliest().first <= cfg.horizon) {
          const ParticleEvent ev = s.advance(&rng);
          r.rows.push_back({ll(k), ev.time, std::string(to_string(ev.kind)), blocks_json(blocks(s).values())});
        }
        if (cfg.horizon > s.time()) s.advance_to(cfg.horizon);
        r.phi = s.control().phi(cfg.horizon);
        r.final_blocks = s.block_list().size();
        if (k == 0) r.first = std::move(s);
        return r;
      },
      cfg.threads);
  Table t = trajectory_table();
  std::vector<double> phis;
  std::vector<double> nblocks;
  for (Result& r : results) {
    for (auto& row : r.rows) t.add(std::move(row));
    phis.push_back(r.phi);
    nblocks.push_back(static_cast<double>(r.final_blocks));
  }
  out.log << "particles: " << m0.size() << " particles, lambda " << lambda << ", horizon " << cfg.horizon
          << ", mean deleted mass " << mean_of(phis) << ", mean blocks at horizon " << mean_of(nblocks) << "\n";
  out.table(t);
  Table seg = segments_table();
  add_segments(seg, *results[0].first);
  out.table(seg);
  if (cfg.svg) {
    std::ostringstream title;
    title << "particle heights, n = " << m0.size() << ", lambda = " << lambda;
    out.text("paths.svg", render_svg(figure_from(*results[0].first, cfg.horizon, title.str())));
  }
}

inline void run_tilt_shift(const RunConfig& cfg, std::uint64_t seed, const Output& out) {
  const MassVector m0 = cfg.initial_masses();
  const double lambda = cfg.lambda_or_default();
  struct Result {
    TiltShiftRun run;
  };
  auto results = run_replicas(
      cfg.replicas, seed,
      [&](RngStream& rng, std::size_t) {
        const StepFunction f0 = from_measure(sample_exp_measure(m0, rng));
        return Result{tilt_shift_run(f0, lambda, cfg.horizon, true)};
      },
      cfg.threads);
  Table ex = excursions_table();
  Table control{"control", {"replica", "time", "mass"}, {}};
  std::vector<double> phis;
  for (std::size_t k = 0; k < results.size(); ++k) {
    for (const TiltShiftState& st : results[k].run.states) add_excursions(ex, k, st.time, st.excursions);
    for (const ControlAtom& a : results[k].run.control) control.add({ll(k), a.time, a.mass});
    phis.push_back(results[k].run.control.phi(cfg.horizon));
  }
  out.log << "tilt-shift: " << m0.size() << " excursions, lambda " << lambda << ", horizon " << cfg.horizon
          << ", mean deleted length " << mean_of(phis) << "\n";
  out.table(ex);
  out.table(control);
}

inline void run_grid_path(const RunConfig& cfg, std::uint64_t seed, const Output& out) {
  const bool levy = cfg.model == "levy";
  const double lambda = cfg.lambda_or_default();
  LevyParams prm{cfg.kappa, cfg.tau, cfg.c};
  if (levy) prm.validate();
  struct Result {
    GridPath path;
    GridExcursions ex;
    ExcursionList shifted;
  };
  auto results = run_replicas(
      cfg.replicas, seed,
      [&](RngStream& rng, std::size_t) {
        Result r;
        r.path = levy ? sample_levy_wr(prm, cfg.h, cfg.X, rng) : sample_bmpd(cfg.u, cfg.h, cfg.X, rng);
        r.ex = grid_excursions(r.path);
        if (!levy && lambda > 0.0 && !r.ex.completed.empty()) {
          r.shifted = tilt_shift_run(to_step_function(r.ex.completed), lambda, cfg.horizon).final_state.excursions;
        }
        return r;
      },
      cfg.threads);
  Table path{"path", {"x", "value"}, {}};
  const GridPath& p0 = results[0].path;
  for (std::size_t i = 0; i < p0.samples.size(); ++i) path.add({p0.x(i), p0.samples[i]});
  Table ex = excursions_table();
  std::vector<double> counts;
  std::vector<double> largest;
  for (std::size_t k = 0; k < results.size(); ++k) {
    add_excursions(ex, k, 0.0, results[k].ex.completed);
    if (!results[k].shifted.empty()) add_excursions(ex, k, cfg.horizon, results[k].shifted);
    counts.push_back(static_cast<double>(results[k].ex.completed.size()));
    const auto top = top_lengths(results[k].ex.completed, 1);
    largest.push_back(top.empty() ? 0.0 : top[0]);
  }
  out.log << cfg.model << ": h " << cfg.h << ", X " << cfg.X << ", mean completed excursions " << mean_of(counts)
          << ", mean largest length " << mean_of(largest) << "\n";
  out.table(path);
  out.table(ex);
}

inline void run_fp(const RunConfig& cfg, std::uint64_t seed, const Output& out) {
  const double lambda = cfg.lambda_or_default();
  const double nd = static_cast<double>(cfg.n);
  const double time_scale = std::cbrt(1.0 / nd);
  const double mass_scale = std::pow(nd, -2.0 / 3.0);
  const double lambda_n = lambda * time_scale;
  std::vector<double> sample_times;
  for (int i = 0; i <= 10; ++i) sample_times.push_back(cfg.horizon * time_scale * i / 10.0);
  auto runs = run_replicas(
      cfg.replicas, seed,
      [&](RngStream& rng, std::size_t) {
        const ComponentState s0 = sample_er_critical(cfg.n, cfg.u, rng, GraphMode::Frozen);
        return evolve(s0, lambda_n, cfg.horizon * time_scale, rng, sample_times, false);
      },
      cfg.threads);
  Table comp{"components", {"replica", "time", "rank", "mass"}, {}};
  Table hist{"histogram", {"replica", "size", "count"}, {}};
  std::vector<double> frozen;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (const ComponentState& s : runs[k].samples) {
      std::vector<std::size_t> sizes = s.sizes;
      std::sort(sizes.begin(), sizes.end(), std::greater<>());
      for (std::size_t r = 0; r < std::min<std::size_t>(5, sizes.size()); ++r) {
        comp.add({ll(k), s.time / time_scale, ll(r + 1), static_cast<double>(sizes[r]) * mass_scale});
      }
    }
    std::map<std::size_t, std::size_t> h;
    for (std::size_t sz : runs[k].final_state.sizes) ++h[sz];
    for (const auto& [sz, cnt] : h) hist.add({ll(k), ll(sz), ll(cnt)});
    frozen.push_back(static_cast<double>(runs[k].final_state.frozen) * mass_scale);
  }
  out.log << "fp: n " << cfg.n << ", u " << cfg.u << ", lambda " << lambda << ", rescaled horizon " << cfg.horizon
          << ", mean frozen mass (rescaled) " << mean_of(frozen) << "\n";
  out.table(comp);
  out.table(hist);
}

inline void run_ff(const RunConfig& cfg, std::uint64_t seed, const Output& out) {
  const double lambda = cfg.lambda_or_default();
  struct Result {
    std::vector<ControlAtom> burns;
    std::optional<ParticleState> first;
  };
  auto results = run_replicas(
      cfg.replicas, seed,
      [&](RngStream& rng, std::size_t k) {
        ParticleState s = init_forest_fire(std::vector<std::size_t>(cfg.n, 1), lambda, rng);
        if (k == 0) s.record_paths();
        s.run(cfg.horizon, &rng);
        Result r{s.burns(), std::nullopt};
        if (k == 0) r.first = std::move(s);
        return r;
      },
      cfg.threads);
  Table burns{"burns", {"replica", "time", "mass"}, {}};
  double count = 0.0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    for (const ControlAtom& a : results[k].burns) burns.add({ll(k), a.time, a.mass});
    count += static_cast<double>(results[k].burns.size());
  }
  const double rate = count / (static_cast<double>(cfg.replicas) * cfg.horizon);
  out.log << "ff: n " << cfg.n << ", lambda " << lambda << ", horizon " << cfg.horizon << ", burns per unit time "
          << rate << " (n lambda = " << static_cast<double>(cfg.n) * lambda << ")\n";
  out.table(burns);
  Table seg = segments_table();
  add_segments(seg, *results[0].first);
  out.table(seg);
  if (cfg.svg) {
    std::ostringstream title;
    title << "forest fire, n = " << cfg.n << ", lambda = " << lambda;
    out.text("paths.svg", render_svg(figure_from(*results[0].first, cfg.horizon, title.str())));
  }
}

inline void run_smoluchowski(const RunConfig& cfg, const Output& out) {
  SmoluchowskiOptions opt;
  opt.K = cfg.K;
  opt.dt = cfg.dt;
  const auto every = static_cast<std::size_t>(std::max(1.0, std::round(0.01 / cfg.dt)));
  const SmoluchowskiRun run = smoluchowski_solve(DensityTable{0.0, {1.0}}, cfg.horizon, opt, every);
  Table dens{"densities", {"t", "k", "v_k"}, {}};
  Table burn{"burning", {"t", "phi", "tail"}, {}};
  const std::size_t kmax = std::min(cfg.kmax, cfg.K);
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    for (std::size_t k = 1; k <= kmax; ++k) dens.add({run.times[i], ll(k), run.v[i][k - 1]});
    burn.add({run.times[i], run.phi[i], run.tail[i]});
  }
  const BurgersReport rep = burgers_diagnostics(run);
  out.log << "smoluchowski: K " << cfg.K << ", dt " << cfg.dt << ", horizon " << cfg.horizon << ", Burgers residual "
          << rep.residual_max << ", |V(t,0)| " << rep.boundary_max << ", characteristic gap " << rep.characteristic_gap
          << "\n";
  out.table(dens);
  out.table(burn);
}

inline int run_crossvalidate(const RunConfig& cfg, const Output& out) {
  SuiteOptions opt;
  if (cfg.seed) opt.seed = *cfg.seed;
  opt.lambda = cfg.lambda;
  opt.inject_bug = cfg.inject_bug;
  opt.threads = cfg.threads;
  std::set<int> ids(cfg.suites.begin(), cfg.suites.end());
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  bool all = true;
  for (const SuiteResult& r : run_suites(ids, opt)) {
    all = all && r.passed;
    out.log << format_suite_result(r);
    out.log.flush();
    nlohmann::ordered_json j{{"criterion", r.id},     {"name", r.name},       {"passed", r.passed},
                             {"skipped", r.skipped},  {"detail", r.detail},   {"seconds", r.seconds},
                             {"time_limit", r.time_limit}};
    j["reports"] = nlohmann::ordered_json::array();
    for (const StatReport& s : r.reports) {
      j["reports"].push_back({{"name", s.name},
                              {"statistic", s.statistic},
                              {"p_value", s.p_value},
                              {"n1", s.n1},
                              {"n2", s.n2},
                              {"threshold", s.threshold},
                              {"passed", s.passed}});
    }
    reports.push_back(std::move(j));
  }
  out.text("reports.json", reports.dump(1) + "\n");
  return all ? kExitOk : kExitSuiteFailure;
}

}  // namespace detail

/// Execute one configured run. Errors are reported on `err` and mapped to exit codes.
inline int run(RunConfig cfg, std::ostream& log, std::ostream& err) {
  try {
    validate(cfg);
    if (cfg.fresh_seed) {
      std::random_device rd;
      cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      log << "fresh seed " << *cfg.seed << " (pass --seed " << *cfg.seed << " to repeat this run)\n";
    }
    const detail::Output out{cfg.out, cfg.format == "json", log};
    const std::uint64_t seed = cfg.seed_or_default();
    const std::string& m = cfg.model;
    if (m == "mcld" || m == "icld") {
      detail::run_markov(cfg, seed, out);
    } else if (m == "particles") {
      detail::run_particles(cfg, seed, out);
    } else if (m == "tilt-shift") {
      detail::run_tilt_shift(cfg, seed, out);
    } else if (m == "bmpd" || m == "levy") {
      detail::run_grid_path(cfg, seed, out);
    } else if (m == "fp") {
      detail::run_fp(cfg, seed, out);
    } else if (m == "ff") {
      detail::run_ff(cfg, seed, out);
    } else if (m == "smoluchowski") {
      detail::run_smoluchowski(cfg, out);
    } else {
      return detail::run_crossvalidate(cfg, out);
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    // Parameter errors surfaced by the library (invalid_argument, LambdaZero, ...).
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace mcld
