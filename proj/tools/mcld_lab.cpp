// mcld-lab: simulate MCLD(lambda) and related models, or run the cross-validation suites.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mcld/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multiplicative coalescent with linear deletion: simulators and cross-validation"};
  app.set_version_flag("--version", "mcld-lab 0.1.0");

  std::string model;
  std::string config_path;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::vector<double> masses;
  std::size_t uniform = 0;
  double horizon = 0.0;
  std::size_t replicas = 0;
  std::string out;
  std::string format;
  std::size_t n = 0;
  double u = 0.0;
  std::size_t K = 0;
  std::vector<std::string> suites;
  unsigned threads = 0;

  std::string models;
  for (const std::string& m : mcld::model_names()) models += (models.empty() ? "" : ", ") + m;
  app.add_option("model", model, "One of: " + models)->required();
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--seed", seed, "Base seed (default 1; crossvalidate 20240601)");
  app.add_option("--lambda", lambda, "Deletion rate lambda >= 0");
  auto* masses_opt = app.add_option("--masses", masses, "Comma-separated initial masses")->delimiter(',');
  auto* uniform_opt = app.add_option("--uniform", uniform, "Use n unit masses");
  masses_opt->excludes(uniform_opt);
  app.add_option("--horizon", horizon, "Time horizon");
  app.add_option("--replicas", replicas, "Number of independent replicas");
  app.add_option("--out", out, "Output directory (default out)");
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--svg", "Also render particle paths as paths.svg");
  app.add_option("--n", n, "Number of vertices or particles (fp, ff)");
  app.add_option("--u", u, "Critical-window parameter (bmpd, fp)");
  app.add_option("--K", K, "Truncation size (smoluchowski)");
  app.add_option("--suites", suites, "crossvalidate: comma-separated suite ids, or all")->delimiter(',');
  app.add_option("--threads", threads, "Worker threads for replicas");
  app.add_flag("--fresh-seed", "Draw a random seed and print it");
  app.add_flag("--inject-bug", "crossvalidate: use an off-by-one interval merge rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mcld::kExitOk : mcld::kExitConfig;
  }

  mcld::RunConfig cfg;
  try {
    if (!config_path.empty()) mcld::apply_json(cfg, mcld::load_config_file(config_path));
    cfg.model = model;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--lambda")) cfg.lambda = lambda;
    if (app.count("--masses")) {
      cfg.masses = masses;
      cfg.uniform.reset();
    }
    if (app.count("--uniform")) {
      cfg.uniform = uniform;
      cfg.masses.clear();
    }
    if (app.count("--horizon")) cfg.horizon = horizon;
    if (app.count("--replicas")) cfg.replicas = replicas;
    if (app.count("--out")) cfg.out = out;
    if (app.count("--format")) cfg.format = format;
    if (app.count("--svg")) cfg.svg = true;
    if (app.count("--n")) cfg.n = n;
    if (app.count("--u")) cfg.u = u;
    if (app.count("--K")) cfg.K = K;
    if (app.count("--threads")) cfg.threads = threads;
    if (app.count("--fresh-seed")) cfg.fresh_seed = true;
    if (app.count("--inject-bug")) cfg.inject_bug = true;
    if (app.count("--suites")) {
      cfg.suites.clear();
      for (const std::string& s : suites) {
        if (s == "all") {
          for (int id = 1; id <= mcld::kSuiteCount; ++id) cfg.suites.push_back(id);
        } else {
          try {
            cfg.suites.push_back(std::stoi(s));
          } catch (const std::exception&) {
            throw mcld::ConfigError("--suites: '" + s + "' is not a suite id");
          }
        }
      }
    }
  } catch (const mcld::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return mcld::kExitConfig;
  }
  return mcld::run(cfg, std::cout, std::cerr);
}
