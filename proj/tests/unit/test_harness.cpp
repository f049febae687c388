#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mcld/harness.hpp"
#include "mcld/io.hpp"

using namespace mcld;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mcld_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int quiet_run(const RunConfig& cfg) {
  std::ostringstream log;
  std::ostringstream err;
  return run(cfg, log, err);
}

}  // namespace

TEST(Table, CsvRoundTripsDoublesAndQuotesJson) {
  Table t{"t", {"a", "b", "c"}, {}};
  t.add({0.1, 3LL, blocks_json({1.0, 0.5})});
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(), "a,b,c\n0.10000000000000001,3,\"[1,0.5]\"\n");
  EXPECT_THROW(t.add({1.0}), std::invalid_argument);
  EXPECT_EQ(to_json(t)[0]["b"], 3);
}

TEST(Config, UnknownKeysAndWrongTypesAreRejected) {
  RunConfig cfg;
  EXPECT_THROW(apply_json(cfg, nlohmann::json::parse(R"({"lambada": 1})")), ConfigError);
  EXPECT_THROW(apply_json(cfg, nlohmann::json::parse(R"({"horizon": "long"})")), ConfigError);
  EXPECT_THROW(apply_json(cfg, nlohmann::json::parse("[1, 2]")), ConfigError);
  apply_json(cfg, nlohmann::json::parse(R"({"model": "mcld", "lambda": 0.5, "suites": "all"})"));
  EXPECT_EQ(cfg.model, "mcld");
  EXPECT_EQ(*cfg.lambda, 0.5);
  EXPECT_EQ(cfg.suites.size(), static_cast<std::size_t>(kSuiteCount));
}

TEST(Config, ValidationMapsToExitCodeOne) {
  RunConfig cfg;
  cfg.model = "particles";
  cfg.out = scratch("invalid").string();
  cfg.horizon = -1.0;
  EXPECT_EQ(quiet_run(cfg), kExitConfig);
  cfg.horizon = 1.0;
  cfg.format = "xml";
  EXPECT_EQ(quiet_run(cfg), kExitConfig);
  cfg.format = "csv";
  cfg.model = "nope";
  EXPECT_EQ(quiet_run(cfg), kExitConfig);
  cfg.model = "tilt-shift";
  cfg.masses = {1.0, -2.0};
  EXPECT_EQ(quiet_run(cfg), kExitConfig);
}

TEST(Run, CsvIsByteIdenticalForSameSeed) {
  RunConfig cfg;
  cfg.model = "particles";
  cfg.uniform = 20;
  cfg.lambda = 1.3;
  cfg.horizon = 0.5;
  cfg.replicas = 4;
  cfg.seed = 42;
  cfg.svg = true;
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  cfg.out = a.string();
  ASSERT_EQ(quiet_run(cfg), kExitOk);
  cfg.out = b.string();
  cfg.threads = 3;
  ASSERT_EQ(quiet_run(cfg), kExitOk);
  for (const char* f : {"trajectory.csv", "segments.csv", "paths.svg"}) {
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  cfg.seed = 43;
  const auto c = scratch("det_c");
  cfg.out = c.string();
  ASSERT_EQ(quiet_run(cfg), kExitOk);
  EXPECT_NE(slurp(a / "trajectory.csv"), slurp(c / "trajectory.csv"));
}

TEST(Run, UnwritableOutputIsAnIoError) {
  const auto blocker = scratch("blocker");
  std::filesystem::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "a file, not a directory";
  RunConfig cfg;
  cfg.model = "mcld";
  cfg.out = (blocker / "sub").string();
  EXPECT_EQ(quiet_run(cfg), kExitIo);
  std::filesystem::remove(blocker);
}

TEST(Run, InjectedBugFailsKernelIdentitySuite) {
  RunConfig cfg;
  cfg.model = "crossvalidate";
  cfg.suites = {3};
  cfg.out = scratch("cv").string();
  EXPECT_EQ(quiet_run(cfg), kExitOk);
  cfg.inject_bug = true;
  EXPECT_EQ(quiet_run(cfg), kExitSuiteFailure);
  const auto reports = nlohmann::json::parse(slurp(std::filesystem::path(cfg.out) / "reports.json"));
  EXPECT_FALSE(reports[0]["passed"].get<bool>());
}

TEST(Run, LambdaZeroSkipsDeletionSuites) {
  SuiteOptions opt;
  opt.lambda = 0.0;
  for (int id : {2, 4, 9}) EXPECT_TRUE(run_suite(id, opt).skipped) << id;
  EXPECT_FALSE(run_suite(3, opt).skipped);
}

TEST(Svg, PureAndDrawsDeathMarkers) {
  ParticleState s({1.0, 1.0}, {-1.0, -2.0}, 1.0);
  s.record_paths();
  s.run(5.0);
  PathFigure fig;
  fig.segments = s.segments();
  fig.horizon = 5.0;
  for (double d : s.death_times()) fig.final_end.push_back(d);
  for (const ControlAtom& a : s.control()) fig.death_marks.push_back(a.time);
  const std::string one = render_svg(fig);
  EXPECT_EQ(one, render_svg(fig));
  std::size_t circles = 0;
  for (std::size_t p = one.find("<circle"); p != std::string::npos; p = one.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, s.control().size());
  EXPECT_NE(one.find("<polyline"), std::string::npos);
}
