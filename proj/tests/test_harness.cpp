#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "mep/harness.hpp"

using mep::ExperimentSpec;
using mep::Target;

namespace {

std::string config_error(const std::string& text) {
  try {
    mep::parse_experiment_config(text);
  } catch (const mep::ConfigError& e) {
    return e.what();
  }
  return {};
}

const char* kBase = R"(model = "exp"
n_grid = [100, 200]
target = "gumbel"
replicates = 3
seed = 1
)";

ExperimentSpec small_spec(unsigned reps) {
  ExperimentSpec spec;
  spec.name = "t";
  spec.model = mep::DistributionModel::gpd(0.5, 1.0);
  spec.regime = mep::Regime::Frechet;
  spec.target = Target::Hausdorff;
  spec.n_grid = {500, 5000};
  spec.replicates = reps;
  spec.seed = 42;
  return spec;
}

}  // namespace

TEST(Config, ParsesAllKeys) {
  const auto spec = mep::parse_experiment_config(R"(
# comment line
name = "demo"          # trailing comment
model = "pareto:alpha=3"
target = "slope_frechet"
regime = "frechet"
n_grid = [1000, 10000]
policy = "power:0.5,0.6"
replicates = 10
seed = 99
epsilon = 0.1
)");
  EXPECT_EQ(spec.name, "demo");
  EXPECT_EQ(spec.model.spec(), "pareto:alpha=3");
  EXPECT_EQ(spec.target, Target::SlopeFrechet);
  EXPECT_EQ(spec.n_grid, (std::vector<std::size_t>{1000, 10000}));
  EXPECT_EQ(spec.policy.spec(), "power:0.5,0.6");
  EXPECT_EQ(spec.replicates, 10u);
  EXPECT_EQ(spec.seed, 99u);
  EXPECT_EQ(*spec.epsilon, 0.1);
}

TEST(Config, ErrorsNameTheKey) {
  const std::string base = kBase;
  EXPECT_NE(config_error("model = \"exp\"\nn_grid = [200, 100]\ntarget = \"gumbel\"\nreplicates = 3\nseed = 1\n").find("'n_grid'"),
            std::string::npos);
  EXPECT_NE(config_error("model = \"exp\"\nn_grid = [100, 100]\ntarget = \"gumbel\"\nreplicates = 3\nseed = 1\n").find("'n_grid'"),
            std::string::npos);
  EXPECT_NE(config_error(base + "colour = 3\n").find("'colour'"), std::string::npos);
  EXPECT_NE(config_error(base + "epsilon = -1\n").find("'epsilon'"), std::string::npos);
  EXPECT_NE(config_error(base + "seed = 2\n").find("'seed'"), std::string::npos);
  EXPECT_NE(config_error("n_grid = [100]\ntarget = \"gumbel\"\nreplicates = 3\nseed = 1\n").find("'model'"), std::string::npos);
  EXPECT_NE(config_error("model = \"exp\"\nn_grid = [100]\ntarget = \"gumbel\"\nreplicates = 0\nseed = 1\n").find("'replicates'"),
            std::string::npos);
  EXPECT_NE(config_error("model = \"gpd:xi=abc\"\nn_grid = [100]\ntarget = \"gumbel\"\nreplicates = 1\nseed = 1\n").find("'model'"),
            std::string::npos);
}

TEST(Config, RegimeMismatchIsConfigurationError) {
  const auto msg = config_error("model = \"exp\"\nn_grid = [100]\ntarget = \"slope_frechet\"\nreplicates = 1\nseed = 1\n");
  EXPECT_NE(msg.find("'target'"), std::string::npos);
  EXPECT_NE(msg.find("frechet"), std::string::npos);
}

TEST(Limits, TheoreticalValuesAndDefaultEpsilon) {
  auto spec = small_spec(1);
  EXPECT_EQ(mep::target_limit(spec), 0.0);
  spec.target = Target::Concomitant;
  EXPECT_DOUBLE_EQ(mep::target_limit(spec), 1.0);
  spec.model = mep::DistributionModel::pareto(3.0);
  spec.target = Target::VFrechet;
  EXPECT_DOUBLE_EQ(mep::target_limit(spec), 1.5);
  spec.model = mep::DistributionModel::uniform();
  spec.target = Target::ZWeibull;
  EXPECT_DOUBLE_EQ(mep::target_limit(spec), 0.5);
  EXPECT_DOUBLE_EQ(mep::default_epsilon(2.0), 0.1);
  EXPECT_DOUBLE_EQ(mep::default_epsilon(0.0), 0.02);
}

TEST(Run, SingleReplicateIsBitReproducible) {
  ExperimentSpec spec;
  spec.model = mep::DistributionModel::exponential();
  spec.target = Target::Gumbel;
  spec.regime = mep::Regime::Gumbel;
  spec.n_grid = {100};
  spec.replicates = 1;
  spec.seed = 5;
  const auto a = mep::run_experiment(spec, 1);
  const auto b = mep::run_experiment(spec, 1);
  ASSERT_EQ(a.rows.size(), 1u);
  EXPECT_EQ(a.rows[0].sd, 0.0);
  EXPECT_EQ(mep::report_csv(a), mep::report_csv(b));
  EXPECT_EQ(a.rows[0].mean, a.rows[0].q50);
}

TEST(Run, IndependentOfThreadCount) {
  const auto spec = small_spec(24);
  const auto one = mep::run_experiment(spec, 1);
  const auto four = mep::run_experiment(spec, 4);
  const auto seven = mep::run_experiment(spec, 7);
  EXPECT_EQ(mep::report_csv(one), mep::report_csv(four));
  EXPECT_EQ(mep::report_csv(one), mep::report_csv(seven));
  EXPECT_EQ(mep::report_json(one).dump(), mep::report_json(four).dump());
}

TEST(Run, StreamsAreDistinctPerReplicateAndSize) {
  std::set<double> firsts;
  const auto d = mep::DistributionModel::uniform();
  for (std::uint64_t r = 0; r < 50; ++r)
    for (std::uint64_t i = 0; i < 3; ++i) firsts.insert(mep::draw(d, 1, {7, r, i})[0]);
  EXPECT_EQ(firsts.size(), 150u);
}

TEST(Run, ReportShape) {
  const auto rep = mep::run_experiment(small_spec(10), 2);
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const auto& row : rep.rows) {
    EXPECT_GE(row.exceedance, 0.0);
    EXPECT_LE(row.exceedance, 1.0);
    EXPECT_LE(row.q10, row.q50);
    EXPECT_LE(row.q50, row.q90);
  }
  const auto csv = mep::report_csv(rep);
  EXPECT_EQ(csv.rfind("n,k,metric,value\n", 0), 0u);
  EXPECT_NE(csv.find("500,17,exceedance,"), std::string::npos);
  const auto j = mep::report_json(rep);
  EXPECT_EQ(j["replicates"], 10);
  EXPECT_EQ(j["window"], 5.0);
  EXPECT_EQ(j["limit_source"]["true_xi"], 0.5);
}

TEST(Summarize, FailuresCountAsExceedances) {
  std::vector<std::optional<double>> v = {1.0, 1.01, std::nullopt, 0.5};
  const auto row = mep::detail::summarize(10, 2, v, 1.0, 0.05);
  EXPECT_EQ(row.failures, 1u);
  EXPECT_DOUBLE_EQ(row.exceedance, 0.5);
  EXPECT_NEAR(row.mean, (1.0 + 1.01 + 0.5) / 3.0, 1e-15);
  EXPECT_TRUE(std::isinf(row.q90));
}

TEST(Run, FailedReplicatesAreRecorded) {
  // A window just above 1 leaves almost no room for the scaled points.
  auto spec = small_spec(5);
  spec.window = mep::Window{1.0001};
  const auto rep = mep::run_experiment(spec, 1);
  std::size_t failures = 0;
  for (const auto& row : rep.rows) failures += row.failures;
  EXPECT_GT(failures, 0u);
  for (const auto& row : rep.rows) EXPECT_GE(row.exceedance, static_cast<double>(row.failures) / 5.0);
}

TEST(ExceedanceCurve, Cases) {
  mep::ConvergenceReport rep;
  rep.rows = {{100, 5, 1, 0, 0.0, 0, 1, 1, 1}};
  EXPECT_THROW(mep::exceedance_curve(rep), mep::DomainError);
  rep.rows.push_back({1000, 20, 1, 0, 0.0, 0, 1, 1, 1});
  const auto c = mep::exceedance_curve(rep);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (std::pair<std::size_t, double>{100, 0.0}));
  EXPECT_EQ(c[1], (std::pair<std::size_t, double>{1000, 0.0}));
}

TEST(ExceedanceCurve, StatisticEqualToLimitGivesZeros) {
  std::vector<std::optional<double>> exact(20, 0.5);
  mep::ConvergenceReport rep;
  for (std::size_t n : {100u, 1000u, 10000u}) rep.rows.push_back(mep::detail::summarize(n, 10, exact, 0.5, 0.02));
  for (const auto& [n, p] : mep::exceedance_curve(rep)) EXPECT_EQ(p, 0.0);
}

TEST(Threads, EnvironmentOverride) {
  ::setenv("MEPLOT_THREADS", "3", 1);
  EXPECT_EQ(mep::resolve_threads(), 3u);
  ::setenv("MEPLOT_THREADS", "zero", 1);
  EXPECT_GE(mep::resolve_threads(), 1u);
  ::unsetenv("MEPLOT_THREADS");
}
