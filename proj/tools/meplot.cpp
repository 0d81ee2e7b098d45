#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mep/cli.hpp"

namespace {

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) out += (i ? " " : "") + std::string(argv[i]);
  return out;
}

std::optional<mep::Regime> regime_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto r = mep::parse_regime(s);
  if (!r) throw CLI::ValidationError("--regime", "expected frechet, weibull or gumbel");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean excess plots, scaled ME sets and extreme-value regime diagnostics"};
  app.require_subcommand(1);

  mep::cli::GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write n seeded draws from a model, one per line");
  generate->add_option("model", gen.model, "Model spec, e.g. gpd:xi=0.5,beta=1")->required();
  generate->add_option("-n,--n", gen.n, "Sample size")->required();
  generate->add_option("--seed", gen.seed, "Seed");
  generate->add_option("-o,--output", gen.output, "Output path (default stdout)");
  generate->add_flag("--require-mean", gen.require_mean, "Fail if the model has no finite mean");

  mep::cli::MeplotOptions me;
  std::string me_regime;
  auto* meplot = app.add_subcommand("meplot", "Write the ME plot or a regime-scaled set as CSV (and SVG)");
  meplot->add_option("input", me.input, "CSV with one value per line")->required()->check(CLI::ExistingFile);
  meplot->add_option("-o,--stem", me.stem, "Output stem (default: input without extension)");
  meplot->add_option("--regime", me_regime, "frechet, weibull or gumbel: write the scaled set");
  meplot->add_option("--k", me.k, "Number of upper order statistics, or 'auto' (ceil(n^0.45))");
  meplot->add_option("--window", me.window, "Window size M of [0,M]^2");
  meplot->add_option("--overlay-xi", me.overlay_xi, "Shape of the limit set drawn over the scaled set");
  meplot->add_option("--seed", me.seed, "Seed recorded in the SVG metadata");
  meplot->add_flag("--svg", me.svg, "Also write <stem>.meplot.svg");

  mep::cli::ClassifyCliOptions cls;
  auto* classify = app.add_subcommand("classify", "Print the regime verdict as JSON (exit 2 if inconclusive)");
  classify->add_option("input", cls.input, "CSV with one value per line")->required()->check(CLI::ExistingFile);
  classify->add_option("--stability", cls.thresholds.stability_tol, "Max relative spread across k");
  classify->add_option("--gumbel-tol", cls.thresholds.gumbel_tol, "Max |statistic - 1| for the Gumbel check");

  mep::cli::ExperimentOptions exp;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo convergence experiment from a config file");
  experiment->add_option("config", exp.config, "Experiment config (key = value)")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out-dir", exp.out_dir, "Directory for the report files");
  experiment->add_option("--threads", exp.threads, "Worker threads (default MEPLOT_THREADS or all cores)");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mep::cli::kExitError;
  }

  if (generate->parsed()) return mep::cli::cmd_generate(gen, std::cout, std::cerr);
  if (meplot->parsed()) {
    try {
      me.regime = regime_flag(me_regime);
    } catch (const CLI::ValidationError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mep::cli::kExitError;
    }
    me.command_line = join_args(argc, argv);
    return mep::cli::cmd_meplot(me, std::cout, std::cerr);
  }
  if (classify->parsed()) return mep::cli::cmd_classify(cls, std::cout, std::cerr);
  if (experiment->parsed()) return mep::cli::cmd_experiment(exp, std::cout, std::cerr);
  if (selftest->parsed()) return mep::cli::cmd_selftest(std::cout, std::cerr);
  return mep::cli::kExitError;
}
