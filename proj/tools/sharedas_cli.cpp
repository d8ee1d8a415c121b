// Command-line front end for the shared active subspace experiments.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sharedas/errors.hpp"
#include "sharedas/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  bool reproducible = false;
};

sharedas::ExperimentConfig load(const std::string& path, const CommonFlags& flags) {
  sharedas::ExperimentConfig config = sharedas::load_config(path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.jobs) {
    if (*flags.jobs < 1) throw sharedas::ConfigError("--jobs must be at least 1");
    config.jobs = *flags.jobs;
  }
  if (flags.reproducible) config.reproducible = true;
  return config;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sharedas::Error("cannot write " + path.string());
  out << text;
}

void print_warnings(const sharedas::Warnings& warnings) {
  for (const auto& w : warnings) {
    std::cerr << "warning: " << sharedas::to_string(w.kind) << ": " << w.detail << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared active subspaces for vector-valued functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sharedas::kLibraryVersion);

  CommonFlags flags;
  std::string config_path;
  std::string method_tag;
  long rank = 1;
  std::string out_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON configuration file")->required();
    sub->add_option("--seed", flags.seed, "override the configured seed");
    sub->add_option("--jobs", flags.jobs, "parallel repetitions");
    sub->add_flag("--reproducible", flags.reproducible, "pin the scalar kernels (fixed summation order)");
  };

  auto* experiment = app.add_subcommand("experiment", "run all repetitions and write CSV artifacts");
  add_common(experiment);

  auto* summary = app.add_subcommand("summary-plot", "sufficient summary plot table for one method");
  add_common(summary);
  summary->add_option("--method", method_tag, "method tag")->required();
  summary->add_option("--rank", rank, "reconstruction rank r (columns r and r+1)")->default_val(1);
  summary->add_option("--out", out_path, "output CSV (default: <output_dir>/summary_<method>_rank<r>.csv)");

  auto* normcompare = app.add_subcommand("normcompare", "compare normalized and original gradients");
  add_common(normcompare);
  normcompare->add_option("--out", out_path, "output CSV (default: <output_dir>/normalization.csv)");

  auto* dump = app.add_subcommand("dump-basis", "print the basis of one method");
  add_common(dump);
  dump->add_option("--method", method_tag, "method tag")->required();
  dump->add_option("--out", out_path, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const sharedas::ExperimentConfig config = load(config_path, flags);
    if (experiment->parsed()) {
      const auto result = sharedas::run_experiment(config);
      print_warnings(result.warnings);
      for (const auto& f : result.failures) {
        std::cerr << "repetition " << f.repetition << " failed: " << f.message << "\n";
      }
      std::cout << "wrote " << (config.output_dir / "rmse_report.csv").string() << " ("
                << result.bases.size() << "/" << config.repetitions << " repetitions)\n";
    } else if (summary->parsed()) {
      const auto method = sharedas::method_from_string(method_tag);
      const auto table = sharedas::run_summary_plot(config, method, rank);
      const std::filesystem::path path =
          out_path.empty() ? config.output_dir / ("summary_" + std::string(sharedas::to_string(method)) +
                                                  "_rank" + std::to_string(rank) + ".csv")
                           : std::filesystem::path(out_path);
      write_text(path, sharedas::format_summary_plot_csv(table));
      std::cout << "wrote " << path.string() << "\n";
    } else if (normcompare->parsed()) {
      const auto table = sharedas::compare_normalization(config);
      print_warnings(table.warnings);
      const std::filesystem::path path =
          out_path.empty() ? config.output_dir / "normalization.csv" : std::filesystem::path(out_path);
      write_text(path, table.csv());
      std::cout << "wrote " << path.string() << "\n";
    } else if (dump->parsed()) {
      const auto basis = sharedas::compute_basis(config, sharedas::method_from_string(method_tag));
      print_warnings(basis.warnings);
      const std::string text = sharedas::format_basis_csv(basis);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_text(out_path, text);
      }
    }
  } catch (const sharedas::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sharedas::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
