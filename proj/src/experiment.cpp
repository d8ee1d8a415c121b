#include "sharedas/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sharedas/errors.hpp"
#include "sharedas/gradients.hpp"
#include "sharedas/rng.hpp"
#include "sharedas/simd/kernels.hpp"

namespace sharedas {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEvalStream = 1;
constexpr std::uint64_t kZahmStream = 2;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

template <typename T>
T get_as(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

// Reads a whitespace/comma separated d x d matrix.
SymmetricMatrix read_covariance(const std::filesystem::path& path, Eigen::Index d) {
  std::string text = read_file(path);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (static_cast<Eigen::Index>(values.size()) != d * d) {
    throw ConfigError("covariance file " + path.string() + ": expected " + std::to_string(d * d) +
                      " values, found " + std::to_string(values.size()));
  }
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = values[static_cast<std::size_t>(i * d + j)];
  }
  return SymmetricMatrix(m);
}

Distribution make_distribution(const ExperimentConfig& config, Eigen::Index d) {
  if (config.covariance_file) {
    return Distribution(config.distribution, d, read_covariance(*config.covariance_file, d));
  }
  return Distribution(config.distribution, d);
}

double fd_step(const ExperimentConfig& config) {
  return config.fd_rel_step > 0.0 ? config.fd_rel_step : default_fd_step();
}

// Pins the scalar kernels for the lifetime of a reproducible run.
class KernelScope {
 public:
  explicit KernelScope(bool reproducible) : active_(reproducible) {
    if (active_) simd::force_isa(simd::Isa::kScalar);
  }
  ~KernelScope() {
    if (active_) simd::reset_dispatch();
  }
  KernelScope(const KernelScope&) = delete;
  KernelScope& operator=(const KernelScope&) = delete;

 private:
  bool active_;
};

struct Prepared {
  SampleSet samples;
  GradientPipeline pipeline;
  SpdCollection spd;
  std::size_t rejected = 0;
};

Prepared prepare(const ExperimentConfig& config, const VectorProblem& problem, std::uint64_t seed) {
  const Distribution dist = make_distribution(config, problem.input_dim());
  FeasibleSample feasible = draw_feasible_samples(problem, dist, config.n, seed, fd_step(config));
  GradientPipeline pipe = build_jacobian_set(problem, feasible.samples, config.normalize, fd_step(config));
  SpdCollection spd = assemble_spd(pipe.jacobians);
  return Prepared{std::move(feasible.samples), std::move(pipe), std::move(spd), feasible.rejected};
}

SharedBasis basis_for(Method method, const JacobianSet& js, const SpdCollection& spd,
                      const ExperimentConfig& config) {
  switch (method) {
    case Method::kAg: return method_ag(js);
    case Method::kMch: return method_mch(js);
    case Method::kLp: return method_lp(js);
    case Method::kSspd: return method_sspd(spd);
    case Method::kFg: return method_fg(spd);
    case Method::kSee: {
      SeeOptions opts;
      opts.ascending = config.see_ascending;
      return method_see(spd, opts);
    }
    case Method::kZahm: break;
  }
  throw ValidationError("basis_for: zahm has no orthonormal shared basis");
}

// Generalized eigenvectors of (H, Sigma^{-1}) reported in SharedBasis form.
SharedBasis zahm_basis(const SymmetricMatrix& h, const SymmetricMatrix& sigma) {
  const RidgeProjector full = method_zahm(h, sigma, h.dim());
  return SharedBasis{Method::kZahm, full.vectors, full.values, std::nullopt, {}};
}

std::vector<Eigen::Index> merge_exclusions(const std::vector<Eigen::Index>& a,
                                           const std::vector<Eigen::Index>& b) {
  std::set<Eigen::Index> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

struct RepetitionOutput {
  std::vector<RmseReport> reports;
  std::vector<SharedBasis> bases;
  std::size_t rejected = 0;
  Warnings warnings;
};

RepetitionOutput run_repetition(const ExperimentConfig& config, const VectorProblem& problem,
                                std::size_t rep) {
  const std::uint64_t seed = substream_seed(config.seed, rep);
  const Distribution dist = make_distribution(config, problem.input_dim());
  Prepared prep = prepare(config, problem, seed);
  const Eigen::Index d = problem.input_dim();
  const OutputStats* stats = config.rmse_units == RmseUnits::kNormalized ? &prep.pipeline.stats : nullptr;

  Matrix eval_points = prep.samples.points;
  if (config.out_of_sample) {
    eval_points = draw_samples(dist, config.n, substream_seed(seed, kEvalStream)).points;
  }
  const Evaluation original = evaluate_outputs(problem, eval_points, dist.kind(), stats);

  RepetitionOutput out;
  out.rejected = prep.rejected;
  out.warnings = prep.pipeline.stats.warnings;
  for (Method method : config.methods) {
    RmseReport report{method, rep, config.n, {}};
    if (method == Method::kZahm) {
      const SymmetricMatrix h = assemble_h(prep.pipeline.jacobians);
      const SymmetricMatrix sigma = dist.covariance();
      for (Eigen::Index j = 1; j <= d; ++j) {
        const Matrix p = method_zahm(h, sigma, j).projector;
        const Evaluation rec =
            config.zahm_reconstruction == ZahmReconstruction::kCondExp
                ? reconstruct_condexp(problem, p, eval_points, dist, config.zahm_n_mc,
                                      substream_seed(seed, kZahmStream), stats)
                : reconstruct_with_projector(problem, p, eval_points, dist.kind(), stats);
        report.per_dimension.push_back(
            {j, rmse_sum(original.values, rec.values, merge_exclusions(original.excluded, rec.excluded))});
      }
      out.bases.push_back(zahm_basis(h, sigma));
    } else {
      SharedBasis basis = basis_for(method, prep.pipeline.jacobians, prep.spd, config);
      for (Eigen::Index j = 1; j <= d; ++j) {
        const Evaluation rec = reconstruct_projection(problem, basis.basis, j, eval_points, dist.kind(), stats);
        report.per_dimension.push_back(
            {j, rmse_sum(original.values, rec.values, merge_exclusions(original.excluded, rec.excluded))});
      }
      out.warnings.insert(out.warnings.end(), basis.warnings.begin(), basis.warnings.end());
      out.bases.push_back(std::move(basis));
    }
    out.reports.push_back(std::move(report));
  }
  return out;
}

json warnings_json(const Warnings& warnings) {
  json arr = json::array();
  for (const auto& w : warnings) arr.push_back({{"kind", std::string(to_string(w.kind))}, {"detail", w.detail}});
  return arr;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "problem", "dataset", "distribution", "covariance_file", "n", "repetitions", "seed",
      "normalize", "rmse_units", "methods", "zahm_n_mc", "zahm_reconstruction", "see_ascending",
      "out_of_sample", "fd_rel_step", "output_dir", "jobs", "reproducible"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  }

  ExperimentConfig c;
  if (doc.contains("problem") && !doc["problem"].is_null()) c.problem = get_as<std::string>(doc, "problem");
  if (doc.contains("dataset") && !doc["dataset"].is_null()) {
    c.dataset = resolve(base_dir, get_as<std::string>(doc, "dataset"));
  }
  if (c.problem.empty() == !c.dataset.has_value()) {
    throw ConfigError("config needs exactly one of 'problem' or 'dataset'");
  }
  if (doc.contains("distribution")) {
    try {
      c.distribution = distribution_from_string(get_as<std::string>(doc, "distribution"));
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("covariance_file") && !doc["covariance_file"].is_null()) {
    c.covariance_file = resolve(base_dir, get_as<std::string>(doc, "covariance_file"));
  }
  if (doc.contains("n")) {
    const auto n = get_as<long long>(doc, "n");
    if (n < 1) throw ConfigError("config 'n' must be at least 1");
    c.n = static_cast<Eigen::Index>(n);
  }
  if (doc.contains("repetitions")) {
    const auto r = get_as<long long>(doc, "repetitions");
    if (r < 1) throw ConfigError("config 'repetitions' must be at least 1");
    c.repetitions = static_cast<std::size_t>(r);
  }
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed");
  if (doc.contains("normalize")) c.normalize = get_as<bool>(doc, "normalize");
  if (doc.contains("rmse_units")) {
    const auto u = get_as<std::string>(doc, "rmse_units");
    if (u == "normalized") {
      c.rmse_units = RmseUnits::kNormalized;
    } else if (u == "original") {
      c.rmse_units = RmseUnits::kOriginal;
    } else {
      throw ConfigError("config 'rmse_units' must be 'normalized' or 'original'");
    }
  }
  if (doc.contains("methods")) {
    c.methods.clear();
    for (const auto& tag : get_as<std::vector<std::string>>(doc, "methods")) {
      const Method m = method_from_string(tag);
      if (std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end()) {
        throw ConfigError("config 'methods' lists '" + tag + "' twice");
      }
      c.methods.push_back(m);
    }
    if (c.methods.empty()) throw ConfigError("config 'methods' is empty");
  } else if (c.dataset) {
    // Without an evaluator the default set drops the sampling-based method.
    std::erase(c.methods, Method::kZahm);
  }
  if (doc.contains("zahm_n_mc")) {
    const auto n = get_as<long long>(doc, "zahm_n_mc");
    if (n < 1) throw ConfigError("config 'zahm_n_mc' must be at least 1");
    c.zahm_n_mc = static_cast<Eigen::Index>(n);
  }
  if (doc.contains("zahm_reconstruction")) {
    const auto z = get_as<std::string>(doc, "zahm_reconstruction");
    if (z == "condexp") {
      c.zahm_reconstruction = ZahmReconstruction::kCondExp;
    } else if (z == "projector") {
      c.zahm_reconstruction = ZahmReconstruction::kProjector;
    } else {
      throw ConfigError("config 'zahm_reconstruction' must be 'condexp' or 'projector'");
    }
  }
  if (doc.contains("see_ascending")) c.see_ascending = get_as<bool>(doc, "see_ascending");
  if (doc.contains("out_of_sample")) c.out_of_sample = get_as<bool>(doc, "out_of_sample");
  if (doc.contains("fd_rel_step")) {
    c.fd_rel_step = get_as<double>(doc, "fd_rel_step");
    if (c.fd_rel_step < 0.0) throw ConfigError("config 'fd_rel_step' must be positive (or 0 for default)");
  }
  if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, get_as<std::string>(doc, "output_dir"));
  if (doc.contains("jobs")) {
    const auto j = get_as<long long>(doc, "jobs");
    if (j < 1) throw ConfigError("config 'jobs' must be at least 1");
    c.jobs = static_cast<std::size_t>(j);
  }
  if (doc.contains("reproducible")) c.reproducible = get_as<bool>(doc, "reproducible");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  if (c.dataset) {
    doc["dataset"] = c.dataset->string();
  } else {
    doc["problem"] = c.problem;
  }
  doc["distribution"] = std::string(to_string(c.distribution));
  if (c.covariance_file) doc["covariance_file"] = c.covariance_file->string();
  doc["n"] = c.n;
  doc["repetitions"] = c.repetitions;
  doc["seed"] = c.seed;
  doc["normalize"] = c.normalize;
  doc["rmse_units"] = c.rmse_units == RmseUnits::kNormalized ? "normalized" : "original";
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  doc["methods"] = methods;
  doc["zahm_n_mc"] = c.zahm_n_mc;
  doc["zahm_reconstruction"] = c.zahm_reconstruction == ZahmReconstruction::kCondExp ? "condexp" : "projector";
  doc["see_ascending"] = c.see_ascending;
  doc["out_of_sample"] = c.out_of_sample;
  doc["fd_rel_step"] = c.fd_rel_step;
  doc["output_dir"] = c.output_dir.string();
  doc["jobs"] = c.jobs;
  doc["reproducible"] = c.reproducible;
  return doc.dump(2);
}

void validate_config(const ExperimentConfig& config, bool needs_evaluator) {
  if (needs_evaluator && !config.has_evaluator()) {
    throw ConfigError(
        "dataset problems carry no evaluator: reconstruction RMSE needs function evaluations at "
        "projected points; use 'dump-basis' for dataset configs");
  }
  if (!config.has_evaluator() &&
      std::find(config.methods.begin(), config.methods.end(), Method::kZahm) != config.methods.end()) {
    throw ConfigError("method 'zahm' requires an evaluator problem and a sampling distribution");
  }
  if (config.covariance_file && config.distribution != DistributionKind::kStandardNormal) {
    throw ConfigError("'covariance_file' is only valid with the normal distribution");
  }
}

std::unique_ptr<VectorProblem> resolve_problem(const ExperimentConfig& config) {
  if (!config.has_evaluator()) {
    throw ConfigError("config names a dataset, not an evaluator problem");
  }
  return make_problem(config.problem);
}

std::string ExperimentResult::rmse_csv() const {
  std::string out = rmse_csv_header();
  for (const auto& r : reports) out += format_rmse_rows(r);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const VectorProblem& problem) {
  validate_config(config, true);
  const KernelScope kernels(config.reproducible);

  std::vector<std::optional<RepetitionOutput>> slots(config.repetitions);
  std::vector<std::string> errors(config.repetitions);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t rep = next++; rep < config.repetitions; rep = next++) {
      try {
        slots[rep] = run_repetition(config, problem, rep);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        errors[rep] = e.what();
      }
    }
  };
  const std::size_t jobs = std::min(config.jobs, config.repetitions);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        try {
          worker();
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ExperimentResult result;
  result.dim = problem.input_dim();
  result.objectives = problem.output_dim();
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    if (!slots[rep]) {
      result.failures.push_back({rep, errors[rep]});
      continue;
    }
    RepetitionOutput& out = *slots[rep];
    for (auto& r : out.reports) result.reports.push_back(std::move(r));
    result.bases.push_back(std::move(out.bases));
    result.rejected_samples += out.rejected;
    result.warnings.insert(result.warnings.end(), out.warnings.begin(), out.warnings.end());
  }
  if (result.bases.empty()) {
    std::string msg = "every repetition failed";
    if (!result.failures.empty()) msg += "; first failure: " + result.failures.front().message;
    throw Error(msg);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config, true);
  const auto problem = resolve_problem(config);
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result = run_experiment(config, *problem);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(config.output_dir);
  write_file(config.output_dir / "rmse_report.csv", result.rmse_csv());
  std::size_t slot = 0;
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    const bool failed = std::any_of(result.failures.begin(), result.failures.end(),
                                    [&](const RepetitionFailure& f) { return f.repetition == rep; });
    if (failed) continue;
    for (const auto& basis : result.bases[slot]) {
      write_file(config.output_dir / ("basis_" + std::string(to_string(basis.method)) + "_rep" +
                                      std::to_string(rep) + ".csv"),
                 format_basis_csv(basis));
    }
    ++slot;
  }

  json manifest;
  manifest["config"] = json::parse(config_to_json(config));
  manifest["library_version"] = kLibraryVersion;
  manifest["wall_time_seconds"] = wall;
  manifest["kernels"] = std::string(config.reproducible ? simd::scalar_kernels().name : simd::active().name);
  manifest["repetitions_succeeded"] = result.bases.size();
  manifest["rejected_samples"] = result.rejected_samples;
  json failures = json::array();
  for (const auto& f : result.failures) failures.push_back({{"repetition", f.repetition}, {"error", f.message}});
  manifest["failures"] = failures;
  manifest["warnings"] = warnings_json(result.warnings);
  write_file(config.output_dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

SharedBasis compute_basis(const ExperimentConfig& config, Method method) {
  validate_config(config, false);
  const KernelScope kernels(config.reproducible);
  if (!config.has_evaluator()) {
    if (method == Method::kZahm) {
      throw ConfigError("method 'zahm' requires an evaluator problem and a sampling distribution");
    }
    const DatasetProblem data = load_dataset_problem(*config.dataset);
    JacobianSet js{data.gradients};
    js.validate();
    if (config.normalize) {
      const OutputStats stats = compute_output_stats(data.outputs);
      for (Eigen::Index k = 0; k < js.objectives(); ++k) js.gradients[static_cast<std::size_t>(k)] /= stats.std(k);
    }
    return basis_for(method, js, assemble_spd(js), config);
  }
  const auto problem = resolve_problem(config);
  const Prepared prep = prepare(config, *problem, substream_seed(config.seed, 0));
  if (method == Method::kZahm) {
    const Distribution dist = make_distribution(config, problem->input_dim());
    return zahm_basis(assemble_h(prep.pipeline.jacobians), dist.covariance());
  }
  return basis_for(method, prep.pipeline.jacobians, prep.spd, config);
}

std::string format_basis_csv(const SharedBasis& basis) {
  const Eigen::Index d = basis.basis.rows();
  std::string out = std::string(to_string(basis.method)) + "," + std::to_string(d) + ",ordering=descending\n";
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < basis.basis.cols(); ++j) {
      if (j) out += ',';
      out += format_double(basis.basis(i, j));
    }
    out += '\n';
  }
  return out;
}

SharedBasis parse_basis_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("basis CSV: empty");
  std::istringstream head(line);
  std::string tag;
  std::string dim;
  std::string ordering;
  std::getline(head, tag, ',');
  std::getline(head, dim, ',');
  std::getline(head, ordering);
  if (ordering != "ordering=descending") throw ParseError("basis CSV: unexpected header '" + line + "'");
  Method method;
  try {
    method = method_from_string(tag);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("basis CSV: ") + e.what());
  }
  const Eigen::Index d = std::stol(dim);
  Matrix w(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!std::getline(in, line)) throw ParseError("basis CSV: missing row " + std::to_string(i + 1));
    std::istringstream row(line);
    std::string cell;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!std::getline(row, cell, ',')) throw ParseError("basis CSV: short row " + std::to_string(i + 1));
      w(i, j) = std::stod(cell);
    }
  }
  return SharedBasis{method, w, Vector::Zero(d), std::nullopt, {}};
}

SummaryPlotTable run_summary_plot(const ExperimentConfig& config, Method method, Eigen::Index rank,
                                  const VectorProblem* problem) {
  validate_config(config, true);
  const KernelScope kernels(config.reproducible);
  std::unique_ptr<VectorProblem> owned;
  if (!problem) {
    owned = resolve_problem(config);
    problem = owned.get();
  }
  const std::uint64_t seed = substream_seed(config.seed, 0);
  const Distribution dist = make_distribution(config, problem->input_dim());
  const Prepared prep = prepare(config, *problem, seed);
  const OutputStats* stats = config.rmse_units == RmseUnits::kNormalized ? &prep.pipeline.stats : nullptr;
  if (method == Method::kZahm) {
    const SymmetricMatrix h = assemble_h(prep.pipeline.jacobians);
    const SharedBasis b = zahm_basis(h, dist.covariance());
    const Eigen::Index d = problem->input_dim();
    if (rank < 1 || rank > d) throw ValidationError("summary plot: rank out of range");
    SummaryPlotTable t;
    t.first_rank = rank;
    t.second_rank = std::min<Eigen::Index>(rank + 1, d);
    t.active_coordinate = prep.samples.points * b.basis.col(0);
    t.original = evaluate_outputs(*problem, prep.samples.points, dist.kind(), stats).values;
    auto rec = [&](Eigen::Index r) {
      const Matrix p = method_zahm(h, dist.covariance(), r).projector;
      return config.zahm_reconstruction == ZahmReconstruction::kCondExp
                 ? reconstruct_condexp(*problem, p, prep.samples.points, dist, config.zahm_n_mc,
                                       substream_seed(seed, kZahmStream), stats).values
                 : reconstruct_with_projector(*problem, p, prep.samples.points, dist.kind(), stats).values;
    };
    t.first = rec(t.first_rank);
    t.second = rec(t.second_rank);
    return t;
  }
  const SharedBasis b = basis_for(method, prep.pipeline.jacobians, prep.spd, config);
  return summary_plot_data(*problem, b.basis, prep.samples.points, dist.kind(), stats, rank);
}

double mean_rmse_sum(const ExperimentResult& result, Method method, Eigen::Index j) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& r : result.reports) {
    if (r.method != method) continue;
    for (const auto& row : r.per_dimension) {
      if (row.j == j) {
        total += row.rmse.sum;
        ++count;
      }
    }
  }
  if (count == 0) throw ValidationError("mean_rmse_sum: no rows for the requested method and rank");
  return total / static_cast<double>(count);
}

Vector mean_rmse(const ExperimentResult& result, Method method, Eigen::Index j) {
  Vector total;
  std::size_t count = 0;
  for (const auto& r : result.reports) {
    if (r.method != method) continue;
    for (const auto& row : r.per_dimension) {
      if (row.j != j) continue;
      total = count == 0 ? row.rmse.per_objective : Vector(total + row.rmse.per_objective);
      ++count;
    }
  }
  if (count == 0) throw ValidationError("mean_rmse: no rows for the requested method and rank");
  return total / static_cast<double>(count);
}

NormalizationComparison compare_normalization(const ExperimentConfig& config, const VectorProblem* problem) {
  validate_config(config, true);
  std::unique_ptr<VectorProblem> owned;
  if (!problem) {
    owned = resolve_problem(config);
    problem = owned.get();
  }
  ExperimentConfig normalized = config;
  normalized.normalize = true;
  ExperimentConfig original = config;
  original.normalize = false;
  const ExperimentResult a = run_experiment(normalized, *problem);
  const ExperimentResult b = run_experiment(original, *problem);

  NormalizationComparison out;
  out.repetitions = config.repetitions;
  out.warnings = a.warnings;
  out.warnings.insert(out.warnings.end(), b.warnings.begin(), b.warnings.end());
  for (Method m : config.methods) {
    for (Eigen::Index j = 1; j <= problem->input_dim(); ++j) {
      out.rows.push_back({m, j, mean_rmse_sum(a, m, j), mean_rmse_sum(b, m, j)});
    }
  }
  return out;
}

std::string NormalizationComparison::csv() const {
  std::string out = "method,j,normalized,original,repetitions,single_repetition\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.method)) + "," + std::to_string(r.j) + "," +
           format_double(r.normalized_mean_sum) + "," + format_double(r.original_mean_sum) + "," +
           std::to_string(repetitions) + "," + (repetitions == 1 ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace sharedas
