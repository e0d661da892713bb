// Command-line entry point: synth, fit, infer, features, eval, study.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "npglm/error.hpp"
#include "npglm/evaluation.hpp"
#include "npglm/hetnet.hpp"
#include "npglm/io.hpp"
#include "npglm/random.hpp"

namespace {

using namespace npglm;
namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitParse = 3,
  kExitConvergence = 4,
  kExitWindow = 5,
};

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation:
    case ErrorCode::kInvalidRange:
    case ErrorCode::kFoldTooSmall:
    case ErrorCode::kInsufficientObserved:
    case ErrorCode::kInsufficientNegatives:
    case ErrorCode::kNoObservedEvents:
    case ErrorCode::kSchemaMismatch:
      return kExitValidation;
    case ErrorCode::kParse:
      return kExitParse;
    case ErrorCode::kNonConvergence:
      return kExitConvergence;
    case ErrorCode::kQueryBeyondWindow:
    case ErrorCode::kTargetBeyondWindow:
    case ErrorCode::kQuantileBeyondWindow:
      return kExitWindow;
    default:
      return kExitFailure;
  }
}

fs::path WithSuffix(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out += suffix;
  return out;
}

Eigen::VectorXd ParseVector(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    if (field.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(field, &used));
      if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(field);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kValidation, "'" + field + "' in --x is not a number");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct CommonFitFlags {
  int max_iterations = 500;
  double w_tolerance = 1e-6;
  double gradient_tolerance = 1e-8;
  double l2 = 0.0;
  std::string init = "zeros";

  void Register(CLI::App* cmd) {
    cmd->add_option("--max-iter", max_iterations, "Maximum outer iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", w_tolerance, "Sup-norm change of w that ends the outer loop")->check(CLI::PositiveNumber);
    cmd->add_option("--grad-tol", gradient_tolerance, "Inner gradient tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--l2", l2, "L2 penalty on the feature coefficients")->check(CLI::NonNegativeNumber);
    cmd->add_option("--init", init, "Initial w: zeros or random")->check(CLI::IsMember({"zeros", "random"}));
  }

  FitOptions ToOptions(std::optional<std::uint64_t> seed) const {
    FitOptions options;
    options.max_outer_iterations = max_iterations;
    options.w_tolerance = w_tolerance;
    options.inner.gradient_tolerance = gradient_tolerance;
    options.l2_penalty = l2;
    if (init == "random") {
      Require(seed.has_value(), "--init random needs --seed");
      options.init = InitKind::kSeededRandom;
      options.seed = DeriveSeed(*seed, "init");
    }
    return options;
  }
};

struct SynthArgs {
  std::string kind = "dataset";
  std::string dist = "rayleigh";
  long long n_obs = 0;
  long long n_cens = 0;
  long long dim = 10;
  std::uint64_t seed = 0;
  fs::path out;
  HetNetSynthConfig graph;
};

int RunSynth(const SynthArgs& args) {
  if (args.kind == "graph") {
    HetNetSynthConfig config = args.graph;
    config.seed = DeriveSeed(args.seed, "graph");
    const HetNet net = GenerateHetNet(config);
    io::WriteFileAtomic(WithSuffix(args.out, ".schema.json"), io::SchemaToJson(net.schema()).dump(2) + "\n");
    io::WriteFileAtomic(WithSuffix(args.out, ".edges.csv"), io::FormatEdges(net));
    std::string paths;
    for (const std::string& p : WeiboMetaPaths()) paths += p + "\n";
    io::WriteFileAtomic(WithSuffix(args.out, ".paths.txt"), paths);
    std::cout << "wrote graph with " << net.node_count() << " nodes and " << net.edges().size() << " edges\n";
    return kExitOk;
  }
  Require(args.n_obs >= 1, "--n-obs must be at least 1");
  Require(args.n_cens >= 0, "--n-cens must be non-negative");
  Require(args.dim >= 1, "--dim must be at least 1");
  SynthConfig config;
  config.distribution = ParseDistribution(args.dist);
  config.dim = args.dim;
  config.n_observed = static_cast<std::size_t>(args.n_obs);
  config.n_censored = static_cast<std::size_t>(args.n_cens);
  config.seed = DeriveSeed(args.seed, "synth");
  const SyntheticData data = Generate(config);
  io::WriteFileAtomic(args.out, io::FormatDataset(data.dataset));
  io::WriteFileAtomic(WithSuffix(args.out, ".truth.json"), io::GroundTruthToJson(config, data).dump(2) + "\n");
  return kExitOk;
}

struct FitArgs {
  std::string model = "npglm";
  fs::path input;
  fs::path out;
  fs::path log;
  bool standardize = false;
  std::optional<std::uint64_t> seed;
  CommonFitFlags fit;
};

void WriteModelFiles(const FitArgs& args, const AnyModel& model) {
  io::WriteFileAtomic(args.out, io::ModelToJson(model).dump(2) + "\n");
  std::string log = "iteration\tavg_log_likelihood\tw_change\n";
  if (const auto* np = std::get_if<NpglmModel>(&model)) {
    for (std::size_t i = 0; i < np->report.log_likelihood.size(); ++i) {
      log += std::to_string(i + 1) + "\t" + io::FormatDouble(np->report.log_likelihood[i]) + "\t" +
             io::FormatDouble(np->report.w_change[i]) + "\n";
    }
  } else {
    const auto& p = std::get<ParametricModel>(model);
    log += std::to_string(p.iterations) + "\t" + io::FormatDouble(p.log_likelihood) + "\t0\n";
  }
  io::WriteFileAtomic(args.log.empty() ? WithSuffix(args.out, ".log.tsv") : args.log, log);
}

int RunFit(const FitArgs& args) {
  const ModelConfig base = ParseModelConfig(args.model);
  Dataset dataset = io::ReadDataset(args.input);
  Standardizer normalization;
  if (args.standardize) {
    normalization = Standardizer::Fit(dataset);
    dataset = normalization.Apply(dataset);
  }
  ModelConfig config = base;
  config.npglm = args.fit.ToOptions(args.seed);
  config.parametric.l2_penalty = args.fit.l2;
  config.parametric.inner.gradient_tolerance = args.fit.gradient_tolerance;

  if (config.tag == "npglm") {
    try {
      NpglmModel model = Fit(dataset, config.npglm);
      model.normalization = normalization;
      WriteModelFiles(args, model);
    } catch (const NonConvergenceError& e) {
      NpglmModel partial = e.partial();
      partial.normalization = normalization;
      WriteModelFiles(args, partial);
      throw;
    }
  } else {
    AnyModel model = FitModel(config, dataset);
    SetNormalization(model, normalization);
    WriteModelFiles(args, model);
  }
  return kExitOk;
}

struct InferArgs {
  fs::path model;
  std::string query = "quantile";
  double alpha = 0.5;
  double t_alpha = 0.0;
  double t_beta = 0.0;
  std::string x;
};

int RunInfer(const InferArgs& args) {
  const AnyModel model = io::ReadModel(args.model);
  const Eigen::VectorXd x = ParseVector(args.x);
  const double answer = args.query == "quantile" ? Quantile(model, x, args.alpha)
                                                 : RangedProbability(model, x, args.t_alpha, args.t_beta);
  std::cout << io::FormatDouble(answer) << "\n";
  return kExitOk;
}

struct FeatureArgs {
  fs::path schema;
  fs::path edges;
  fs::path paths;
  long long t0 = 0;
  long long te = 0;
  std::string relation = "follow";
  long long negatives = -1;
  std::uint64_t seed = 0;
  fs::path out;
};

int RunFeatures(const FeatureArgs& args) {
  const HetSchema schema = io::SchemaFromJson(nlohmann::json::parse(io::ReadFile(args.schema)));
  HetNet net(schema);
  io::ParseEdges(io::ReadFile(args.edges), net, args.edges.string());
  const std::vector<MetaPath> paths = io::ParseMetaPaths(io::ReadFile(args.paths), schema);
  Require(!paths.empty(), "meta-path file lists no paths");
  const SnapshotWindow window{args.t0, args.te};
  Require(window.t0 < window.te, "--t0 must be before --te");

  // Count links formed inside the window first: negatives default to that many.
  const std::vector<LabeledPair> observed_only = LabelSamples(net, window, args.relation, 0, 0);
  if (observed_only.empty()) {
    throw Error(ErrorCode::kInsufficientObserved, "no " + args.relation + " links form inside the window");
  }
  const std::size_t negatives =
      args.negatives >= 0 ? static_cast<std::size_t>(args.negatives) : observed_only.size();
  const auto pairs = LabelSamples(net, window, args.relation, negatives, DeriveSeed(args.seed, "negatives"));

  const FeatureMatrix features = BuildFeatureMatrix(net, window, pairs, paths);
  for (const std::string& dropped : features.dropped_paths) {
    std::cerr << "warning: meta-path " << dropped << " has zero variance and was dropped\n";
  }
  io::WriteFileAtomic(args.out, io::FormatDataset(features.dataset));
  nlohmann::json kept = nlohmann::json::array();
  for (Eigen::Index j : features.normalization.kept()) kept.push_back(paths[static_cast<std::size_t>(j)].text);
  nlohmann::json sidecar = {
      {"meta_paths", kept},
      {"dropped", features.dropped_paths},
      {"mean", std::vector<double>(features.normalization.mean().begin(), features.normalization.mean().end())},
      {"scale", std::vector<double>(features.normalization.scale().begin(), features.normalization.scale().end())},
      {"observed", observed_only.size()},
      {"censored", pairs.size() - observed_only.size()},
      {"window", {args.t0, args.te}}};
  io::WriteFileAtomic(WithSuffix(args.out, ".features.json"), sidecar.dump(2) + "\n");
  return kExitOk;
}

struct EvalArgs {
  fs::path input;
  int folds = 10;
  std::vector<std::string> models{"npglm", "exp", "ray", "pow", "gom"};
  std::uint64_t seed = 0;
  bool standardize = false;
  int jobs = 1;
  fs::path out;
  CommonFitFlags fit;
};

int RunEval(const EvalArgs& args) {
  Require(args.folds >= 2, "--folds must be at least 2");
  const Dataset dataset = io::ReadDataset(args.input);
  std::vector<ModelConfig> configs;
  for (const std::string& tag : args.models) {
    ModelConfig config = ParseModelConfig(tag);
    config.npglm = args.fit.ToOptions(args.seed);
    config.parametric.l2_penalty = args.fit.l2;
    configs.push_back(std::move(config));
  }
  KfoldOptions options;
  options.standardize = args.standardize;
  options.jobs = args.jobs;
  const EvalReport report = KfoldEvaluate(dataset, configs, args.folds, DeriveSeed(args.seed, "folds"), options);
  const std::string table = io::FormatReportTable(report);
  if (args.out.empty()) {
    std::cout << table;
  } else {
    io::WriteFileAtomic(WithSuffix(args.out, ".tsv"), table);
    io::WriteFileAtomic(WithSuffix(args.out, ".json"), io::ReportToJson(report).dump(2) + "\n");
  }
  return kExitOk;
}

struct StudyArgs {
  std::string kind;
  std::string dist = "rayleigh";
  std::vector<std::size_t> n{1000};
  std::vector<double> censoring{0.5};
  std::vector<std::size_t> n_obs{200};
  std::vector<std::size_t> n_cens{0, 40, 80, 120, 160, 200};
  int reps = 20;
  long long dim = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
  fs::path out;
  CommonFitFlags fit;
};

int RunStudyCommand(const StudyArgs& args) {
  Require(args.dim >= 1, "--dim must be at least 1");
  StudyConfig config;
  config.distribution = ParseDistribution(args.dist);
  config.dim = args.dim;
  config.n_values = args.n;
  config.censoring_ratios = args.censoring;
  config.observed_counts = args.n_obs;
  config.censored_counts = args.n_cens;
  config.repetitions = args.reps;
  config.seed = DeriveSeed(args.seed, "study");
  config.fit = args.fit.ToOptions(args.seed);
  config.jobs = args.jobs;
  const std::string table = io::FormatTable(RunStudy(ParseStudyKind(args.kind), config));
  if (args.out.empty()) {
    std::cout << table;
  } else {
    io::WriteFileAtomic(args.out, table);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NP-GLM: non-parametric proportional-hazards models for censored event times"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a censored synthetic dataset (or a typed graph)");
  synth_cmd->add_option("--kind", synth.kind, "dataset or graph")->check(CLI::IsMember({"dataset", "graph"}));
  synth_cmd->add_option("--dist", synth.dist, "rayleigh, gompertz or exponential");
  synth_cmd->add_option("--n-obs", synth.n_obs, "Observed samples");
  synth_cmd->add_option("--n-cens", synth.n_cens, "Censored samples");
  synth_cmd->add_option("--dim", synth.dim, "Feature dimension");
  synth_cmd->add_option("--users", synth.graph.users, "Graph users (--kind graph)");
  synth_cmd->add_option("--posts", synth.graph.posts, "Graph posts (--kind graph)");
  synth_cmd->add_option("--window", synth.graph.window, "Window length after t0 = 0 (--kind graph)");
  synth_cmd->add_option("--seed", synth.seed, "Master seed")->required();
  synth_cmd->add_option("--out", synth.out, "Output path (prefix for --kind graph)")->required();

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit NP-GLM or a parametric baseline");
  fit_cmd->add_option("--model", fit.model, "npglm, exp, ray, pow or gom");
  fit_cmd->add_option("--input", fit.input, "Dataset file")->required();
  fit_cmd->add_option("--out", fit.out, "Model file")->required();
  fit_cmd->add_option("--log", fit.log, "Convergence log (default <out>.log.tsv)");
  fit_cmd->add_flag("--standardize", fit.standardize, "Z-score features and store the normalization");
  fit_cmd->add_option("--seed", fit.seed, "Seed for --init random");
  fit.fit.Register(fit_cmd);

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Answer a quantile or ranged-probability query");
  infer_cmd->add_option("--model", infer.model, "Model file")->required();
  infer_cmd->add_option("--query", infer.query, "quantile or ranged")->check(CLI::IsMember({"quantile", "ranged"}));
  infer_cmd->add_option("--alpha", infer.alpha, "Quantile level in [0, 1)");
  infer_cmd->add_option("--t-alpha", infer.t_alpha, "Range start");
  infer_cmd->add_option("--t-beta", infer.t_beta, "Range end");
  infer_cmd->add_option("--x", infer.x, "Raw feature vector, comma separated");

  FeatureArgs features;
  auto* features_cmd = app.add_subcommand("features", "Label window samples and extract meta-path features");
  features_cmd->add_option("--schema", features.schema, "Schema document")->required();
  features_cmd->add_option("--edges", features.edges, "Edge list")->required();
  features_cmd->add_option("--paths", features.paths, "Meta-path file")->required();
  features_cmd->add_option("--t0", features.t0, "Snapshot time")->required();
  features_cmd->add_option("--te", features.te, "Window end")->required();
  features_cmd->add_option("--relation", features.relation, "Target relation label");
  features_cmd->add_option("--negatives", features.negatives, "Censored pairs to sample (default: as many as observed)");
  features_cmd->add_option("--seed", features.seed, "Master seed")->required();
  features_cmd->add_option("--out", features.out, "Dataset file")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "k-fold comparison of NP-GLM and baselines");
  eval_cmd->add_option("--input", eval.input, "Dataset file")->required();
  eval_cmd->add_option("--folds", eval.folds, "Fold count (>= 2)");
  eval_cmd->add_option("--models", eval.models, "Comma-separated models")->delimiter(',');
  eval_cmd->add_option("--seed", eval.seed, "Master seed")->required();
  eval_cmd->add_flag("--standardize", eval.standardize, "Refit z-scoring on every training split");
  eval_cmd->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", eval.out, "Report prefix (<out>.tsv, <out>.json); stdout if omitted");
  eval.fit.Register(eval_cmd);

  StudyArgs study;
  auto* study_cmd = app.add_subcommand("study", "Synthetic studies: convergence, mae-vs-n, censoring-ratio, censored-count");
  study_cmd->add_option("kind", study.kind, "Study name")
      ->required()
      ->check(CLI::IsMember({"convergence", "mae-vs-n", "censoring-ratio", "censored-count"}));
  study_cmd->add_option("--dist", study.dist, "rayleigh, gompertz or exponential");
  study_cmd->add_option("--n", study.n, "Total sample counts")->delimiter(',');
  study_cmd->add_option("--censoring", study.censoring, "Censoring ratios")->delimiter(',');
  study_cmd->add_option("--n-obs", study.n_obs, "Observed counts (censored-count)")->delimiter(',');
  study_cmd->add_option("--n-cens", study.n_cens, "Censored counts (censored-count)")->delimiter(',');
  study_cmd->add_option("--reps", study.reps, "Repetitions per cell")->check(CLI::PositiveNumber);
  study_cmd->add_option("--dim", study.dim, "Feature dimension");
  study_cmd->add_option("--seed", study.seed, "Master seed")->required();
  study_cmd->add_option("--jobs", study.jobs, "Worker threads")->check(CLI::PositiveNumber);
  study_cmd->add_option("--out", study.out, "Output table; stdout if omitted");
  study.fit.Register(study_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*synth_cmd) return RunSynth(synth);
    if (*fit_cmd) return RunFit(fit);
    if (*infer_cmd) return RunInfer(infer);
    if (*features_cmd) return RunFeatures(features);
    if (*eval_cmd) return RunEval(eval);
    if (*study_cmd) return RunStudyCommand(study);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
