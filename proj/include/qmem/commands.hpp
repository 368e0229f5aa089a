#pragma once

// Batch commands behind the command-line front end. Each command returns its
// results and, when an output directory is given, writes its files there.

#include <qmem/baselines.hpp>
#include <qmem/error.hpp>
#include <qmem/hyperopt.hpp>
#include <qmem/io.hpp>
#include <qmem/readout.hpp>
#include <qmem/report.hpp>
#include <qmem/reservoir.hpp>
#include <qmem/stats.hpp>
#include <qmem/tasks.hpp>
#include <qmem/tomography.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#ifndef QMEM_DEFAULT_DATA_DIR
#define QMEM_DEFAULT_DATA_DIR "."
#endif

namespace qmem {

// Usage errors: unknown task, malformed flag value.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace fs = std::filesystem;

// ---------------------------------------------------------------- parsing

// "ema:<m_d>", "ma:<m>[,<a>,<b>]", "frozen:<R>".
inline FeedbackRule parse_feedback(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("feedback must look like ema:M, ma:M,A,B or frozen:R");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + tok + "' in feedback spec " + spec);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  FeedbackRule rule;
  if (kind == "ema" && vals.size() == 1) {
    rule = ExpMovingAverage{vals[0]};
  } else if (kind == "ma" && (vals.size() == 1 || vals.size() == 3)) {
    if (vals[0] < 1.0 || vals[0] != std::floor(vals[0])) throw UsageError("moving-average window must be an integer >= 1");
    MovingAverage ma{static_cast<std::size_t>(vals[0])};
    if (vals.size() == 3) {
      ma.gain = vals[1];
      ma.offset = vals[2];
    }
    rule = ma;
  } else if (kind == "frozen" && vals.size() == 1) {
    rule = Frozen{vals[0]};
  } else {
    throw UsageError("unrecognised feedback spec " + spec);
  }
  try {
    validate(rule);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return rule;
}

// ---------------------------------------------------------------- tasks

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"narma", "mackey-glass", "santa-fe", "monomial"};
  return names;
}

inline void require_task(const std::string& task) {
  for (const auto& t : task_names()) {
    if (t == task) return;
  }
  throw UsageError("unknown task '" + task + "' (expected narma, mackey-glass, santa-fe or monomial)");
}

// Default device per task. The time-series tasks route the bar output of
// the memristor to the update mode.
inline ReservoirConfig task_preset(const std::string& task) {
  require_task(task);
  ReservoirConfig c;
  if (task == "narma") {
    c.scheme = EncodingScheme::AmplitudeDirect;
    c.rule = ExpMovingAverage{4.0};
    c.convention = ReflectivityConvention::Bar;
  } else if (task == "mackey-glass") {
    c.scheme = EncodingScheme::SqrtFlipped;
    c.rule = ExpMovingAverage{2.0};
    c.convention = ReflectivityConvention::Bar;
  } else if (task == "santa-fe") {
    c.scheme = EncodingScheme::SqrtFlipped;
    c.rule = ExpMovingAverage{6.0};
    c.convention = ReflectivityConvention::Bar;
  } else {
    c.scheme = EncodingScheme::SqrtDirect;
    c.rule = MovingAverage{1, 1.0, 0.0, false};
    c.convention = ReflectivityConvention::Cross;
  }
  return c;
}

inline fs::path default_santa_fe_path() {
  if (const char* dir = std::getenv("QMEM_DATA_DIR"); dir != nullptr && *dir != '\0') {
    return fs::path(dir) / "santafe_a.txt";
  }
  return fs::path(QMEM_DEFAULT_DATA_DIR) / "santafe_a.txt";
}

struct TaskOptions {
  std::size_t length = 1000;  // input/target pairs
  std::uint64_t seed = 0;
  int n_exp = 4;                       // monomial
  std::size_t grid_points = 101;       // monomial
  double train_cutoff = 0.9;           // monomial
  std::size_t offset = 0;              // santa-fe
  std::optional<fs::path> data_path;   // santa-fe
  MackeyGlassParams mg{};
  std::size_t mg_discard = 0;
};

inline Dataset make_dataset(const std::string& task, const TaskOptions& o) {
  require_task(task);
  if (task == "narma") return narma(o.length, o.seed);
  if (task == "mackey-glass") return mackey_glass(o.length, o.mg, o.mg_discard);
  if (task == "santa-fe") return santa_fe_load(o.data_path.value_or(default_santa_fe_path()), o.offset, o.length + 1);
  return monomial(o.n_exp, uniform_grid(o.grid_points), o.train_cutoff);
}

inline json task_extras(const std::string& task, const TaskOptions& o) {
  json j = json::object();
  j["length"] = o.length;
  if (task == "mackey-glass") {
    j["mackey_glass"] = {{"beta", o.mg.beta}, {"gamma", o.mg.gamma}, {"n", o.mg.n},
                         {"tau", o.mg.tau},   {"dt", o.mg.dt},       {"x0", o.mg.x0},
                         {"sample_stride", o.mg.sample_stride},     {"discard_samples", o.mg_discard}};
  } else if (task == "santa-fe") {
    j["santa_fe"] = {{"offset", o.offset}};
  } else if (task == "monomial") {
    j["monomial"] = {{"n", o.n_exp}, {"grid_points", o.grid_points}, {"train_cutoff", o.train_cutoff},
                     {"grid_order", "ascending"}};
  }
  return j;
}

// ---------------------------------------------------------------- run

struct RunOptions {
  std::string task = "narma";
  std::optional<FeedbackRule> feedback;      // task default when absent
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
  TaskOptions data{};
  std::optional<HyperParams> hyperparams;    // monomial: optimized device
  std::optional<fs::path> out_dir;
};

struct RunOutput {
  RunReport report;
  Dataset dataset;
  FeatureMatrix features;
  std::vector<double> predictions;
};

inline std::string predictions_csv(std::span<const double> y, std::span<const double> y_hat) {
  std::string out = "t,y_true,y_pred\n";
  for (std::size_t t = 0; t < y.size(); ++t) {
    out += std::to_string(t) + "," + format_double(y[t]) + "," + format_double(y_hat[t]) + "\n";
  }
  return out;
}

inline ReservoirConfig run_config(const RunOptions& o) {
  ReservoirConfig cfg = task_preset(o.task);
  if (o.hyperparams) {
    if (o.task != "monomial") throw UsageError("hyperparameter files apply to the monomial task only");
    const auto* ma = o.feedback ? std::get_if<MovingAverage>(&*o.feedback) : nullptr;
    const bool frozen = o.feedback && std::holds_alternative<Frozen>(*o.feedback);
    cfg = monomial_config(*o.hyperparams, frozen ? FeedbackMode::Frozen : FeedbackMode::MovingAverage,
                          ma ? ma->window : 1);
  } else if (o.feedback) {
    cfg.rule = *o.feedback;
  }
  if (const auto* fr = std::get_if<Frozen>(&cfg.rule)) cfg.r0 = fr->r;
  cfg.shots = o.shots;
  cfg.seed = o.seed;
  return cfg;
}

inline RunOutput cmd_run(const RunOptions& o) {
  require_task(o.task);
  TaskOptions data = o.data;
  data.seed = o.seed;
  RunOutput out;
  out.dataset = make_dataset(o.task, data);
  const ReservoirConfig cfg = run_config(o);
  out.features = run(out.dataset.inputs, cfg);
  const FitResult fr = fit(out.features, out.dataset.targets, out.dataset.split);
  out.predictions = fr.predictions;

  RunReport& r = out.report;
  r.task = o.task;
  r.config = cfg;
  r.split = out.dataset.split;
  r.seed = o.seed;
  r.mse_train = fr.mse_train;
  r.mse_test = fr.mse_test;
  r.clamp_events = out.features.clamp_events;
  r.model = fr.model;
  r.extras = task_extras(o.task, data);
  if (o.out_dir) {
    r.artifact_paths = {"report.json", "features.csv", "predictions.csv"};
    write_file_atomic(*o.out_dir / "features.csv", features_csv(out.features));
    write_file_atomic(*o.out_dir / "predictions.csv", predictions_csv(out.dataset.targets, out.predictions));
    write_report(*o.out_dir / "report.json", r);
  }
  return out;
}

// Test MSE of the task preset on one dataset with the given rule.
inline double task_test_mse(const Dataset& ds, ReservoirConfig cfg, const FeedbackRule& rule) {
  cfg.rule = rule;
  if (const auto* fr = std::get_if<Frozen>(&rule)) cfg.r0 = fr->r;
  return fit(run(ds.inputs, cfg), ds.targets, ds.split).mse_test;
}

// ---------------------------------------------------------------- sweep

enum class SweepRule { Ema, MovingAverage };

struct SweepOptions {
  std::string task = "narma";
  std::vector<double> m_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  std::size_t runs = 50;
  std::uint64_t base_seed = 0;
  SweepRule rule = SweepRule::Ema;
  TaskOptions data{};
  std::optional<fs::path> out_dir;
};

struct SweepRow {
  std::string label;  // m value, or "NM" for the frozen reference
  double m = 0.0;
  std::vector<double> mses;
  double mean = 0.0;
  std::optional<double> std;
  double p10 = 0.0, p50 = 0.0, p90 = 0.0;
};

struct SweepOutput {
  std::vector<SweepRow> rows;  // one per m, then "NM"
  std::string csv;
};

inline SweepRow summarize(std::string label, double m, std::vector<double> mses) {
  SweepRow r;
  r.label = std::move(label);
  r.m = m;
  r.mean = stats::mean(mses);
  if (mses.size() >= 2) r.std = stats::stddev(mses);
  r.p10 = stats::percentile(mses, 0.1);
  r.p50 = stats::percentile(mses, 0.5);
  r.p90 = stats::percentile(mses, 0.9);
  r.mses = std::move(mses);
  return r;
}

inline std::string label_of(double m) {
  if (m == std::floor(m) && std::abs(m) < 1e15) return std::to_string(static_cast<long long>(m));
  return format_double(m);
}

inline SweepOutput cmd_sweep_memory(const SweepOptions& o) {
  require_task(o.task);
  if (o.m_values.empty()) throw UsageError("sweep needs at least one m value");
  if (o.runs < 1) throw UsageError("sweep needs at least one run");
  for (double m : o.m_values) {
    if (!(m >= 1.0)) throw UsageError("memory values must be >= 1");
    if (o.rule == SweepRule::MovingAverage && m != std::floor(m)) throw UsageError("moving-average windows must be integers");
  }
  const ReservoirConfig base = task_preset(o.task);
  const std::size_t nm = o.m_values.size();
  std::vector<std::vector<double>> mses(nm + 1, std::vector<double>(o.runs));
  parallel_for(o.runs, [&](std::size_t s) {
    TaskOptions d = o.data;
    d.seed = o.base_seed + s;
    const Dataset ds = make_dataset(o.task, d);
    for (std::size_t i = 0; i < nm; ++i) {
      const FeedbackRule rule = o.rule == SweepRule::Ema
                                    ? FeedbackRule{ExpMovingAverage{o.m_values[i]}}
                                    : FeedbackRule{MovingAverage{static_cast<std::size_t>(o.m_values[i])}};
      mses[i][s] = task_test_mse(ds, base, rule);
    }
    mses[nm][s] = task_test_mse(ds, base, Frozen{base.r0});
  });
  SweepOutput out;
  for (std::size_t i = 0; i < nm; ++i) out.rows.push_back(summarize(label_of(o.m_values[i]), o.m_values[i], mses[i]));
  out.rows.push_back(summarize("NM", 0.0, mses[nm]));

  out.csv = "m,mean_mse,std_mse,p10_mse,p50_mse,p90_mse,runs\n";
  for (const auto& r : out.rows) {
    out.csv += r.label + "," + format_double(r.mean) + "," + (r.std ? format_double(*r.std) : std::string()) + "," +
               format_double(r.p10) + "," + format_double(r.p50) + "," + format_double(r.p90) + "," +
               std::to_string(r.mses.size()) + "\n";
  }
  if (o.out_dir) write_file_atomic(*o.out_dir / "sweep.csv", out.csv);
  return out;
}

// ---------------------------------------------------------------- baselines / comparison table

struct BaselineOptions {
  std::string task = "narma";
  std::size_t runs = 100;
  std::uint64_t base_seed = 0;
  Predictor predictor = Predictor::Input;
  TaskOptions data{};
  std::optional<fs::path> out_dir;
};

struct TableOutput {
  std::vector<BaselineRow> rows;
  std::string csv;
  std::string table;
};

inline std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t runs) {
  std::vector<std::uint64_t> s(runs);
  for (std::size_t i = 0; i < runs; ++i) s[i] = base + i;
  return s;
}

inline DatasetGenerator task_generator(const std::string& task, const TaskOptions& data) {
  return [task, data](std::uint64_t seed) {
    TaskOptions d = data;
    d.seed = seed;
    return make_dataset(task, d);
  };
}

inline TableOutput cmd_baselines(const BaselineOptions& o) {
  require_task(o.task);
  if (o.runs < 2) throw UsageError("baselines need at least two runs");
  TableOutput out;
  const auto seeds = seed_range(o.base_seed, o.runs);
  out.rows = baseline_suite(task_generator(o.task, o.data), seeds, o.predictor);
  out.csv = baseline_csv(out.rows);
  out.table = format_table(out.rows);
  if (o.out_dir) {
    write_file_atomic(*o.out_dir / "baselines.csv", out.csv);
    write_file_atomic(*o.out_dir / "baselines.txt", out.table);
  }
  return out;
}

// Quantum-memristor row over the same seeds with the task preset.
inline BaselineRow qmem_row(const std::string& task, const TaskOptions& data, std::span<const std::uint64_t> seeds,
                            const std::optional<FeedbackRule>& rule = std::nullopt) {
  const ReservoirConfig cfg = task_preset(task);
  const auto gen = task_generator(task, data);
  std::vector<double> mses(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { mses[i] = task_test_mse(gen(seeds[i]), cfg, rule.value_or(cfg.rule)); });
  return {"QMEM", stats::mean(mses), stats::stddev(mses), seeds.size(), mses};
}

inline TableOutput cmd_table1(std::size_t runs = 100, std::uint64_t base_seed = 0,
                              const std::optional<fs::path>& out_dir = std::nullopt,
                              Predictor predictor = Predictor::Input) {
  if (runs < 2) throw UsageError("table1 needs at least two runs");
  BaselineOptions bo;
  bo.runs = runs;
  bo.base_seed = base_seed;
  bo.predictor = predictor;
  TableOutput out = cmd_baselines(bo);
  const auto seeds = seed_range(base_seed, runs);
  out.rows.push_back(qmem_row("narma", bo.data, seeds));
  out.csv = baseline_csv(out.rows);
  out.table = format_table(out.rows);
  if (out_dir) {
    write_file_atomic(*out_dir / "table1.csv", out.csv);
    write_file_atomic(*out_dir / "table1.txt", out.table);
  }
  return out;
}

// ---------------------------------------------------------------- lag plot

struct LagOptions {
  std::string task = "narma";
  std::optional<std::size_t> tau;  // 10 for mackey-glass, 1 otherwise
  std::uint64_t seed = 0;
  TaskOptions data{};
  std::optional<fs::path> out_dir;
};

struct LagOutput {
  std::size_t tau = 1;
  std::vector<double> truth, memristor, frozen;  // test-slice series
  double corr_truth = 0.0;
  std::string csv;
};

inline std::size_t default_lag(const std::string& task) { return task == "mackey-glass" ? 10 : 1; }

inline std::string lag_csv(std::size_t tau, std::span<const double> a, std::span<const double> b,
                           std::span<const double> c) {
  std::string out = "truth_x,truth_x_lag,memristor_x,memristor_x_lag,frozen_x,frozen_x_lag\n";
  for (std::size_t t = 0; t + tau < a.size(); ++t) {
    out += format_double(a[t]) + "," + format_double(a[t + tau]) + "," + format_double(b[t]) + "," +
           format_double(b[t + tau]) + "," + format_double(c[t]) + "," + format_double(c[t + tau]) + "\n";
  }
  return out;
}

inline LagOutput cmd_lagplot(const LagOptions& o) {
  require_task(o.task);
  LagOutput out;
  out.tau = o.tau.value_or(default_lag(o.task));
  if (out.tau < 1) throw UsageError("tau must be >= 1");
  TaskOptions d = o.data;
  d.seed = o.seed;
  const Dataset ds = make_dataset(o.task, d);
  ReservoirConfig cfg = task_preset(o.task);
  cfg.seed = o.seed;
  ReservoirConfig frozen = cfg;
  frozen.rule = Frozen{cfg.r0};
  const auto pair = run_pair(ds.inputs, cfg, frozen);
  const auto fm = fit(pair.feedback, ds.targets, ds.split);
  const auto ff = fit(pair.frozen, ds.targets, ds.split);
  const std::size_t start = ds.split.washout + ds.split.train;
  out.truth.assign(ds.targets.begin() + static_cast<std::ptrdiff_t>(start), ds.targets.end());
  out.memristor.assign(fm.predictions.begin() + static_cast<std::ptrdiff_t>(start), fm.predictions.end());
  out.frozen.assign(ff.predictions.begin() + static_cast<std::ptrdiff_t>(start), ff.predictions.end());
  if (out.truth.size() <= out.tau + 1) throw UsageError("tau too large for the test slice");
  out.csv = lag_csv(out.tau, out.truth, out.memristor, out.frozen);
  try {
    out.corr_truth = stats::lag_correlation(out.truth, out.tau);
  } catch (const DomainError&) {
    out.corr_truth = 1.0;  // constant series
  }
  if (o.out_dir) write_file_atomic(*o.out_dir / "lagplot.csv", out.csv);
  return out;
}

// ---------------------------------------------------------------- tomography

struct TomographyOptions {
  std::vector<double> xs{0.1, 0.5, 0.9};
  std::vector<double> rs{0.0, 0.5, 1.0};
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
  std::optional<fs::path> out_dir;
};

struct TomographyOutput {
  std::vector<TomographyPoint> points;
  std::string csv;
};

inline TomographyOutput cmd_tomography(const TomographyOptions& o) {
  for (double x : o.xs) {
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("tomography x values must lie in [0,1]");
  }
  for (double r : o.rs) {
    if (!(r >= 0.0 && r <= 1.0)) throw UsageError("tomography R values must lie in [0,1]");
  }
  TomographyOutput out;
  out.points = tomography_grid(o.xs, o.rs, o.shots, o.seed);
  out.csv = tomography_csv(out.points);
  if (o.out_dir) write_file_atomic(*o.out_dir / "tomography.csv", out.csv);
  return out;
}

// ---------------------------------------------------------------- hyperopt

struct HyperoptOptions {
  int n_exp = 4;
  std::size_t grid_points = 101;
  double train_cutoff = 0.9;
  MonomialSearch search{};
  std::optional<fs::path> out_dir;
};

struct HyperoptOutput {
  MonomialResult feedback;
  MonomialResult frozen;
  double mse_ratio = 0.0;        // frozen test MSE / feedback test MSE
  double abs_error_ratio = 0.0;  // same for mean |error| on the test slice
  std::string json_text;
  std::string csv;
};

inline double mean_abs_test_error(const Dataset& ds, const FitResult& fr) {
  double acc = 0.0;
  const std::size_t start = ds.split.washout + ds.split.train;
  for (std::size_t i = start; i < ds.size(); ++i) acc += std::abs(ds.targets[i] - fr.predictions[i]);
  return acc / static_cast<double>(ds.size() - start);
}

// Optimizes the with-feedback and frozen devices independently.
inline HyperoptOutput cmd_hyperopt(const HyperoptOptions& o) {
  if (o.search.restarts < 1) throw UsageError("restarts must be >= 1");
  const Dataset ds = monomial(o.n_exp, uniform_grid(o.grid_points), o.train_cutoff);
  HyperoptOutput out;
  out.feedback = optimize_monomial(o.n_exp, ds, FeedbackMode::MovingAverage, o.search);
  out.frozen = optimize_monomial(o.n_exp, ds, FeedbackMode::Frozen, o.search);
  const auto& fb = out.feedback.best;
  const auto& fz = out.frozen.best;
  out.mse_ratio = fz.fit.mse_test / fb.fit.mse_test;
  out.abs_error_ratio = mean_abs_test_error(ds, fz.fit) / mean_abs_test_error(ds, fb.fit);

  json j;
  j["schema"] = kReportSchema;
  j["task"] = "monomial";
  j["n"] = o.n_exp;
  j["grid_points"] = o.grid_points;
  j["train_cutoff"] = o.train_cutoff;
  j["grid_order"] = "ascending";
  j["adam"] = {{"lr", o.search.adam.lr},       {"beta1", o.search.adam.beta1}, {"beta2", o.search.adam.beta2},
               {"eps", o.search.adam.eps},     {"iters", o.search.adam.iters}, {"fd_step", o.search.adam.fd_step},
               {"restarts", o.search.restarts}, {"seed", o.search.seed}};
  auto entry = [](const MonomialResult& r) {
    return json{{"params", json::parse(hyperparams_json(r.best.params, r.best.mode, r.best.window, r.best.loss))},
                {"mse_train", r.best.fit.mse_train},
                {"mse_test", r.best.fit.mse_test},
                {"clamp_events", r.best.features.clamp_events},
                {"nonfinite_events", r.nonfinite_events},
                {"readout", json::parse(model_json(r.best.fit.model))}};
  };
  j["feedback"] = entry(out.feedback);
  j["frozen"] = entry(out.frozen);
  j["mse_ratio"] = out.mse_ratio;
  j["abs_error_ratio"] = out.abs_error_ratio;
  out.json_text = j.dump(2) + "\n";

  out.csv = "x,y_true,y_feedback,y_frozen\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.csv += format_double(ds.inputs[i]) + "," + format_double(ds.targets[i]) + "," +
               format_double(fb.fit.predictions[i]) + "," + format_double(fz.fit.predictions[i]) + "\n";
  }
  if (o.out_dir) {
    write_file_atomic(*o.out_dir / "hyperopt.json", out.json_text);
    write_file_atomic(*o.out_dir / "monomial_predictions.csv", out.csv);
  }
  return out;
}

// Reads the "feedback" or "frozen" parameter block written by cmd_hyperopt,
// or a bare parameter object.
struct LoadedHyperParams {
  HyperParams params;
  FeedbackMode mode = FeedbackMode::MovingAverage;
  std::size_t window = 1;
};

inline LoadedHyperParams load_hyperparams(const fs::path& path, const std::string& which = "feedback") {
  json j;
  try {
    j = json::parse(read_file(path));
    if (j.contains(which)) j = j.at(which).at("params");
    LoadedHyperParams out;
    out.params = {j.at("theta1").get<double>(), j.at("psi1").get<double>(), j.at("theta5").get<double>(),
                  j.at("psi4").get<double>(),   j.at("gain").get<double>(), j.at("offset").get<double>(),
                  j.at("r0").get<double>()};
    out.mode = j.value("mode", std::string("moving-average")) == "frozen" ? FeedbackMode::Frozen
                                                                          : FeedbackMode::MovingAverage;
    out.window = j.value("window", std::size_t{1});
    return out;
  } catch (const json::exception& e) {
    throw IoError("malformed hyperparameter file " + path.string() + ": " + e.what());
  }
}

}  // namespace qmem
