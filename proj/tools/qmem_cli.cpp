// Command-line front end: tasks, sweeps, baselines, tomography, hyperopt.

#include <qmem/qmem.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qmem;

struct Common {
  std::string out = ".";
  std::uint64_t seed = 0;
};

void add_data_flags(CLI::App* cmd, TaskOptions& d) {
  cmd->add_option("--length", d.length, "Input/target pairs (time-series tasks)")->check(CLI::PositiveNumber);
  cmd->add_option("--n", d.n_exp, "Monomial exponent");
  cmd->add_option("--grid", d.grid_points, "Monomial grid points")->check(CLI::Range(2, 1000000));
  cmd->add_option("--cutoff", d.train_cutoff, "Monomial train cutoff")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--offset", d.offset, "Santa Fe sample offset");
  cmd->add_option_function<std::string>("--data", [&d](const std::string& p) { d.data_path = p; },
                                        "Santa Fe file (default: $QMEM_DATA_DIR/santafe_a.txt)");
  cmd->add_option("--mg-discard", d.mg_discard, "Mackey-Glass samples dropped before the series");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    // a..b expands to every integer in the closed range
    if (const auto dots = tok.find(".."); dots != std::string::npos) {
      const double a = std::stod(tok.substr(0, dots));
      const double b = std::stod(tok.substr(dots + 2));
      if (b < a) throw UsageError("empty range " + tok);
      for (double v = a; v <= b; v += 1.0) out.push_back(v);
    } else {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw UsageError("bad number " + tok);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> parse_list_or_usage(const std::string& text) {
  try {
    return parse_list(text);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("bad list '" + text + "'");
  }
}

Predictor parse_predictor(const std::string& s) {
  if (s == "input") return Predictor::Input;
  if (s == "output") return Predictor::Output;
  throw UsageError("predictor must be input or output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photonic quantum-memristor reservoir simulator"};
  app.require_subcommand(1);

  // run
  RunOptions run_opts;
  std::string run_feedback, run_hp_file, run_out = ".";
  std::uint64_t run_shots = 0;
  auto* run_cmd = app.add_subcommand("run", "Run one task and fit the readout");
  run_cmd->add_option("task", run_opts.task, "narma | mackey-glass | santa-fe | monomial")->required();
  run_cmd->add_option("--feedback", run_feedback, "ema:M | ma:M[,A,B] | frozen:R");
  run_cmd->add_option("--shots", run_shots, "Detected photons per step (default: exact probabilities)");
  run_cmd->add_option("--seed", run_opts.seed, "Seed for data and shot noise");
  run_cmd->add_option("--hyperparams", run_hp_file, "Monomial device from a hyperopt.json file");
  run_cmd->add_option("--out", run_out, "Output directory");
  add_data_flags(run_cmd, run_opts.data);

  // sweep
  SweepOptions sw;
  std::string sw_m = "1..20", sw_rule = "ema", sw_out = ".";
  auto* sw_cmd = app.add_subcommand("sweep", "Test MSE against memory extent");
  sw_cmd->add_option("task", sw.task)->required();
  sw_cmd->add_option("--m", sw_m, "Memory values, e.g. 1..20 or 2,4,6");
  sw_cmd->add_option("--runs", sw.runs, "Seeds per value")->check(CLI::PositiveNumber);
  sw_cmd->add_option("--seed", sw.base_seed, "First seed");
  sw_cmd->add_option("--rule", sw_rule, "ema | ma");
  sw_cmd->add_option("--out", sw_out, "Output directory");
  add_data_flags(sw_cmd, sw.data);

  // baselines
  BaselineOptions bl;
  std::string bl_pred = "input", bl_out = ".";
  auto* bl_cmd = app.add_subcommand("baselines", "Classical polynomial baselines");
  bl_cmd->add_option("task", bl.task)->required();
  bl_cmd->add_option("--runs", bl.runs)->check(CLI::Range(2, 1000000));
  bl_cmd->add_option("--seed", bl.base_seed, "First seed");
  bl_cmd->add_option("--predictor", bl_pred, "input | output");
  bl_cmd->add_option("--out", bl_out, "Output directory");
  add_data_flags(bl_cmd, bl.data);

  // table1
  std::size_t t1_runs = 100;
  std::uint64_t t1_seed = 0;
  std::string t1_out = ".", t1_pred = "input";
  auto* t1_cmd = app.add_subcommand("table1", "NARMA baselines plus the memristor reservoir");
  t1_cmd->add_option("--runs", t1_runs)->check(CLI::Range(2, 1000000));
  t1_cmd->add_option("--seed", t1_seed, "First seed");
  t1_cmd->add_option("--predictor", t1_pred, "input | output");
  t1_cmd->add_option("--out", t1_out, "Output directory");

  // lagplot
  LagOptions lag;
  std::size_t lag_tau = 0;
  std::string lag_out = ".";
  auto* lag_cmd = app.add_subcommand("lagplot", "Lag pairs of truth and predictions");
  lag_cmd->add_option("task", lag.task)->required();
  lag_cmd->add_option("--tau", lag_tau, "Lag (default 10 for mackey-glass, 1 otherwise)");
  lag_cmd->add_option("--seed", lag.seed);
  lag_cmd->add_option("--out", lag_out, "Output directory");
  add_data_flags(lag_cmd, lag.data);

  // tomography
  TomographyOptions tomo;
  std::string tomo_x = "0.1,0.5,0.9", tomo_r = "0,0.5,1", tomo_out = ".";
  std::uint64_t tomo_shots = 0;
  auto* tomo_cmd = app.add_subcommand("tomography", "Reconstructed purity over an (x, R) grid");
  tomo_cmd->add_option("--x", tomo_x, "Encoded values");
  tomo_cmd->add_option("--r", tomo_r, "Reflectivities");
  tomo_cmd->add_option("--shots", tomo_shots, "Photons per setting (default: exact)");
  tomo_cmd->add_option("--seed", tomo.seed);
  tomo_cmd->add_option("--out", tomo_out, "Output directory");

  // hyperopt
  HyperoptOptions ho;
  std::string ho_windows = "1..8", ho_out = ".";
  auto* ho_cmd = app.add_subcommand("hyperopt", "Optimize the monomial device with and without feedback");
  ho_cmd->add_option("--n", ho.n_exp, "Monomial exponent");
  ho_cmd->add_option("--grid", ho.grid_points)->check(CLI::Range(2, 1000000));
  ho_cmd->add_option("--cutoff", ho.train_cutoff)->check(CLI::Range(0.0, 1.0));
  ho_cmd->add_option("--iters", ho.search.adam.iters);
  ho_cmd->add_option("--lr", ho.search.adam.lr);
  ho_cmd->add_option("--restarts", ho.search.restarts)->check(CLI::PositiveNumber);
  ho_cmd->add_option("--windows", ho_windows, "Moving-average windows");
  ho_cmd->add_option("--seed", ho.search.seed);
  ho_cmd->add_option("--out", ho_out, "Output directory");

  // dataset
  std::string ds_task, ds_out = ".";
  TaskOptions ds_opts;
  std::uint64_t ds_seed = 0;
  auto* ds_cmd = app.add_subcommand("dataset", "Export a task dataset as CSV");
  ds_cmd->add_option("task", ds_task)->required();
  ds_cmd->add_option("--seed", ds_seed);
  ds_cmd->add_option("--out", ds_out, "Output directory");
  add_data_flags(ds_cmd, ds_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      if (!run_feedback.empty()) run_opts.feedback = parse_feedback(run_feedback);
      if (run_cmd->count("--shots") > 0) {
        if (run_shots < 1) throw UsageError("--shots must be >= 1");
        run_opts.shots = run_shots;
      }
      if (!run_hp_file.empty()) {
        const auto loaded = load_hyperparams(run_hp_file, run_opts.feedback && std::holds_alternative<Frozen>(*run_opts.feedback) ? "frozen" : "feedback");
        run_opts.hyperparams = loaded.params;
        if (!run_opts.feedback) {
          run_opts.feedback = loaded.mode == FeedbackMode::Frozen ? FeedbackRule{Frozen{std::clamp(loaded.params.r0, 0.0, 1.0)}}
                                                                  : FeedbackRule{MovingAverage{loaded.window, loaded.params.gain, loaded.params.offset}};
        }
      }
      run_opts.out_dir = run_out;
      const auto out = cmd_run(run_opts);
      std::printf("%s mse_train=%s mse_test=%s clamp_events=%zu\n", out.report.task.c_str(),
                  format_double(out.report.mse_train).c_str(), format_double(out.report.mse_test).c_str(),
                  out.report.clamp_events);
    } else if (sw_cmd->parsed()) {
      sw.m_values = parse_list_or_usage(sw_m);
      if (sw_rule == "ema") {
        sw.rule = SweepRule::Ema;
      } else if (sw_rule == "ma") {
        sw.rule = SweepRule::MovingAverage;
      } else {
        throw UsageError("--rule must be ema or ma");
      }
      sw.out_dir = sw_out;
      std::cout << cmd_sweep_memory(sw).csv;
    } else if (bl_cmd->parsed()) {
      bl.predictor = parse_predictor(bl_pred);
      bl.out_dir = bl_out;
      std::cout << cmd_baselines(bl).table;
    } else if (t1_cmd->parsed()) {
      std::cout << cmd_table1(t1_runs, t1_seed, fs::path(t1_out), parse_predictor(t1_pred)).table;
    } else if (lag_cmd->parsed()) {
      if (lag_cmd->count("--tau") > 0) lag.tau = lag_tau;
      lag.out_dir = lag_out;
      const auto out = cmd_lagplot(lag);
      std::printf("tau=%zu truth_lag_corr=%s\n", out.tau, format_double(out.corr_truth).c_str());
    } else if (tomo_cmd->parsed()) {
      tomo.xs = parse_list_or_usage(tomo_x);
      tomo.rs = parse_list_or_usage(tomo_r);
      if (tomo_cmd->count("--shots") > 0) {
        if (tomo_shots < 1) throw UsageError("--shots must be >= 1");
        tomo.shots = tomo_shots;
      }
      tomo.out_dir = tomo_out;
      std::cout << cmd_tomography(tomo).csv;
    } else if (ho_cmd->parsed()) {
      ho.search.windows.clear();
      for (double w : parse_list_or_usage(ho_windows)) {
        if (w < 1.0 || w != std::floor(w)) throw UsageError("windows must be integers >= 1");
        ho.search.windows.push_back(static_cast<std::size_t>(w));
      }
      ho.out_dir = ho_out;
      const auto out = cmd_hyperopt(ho);
      std::printf("feedback window=%zu mse_test=%s\nfrozen mse_test=%s\nmse_ratio=%s abs_error_ratio=%s\n",
                  out.feedback.best.window, format_double(out.feedback.best.fit.mse_test).c_str(),
                  format_double(out.frozen.best.fit.mse_test).c_str(), format_double(out.mse_ratio).c_str(),
                  format_double(out.abs_error_ratio).c_str());
    } else if (ds_cmd->parsed()) {
      ds_opts.seed = ds_seed;
      const Dataset ds = make_dataset(ds_task, ds_opts);
      write_file_atomic(fs::path(ds_out) / (ds_task + ".csv"), dataset_csv(ds));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
