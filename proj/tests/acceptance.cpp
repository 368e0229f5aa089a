// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <qmem/qmem.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qmem;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
    pass = pass && ok;
  }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

bool within_factor(double v, double target, double f) { return v >= target / f && v <= target * f; }

// ---------------------------------------------------------------- 1

Outcome narma_single() {
  Outcome o;
  const ReservoirConfig cfg = task_preset("narma");
  std::vector<double> fb, fz;
  double worst_runtime = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t0 = Clock::now();
    RunOptions ro;
    ro.seed = seed;
    fb.push_back(cmd_run(ro).report.mse_test);
    worst_runtime = std::max(worst_runtime, seconds_since(t0));
    ro.feedback = Frozen{cfg.r0};
    fz.push_back(cmd_run(ro).report.mse_test);
  }
  const double mfb = stats::mean(fb), mfz = stats::mean(fz);
  o.check(in_range(mfb, 1e-5, 6e-5), "memristor mean " + sci(mfb) + " in [1e-5,6e-5] over 10 seeds");
  o.check(in_range(mfz, 1e-4, 4e-4), "frozen mean " + sci(mfz) + " in [1e-4,4e-4]");
  o.check(mfz / mfb >= 4.0, "ratio " + std::to_string(mfz / mfb) + " >= 4");
  o.check(worst_runtime < 10.0, "slowest run " + std::to_string(worst_runtime) + " s < 10 s");
  return o;
}

// ---------------------------------------------------------------- 2

Outcome memory_sweep() {
  Outcome o;
  const auto t0 = Clock::now();
  SweepOptions so;
  so.runs = 50;
  const SweepOutput out = cmd_sweep_memory(so);
  const double elapsed = seconds_since(t0);
  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 < out.rows.size(); ++i) {
    if (out.rows[i].mean < out.rows[best].mean) best = i;
  }
  const SweepRow& b = out.rows[best];
  o.check(b.m >= 4 && b.m <= 8, "argmin m = " + b.label + " in [4,8]");
  o.check(in_range(b.mean, 1.5e-5, 5e-5), "minimum mean " + sci(b.mean) + " in [1.5e-5,5e-5]");
  o.check(elapsed < 600.0, "runtime " + std::to_string(elapsed) + " s < 600 s");
  return o;
}

// ---------------------------------------------------------------- 3

Outcome table1() {
  Outcome o;
  const TableOutput t = cmd_table1(100, 0);
  const double reported_mean[4] = {2.76e-4, 2.05e-4, 1.83e-4, 0.92e-4};
  const double reported_std[4] = {0.29e-4, 0.22e-4, 0.19e-4, 0.11e-4};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = t.rows[i];
    o.check(std::abs(r.mean_mse - reported_mean[i]) <= 2.0 * reported_std[i],
            r.model + " " + sci(r.mean_mse) + " within 2 std of " + sci(reported_mean[i]));
  }
  const auto& q = t.rows[4];
  o.check(q.mean_mse <= 1e-4, "QMEM " + sci(q.mean_mse) + " <= 1e-4");
  bool ordered = true;
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) ordered = ordered && t.rows[i].mean_mse > t.rows[i + 1].mean_mse;
  o.check(ordered, "strict ordering L > C > L+M > C+M > QMEM");
  return o;
}

// ---------------------------------------------------------------- 4

Outcome chaotic_series() {
  Outcome o;
  auto pair_for = [](const std::string& task, const Dataset& ds) {
    const ReservoirConfig cfg = task_preset(task);
    return std::pair{task_test_mse(ds, cfg, cfg.rule), task_test_mse(ds, cfg, Frozen{cfg.r0})};
  };
  TaskOptions d;
  const auto [mg_fb, mg_fz] = pair_for("mackey-glass", make_dataset("mackey-glass", d));
  o.check(within_factor(mg_fb, 2.2e-4, 2.0), "Mackey-Glass " + sci(mg_fb) + " within 2x of 2.2e-4");
  o.check(within_factor(mg_fz, 6.4e-4, 2.0), "Mackey-Glass frozen " + sci(mg_fz) + " within 2x of 6.4e-4");
  const auto [sf_fb, sf_fz] = pair_for("santa-fe", make_dataset("santa-fe", d));
  o.check(within_factor(sf_fb, 9.2e-3, 2.0), "Santa Fe " + sci(sf_fb) + " within 2x of 9.2e-3");
  o.check(within_factor(sf_fz, 2.5e-2, 2.0), "Santa Fe frozen " + sci(sf_fz) + " within 2x of 2.5e-2");

  std::size_t pairs = 0, wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    d.seed = seed;
    const auto [fb, fz] = pair_for("narma", make_dataset("narma", d));
    ++pairs;
    wins += fb < fz ? 1 : 0;
  }
  // Mackey-Glass and Santa Fe are deterministic series; distinct windows
  // stand in for seeds.
  for (std::size_t discard : {0, 250, 500, 750, 1000}) {
    TaskOptions m;
    m.mg_discard = discard;
    const auto [fb, fz] = pair_for("mackey-glass", make_dataset("mackey-glass", m));
    ++pairs;
    wins += fb < fz ? 1 : 0;
  }
  ++pairs;
  wins += sf_fb < sf_fz ? 1 : 0;
  o.check(wins == pairs, "memristor beats frozen on " + std::to_string(wins) + "/" + std::to_string(pairs) +
                             " seed-matched pairs");
  return o;
}

// ---------------------------------------------------------------- 5

Outcome monomial_task() {
  Outcome o;
  bool all_better = true;
  std::string suite;
  for (int n : {3, 4, 5, 6}) {
    HyperoptOptions ho;
    ho.n_exp = n;
    const HyperoptOutput out = cmd_hyperopt(ho);
    const double fb = out.feedback.best.fit.mse_test, fz = out.frozen.best.fit.mse_test;
    if (n == 4) {
      o.check(fb <= 2e-3, "n=4 feedback " + sci(fb) + " <= 2e-3");
      o.check(fz >= 10.0 * fb, "n=4 frozen " + sci(fz) + " >= 10x feedback");
    }
    all_better = all_better && fb < fz;
    suite += (suite.empty() ? "" : ",") + std::to_string(n) + ":" + sci(fb) + "/" + sci(fz);
  }
  o.check(all_better, "feedback better for every n (" + suite + ")");
  return o;
}

// ---------------------------------------------------------------- 6

Outcome purity_table() {
  Outcome o;
  const auto t0 = Clock::now();
  const double xs[3] = {0.1, 0.5, 0.9}, rs[3] = {0.0, 0.5, 1.0};
  const double table[3][3] = {{1.00, 0.99, 1.00}, {1.00, 0.87, 1.00}, {1.00, 0.59, 1.00}};
  // The table entries are the closed form truncated to two decimals, so
  // 0.875 sits exactly 0.005 from 0.87; the bound carries rounding slack.
  constexpr double tol = 0.005 + 1e-12;
  double worst = 0.0;
  bool truncation_matches = true;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double p = purity(reconstruct(xs[i], rs[j]));
      worst = std::max(worst, std::abs(p - table[i][j]));
      truncation_matches = truncation_matches && std::floor(p * 100.0 + 1e-9) / 100.0 == table[i][j];
    }
  }
  const double elapsed = seconds_since(t0);
  o.check(worst <= tol, "max deviation " + sci(worst) + " <= 0.005");
  o.check(truncation_matches, "two-decimal truncation matches every entry");
  o.check(elapsed < 1.0, "runtime " + sci(elapsed) + " s < 1 s");
  return o;
}

// ---------------------------------------------------------------- 7

Outcome property_suites() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr int cases = 1000;

  double unit_err = 0.0;
  for (int i = 0; i < cases; ++i) {
    const Unitary3 a = embed(mzi_unitary(two_pi * u(rng), two_pi * u(rng)), Mode::A, Mode::B);
    const Unitary3 b = embed(mzi_unitary(two_pi * u(rng), two_pi * u(rng)), Mode::B, Mode::C);
    const Unitary3 c = compose(b, a);
    const double x = u(rng);
    const PhotonState s = apply(c, PhotonState{{cplx(std::sqrt(1 - x), 0), cplx(std::sqrt(x), 0), cplx(0, 0)}});
    unit_err = std::max({unit_err, unitarity_defect(c.m), std::abs(s.norm2() - 1.0)});
  }
  o.check(unit_err <= 1e-12, "unitarity/normalization max " + sci(unit_err));

  double ema_err = 0.0;
  for (int i = 0; i < cases; ++i) {
    const double r0 = u(rng), p = u(rng), md = 1.0 + 19.0 * u(rng);
    const std::size_t span = 1 + static_cast<std::size_t>(50 * u(rng));
    MemristorState st = initial_state(r0);
    for (std::size_t k = 0; k < span; ++k) st = update(st, ExpMovingAverage{md}, p);
    // closed form with constant drive: R_t = p + (R_0 - p)(1 - 1/m)^t
    const double want = p + (r0 - p) * std::pow(1.0 - 1.0 / md, static_cast<double>(span));
    ema_err = std::max(ema_err, std::abs(st.r - want));
  }
  o.check(ema_err <= 1e-12, "EMA recursion vs closed form max " + sci(ema_err));

  double nl_err = 0.0;
  int nl_cases = 0;
  for (double phi : {0.3, std::numbers::pi / 2, 2.0, 2.9}) {
    const double r0 = std::pow(std::cos(phi / 2), 2);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double x0 = i / 19.0, x1 = j / 19.0;
        ReservoirConfig cfg;
        cfg.scheme = EncodingScheme::SqrtDirect;
        cfg.convention = ReflectivityConvention::Cross;
        cfg.rule = ExpMovingAverage{1.0};
        cfg.r0 = r0;
        const std::vector<double> xs{x0, x1};
        const FeatureMatrix fm = run(xs, cfg);
        nl_err = std::max(nl_err, std::abs(fm.rows[1][2] - r0 * (1 - x0) * (1 - x1)));
        ++nl_cases;
      }
    }
  }
  o.check(nl_err <= 1e-10, "one-step nonlinearity max " + sci(nl_err) + " over " + std::to_string(nl_cases) + " cases");

  // R on a dyadic grid keeps 1 - R exact.
  bool symmetric = true;
  double state_sym = 0.0;
  std::uniform_int_distribution<int> grid(0, 1 << 20);
  for (int i = 0; i < cases; ++i) {
    const double s = u(rng), r = std::ldexp(grid(rng), -20);
    symmetric = symmetric && purity_closed_form(s, r) == purity_closed_form(s, 1.0 - r);
    state_sym = std::max(state_sym, std::abs(purity(reduced_state(s, r, 0.0)) - purity(reduced_state(s, 1.0 - r, 0.0))));
  }
  o.check(symmetric, "closed-form purity R<->1-R symmetry exact");
  o.check(state_sym <= 1e-12, "reduced-state purity symmetry max " + sci(state_sym));

  FeatureMatrix fm;
  fm.rows.resize(120);
  std::vector<double> y(120);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t i = 0; i < fm.rows.size(); ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    fm.rows[i] = {a / (a + b + c), b / (a + b + c), c / (a + b + c)};
    y[i] = std::sin(4 * fm.rows[i][0]) + 0.1 * n(rng);
  }
  const FitResult fr = fit(fm, y, {0, 120, 0});
  std::normal_distribution<double> step(0.0, 0.05);
  bool optimal = true;
  for (int i = 0; i < cases; ++i) {
    ReadoutModel other = fr.model;
    for (double& w : other.weights) w += step(rng);
    other.intercept += step(rng);
    optimal = optimal && mse(y, predict(other, fm.rows)) >= fr.mse_train - 1e-15;
  }
  o.check(optimal, "OLS beats 1000 perturbations");

  const Dataset ds = narma(1000, 0);
  ReservoirConfig ema = task_preset("narma");
  ReservoirConfig ma = ema;
  ma.rule = MovingAverage{4};
  const FeatureMatrix fe = run(ds.inputs, ema), fa = run(ds.inputs, ma);
  double rel = 0.0;
  for (std::size_t t = ds.split.washout; t < ds.size(); ++t) {
    rel = std::max(rel, std::abs(fa.r_trace[t] - fe.r_trace[t]) / std::abs(fe.r_trace[t]));
  }
  o.check(rel < 0.10, "moving average vs EMA (window 4) max relative error " + sci(rel) + " after washout");
  return o;
}

// ---------------------------------------------------------------- 8

std::string snapshot(const fs::path& dir) {
  std::ostringstream out;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out << fs::relative(f, dir).string() << "\n" << read_file(f) << "\n";
  return out.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "qmem_acceptance_determinism";
  const std::vector<std::string> invocations{
      "run narma --seed 7",
      "run narma --seed 7 --shots 500",
      "run mackey-glass",
      "run santa-fe",
      "sweep narma --m 1..6 --runs 3 --seed 4",
      "baselines narma --runs 3 --seed 2",
      "lagplot mackey-glass",
      "tomography --shots 2000 --seed 9",
      "hyperopt --n 3 --iters 10 --restarts 2 --windows 1,2 --seed 5",
      "dataset narma --seed 3",
  };
  std::size_t identical = 0;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    std::string snaps[2];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(k));
      fs::remove_all(dir);
      fs::create_directories(dir);
      const std::string cmd = std::string(QMEM_CLI_PATH) + " " + invocations[i] + " --out " + dir.string() +
                              " > " + (dir / "stdout.txt").string() + " 2>&1";
      ran = ran && std::system(cmd.c_str()) == 0;
      snaps[k] = snapshot(dir);
    }
    const bool same = ran && snaps[0] == snaps[1] && snaps[0].size() > 0;
    if (same) ++identical;
    else o.check(false, "'" + invocations[i] + "' differs or failed");
  }
  o.check(identical == invocations.size(),
          std::to_string(identical) + "/" + std::to_string(invocations.size()) + " invocations bit-identical");
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  report(1, "NARMA memristor vs frozen", narma_single);
  report(2, "memory decay sweep", memory_sweep);
  report(3, "NARMA comparison table", table1);
  report(4, "Mackey-Glass and Santa Fe", chaotic_series);
  report(5, "monomial after hyperopt", monomial_task);
  report(6, "purity table", purity_table);
  report(7, "property suites", property_suites);
  report(8, "determinism", determinism);
  std::printf("%s: %d failing criteria\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
