#pragma once

// Monomial-task hyperparameter search: Adam on central finite-difference
// gradients of mean (p_D(x) - x^n)^2 over the input grid, with restarts.

#include <qmem/error.hpp>
#include <qmem/io.hpp>
#include <qmem/parallel.hpp>
#include <qmem/readout.hpp>
#include <qmem/reservoir.hpp>
#include <qmem/tasks.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qmem {

struct HyperParams {
  double theta1 = std::numbers::pi;
  double psi1 = 0.0;
  double theta5 = std::numbers::pi;
  double psi4 = 0.0;
  double gain = 1.0;
  double offset = 0.0;
  double r0 = 0.5;

  static constexpr std::size_t size = 7;

  std::array<double, size> to_array() const { return {theta1, psi1, theta5, psi4, gain, offset, r0}; }
  static HyperParams from_array(const std::array<double, size>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
};

enum class FeedbackMode { MovingAverage, Frozen };

inline std::string to_string(FeedbackMode m) { return m == FeedbackMode::MovingAverage ? "moving-average" : "frozen"; }

struct AdamConfig {
  double lr = 0.4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t iters = 500;
  double fd_step = 1e-5;
};

inline void validate(const AdamConfig& c) {
  detail::require(c.lr > 0.0, "AdamConfig: lr must be > 0");
  detail::require(c.beta1 > 0.0 && c.beta1 < 1.0 && c.beta2 > 0.0 && c.beta2 < 1.0,
                  "AdamConfig: moment decays must lie in (0,1)");
  detail::require(c.eps > 0.0 && c.fd_step > 0.0, "AdamConfig: eps and fd_step must be > 0");
}

// Device settings for the monomial task: sqrt-direct encoding, cross
// convention, moving-average feedback with the given window (or frozen at r0).
inline ReservoirConfig monomial_config(const HyperParams& hp, FeedbackMode mode, std::size_t window) {
  ReservoirConfig cfg;
  cfg.scheme = EncodingScheme::SqrtDirect;
  cfg.convention = ReflectivityConvention::Cross;
  cfg.u1 = {hp.theta1, hp.psi1};
  cfg.u2 = {hp.theta5, hp.psi4};
  cfg.r0 = std::clamp(std::isfinite(hp.r0) ? hp.r0 : 0.5, 0.0, 1.0);
  if (mode == FeedbackMode::Frozen) {
    cfg.rule = Frozen{cfg.r0};
  } else {
    cfg.rule = MovingAverage{window, hp.gain, hp.offset, false};
  }
  return cfg;
}

inline double loss(const HyperParams& hp, int n_exp, std::span<const double> grid,
                   FeedbackMode mode = FeedbackMode::MovingAverage, std::size_t window = 1) {
  detail::require(!grid.empty(), "loss: empty grid");
  for (double v : hp.to_array()) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
  }
  const FeatureMatrix fm = run(grid, monomial_config(hp, mode, window));
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = fm.rows[i][0] - std::pow(grid[i], n_exp);
    acc += d * d;
  }
  return acc / static_cast<double>(grid.size());
}

struct OptimizeOptions {
  FeedbackMode mode = FeedbackMode::MovingAverage;
  std::size_t window = 1;
};

struct RestartTrace {
  HyperParams best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> running_min;  // best loss after each iteration
  std::size_t nonfinite_events = 0;
};

struct OptimizeResult {
  HyperParams best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_restart = 0;
  std::size_t nonfinite_events = 0;
  std::vector<RestartTrace> restarts;
};

inline HyperParams random_hyperparams(std::mt19937_64& rng) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::uniform_real_distribution<double> phase(0.0, two_pi);
  std::uniform_real_distribution<double> gain(-6.0, 6.0);
  std::uniform_real_distribution<double> offset(-3.0, 3.0);
  std::uniform_real_distribution<double> r0(0.0, 1.0);
  HyperParams hp;
  hp.theta1 = phase(rng);
  hp.psi1 = phase(rng);
  hp.theta5 = phase(rng);
  hp.psi4 = phase(rng);
  hp.gain = gain(rng);
  hp.offset = offset(rng);
  hp.r0 = r0(rng);
  return hp;
}

// One Adam trajectory from `start`. A non-finite loss or gradient re-draws
// the starting point from `rng` and counts the event.
inline RestartTrace adam_trajectory(HyperParams start, int n_exp, std::span<const double> grid,
                                    const AdamConfig& adam, const OptimizeOptions& opts, std::mt19937_64& rng) {
  constexpr std::size_t K = HyperParams::size;
  constexpr std::size_t max_redraws = 16;
  RestartTrace tr;
  tr.running_min.reserve(adam.iters);
  auto f = [&](const std::array<double, K>& a) {
    return loss(HyperParams::from_array(a), n_exp, grid, opts.mode, opts.window);
  };

  std::array<double, K> x = start.to_array();
  std::array<double, K> m{}, v{};
  double fx = f(x);
  while (!std::isfinite(fx) && tr.nonfinite_events < max_redraws) {
    ++tr.nonfinite_events;
    x = random_hyperparams(rng).to_array();
    fx = f(x);
  }
  if (std::isfinite(fx)) {
    tr.best = HyperParams::from_array(x);
    tr.best_loss = fx;
  }

  std::size_t k = 0;
  for (std::size_t it = 0; it < adam.iters; ++it) {
    std::array<double, K> g{};
    bool finite = true;
    for (std::size_t i = 0; i < K; ++i) {
      std::array<double, K> xp = x, xm = x;
      xp[i] += adam.fd_step;
      xm[i] -= adam.fd_step;
      g[i] = (f(xp) - f(xm)) / (2.0 * adam.fd_step);
      finite = finite && std::isfinite(g[i]);
    }
    if (finite) {
      ++k;
      const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(k));
      const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(k));
      for (std::size_t i = 0; i < K; ++i) {
        m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
        v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
        x[i] -= adam.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + adam.eps);
      }
      fx = f(x);
    }
    if (!finite || !std::isfinite(fx)) {
      ++tr.nonfinite_events;
      if (tr.nonfinite_events > max_redraws) break;
      x = random_hyperparams(rng).to_array();
      m = {};
      v = {};
      k = 0;
      fx = f(x);
    }
    if (std::isfinite(fx) && fx < tr.best_loss) {
      tr.best_loss = fx;
      tr.best = HyperParams::from_array(x);
    }
    tr.running_min.push_back(tr.best_loss);
  }
  return tr;
}

// Best of `restarts` independent trajectories. Restart i draws its start
// from a generator seeded with (seed, i), so the result does not depend on
// thread scheduling.
inline OptimizeResult optimize(int n_exp, std::span<const double> grid, const AdamConfig& adam, std::size_t restarts,
                               std::uint64_t seed, const OptimizeOptions& opts = {}) {
  validate(adam);
  detail::require(restarts >= 1, "optimize: restarts must be >= 1");
  detail::require(!grid.empty(), "optimize: empty grid");
  OptimizeResult res;
  res.restarts.resize(restarts);
  parallel_for(restarts, [&](std::size_t i) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(opts.window)};
    std::mt19937_64 rng(sq);
    res.restarts[i] = adam_trajectory(random_hyperparams(rng), n_exp, grid, adam, opts, rng);
  });
  for (std::size_t i = 0; i < restarts; ++i) {
    res.nonfinite_events += res.restarts[i].nonfinite_events;
    if (res.restarts[i].best_loss < res.best_loss) {
      res.best_loss = res.restarts[i].best_loss;
      res.best = res.restarts[i].best;
      res.best_restart = i;
    }
  }
  return res;
}

// Reservoir plus readout on the monomial dataset for fixed hyperparameters.
struct MonomialEvaluation {
  HyperParams params;
  FeedbackMode mode = FeedbackMode::MovingAverage;
  std::size_t window = 1;
  double loss = 0.0;
  FitResult fit;
  FeatureMatrix features;
};

inline MonomialEvaluation evaluate_monomial(const HyperParams& hp, const Dataset& ds, int n_exp, FeedbackMode mode,
                                            std::size_t window) {
  MonomialEvaluation ev;
  ev.params = hp;
  ev.mode = mode;
  ev.window = window;
  ev.loss = loss(hp, n_exp, ds.inputs, mode, window);
  ev.features = run(ds.inputs, monomial_config(hp, mode, window));
  ev.fit = fit(ev.features, ds.targets, ds.split);
  return ev;
}

struct MonomialSearch {
  std::vector<std::size_t> windows{1, 2, 3, 4, 5, 6, 7, 8};
  AdamConfig adam{};
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
};

struct MonomialResult {
  MonomialEvaluation best;
  std::vector<MonomialEvaluation> per_window;  // best restart for each window
  std::size_t nonfinite_events = 0;
};

// Optimizes the device for each window (one pass for the frozen mode) and
// keeps the candidate with the lowest readout error on the training slice.
inline MonomialResult optimize_monomial(int n_exp, const Dataset& ds, FeedbackMode mode, const MonomialSearch& search) {
  detail::require(!search.windows.empty(), "optimize_monomial: no windows");
  const std::vector<std::size_t> windows =
      mode == FeedbackMode::Frozen ? std::vector<std::size_t>{1} : search.windows;
  MonomialResult out;
  for (std::size_t w : windows) {
    const OptimizeResult r = optimize(n_exp, ds.inputs, search.adam, search.restarts, search.seed, {mode, w});
    out.nonfinite_events += r.nonfinite_events;
    MonomialEvaluation best_here;
    bool have = false;
    for (const auto& tr : r.restarts) {
      if (!std::isfinite(tr.best_loss)) continue;
      MonomialEvaluation ev = evaluate_monomial(tr.best, ds, n_exp, mode, w);
      if (!have || ev.fit.mse_train < best_here.fit.mse_train) {
        best_here = std::move(ev);
        have = true;
      }
    }
    detail::require(have, "optimize_monomial: every restart diverged");
    out.per_window.push_back(best_here);
  }
  std::size_t pick = 0;
  for (std::size_t i = 1; i < out.per_window.size(); ++i) {
    if (out.per_window[i].fit.mse_train < out.per_window[pick].fit.mse_train) pick = i;
  }
  out.best = out.per_window[pick];
  return out;
}

inline std::string hyperparams_json(const HyperParams& hp, FeedbackMode mode, std::size_t window, double loss_value) {
  std::string out = "{";
  out += "\"theta1\":" + format_double(hp.theta1);
  out += ",\"psi1\":" + format_double(hp.psi1);
  out += ",\"theta5\":" + format_double(hp.theta5);
  out += ",\"psi4\":" + format_double(hp.psi4);
  out += ",\"gain\":" + format_double(hp.gain);
  out += ",\"offset\":" + format_double(hp.offset);
  out += ",\"r0\":" + format_double(hp.r0);
  out += ",\"mode\":\"" + to_string(mode) + "\"";
  out += ",\"window\":" + std::to_string(window);
  out += ",\"loss\":" + format_double(loss_value);
  out += "}";
  return out;
}

}  // namespace qmem
