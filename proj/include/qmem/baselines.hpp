#pragma once

// Classical comparison models: least-squares polynomial regression on the
// current value, optionally with one step of memory.

#include <qmem/error.hpp>
#include <qmem/parallel.hpp>
#include <qmem/readout.hpp>
#include <qmem/stats.hpp>
#include <qmem/tasks.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qmem {

enum class Predictor {
  Input,   // regress y_{t+1} on x_t (and x_{t-1})
  Output,  // regress y_{t+1} on y_t (and y_{t-1})
};

struct BaselineSpec {
  int degree = 1;
  bool memory = false;
  Predictor predictor = Predictor::Input;
};

inline std::string baseline_label(const BaselineSpec& s) {
  std::string base = s.degree == 1 ? "L" : s.degree == 3 ? "C" : "P" + std::to_string(s.degree);
  return s.memory ? base + "+M" : base;
}

// Exponent tuples of all monomials of total degree <= d in `vars` variables,
// constant first, then grouped by degree in lexicographic order.
inline std::vector<std::vector<int>> monomial_exponents(std::size_t vars, int degree) {
  std::vector<std::vector<int>> out;
  out.emplace_back(vars, 0);
  for (int d = 1; d <= degree; ++d) {
    // combinations with replacement of variable indices, non-decreasing
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      std::vector<int> e(vars, 0);
      for (std::size_t i : idx) ++e[i];
      out.push_back(std::move(e));
      int pos = d - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == vars - 1) --pos;
      if (pos < 0) break;
      const std::size_t v = idx[static_cast<std::size_t>(pos)] + 1;
      for (auto k = static_cast<std::size_t>(pos); k < idx.size(); ++k) idx[k] = v;
    }
  }
  return out;
}

// One row per time step. Memory columns use the previous entry of `xs`;
// the value before the first entry is taken as 0 (it falls in the washout).
// The constant column comes first.
inline Design poly_features(std::span<const double> xs, const BaselineSpec& spec) {
  detail::require(spec.degree >= 1, "poly_features: degree must be >= 1");
  detail::require(!spec.memory || xs.size() >= 2, "poly_features: memory needs length >= 2");
  const std::size_t vars = spec.memory ? 2 : 1;
  const auto exps = monomial_exponents(vars, spec.degree);
  Design x(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(exps.size()));
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double v[2] = {xs[t], t > 0 ? xs[t - 1] : 0.0};
    for (std::size_t c = 0; c < exps.size(); ++c) {
      double term = 1.0;
      for (std::size_t j = 0; j < vars; ++j) {
        for (int p = 0; p < exps[c][j]; ++p) term *= v[j];
      }
      x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = term;
    }
  }
  return x;
}

// Regressor sequence for the chosen predictor: x_t, or y_t (the previous
// target, 0 before the first).
inline std::vector<double> predictor_series(const Dataset& ds, Predictor p) {
  if (p == Predictor::Input) return ds.inputs;
  std::vector<double> prev(ds.targets.size(), 0.0);
  for (std::size_t t = 1; t < prev.size(); ++t) prev[t] = ds.targets[t - 1];
  return prev;
}

struct BaselineFit {
  ReadoutModel model;
  double train_mse = 0.0;
  double test_mse = 0.0;
  std::size_t free_parameters = 0;  // non-intercept coefficients
};

inline BaselineFit fit_baseline(const Dataset& ds, const BaselineSpec& spec, const SplitSpec& split) {
  const std::vector<double> reg = predictor_series(ds, spec.predictor);
  const Design full = poly_features(reg, spec);
  // The constant column is supplied by the fit's intercept.
  const Design x = full.rightCols(full.cols() - 1);
  const FitResult r = fit_split(x, ds.targets, split);
  return {r.model, r.mse_train, r.mse_test, static_cast<std::size_t>(x.cols())};
}

struct BaselineRow {
  std::string model;
  double mean_mse = 0.0;
  double std_mse = 0.0;
  std::size_t runs = 0;
  std::vector<double> per_seed;
};

inline std::vector<BaselineSpec> table1_specs(Predictor p = Predictor::Input) {
  return {{1, false, p}, {3, false, p}, {1, true, p}, {3, true, p}};
}

using DatasetGenerator = std::function<Dataset(std::uint64_t seed)>;

// Rows L, C, L+M, C+M over the given seeds.
inline std::vector<BaselineRow> baseline_suite(const DatasetGenerator& gen, std::span<const std::uint64_t> seeds,
                                               Predictor predictor = Predictor::Input) {
  detail::require(seeds.size() >= 2, "baseline_suite: need at least two runs");
  const auto specs = table1_specs(predictor);
  std::vector<std::vector<double>> mses(specs.size(), std::vector<double>(seeds.size()));
  parallel_for(seeds.size(), [&](std::size_t i) {
    const Dataset ds = gen(seeds[i]);
    for (std::size_t s = 0; s < specs.size(); ++s) mses[s][i] = fit_baseline(ds, specs[s], ds.split).test_mse;
  });
  std::vector<BaselineRow> rows;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    rows.push_back({baseline_label(specs[s]), stats::mean(mses[s]), stats::stddev(mses[s]), seeds.size(), mses[s]});
  }
  return rows;
}

inline std::string baseline_csv(std::span<const BaselineRow> rows) {
  std::string out = "model,mean_mse,std_mse,runs\n";
  for (const auto& r : rows) {
    out += r.model + "," + format_double(r.mean_mse) + "," + format_double(r.std_mse) + "," +
           std::to_string(r.runs) + "\n";
  }
  return out;
}

// "2.76(29)": mean in units of `unit` with two decimals, uncertainty in
// units of the last printed digit.
inline std::string format_mean_std(double mean, double std, double unit = 1e-4) {
  char buf[64];
  const long long unc = std::llround(std / unit * 100.0);
  std::snprintf(buf, sizeof buf, "%.2f(%lld)", mean / unit, unc);
  return buf;
}

inline std::string format_table(std::span<const BaselineRow> rows, double unit = 1e-4) {
  std::string out;
  char head[96];
  std::snprintf(head, sizeof head, "%-8s %-14s %s\n", "model", "MSE (x1e-4)", "runs");
  out += head;
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%-8s %-14s %zu\n", r.model.c_str(), format_mean_std(r.mean_mse, r.std_mse, unit).c_str(),
                  r.runs);
    out += line;
  }
  return out;
}

}  // namespace qmem
