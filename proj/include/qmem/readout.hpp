#pragma once

// Linear readout: least squares from feature rows to targets with an
// optional intercept and ridge penalty, plus the washout/train/test protocol.

#include <qmem/error.hpp>
#include <qmem/io.hpp>
#include <qmem/reservoir.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qmem {

struct SplitSpec {
  std::size_t washout = 20;
  std::size_t train = 480;
  std::size_t test = 500;

  std::size_t total() const noexcept { return washout + train + test; }
};

inline void validate(const SplitSpec& split, std::size_t length) {
  if (split.total() != length) {
    throw DomainError("split " + std::to_string(split.washout) + "/" + std::to_string(split.train) + "/" +
                      std::to_string(split.test) + " does not partition a series of length " +
                      std::to_string(length));
  }
}

struct ReadoutModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double ridge = 0.0;
  bool rank_deficient = false;
};

struct FitOptions {
  bool intercept = true;
  double ridge = 0.0;
};

// Dense row-major design matrix.
using Design = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Design to_design(const std::vector<Probabilities>& rows) {
  Design x(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return x;
}

// Least squares on all rows of `x`. Rank-deficient designs get the
// minimum-norm solution. The intercept column is never penalized.
inline ReadoutModel fit_linear(const Design& x, std::span<const double> y, const FitOptions& opts = {}) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  detail::require(static_cast<std::size_t>(n) == y.size(), "fit: feature and target lengths differ");
  detail::require(n >= 1, "fit: no training rows");
  detail::require(opts.ridge >= 0.0 && std::isfinite(opts.ridge), "fit: ridge must be >= 0");

  const Eigen::Index cols = k + (opts.intercept ? 1 : 0);
  const Eigen::Index extra = opts.ridge > 0.0 ? k : 0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + extra, cols);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + extra);
  a.topLeftCorner(n, k) = x;
  if (opts.intercept) a.block(0, k, n, 1).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) b(i) = y[static_cast<std::size_t>(i)];
  if (extra > 0) a.bottomLeftCorner(k, k) = std::sqrt(opts.ridge) * Eigen::MatrixXd::Identity(k, k);

  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      detail::require(std::isfinite(a(i, j)), "fit: non-finite feature");
    }
    detail::require(std::isfinite(b(i)), "fit: non-finite target");
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd w = cod.solve(b);

  ReadoutModel m;
  m.weights.assign(w.data(), w.data() + k);
  m.intercept = opts.intercept ? w(k) : 0.0;
  m.ridge = opts.ridge;
  m.rank_deficient = cod.rank() < cols;
  return m;
}

inline std::vector<double> predict(const ReadoutModel& m, const Design& x) {
  detail::require(static_cast<std::size_t>(x.cols()) == m.weights.size(), "predict: feature width mismatch");
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double acc = m.intercept;
    for (Eigen::Index j = 0; j < x.cols(); ++j) acc += m.weights[static_cast<std::size_t>(j)] * x(i, j);
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

inline std::vector<double> predict(const ReadoutModel& m, const std::vector<Probabilities>& rows) {
  return predict(m, to_design(rows));
}

inline double mse(std::span<const double> y, std::span<const double> y_hat) {
  detail::require(!y.empty(), "mse: empty input");
  detail::require(y.size() == y_hat.size(), "mse: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_hat[i];
    acc += d * d;
  }
  return acc / static_cast<double>(y.size());
}

struct FitResult {
  ReadoutModel model;
  std::vector<double> predictions;  // one per input row, washout included
  double mse_train = 0.0;
  double mse_test = 0.0;
};

// Fits on rows [washout, washout+train) and scores train and test slices.
inline FitResult fit_split(const Design& x, std::span<const double> y, const SplitSpec& split,
                           const FitOptions& opts = {}) {
  validate(split, y.size());
  detail::require(static_cast<std::size_t>(x.rows()) == y.size(), "fit: feature and target lengths differ");
  detail::require(split.train >= 4, "fit: train count must be >= 4");
  const auto w = static_cast<Eigen::Index>(split.washout);
  const auto tr = static_cast<Eigen::Index>(split.train);

  FitResult r;
  r.model = fit_linear(x.middleRows(w, tr), y.subspan(split.washout, split.train), opts);
  r.predictions = predict(r.model, x);
  const std::span<const double> pred(r.predictions);
  r.mse_train = mse(y.subspan(split.washout, split.train), pred.subspan(split.washout, split.train));
  if (split.test > 0) {
    r.mse_test = mse(y.subspan(split.washout + split.train), pred.subspan(split.washout + split.train));
  }
  return r;
}

inline FitResult fit(const FeatureMatrix& fm, std::span<const double> targets, const SplitSpec& split,
                     const FitOptions& opts = {}) {
  return fit_split(to_design(fm.rows), targets, split, opts);
}

inline std::string model_json(const ReadoutModel& m) {
  std::string out = "{\"weights\":[";
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    if (i) out += ',';
    out += format_double(m.weights[i]);
  }
  out += "],\"intercept\":" + format_double(m.intercept) + ",\"ridge\":" + format_double(m.ridge) + "}";
  return out;
}

}  // namespace qmem
