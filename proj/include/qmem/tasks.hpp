#pragma once

// Benchmark datasets: NARMA, Mackey-Glass, Santa Fe laser, monomials.
// Every dataset pairs the model input x_t in [0,1] with a target.

#include <qmem/error.hpp>
#include <qmem/io.hpp>
#include <qmem/readout.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qmem {

struct Dataset {
  std::string name;
  std::vector<double> inputs;
  std::vector<double> targets;
  std::uint64_t seed = 0;
  SplitSpec split;

  std::size_t size() const noexcept { return inputs.size(); }
};

// 20-step washout, second half of the series for testing.
inline SplitSpec default_split(std::size_t n) {
  SplitSpec s;
  s.washout = std::min<std::size_t>(20, n);
  s.test = (n - s.washout) >= n / 2 ? n / 2 : n - s.washout;
  s.train = n - s.washout - s.test;
  return s;
}

// ---------------------------------------------------------------- NARMA

struct NarmaOptions {
  double y1 = 0.0;
  double y2 = 0.0;
  double input_low = 1e-9;
  double input_high = 0.5 - 1e-9;
};

// y_{t+1} = 0.4 y_t + 0.4 y_t y_{t-1} + 0.6 x_t^3 + 0.1, started from (y1, y2).
// Pair t is (x_t, y_{t+1}).
inline Dataset narma_from_inputs(std::vector<double> xs, const NarmaOptions& opts = {}) {
  detail::require(xs.size() >= 3, "narma: length must be >= 3");
  Dataset ds;
  ds.name = "narma";
  ds.targets.resize(xs.size());
  double prev = opts.y1;
  double cur = opts.y2;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double x = xs[t];
    const double next = 0.4 * cur + 0.4 * cur * prev + 0.6 * x * x * x + 0.1;
    ds.targets[t] = next;
    prev = cur;
    cur = next;
  }
  ds.inputs = std::move(xs);
  ds.split = default_split(ds.inputs.size());
  return ds;
}

inline std::vector<double> uniform_inputs(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> xs(n);
  for (double& x : xs) x = dist(rng);
  return xs;
}

inline Dataset narma(std::size_t n, std::uint64_t seed, const NarmaOptions& opts = {}) {
  detail::require(n >= 3, "narma: length must be >= 3");
  Dataset ds = narma_from_inputs(uniform_inputs(n, opts.input_low, opts.input_high, seed), opts);
  ds.seed = seed;
  return ds;
}

// Fixed point of the zero-input recurrence: 0.4 y^2 - 0.6 y + 0.1 = 0.
inline double narma_zero_input_fixed_point() { return (0.6 - std::sqrt(0.2)) / 0.8; }

// ---------------------------------------------------------------- Mackey-Glass

struct MackeyGlassParams {
  double beta = 0.2;
  double gamma = 0.1;
  double n = 10.0;
  double tau = 17.0;
  double dt = 0.1;
  double x0 = 1.2;
  std::size_t sample_stride = 10;
};

inline void validate(const MackeyGlassParams& p) {
  detail::require(p.dt > 0.0 && std::isfinite(p.dt), "mackey_glass: dt must be > 0");
  detail::require(p.tau >= 0.0, "mackey_glass: tau must be >= 0");
  const double steps = p.tau / p.dt;
  detail::require(std::abs(steps - std::round(steps)) < 1e-9, "mackey_glass: tau/dt must be integral");
  detail::require(p.sample_stride >= 1, "mackey_glass: stride must be >= 1");
}

// dx/dt = beta x(t-tau) / (1 + x(t-tau)^n) - gamma x(t), constant history x0.
// RK4 with the delayed value at half steps taken as the mean of the two
// neighbouring grid points. Returns `samples` + 1 unscaled values, one per
// stride, starting with x0.
inline std::vector<double> integrate_mackey_glass(std::size_t samples, const MackeyGlassParams& p) {
  validate(p);
  const auto d = static_cast<std::size_t>(std::llround(p.tau / p.dt));
  const std::size_t steps = samples * p.sample_stride;
  auto f = [&p](double x, double xd) { return p.beta * xd / (1.0 + std::pow(xd, p.n)) - p.gamma * x; };

  // buf[k + d] holds x at grid index k; indices < 0 are history.
  std::vector<double> buf(d + 1, p.x0);
  buf.reserve(d + 1 + steps);
  std::vector<double> out;
  out.reserve(samples + 1);
  out.push_back(p.x0);
  double x = p.x0;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t cur = buf.size() - 1;
    const double xd0 = buf[cur - d];
    const double xd1 = d == 0 ? x : buf[cur - d + 1];
    const double xdh = 0.5 * (xd0 + xd1);
    const double k1 = f(x, xd0);
    const double k2 = f(x + 0.5 * p.dt * k1, xdh);
    const double k3 = f(x + 0.5 * p.dt * k2, xdh);
    const double k4 = f(x + p.dt * k3, d == 0 ? x + p.dt * k3 : xd1);
    x += p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    buf.push_back(x);
    if ((k + 1) % p.sample_stride == 0) out.push_back(x);
  }
  return out;
}

inline void max_scale(std::vector<double>& v) {
  detail::require(!v.empty(), "max_scale: empty series");
  const double mx = *std::max_element(v.begin(), v.end());
  detail::require(mx > 0.0 && std::isfinite(mx), "max_scale: maximum must be positive");
  for (double& x : v) x /= mx;
}

// n one-step-ahead pairs from the max-scaled series, after dropping
// `discard_samples` initial samples.
inline Dataset mackey_glass(std::size_t n, const MackeyGlassParams& p = {}, std::size_t discard_samples = 0) {
  detail::require(n >= 1, "mackey_glass: length must be >= 1");
  std::vector<double> s = integrate_mackey_glass(n + discard_samples, p);
  s.erase(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(discard_samples));
  max_scale(s);
  for (double v : s) detail::require(v >= 0.0, "mackey_glass: negative sample; inputs must be nonnegative");
  Dataset ds;
  ds.name = "mackey-glass";
  ds.inputs.assign(s.begin(), s.end() - 1);
  ds.targets.assign(s.begin() + 1, s.end());
  ds.split = default_split(n);
  return ds;
}

// ---------------------------------------------------------------- Santa Fe

// One nonnegative integer per line; blank lines are skipped.
inline std::vector<double> read_santa_fe_raw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Santa Fe file " + path.string());
  std::vector<double> v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(b, e, value);
    if (ec != std::errc{} || ptr != e || value < 0) {
      throw IoError("Santa Fe parse error in " + path.string() + ": '" + line + "'", lineno);
    }
    v.push_back(static_cast<double>(value));
  }
  return v;
}

// Max-scaled excerpt of `count` samples starting at `offset`; `count` = 0
// reads to the end of the file.
inline std::vector<double> santa_fe_series(const std::filesystem::path& path, std::size_t offset = 0,
                                           std::size_t count = 0) {
  std::vector<double> raw = read_santa_fe_raw(path);
  if (raw.empty()) throw IoError("Santa Fe file " + path.string() + " is empty");
  if (offset >= raw.size()) throw IoError("Santa Fe offset beyond end of " + path.string());
  const std::size_t end = count == 0 ? raw.size() : std::min(raw.size(), offset + count);
  std::vector<double> s(raw.begin() + static_cast<std::ptrdiff_t>(offset), raw.begin() + static_cast<std::ptrdiff_t>(end));
  const double mx = *std::max_element(s.begin(), s.end());
  if (!(mx > 0.0)) throw IoError("Santa Fe excerpt in " + path.string() + " is all zeros");
  for (double& x : s) x /= mx;
  return s;
}

inline Dataset santa_fe_load(const std::filesystem::path& path, std::size_t offset = 0, std::size_t count = 0) {
  const std::vector<double> s = santa_fe_series(path, offset, count);
  if (s.size() < 2) throw IoError("Santa Fe excerpt in " + path.string() + " needs at least two samples");
  Dataset ds;
  ds.name = "santa-fe";
  ds.inputs.assign(s.begin(), s.end() - 1);
  ds.targets.assign(s.begin() + 1, s.end());
  ds.split = default_split(ds.inputs.size());
  return ds;
}

// ---------------------------------------------------------------- monomial

inline std::vector<double> uniform_grid(std::size_t points) {
  detail::require(points >= 2, "uniform_grid: need at least two points");
  std::vector<double> g(points);
  const double denom = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = static_cast<double>(i) / denom;
  return g;
}

// Targets x^n; grid points below `train_cutoff` train, the rest test.
inline Dataset monomial(int n_exp, std::vector<double> grid, double train_cutoff = 0.9) {
  detail::require(!grid.empty(), "monomial: empty grid");
  detail::require(train_cutoff > 0.0 && train_cutoff < 1.0, "monomial: cutoff must lie in (0,1)");
  detail::require(std::is_sorted(grid.begin(), grid.end()), "monomial: grid must be sorted");
  for (double x : grid) detail::require(x >= 0.0 && x <= 1.0, "monomial: grid outside [0,1]");
  Dataset ds;
  ds.name = "monomial";
  ds.targets.reserve(grid.size());
  std::size_t train = 0;
  for (double x : grid) {
    ds.targets.push_back(std::pow(x, n_exp));
    if (x < train_cutoff) ++train;
  }
  ds.inputs = std::move(grid);
  ds.split = {0, train, ds.inputs.size() - train};
  return ds;
}

// ---------------------------------------------------------------- CSV

inline std::string dataset_csv(const Dataset& ds) {
  std::string out = "t,x,y\n";
  for (std::size_t t = 0; t < ds.size(); ++t) {
    out += std::to_string(t) + "," + format_double(ds.inputs[t]) + "," + format_double(ds.targets[t]) + "\n";
  }
  return out;
}

inline Dataset dataset_from_csv(const std::string& text, const std::string& name = "csv") {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  Dataset ds;
  ds.name = name;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "t,x,y") throw IoError("dataset CSV: expected header t,x,y", 1);
      continue;
    }
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw IoError("dataset CSV: expected three columns", lineno);
    try {
      std::size_t used = 0;
      const std::string xs = line.substr(c1 + 1, c2 - c1 - 1);
      const std::string ys = line.substr(c2 + 1);
      const double x = std::stod(xs, &used);
      if (used != xs.size()) throw std::invalid_argument("x");
      const double y = std::stod(ys, &used);
      if (used != ys.size()) throw std::invalid_argument("y");
      ds.inputs.push_back(x);
      ds.targets.push_back(y);
    } catch (const std::exception&) {
      throw IoError("dataset CSV: malformed number", lineno);
    }
  }
  if (lineno == 0) throw IoError("dataset CSV: empty input");
  ds.split = default_split(ds.size());
  return ds;
}

}  // namespace qmem
