#pragma once

#include <qmem/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace qmem::stats {

inline double mean(std::span<const double> v) {
  detail::require(!v.empty(), "mean: empty input");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double stddev(std::span<const double> v) {
  detail::require(!v.empty(), "stddev: empty input");
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// Linear interpolation between closest ranks, q in [0, 1].
inline double percentile(std::span<const double> v, double q) {
  detail::require(!v.empty(), "percentile: empty input");
  detail::require(q >= 0.0 && q <= 1.0, "percentile: q outside [0,1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size() && a.size() >= 2, "pearson: need two equal-length series");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  detail::require(saa > 0.0 && sbb > 0.0, "pearson: constant series");
  return sab / std::sqrt(saa * sbb);
}

// Correlation between s_t and s_{t+tau}.
inline double lag_correlation(std::span<const double> s, std::size_t tau) {
  detail::require(tau >= 1 && s.size() > tau + 1, "lag_correlation: series too short for lag");
  return pearson(s.first(s.size() - tau), s.subspan(tau));
}

}  // namespace qmem::stats
