#pragma once

// Classical feedback law of the memristor: the update-mode detection
// probability p2 drives the reflectivity R of the memristor interferometer.

#include <qmem/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numbers>
#include <span>
#include <string>
#include <variant>

namespace qmem {

// R_t = clamp((1/m) * sum over the window of (gain * p2 + offset)).
// The window holds the last m outcomes before the current step. With
// `literal_bounds` the window holds m + 1 outcomes and the sum is still
// divided by m.
struct MovingAverage {
  std::size_t window = 1;
  double gain = 1.0;
  double offset = 0.0;
  bool literal_bounds = false;
};

// R_t = R_{t-1} + (p2_{t-1} - R_{t-1}) / decay.
struct ExpMovingAverage {
  double decay = 1.0;
};

struct Frozen {
  double r = 0.5;
};

using FeedbackRule = std::variant<MovingAverage, ExpMovingAverage, Frozen>;

inline void validate(const FeedbackRule& rule) {
  if (const auto* ma = std::get_if<MovingAverage>(&rule)) {
    detail::require(ma->window >= 1, "MovingAverage: window must be >= 1");
    detail::require(std::isfinite(ma->gain) && std::isfinite(ma->offset),
                    "MovingAverage: gain and offset must be finite");
  } else if (const auto* ema = std::get_if<ExpMovingAverage>(&rule)) {
    detail::require(ema->decay >= 1.0 && std::isfinite(ema->decay),
                    "ExpMovingAverage: decay must be >= 1");
  } else {
    const double r = std::get<Frozen>(rule).r;
    detail::require(r >= 0.0 && r <= 1.0, "Frozen: reflectivity outside [0,1]");
  }
}

struct MemristorState {
  double r = 0.5;
  std::deque<double> history;  // past values of gain*p2+offset (MA) or p2
  std::size_t t = 0;
  std::size_t clamp_events = 0;
};

inline MemristorState initial_state(double r0) {
  detail::require(r0 >= 0.0 && r0 <= 1.0, "initial reflectivity outside [0,1]");
  MemristorState s;
  s.r = r0;
  return s;
}

// Internal MZI phase realizing reflectivity r: 2 acos(sqrt(r)).
inline double phase_of(double r) {
  detail::require(r >= 0.0 && r <= 1.0, "phase_of: reflectivity outside [0,1]");
  return 2.0 * std::acos(std::sqrt(r));
}

inline MemristorState update(MemristorState s, const FeedbackRule& rule, double p2) {
  detail::require(p2 >= 0.0 && p2 <= 1.0 && std::isfinite(p2), "update: p2 outside [0,1]");
  ++s.t;
  if (const auto* ma = std::get_if<MovingAverage>(&rule)) {
    const std::size_t cap = ma->literal_bounds ? ma->window + 1 : ma->window;
    s.history.push_back(ma->gain * p2 + ma->offset);
    while (s.history.size() > cap) s.history.pop_front();
    double sum = 0.0;
    for (double v : s.history) sum += v;
    const std::size_t n = s.history.size();
    const double divisor = static_cast<double>(ma->literal_bounds && n > ma->window ? ma->window : n);
    const double raw = sum / divisor;
    const double clamped = std::clamp(raw, 0.0, 1.0);
    if (clamped != raw || !std::isfinite(raw)) ++s.clamp_events;
    s.r = std::isfinite(raw) ? clamped : 0.5;
  } else if (const auto* ema = std::get_if<ExpMovingAverage>(&rule)) {
    s.history.assign(1, p2);
    s.r = s.r + (p2 - s.r) / ema->decay;
  } else {
    s.history.assign(1, p2);
  }
  return s;
}

// Solved EMA recursion:
// R_t = (1-1/m)^t R_0 + (1/m) sum_i (1-1/m)^{t-1-i} p_i.
inline double closed_form_ema(double r0, std::span<const double> p2_seq, double decay) {
  detail::require(decay >= 1.0, "closed_form_ema: decay must be >= 1");
  const double q = 1.0 - 1.0 / decay;
  const std::size_t t = p2_seq.size();
  double acc = std::pow(q, static_cast<double>(t)) * r0;
  for (std::size_t i = 0; i < t; ++i) {
    acc += std::pow(q, static_cast<double>(t - 1 - i)) * p2_seq[i] / decay;
  }
  return acc;
}

inline std::string to_string(const FeedbackRule& rule) {
  if (const auto* ma = std::get_if<MovingAverage>(&rule)) {
    return "ma:" + std::to_string(ma->window) + "," + std::to_string(ma->gain) + "," +
           std::to_string(ma->offset);
  }
  if (const auto* ema = std::get_if<ExpMovingAverage>(&rule)) {
    return "ema:" + std::to_string(ema->decay);
  }
  return "frozen:" + std::to_string(std::get<Frozen>(rule).r);
}

}  // namespace qmem
