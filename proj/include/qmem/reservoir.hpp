#pragma once

// Time-stepped photonic reservoir. Per input x_t:
//   encode x_t on (A, B)  ->  U1 on (A, B)  ->  memristor MZI on (B, C)
//   ->  U2 on (A, B)  ->  detection probabilities  ->  feedback update.
// The reflectivity used at step t depends only on outcomes of steps < t.

#include <qmem/encoding.hpp>
#include <qmem/error.hpp>
#include <qmem/io.hpp>
#include <qmem/memristor.hpp>
#include <qmem/optics.hpp>

#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qmem {

struct MziPhases {
  double theta = std::numbers::pi;  // pi: no coupling between the pair
  double psi = 0.0;

  static MziPhases identity() noexcept { return {}; }
};

// Which output of the memristor MZI is routed to the update mode.
//   Cross: mode C receives the cross-coupled power R |amp_B|^2.
//   Bar:   mode C receives the bar power (1 - R) |amp_B|^2.
enum class ReflectivityConvention { Cross, Bar };

inline std::string to_string(ReflectivityConvention c) {
  return c == ReflectivityConvention::Cross ? "cross" : "bar";
}

inline ReflectivityConvention convention_from_string(const std::string& s) {
  if (s == "cross") return ReflectivityConvention::Cross;
  if (s == "bar") return ReflectivityConvention::Bar;
  throw DomainError("unknown reflectivity convention: " + s);
}

struct ReservoirConfig {
  EncodingScheme scheme = EncodingScheme::SqrtDirect;
  MziPhases u1{};
  MziPhases u2{};
  FeedbackRule rule = ExpMovingAverage{4.0};
  double r0 = 0.5;
  ReflectivityConvention convention = ReflectivityConvention::Cross;
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
};

inline void validate(const ReservoirConfig& cfg) {
  detail::require(std::isfinite(cfg.u1.theta) && std::isfinite(cfg.u1.psi) &&
                      std::isfinite(cfg.u2.theta) && std::isfinite(cfg.u2.psi),
                  "ReservoirConfig: phases must be finite");
  detail::require(cfg.r0 >= 0.0 && cfg.r0 <= 1.0, "ReservoirConfig: r0 outside [0,1]");
  detail::require(!cfg.shots || *cfg.shots >= 1, "ReservoirConfig: shots must be >= 1");
  validate(cfg.rule);
}

struct FeatureMatrix {
  std::vector<Probabilities> rows;
  std::vector<double> r_trace;
  std::size_t clamp_events = 0;

  std::size_t size() const noexcept { return rows.size(); }
};

// Memristor interferometer on (B, C) for reflectivity r.
inline Unitary3 memristor_unitary(double r, ReflectivityConvention convention) {
  const double coupled = convention == ReflectivityConvention::Cross ? r : 1.0 - r;
  return embed(mzi_unitary(phase_of(std::clamp(coupled, 0.0, 1.0)), 0.0), Mode::B, Mode::C);
}

// Output probabilities for one step at fixed reflectivity.
inline Probabilities step_probabilities(double x, double r, const ReservoirConfig& cfg,
                                        const Unitary3& u1, const Unitary3& u2) {
  PhotonState s = encode(x, cfg.scheme);
  s = apply(u1, s);
  s = apply(memristor_unitary(r, cfg.convention), s);
  s = apply(u2, s);
  return probabilities(s);
}

inline FeatureMatrix run(std::span<const double> xs, const ReservoirConfig& cfg) {
  validate(cfg);
  const Unitary3 u1 = embed(mzi_unitary(cfg.u1.theta, cfg.u1.psi), Mode::A, Mode::B);
  const Unitary3 u2 = embed(mzi_unitary(cfg.u2.theta, cfg.u2.psi), Mode::A, Mode::B);

  MemristorState mem = initial_state(cfg.r0);
  if (const auto* fr = std::get_if<Frozen>(&cfg.rule)) mem.r = fr->r;

  std::mt19937_64 rng(cfg.seed);
  FeatureMatrix out;
  out.rows.reserve(xs.size());
  out.r_trace.reserve(xs.size());
  for (double x : xs) {
    Probabilities p = step_probabilities(x, mem.r, cfg, u1, u2);
    if (cfg.shots) p = frequencies(sample_counts(p, *cfg.shots, rng));
    out.rows.push_back(p);
    out.r_trace.push_back(mem.r);
    mem = update(std::move(mem), cfg.rule, std::clamp(p[2], 0.0, 1.0));
  }
  out.clamp_events = mem.clamp_events;
  return out;
}

struct FeaturePair {
  FeatureMatrix feedback;
  FeatureMatrix frozen;
};

// With/without feedback on the same inputs. The second config must use the
// Frozen rule.
inline FeaturePair run_pair(std::span<const double> xs, const ReservoirConfig& with_feedback,
                            const ReservoirConfig& frozen) {
  detail::require(std::holds_alternative<Frozen>(frozen.rule),
                  "run_pair: second config must use the Frozen rule");
  return {run(xs, with_feedback), run(xs, frozen)};
}

inline std::string features_csv(const FeatureMatrix& fm) {
  std::string out = "t,p0,p1,p2,R\n";
  for (std::size_t t = 0; t < fm.rows.size(); ++t) {
    out += std::to_string(t);
    for (double v : fm.rows[t]) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += format_double(fm.r_trace[t]);
    out += '\n';
  }
  return out;
}

}  // namespace qmem
