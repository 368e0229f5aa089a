#pragma once

// Single-photon linear optics over three spatial modes A, B, C.
//
// A photon in superposition over the modes is a normalized 3-vector of
// complex amplitudes. Mach-Zehnder interferometers act on an ordered pair of
// modes as 2x2 unitaries and are embedded into 3x3 operators.
//
// MZI convention (real form plus an external phase on the first column):
//
//   U(theta, psi) = [ e^{i psi} sin(theta/2)    cos(theta/2) ]
//                   [ e^{i psi} cos(theta/2)   -sin(theta/2) ]
//
// so the power coupled across the pair is cos^2(theta/2). Global-phase
// conventions only move amplitudes around; probabilities and purities are
// unaffected.

#include <qmem/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace qmem {

using cplx = std::complex<double>;

enum class Mode : std::size_t { A = 0, B = 1, C = 2 };

constexpr std::size_t index(Mode m) noexcept { return static_cast<std::size_t>(m); }

using Probabilities = std::array<double, 3>;
using Counts = std::array<std::uint64_t, 3>;

struct PhotonState {
  std::array<cplx, 3> amp{cplx{1.0, 0.0}, cplx{}, cplx{}};

  double norm2() const noexcept {
    return std::norm(amp[0]) + std::norm(amp[1]) + std::norm(amp[2]);
  }
};

struct Unitary2 {
  std::array<std::array<cplx, 2>, 2> m{};

  static Unitary2 identity() noexcept {
    Unitary2 u;
    u.m[0][0] = u.m[1][1] = 1.0;
    return u;
  }
};

struct Unitary3 {
  std::array<std::array<cplx, 3>, 3> m{};
  // Mode pair this operator was embedded from; equal modes mean "general".
  std::pair<Mode, Mode> acts_on{Mode::A, Mode::A};

  static Unitary3 identity() noexcept {
    Unitary3 u;
    for (std::size_t i = 0; i < 3; ++i) u.m[i][i] = 1.0;
    return u;
  }
};

// Dual-rail reduced state over {|0> = photon in D, |1> = photon in E} with the
// vacuum branch (photon lost to the update mode) folded into |0><0|.
struct ReducedState {
  std::array<std::array<cplx, 2>, 2> rho{};
};

// Largest |(U^dagger U - I)_ij|.
template <std::size_t N>
double unitarity_defect(const std::array<std::array<cplx, N>, N>& u) noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      cplx acc{};
      for (std::size_t k = 0; k < N; ++k) acc += std::conj(u[k][i]) * u[k][j];
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

inline Unitary2 mzi_unitary(double theta, double psi) {
  detail::require(std::isfinite(theta) && std::isfinite(psi), "mzi_unitary: phases must be finite");
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  const cplx e = std::polar(1.0, psi);
  Unitary2 u;
  u.m = {{{e * s, cplx{c, 0.0}}, {e * c, cplx{-s, 0.0}}}};
  return u;
}

// Places `u` on the ordered pair (first, second); identity on the third mode.
inline Unitary3 embed(const Unitary2& u, Mode first, Mode second) {
  detail::require(first != second, "embed: modes must be distinct");
  Unitary3 out = Unitary3::identity();
  const std::array<std::size_t, 2> idx{index(first), index(second)};
  for (std::size_t i = 0; i < 2; ++i) {
    out.m[idx[i]][idx[i]] = 0.0;
  }
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) out.m[idx[i]][idx[j]] = u.m[i][j];
  }
  out.acts_on = {first, second};
  return out;
}

// Matrix product `later * earlier` (apply `earlier` first).
inline Unitary3 compose(const Unitary3& later, const Unitary3& earlier) noexcept {
  Unitary3 out;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      cplx acc{};
      for (std::size_t k = 0; k < 3; ++k) acc += later.m[i][k] * earlier.m[k][j];
      out.m[i][j] = acc;
    }
  }
  out.acts_on = {Mode::A, Mode::A};
  return out;
}

inline PhotonState apply(const Unitary3& u, const PhotonState& s) noexcept {
  PhotonState out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.amp[i] = u.m[i][0] * s.amp[0] + u.m[i][1] * s.amp[1] + u.m[i][2] * s.amp[2];
  }
  return out;
}

// Born-rule detection probabilities. Roundoff negatives are clamped and the
// triple is renormalized to sum to one.
inline Probabilities probabilities(const PhotonState& s) {
  Probabilities p{};
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    p[i] = std::max(0.0, std::norm(s.amp[i]));
    total += p[i];
  }
  detail::require(total > 0.0 && std::isfinite(total), "probabilities: state has zero norm");
  for (double& v : p) v /= total;
  return p;
}

// Multinomial detector counts for `shots` heralded photons, drawn as a chain
// of conditional binomials from the caller's engine.
template <class Engine>
Counts sample_counts(const Probabilities& p, std::uint64_t shots, Engine& rng) {
  detail::require(shots >= 1, "sample_counts: shots must be >= 1");
  Counts c{};
  std::uint64_t left = shots;
  double mass = 1.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double q = mass > 0.0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> draw(left, q);
    c[i] = left == 0 ? 0 : draw(rng);
    left -= c[i];
    mass -= p[i];
  }
  c[2] = left;
  return c;
}

inline Counts sample_counts(const Probabilities& p, std::uint64_t shots, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return sample_counts(p, shots, rng);
}

inline Probabilities frequencies(const Counts& c) noexcept {
  const double total = static_cast<double>(c[0] + c[1] + c[2]);
  return {static_cast<double>(c[0]) / total, static_cast<double>(c[1]) / total,
          static_cast<double>(c[2]) / total};
}

// Reduced output state of the memristor for a dual-rail input on (A, B).
// The memristor MZI couples a fraction `r` of mode B into the update mode C;
// tracing out C leaves the single-photon block on (D, E) plus a vacuum term of
// weight |amp_C|^2, which corresponds to |0> of the original beam-splitter
// memristor and is added onto rho_00.
inline ReducedState reduced_state(const PhotonState& input, double r) {
  detail::require(r >= 0.0 && r <= 1.0, "reduced_state: reflectivity outside [0,1]");
  detail::require(std::abs(std::norm(input.amp[2])) < 1e-24,
                  "reduced_state: input must be a dual-rail state on modes A,B");
  const double theta = 2.0 * std::acos(std::sqrt(r));
  const PhotonState out = apply(embed(mzi_unitary(theta, 0.0), Mode::B, Mode::C), input);

  ReducedState rs;
  const cplx d = out.amp[0];
  const cplx e = out.amp[1];
  rs.rho[0][0] = std::norm(d) + std::norm(out.amp[2]);
  rs.rho[0][1] = d * std::conj(e);
  rs.rho[1][0] = e * std::conj(d);
  rs.rho[1][1] = std::norm(e);
  return rs;
}

// Input (sqrt(1-x), e^{i phi} sqrt(x)): sin^2(alpha) = x, the encoding used for
// the on-chip tomography.
inline ReducedState reduced_state(double x_enc, double r, double phi) {
  detail::require(x_enc >= 0.0 && x_enc <= 1.0, "reduced_state: x outside [0,1]");
  detail::require(std::isfinite(phi), "reduced_state: phase must be finite");
  PhotonState in;
  in.amp = {cplx{std::sqrt(1.0 - x_enc), 0.0}, std::polar(std::sqrt(x_enc), phi), cplx{}};
  return reduced_state(in, r);
}

inline double purity(const ReducedState& s) noexcept {
  double acc = 0.0;
  for (const auto& row : s.rho) {
    for (const cplx& v : row) acc += std::norm(v);
  }
  return acc;
}

inline double trace(const ReducedState& s) noexcept {
  return s.rho[0][0].real() + s.rho[1][1].real();
}

// Closed form for the memristor output: 1 - 2 sin^4(alpha) R (1 - R).
inline double purity_closed_form(double sin2_alpha, double r) noexcept {
  return 1.0 - 2.0 * sin2_alpha * sin2_alpha * (r * (1.0 - r));
}

}  // namespace qmem
