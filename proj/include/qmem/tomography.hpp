#pragma once

// Pauli tomography of the memristor's dual-rail output state. The encoding
// interferometer prepares the input, the memristor acts on (B, C), and the
// last interferometer on (A, B) rotates the measurement basis. Expectations
// use only events detected on A or B; the update-mode weight is folded back
// into |0><0| when the density matrix is assembled.

#include <qmem/encoding.hpp>
#include <qmem/error.hpp>
#include <qmem/io.hpp>
#include <qmem/optics.hpp>
#include <qmem/reservoir.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qmem {

enum class PauliBasis { X, Y, Z };

// Hardware phase pair of the measurement MZI. The hardware internal phase is
// zero at the bar state, so the matrix used here is mzi_unitary(pi - phi, psi).
struct PauliSetting {
  PauliBasis basis = PauliBasis::Z;
  double phi_internal = 0.0;
  double psi_external = 0.0;
};

inline PauliSetting pauli_setting(PauliBasis b) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  switch (b) {
    case PauliBasis::X: return {b, half_pi, 0.0};
    case PauliBasis::Y: return {b, half_pi, half_pi};
    case PauliBasis::Z: return {b, 0.0, 0.0};
  }
  throw DomainError("unknown Pauli basis");
}

// Output state of encoding + memristor (cross convention) before the
// measurement interferometer.
inline PhotonState memristor_output(double x_enc, double r, EncodingScheme scheme) {
  detail::require(r >= 0.0 && r <= 1.0, "tomography: reflectivity outside [0,1]");
  return apply(memristor_unitary(r, ReflectivityConvention::Cross), encode(x_enc, scheme));
}

inline Probabilities measurement_probabilities(const PhotonState& s, const PauliSetting& setting) {
  const Unitary3 u =
      embed(mzi_unitary(std::numbers::pi - setting.phi_internal, setting.psi_external), Mode::A, Mode::B);
  return probabilities(apply(u, s));
}

struct PauliOutcome {
  double expectation = 0.0;
  double update_fraction = 0.0;  // share of events in the update mode
};

inline PauliOutcome measure_pauli_full(double x_enc, double r, const PauliSetting& setting,
                                       std::optional<std::uint64_t> shots = std::nullopt, std::uint64_t seed = 0,
                                       EncodingScheme scheme = EncodingScheme::SqrtFlipped) {
  Probabilities p = measurement_probabilities(memristor_output(x_enc, r, scheme), setting);
  if (shots) {
    std::mt19937_64 rng(seed);
    p = frequencies(sample_counts(p, *shots, rng));
  }
  const double kept = p[0] + p[1];
  if (!(kept > 1e-15)) throw DomainError("measure_pauli: no post-selected events");
  return {std::clamp((p[0] - p[1]) / kept, -1.0, 1.0), p[2]};
}

inline double measure_pauli(double x_enc, double r, const PauliSetting& setting,
                            std::optional<std::uint64_t> shots = std::nullopt, std::uint64_t seed = 0,
                            EncodingScheme scheme = EncodingScheme::SqrtFlipped) {
  return measure_pauli_full(x_enc, r, setting, shots, seed, scheme).expectation;
}

// Linear inversion rho = (I + <X> X + <Y> Y + <Z> Z) / 2 on the post-selected
// subspace, then (1 - p_F) rho + p_F |0><0|. With finite shots the Bloch
// vector is shrunk onto the unit ball (eigenvalues clipped at zero) and p_F
// is the update-mode fraction observed in the Z setting.
inline ReducedState reconstruct(double x_enc, double r, std::optional<std::uint64_t> shots = std::nullopt,
                                std::uint64_t seed = 0, EncodingScheme scheme = EncodingScheme::SqrtFlipped) {
  const PauliOutcome ox = measure_pauli_full(x_enc, r, pauli_setting(PauliBasis::X), shots, seed * 3 + 0, scheme);
  const PauliOutcome oy = measure_pauli_full(x_enc, r, pauli_setting(PauliBasis::Y), shots, seed * 3 + 1, scheme);
  const PauliOutcome oz = measure_pauli_full(x_enc, r, pauli_setting(PauliBasis::Z), shots, seed * 3 + 2, scheme);
  double bx = ox.expectation, by = oy.expectation, bz = oz.expectation;
  if (shots) {
    const double len = std::sqrt(bx * bx + by * by + bz * bz);
    if (len > 1.0) {
      bx /= len;
      by /= len;
      bz /= len;
    }
  }
  const double pf = oz.update_fraction;
  ReducedState rs;
  const double keep = 1.0 - pf;
  rs.rho[0][0] = keep * 0.5 * (1.0 + bz) + pf;
  rs.rho[1][1] = keep * 0.5 * (1.0 - bz);
  rs.rho[0][1] = keep * 0.5 * cplx{bx, -by};
  rs.rho[1][0] = keep * 0.5 * cplx{bx, by};
  return rs;
}

inline double purity_theory(double x_enc, double r) { return purity_closed_form(x_enc, r); }

struct TomographyPoint {
  double x = 0.0;
  double r = 0.0;
  double purity_reconstructed = 0.0;
  double purity_closed_form = 0.0;
};

// Sweeps every (x, R) pair. Points without post-selected events are skipped.
inline std::vector<TomographyPoint> tomography_grid(std::span<const double> xs, std::span<const double> rs,
                                                    std::optional<std::uint64_t> shots = std::nullopt,
                                                    std::uint64_t seed = 0) {
  std::vector<TomographyPoint> out;
  std::uint64_t k = 0;
  for (double x : xs) {
    for (double r : rs) {
      ++k;
      try {
        const ReducedState rho = reconstruct(x, r, shots, seed + k);
        out.push_back({x, r, purity(rho), purity_theory(x, r)});
      } catch (const DomainError&) {
      }
    }
  }
  return out;
}

inline std::string tomography_csv(std::span<const TomographyPoint> pts) {
  std::string out = "x,R,purity_reconstructed,purity_closed_form\n";
  for (const auto& p : pts) {
    out += format_double(p.x) + "," + format_double(p.r) + "," + format_double(p.purity_reconstructed) + "," +
           format_double(p.purity_closed_form) + "\n";
  }
  return out;
}

}  // namespace qmem
