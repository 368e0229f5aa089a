#pragma once

// Scalar-to-photon encodings. The photon enters in mode B and the first
// interferometer splits it over (A, B); mode C stays in vacuum.

#include <qmem/error.hpp>
#include <qmem/optics.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

namespace qmem {

enum class EncodingScheme {
  SqrtDirect,       // x -> (sqrt(x), sqrt(1-x), 0)
  AmplitudeDirect,  // x -> (x, sqrt(1-x^2), 0)
  SqrtFlipped,      // x -> (sqrt(1-x), sqrt(x), 0)
};

inline std::string to_string(EncodingScheme s) {
  switch (s) {
    case EncodingScheme::SqrtDirect: return "sqrt-direct";
    case EncodingScheme::AmplitudeDirect: return "amplitude-direct";
    case EncodingScheme::SqrtFlipped: return "sqrt-flipped";
  }
  return "unknown";
}

inline EncodingScheme encoding_from_string(std::string_view name) {
  if (name == "sqrt-direct") return EncodingScheme::SqrtDirect;
  if (name == "amplitude-direct") return EncodingScheme::AmplitudeDirect;
  if (name == "sqrt-flipped") return EncodingScheme::SqrtFlipped;
  throw DomainError("unknown encoding scheme: " + std::string(name));
}

// Amplitude on mode A.
inline double encoded_amp0(double x, EncodingScheme scheme) {
  detail::require(x >= 0.0 && x <= 1.0, "encode: x outside [0,1]");
  switch (scheme) {
    case EncodingScheme::SqrtDirect: return std::sqrt(x);
    case EncodingScheme::AmplitudeDirect: return x;
    case EncodingScheme::SqrtFlipped: return std::sqrt(1.0 - x);
  }
  throw DomainError("encode: unknown scheme");
}

inline PhotonState encode(double x, EncodingScheme scheme) {
  const double a0 = encoded_amp0(x, scheme);
  double a1 = 0.0;
  switch (scheme) {
    case EncodingScheme::SqrtDirect: a1 = std::sqrt(1.0 - x); break;
    case EncodingScheme::AmplitudeDirect: a1 = std::sqrt(std::max(0.0, 1.0 - x * x)); break;
    case EncodingScheme::SqrtFlipped: a1 = std::sqrt(x); break;
  }
  PhotonState s;
  s.amp = {cplx{a0, 0.0}, cplx{a1, 0.0}, cplx{}};
  return s;
}

// Internal phase of the encoding MZI for a photon injected in mode B. With
// the MZI convention of optics.hpp the power reaching mode A is cos^2(theta/2), so
// theta = 2 acos(amp0).
inline double encoding_phase(double x, EncodingScheme scheme) {
  return 2.0 * std::acos(std::clamp(encoded_amp0(x, scheme), 0.0, 1.0));
}

// State produced by the encoding MZI from a photon in mode B.
inline PhotonState encode_via_mzi(double x, EncodingScheme scheme) {
  PhotonState in;
  in.amp = {cplx{}, cplx{1.0, 0.0}, cplx{}};
  return apply(embed(mzi_unitary(encoding_phase(x, scheme), 0.0), Mode::A, Mode::B), in);
}

}  // namespace qmem
