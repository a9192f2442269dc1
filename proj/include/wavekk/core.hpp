#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace wavekk {

using Complex = std::complex<double>;

/// Point in the complex time plane, t = t' + i t''.
using ComplexTime = std::complex<double>;

/// Complex value of a wave function at one (x, t).
using Amplitude = std::complex<double>;

constexpr double pi = 3.14159265358979323846;

// Error taxonomy, mapped to CLI exit codes 2 / 3 / 4.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class RegimeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// (log-modulus, phase) form of a complex amplitude. Usable where the direct
/// value would over- or underflow. The phase carries whatever branch the
/// producer chose; path evaluators keep it continuous sample to sample.
struct LogComplex {
  double log_mod = 0.0;
  double phase = 0.0;

  Complex value() const {
    return std::exp(log_mod) * Complex(std::cos(phase), std::sin(phase));
  }
};

/// One physical scenario in reduced units (hbar divided out): the packet
/// starts at a < 0 with half-width delta and mean wavenumber K > 0, moving
/// right toward a hard wall at x = 0.
struct PacketParams {
  double m = 1.0;      // reduced mass, m_physical / hbar
  double a = -1.0;     // initial center position, < 0
  double K = 1.0;      // mean wavenumber, > 0
  double delta = 1.0;  // initial half-width, > 0
  std::string label;

  void validate() const {
    if (!(std::isfinite(m) && m > 0.0)) throw InputError("PacketParams: m must be finite and > 0");
    if (!(std::isfinite(delta) && delta > 0.0)) throw InputError("PacketParams: delta must be finite and > 0");
    if (!(std::isfinite(K) && K > 0.0)) throw InputError("PacketParams: K must be finite and > 0");
    if (!(std::isfinite(a) && a < 0.0)) throw InputError("PacketParams: a must be finite and < 0");
  }
};

/// Characteristic times and the dimensionless zero-count parameter at a
/// fixed observation point x < 0.
struct DerivedScales {
  double t_r = 0.0;  // reflection time, m|a|/K
  double t_d = 0.0;  // dispersion time, 2 m delta^2
  double E = 0.0;    // mean kinetic frequency, K^2/(2m)
  double n_r = 0.0;  // |x| K / pi
};

inline void require_observation_point(double x) {
  if (!(std::isfinite(x) && x < 0.0))
    throw InputError("observation point x must be finite and < 0 (the wall occupies x >= 0)");
}

inline double dispersion_time(const PacketParams& p) { return 2.0 * p.m * p.delta * p.delta; }
inline double reflection_time(const PacketParams& p) { return p.m * std::abs(p.a) / p.K; }

inline DerivedScales derived_scales(const PacketParams& p, double x) {
  p.validate();
  require_observation_point(x);
  DerivedScales s;
  s.t_r = reflection_time(p);
  s.t_d = dispersion_time(p);
  s.E = p.K * p.K / (2.0 * p.m);
  s.n_r = std::abs(x) * p.K / pi;
  return s;
}

/// True when n_r(x) < 1, i.e. |x| p < pi hbar: no zeros of the difference
/// function in the lower half t-plane, so modulus determines phase without a
/// Blaschke correction.
inline bool analyticity_threshold(const PacketParams& p, double x) {
  return derived_scales(p, x).n_r < 1.0;
}

}  // namespace wavekk
