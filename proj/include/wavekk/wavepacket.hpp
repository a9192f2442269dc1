#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "wavekk/core.hpp"
#include "wavekk/quadrature.hpp"

namespace wavekk {

namespace detail {

// Branch point / essential singularity of the free packet sits at
// t = i t_d = 2 i m delta^2, where 4 delta^2 + 2 i t / m vanishes.
inline void check_singular_time(const PacketParams& p, ComplexTime t, double guard = 1e-9) {
  const double td = dispersion_time(p);
  if (std::abs(t - ComplexTime(0.0, td)) <= guard * td)
    throw NumericError("evaluation time inside the guard radius of the branch point t = i t_d");
}

}  // namespace detail

/// Log-form value of the freely evolving Gaussian packet
///   psi(x,a,t) = (Delta + it/(2 m Delta))^{-1/2}
///               * exp[ -((x-a)^2 - 4 i Delta^2 K (x - a - K t/(2m))) / (4 Delta^2 + 2 i t/m) ]
/// at a (possibly complex) time t. The phase is the natural branch of the
/// analytic expression, not reduced mod 2 pi.
inline LogComplex free_psi_log(const PacketParams& p, double x, ComplexTime t) {
  p.validate();
  if (!std::isfinite(x) || !std::isfinite(t.real()) || !std::isfinite(t.imag()))
    throw InputError("free_psi: non-finite argument");
  detail::check_singular_time(p, t);

  const double d2 = p.delta * p.delta;
  const Complex denom = 4.0 * d2 + Complex(0.0, 2.0) * t / p.m;
  const double u = x - p.a;
  const Complex drift = u - p.K * t / (2.0 * p.m);
  const Complex expo = -(u * u - Complex(0.0, 4.0) * d2 * p.K * drift) / denom;
  const Complex pref = -0.5 * std::log(p.delta + Complex(0.0, 1.0) * t / (2.0 * p.m * p.delta));
  const Complex lg = pref + expo;
  return {lg.real(), lg.imag()};
}

/// Direct complex value; evaluated through the log form and exponentiated,
/// so the modulus stays meaningful for extreme parameter sets (the phase of
/// the returned complex is then reduced by cos/sin as usual).
inline Amplitude free_psi(const PacketParams& p, double x, ComplexTime t) {
  return free_psi_log(p, x, t).value();
}

struct QuadratureSpec {
  double abs_tol = 1e-12;
  int max_depth = 48;
};

struct NormalizationResult {
  double value = 0.0;       // N
  double quad_error = 0.0;  // quadrature error estimate on N^{-2}
};

namespace detail {

inline double packet_spread(const PacketParams& p, double t) {
  const double s2 = p.delta * p.delta + t * t / (4.0 * p.delta * p.delta * p.m * p.m);
  return std::sqrt(s2);
}

}  // namespace detail

/// Normalization constant of the image-method solution,
///   N = [ integral_{-inf}^{0} |psi(x,t) - psi(-x,t)|^2 dx ]^{-1/2},
/// independent of the evaluation time. Computed by adaptive panels on
/// [a - 10(Delta + spread(t)), 0] seeded around the packet center so the
/// narrow-packet limit cannot slip between coarse panels.
inline NormalizationResult normalization(const PacketParams& p, double t_eval,
                                         const QuadratureSpec& spec = {}) {
  p.validate();
  if (!std::isfinite(t_eval)) throw InputError("normalization: non-finite time");

  const double s = p.delta + detail::packet_spread(p, t_eval);
  const double x_lo = p.a - 10.0 * s;
  std::vector<double> brk{x_lo, p.a - 3.0 * s, p.a + 3.0 * s, 0.0};
  for (double& b : brk) b = std::min(0.0, std::max(x_lo, b));
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

  const auto integrand = [&](double x) {
    const Amplitude d = free_psi(p, x, t_eval) - free_psi(p, -x, t_eval);
    return std::norm(d);
  };
  const QuadratureResult q =
      integrate_adaptive(integrand, std::span<const double>(brk), spec.abs_tol, spec.max_depth);

  // With the 1/sqrt(Delta) convention the full-line mass of one packet is
  // sqrt(2 pi) at all times; a difference integral vanishing against that
  // scale means the image cancels the packet (a -> 0 with K -> 0).
  const double full_mass = std::sqrt(2.0 * pi);
  if (!(q.value > 1e-10 * full_mass))
    throw NumericError("normalization: degenerate reflection, |psi(x)-psi(-x)|^2 integral vanishes");

  NormalizationResult out;
  out.value = 1.0 / std::sqrt(q.value);
  out.quad_error = q.error;
  return out;
}

/// Reflected packet against the hard wall: parameters plus the normalization
/// constant, computed once at construction.
struct ReflectedState {
  PacketParams params;
  double norm = 0.0;

  static ReflectedState create(const PacketParams& p, const QuadratureSpec& spec = {}) {
    ReflectedState st;
    st.params = p;
    st.norm = normalization(p, 0.0, spec).value;
    return st;
  }
};

/// Image-method solution Psi(x,t) = N [psi(x,a,t) - psi(-x,a,t)] for x < 0,
/// identically zero on the wall.
inline Amplitude reflected_psi(const ReflectedState& st, double x, double t) {
  if (!(std::isfinite(x) && x <= 0.0))
    throw InputError("reflected_psi: x must be <= 0 (the wall occupies x >= 0)");
  if (x == 0.0) return {0.0, 0.0};
  return st.norm * (free_psi(st.params, x, t) - free_psi(st.params, -x, t));
}

}  // namespace wavekk
