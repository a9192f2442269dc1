#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "wavekk/core.hpp"
#include "wavekk/wavepacket.hpp"

namespace wavekk {

/// Uniform real-time grid, t_k = t0 + k dt for k = 0 .. n-1.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n = 0;

  double t(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return t(n - 1); }
  double length() const { return static_cast<double>(n - 1) * dt; }

  void validate() const {
    if (!(std::isfinite(t0) && std::isfinite(dt) && dt > 0.0))
      throw InputError("TimeGrid: need finite t0 and dt > 0");
    if (n < 16) throw InputError("TimeGrid: need at least 16 samples");
  }
};

namespace detail {

// exp(z) - 1 without cancellation for small z.
inline Complex cexpm1(Complex z) {
  if (z.real() > 700.0) return std::exp(z);  // the -1 is invisible
  const double em = std::expm1(z.real());
  const double cv = std::cos(z.imag());
  const double sv = std::sin(z.imag());
  const double sh = std::sin(0.5 * z.imag());
  return {em * cv - 2.0 * sh * sh, (em + 1.0) * sv};
}

// Reduce z by the nearest multiple of 2 pi i; exp is unchanged and the
// distance to the nearest zero of 1 - e^z becomes directly representable.
// Skipped for astronomically large imaginary parts where the reduction
// itself would be meaningless in double precision.
inline Complex reduce_mod_2pi_i(Complex z) {
  if (std::abs(z.imag()) >= 1e15) return z;
  const double k = std::round(z.imag() / (2.0 * pi));
  return {z.real(), z.imag() - 2.0 * pi * k};
}

}  // namespace detail

/// Exponent zeta of the difference function, chi' = 1 - e^{zeta}, with
///   zeta(t) = -4 x (2 i K Delta^2 + a) / (4 Delta^2 + 2 i t / m).
/// Simple pole at t = i t_d (guarded).
inline ComplexTime chi_exponent(const PacketParams& p, double x, ComplexTime t) {
  p.validate();
  require_observation_point(x);
  detail::check_singular_time(p, t);
  const double d2 = p.delta * p.delta;
  const Complex num = -4.0 * x * (Complex(0.0, 2.0 * p.K * d2) + p.a);
  const Complex den = 4.0 * d2 + Complex(0.0, 2.0) * t / p.m;
  return num / den;
}

/// Same exponent written on the characteristic scales,
///   zeta(t) = 2 i pi n_r(x) (t_r - i t_d) / (t - i t_d).
/// Equal to chi_exponent to round-off; kept as an independent algebraic
/// route for cross-checking.
inline ComplexTime chi_exponent_scaled(const PacketParams& p, double x, ComplexTime t) {
  const DerivedScales s = derived_scales(p, x);
  detail::check_singular_time(p, t);
  const Complex pole(0.0, s.t_d);
  return Complex(0.0, 2.0 * pi * s.n_r) * (s.t_r - pole) / (t - pole);
}

/// d zeta / d t = -zeta * (2 i / m) / (4 Delta^2 + 2 i t / m).
inline Complex chi_exponent_derivative(const PacketParams& p, double x, ComplexTime t) {
  const Complex zeta = chi_exponent(p, x, t);
  const Complex den = 4.0 * p.delta * p.delta + Complex(0.0, 2.0) * t / p.m;
  return -zeta * Complex(0.0, 2.0 / p.m) / den;
}

/// Difference function chi'(x,t) = 1 - psi(-x,t)/psi(x,t) = 1 - e^{zeta}.
/// Evaluated through the 2 pi i reduced exponent so values near the zeros
/// keep full relative accuracy.
inline Amplitude chi_prime(const PacketParams& p, double x, ComplexTime t) {
  const Complex zeta = detail::reduce_mod_2pi_i(chi_exponent(p, x, t));
  return -detail::cexpm1(zeta);
}

/// Convergent difference function
///   chi(x,t) = (4 Delta^2 + 2it/m) / (4x (2 i K Delta^2 + a)) * (1 - e^{-w})
///            = (e^{zeta} - 1) / zeta,
/// which tends to 1 as |t| -> infinity so that ln chi is integrable.
inline Amplitude chi(const PacketParams& p, double x, ComplexTime t) {
  const Complex zeta = chi_exponent(p, x, t);
  if (std::abs(Complex(0.0, 2.0 * p.K * p.delta * p.delta) + p.a) == 0.0)
    throw InputError("chi: degenerate parameters, 2 i K Delta^2 + a = 0");
  if (std::abs(zeta) < 1e-300) return {1.0, 0.0};  // |t| effectively infinite
  return detail::cexpm1(detail::reduce_mod_2pi_i(zeta)) / zeta;
}

/// Which of the two difference functions a log path follows.
enum class ChiKind : std::uint8_t { difference, convergent };

/// Pointwise overflow-safe logarithm of chi'. Outside |Re zeta| <= 700 the
/// direct value is not representable and the asymptotic branches are used:
///   Re zeta >  700 :  ln chi' = zeta + i pi            (chi' ~ -e^{zeta})
///   Re zeta < -700 :  ln chi' = -e^{zeta} ~ 0          (chi' ~ 1)
/// The phase is the natural analytic branch, not reduced.
inline LogComplex log_chi_prime(const PacketParams& p, double x, ComplexTime t) {
  const Complex zeta = chi_exponent(p, x, t);
  if (zeta.real() > 700.0) return {zeta.real(), zeta.imag() + pi};
  if (zeta.real() < -700.0) return {0.0, 0.0};
  const Complex c = -detail::cexpm1(detail::reduce_mod_2pi_i(zeta));
  return {std::log(std::abs(c)), std::arg(c)};
}

/// Pointwise logarithm of chi = chi' / (-zeta): the chi' branches shifted by
/// -Log(-zeta).
inline LogComplex log_chi(const PacketParams& p, double x, ComplexTime t) {
  const Complex zeta = chi_exponent(p, x, t);
  const Complex log_w = std::log(-zeta);  // w = -zeta is the prefactor denominator
  if (zeta.real() > 700.0)
    return {zeta.real() - log_w.real(), zeta.imag() + pi - log_w.imag()};
  if (zeta.real() < -700.0) return {-log_w.real(), -log_w.imag()};
  const Complex c = detail::cexpm1(detail::reduce_mod_2pi_i(zeta)) / zeta;
  return {std::log(std::abs(c)), std::arg(c)};
}

/// Log-modulus floor: samples with |chi| below this are clamped and flagged
/// (ln|chi| is integrable across a simple zero but not representable at it).
inline constexpr double chi_log_floor = -29.933606208922594;  // ln 1e-13

struct ChiPath {
  TimeGrid grid;
  std::vector<double> log_mod;
  std::vector<double> phase;      // branch-continuous along the path
  std::vector<double> raw_phase;  // principal branch, shows the +-2pi jumps
  std::vector<std::uint8_t> clamped;
};

/// Evaluate ln(chi or chi') along a uniform real-time grid with the phase
/// unwrapped by nearest-branch continuation. Samples in the asymptotic
/// regime take the analytic branch directly (with the i pi sign chosen to
/// continue the running phase); elsewhere adjacent raw phases must stay
/// clear of the +-pi ambiguity or the grid is too coarse to unwrap.
inline ChiPath log_chi_path(const PacketParams& p, double x, const TimeGrid& grid,
                            ChiKind kind = ChiKind::convergent) {
  grid.validate();
  ChiPath out;
  out.grid = grid;
  out.log_mod.resize(grid.n);
  out.phase.resize(grid.n);
  out.raw_phase.resize(grid.n);
  out.clamped.assign(grid.n, 0);

  double prev_unwrapped = 0.0;
  double prev_raw = 0.0;
  double wind = 0.0;  // integer-valued while the run stays in the direct regime
  bool prev_asymptotic = false;
  for (std::size_t k = 0; k < grid.n; ++k) {
    const ComplexTime t(grid.t(k), 0.0);
    const Complex zeta = chi_exponent(p, x, t);
    const bool asymptotic = std::abs(zeta.real()) > 700.0;
    const LogComplex lc =
        kind == ChiKind::convergent ? log_chi(p, x, t) : log_chi_prime(p, x, t);

    double raw, unwrapped;
    if (asymptotic) {
      // lc.phase carries the analytic branch; flip the i pi term (a 2 pi
      // shift) when that lands closer to the running phase.
      unwrapped = lc.phase;
      if (k > 0 &&
          std::abs(unwrapped - 2.0 * pi - prev_unwrapped) < std::abs(unwrapped - prev_unwrapped))
        unwrapped -= 2.0 * pi;
      raw = std::remainder(unwrapped, 2.0 * pi);
    } else {
      raw = lc.phase;  // principal branch from atan2
      if (k == 0) {
        wind = 0.0;
      } else if (prev_asymptotic) {
        wind = std::round((prev_unwrapped - raw) / (2.0 * pi));
      } else {
        const double diff = raw - prev_raw;
        const double delta = std::remainder(diff, 2.0 * pi);
        if (std::abs(delta) > 0.9 * pi)
          throw NumericError(
              "log_chi_path: adjacent raw phases within 10% of pi; grid too coarse near a "
              "near-real zero");
        wind -= std::round((diff - delta) / (2.0 * pi));
      }
      unwrapped = raw + 2.0 * pi * wind;
    }

    double lm = lc.log_mod;
    if (lm < chi_log_floor) {
      lm = chi_log_floor;
      out.clamped[k] = 1;
    }
    out.log_mod[k] = lm;
    out.raw_phase[k] = raw;
    out.phase[k] = unwrapped;
    prev_unwrapped = unwrapped;
    prev_raw = raw;
    prev_asymptotic = asymptotic;
  }
  return out;
}

}  // namespace wavekk
