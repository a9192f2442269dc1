#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "wavekk/core.hpp"
#include "wavekk/diff_fn.hpp"

namespace wavekk {

enum class HalfPlane : std::uint8_t { lower, upper, real_axis };

inline const char* to_string(HalfPlane h) {
  switch (h) {
    case HalfPlane::lower: return "lower";
    case HalfPlane::upper: return "upper";
    default: return "real_axis";
  }
}

struct ZeroRecord {
  int n = 0;                 // index, never 0
  ComplexTime t;             // polished location
  HalfPlane half_plane = HalfPlane::upper;
  double residual = 0.0;     // |chi'(t)| after polish
};

namespace detail {

inline HalfPlane classify_half_plane(double t_im, double t_d) {
  if (std::abs(t_im) < 1e-12 * t_d) return HalfPlane::real_axis;
  return t_im < 0.0 ? HalfPlane::lower : HalfPlane::upper;
}

}  // namespace detail

/// Closed-form zero of the difference function for index n != 0:
///   t'_n = t_r n_r / n,   t''_n = t_d (1 - n_r / n).
inline ComplexTime zero_location_closed_form(const DerivedScales& s, int n) {
  if (n == 0) throw InputError("zero index 0 has no finite zero");
  const double ratio = s.n_r / static_cast<double>(n);
  return {s.t_r * ratio, s.t_d * (1.0 - ratio)};
}

/// Closed-form zero locations for n in [n_lo, n_hi] (n = 0 skipped), each
/// polished by Newton iteration on chi' and required to sit at a genuine
/// zero: |chi'(t_n)| < 1e-10 after polish, and the polish must not move the
/// root by more than 1e-6 relative (a larger move means formula and
/// implementation disagree).
inline std::vector<ZeroRecord> zero_locations(const PacketParams& p, double x, int n_lo, int n_hi) {
  if (n_lo > n_hi) throw InputError("zero_locations: need n_lo <= n_hi");
  const DerivedScales s = derived_scales(p, x);

  std::vector<ZeroRecord> out;
  out.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
  for (int n = n_lo; n <= n_hi; ++n) {
    if (n == 0) continue;
    const ComplexTime seed = zero_location_closed_form(s, n);
    ComplexTime t = seed;
    for (int it = 0; it < 12; ++it) {
      const Complex zeta = detail::reduce_mod_2pi_i(chi_exponent(p, x, t));
      const Complex dzeta = chi_exponent_derivative(p, x, t);
      // Newton on f = 1 - e^zeta: f/f' = -(e^{-zeta} - 1)/zeta'
      const Complex step = detail::cexpm1(-zeta) / dzeta;
      t += step;
      if (std::abs(step) <= 1e-16 * (std::abs(t) + s.t_d)) break;
    }
    const double scale = std::max(std::abs(seed), 1e-300);
    if (std::abs(t - seed) > 1e-6 * scale)
      throw NumericError("zero_locations: Newton polish moved a root by more than 1e-6 relative");
    const double res = std::abs(chi_prime(p, x, t));
    if (!(res < 1e-10))
      throw NumericError("zero_locations: polished zero residual above 1e-10");
    out.push_back({n, t, detail::classify_half_plane(t.imag(), s.t_d), res});
  }
  return out;
}

/// Number of zeros strictly below the real axis: positive integers n with
/// n < n_r(x). An exactly-integer n_r puts that index on the axis, which is
/// counted by neither half. Returned as a double: the count is exact below
/// 2^53 and can reach ~1e31 for macroscopic parameter sets, far past any
/// integer type.
inline double lower_half_count(const PacketParams& p, double x) {
  const double n_r = derived_scales(p, x).n_r;
  if (n_r <= 1.0) return 0.0;
  const double fl = std::floor(n_r);
  return n_r == fl ? fl - 1.0 : fl;
}

/// Axis-aligned rectangle in the complex time plane.
struct TimeRect {
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;

  void validate() const {
    if (!(re_min < re_max && im_min < im_max))
      throw InputError("TimeRect: need re_min < re_max and im_min < im_max");
  }
  bool contains(ComplexTime t) const {
    return t.real() > re_min && t.real() < re_max && t.imag() > im_min && t.imag() < im_max;
  }
};

namespace detail {

inline double dist_point_segment(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  double s = len2 > 0.0 ? ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

// All zeros lie on the line t = i t_d + (t_r - i t_d) n_r / n. Checks the
// clearance precondition edge by edge: the pole guard covers |n| beyond
// nu_cap, the rest is enumerated from the projection of the edge onto the
// zero line.
inline void check_winding_clearance(const DerivedScales& s, const std::vector<Complex>& corners) {
  const Complex pole(0.0, s.t_d);
  const Complex dir(s.t_r, -s.t_d);
  const double dir_len = std::abs(dir);
  const double eps = 1e-6 * s.t_d;
  const double nu_cap = 1e6;
  const double pole_clearance = std::max(2.0 * eps, 2.0 * s.n_r * dir_len / nu_cap);

  for (std::size_t e = 0; e < 4; ++e) {
    const Complex a = corners[e], b = corners[(e + 1) % 4];
    const double pole_dist = dist_point_segment(pole, a, b);
    if (pole_dist <= pole_clearance)
      throw InputError("winding_number: rectangle boundary too close to the pole at i t_d");
    // Zeros closer to the pole than (pole_dist - eps) cannot reach this edge.
    const double n_pole_cap = std::ceil(s.n_r * dir_len / std::max(pole_dist - eps, eps));
    // Range of line parameter sigma (t = pole + sigma * dir) whose zeros could
    // come within eps of this edge.
    const double sa = ((a - pole).real() * dir.real() + (a - pole).imag() * dir.imag()) / (dir_len * dir_len);
    const double sb = ((b - pole).real() * dir.real() + (b - pole).imag() * dir.imag()) / (dir_len * dir_len);
    const double pad = (eps + std::abs(b - a)) / dir_len;
    const double s_lo = std::min(sa, sb) - pad, s_hi = std::max(sa, sb) + pad;
    for (const double sign : {1.0, -1.0}) {
      // sigma = n_r / n with n of one sign: n in [n_r/s_hi, n_r/s_lo]
      const double lo = sign > 0 ? s_lo : -s_hi;
      const double hi = sign > 0 ? s_hi : -s_lo;
      if (hi <= 0.0) continue;
      const double n_min = std::max(1.0, std::floor(s.n_r / std::max(hi, 1e-300)));
      double n_max = std::min(nu_cap, n_pole_cap);
      if (lo > 0.0) n_max = std::min(n_max, std::ceil(s.n_r / lo));
      for (double nd = n_min; nd <= n_max; ++nd) {
        const Complex z = pole + dir * (s.n_r / (sign * nd));
        if (dist_point_segment(z, a, b) <= eps)
          throw InputError("winding_number: rectangle boundary too close to a zero");
      }
    }
  }
}

}  // namespace detail

/// Argument-principle census: (1/2pi) times the total continuous change of
/// arg chi' around the rectangle boundary, counterclockwise. Independent of
/// the closed-form locations, so it serves as an oracle for them. The
/// boundary must keep 1e-6 t_d clear of every zero and of the pole at i t_d.
inline int winding_number(const PacketParams& p, double x, const TimeRect& rect,
                          int samples_per_edge) {
  rect.validate();
  if (samples_per_edge < 2) throw InputError("winding_number: need samples_per_edge >= 2");
  const DerivedScales s = derived_scales(p, x);

  const std::vector<Complex> corners{{rect.re_min, rect.im_min},
                                     {rect.re_max, rect.im_min},
                                     {rect.re_max, rect.im_max},
                                     {rect.re_min, rect.im_max}};
  detail::check_winding_clearance(s, corners);

  // One probe per boundary point: the log value of chi' plus the exponent
  // zeta. zeta is a Moebius function of t, injective along any segment, so
  // |zeta(b) - zeta(a)| measures the true motion of the exponent with no
  // branch ambiguity; bounding it rules out the arg of chi' spinning whole
  // turns between samples (which the wrapped phase difference alone cannot
  // see, particularly near the essential singularity at i t_d).
  struct Probe {
    LogComplex lc;
    Complex zeta;
  };
  const auto probe = [&](Complex t) -> Probe {
    return {log_chi_prime(p, x, t), chi_exponent(p, x, t)};
  };

  double total = 0.0;
  for (std::size_t e = 0; e < 4; ++e) {
    const Complex a = corners[e], b = corners[(e + 1) % 4];
    struct Seg {
      Complex a, b;
      Probe fa, fb;
      int depth;
    };
    std::vector<Seg> stack;
    Probe prev = probe(a);
    const Complex step = (b - a) / static_cast<double>(samples_per_edge);
    for (int i = 1; i <= samples_per_edge; ++i) {
      const Complex q = i == samples_per_edge ? b : a + static_cast<double>(i) * step;
      stack.push_back({a + static_cast<double>(i - 1) * step, q, prev, probe(q), 0});
      prev = stack.back().fb;
    }
    while (!stack.empty()) {
      const Seg sg = stack.back();
      stack.pop_back();
      const double dphi = std::remainder(sg.fb.lc.phase - sg.fa.lc.phase, 2.0 * pi);
      const double dlog = sg.fb.lc.log_mod - sg.fa.lc.log_mod;
      const double dzeta = std::abs(sg.fb.zeta - sg.fa.zeta);
      if (dzeta <= 0.4 && std::abs(dphi) <= 0.5 && std::abs(dlog) <= 0.5) {
        total += dphi;
        continue;
      }
      if (sg.depth >= 48)
        throw NumericError("winding_number: edge sampling could not be refined (resolution)");
      const Complex mid = 0.5 * (sg.a + sg.b);
      const Probe fm = probe(mid);
      stack.push_back({sg.a, mid, sg.fa, fm, sg.depth + 1});
      stack.push_back({mid, sg.b, fm, sg.fb, sg.depth + 1});
    }
  }

  const double w = total / (2.0 * pi);
  const double rounded = std::round(w);
  if (std::abs(w - rounded) >= 0.01)
    throw NumericError("winding_number: integer-rounding residual >= 0.01 (edge sampling too coarse)");
  return static_cast<int>(rounded);
}

}  // namespace wavekk
