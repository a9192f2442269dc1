#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wavekk/core.hpp"
#include "wavekk/diff_fn.hpp"
#include "wavekk/parallel.hpp"
#include "wavekk/quadrature.hpp"
#include "wavekk/zeros.hpp"

namespace wavekk {

/// Uniformly sampled real signal with per-sample validity flags. Masked
/// samples are excluded from quadrature (bridged by linear interpolation)
/// but keep their slot for output alignment.
struct SampledSignal {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;  // nonzero = invalid; empty = all valid

  std::size_t size() const { return values.size(); }
  double t(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return t(size() - 1); }
  bool valid(std::size_t k) const { return mask.empty() || mask[k] == 0; }

  void validate() const {
    if (!(std::isfinite(t0) && std::isfinite(dt) && dt > 0.0))
      throw InputError("SampledSignal: need finite t0 and dt > 0");
    if (values.size() < 16) throw InputError("SampledSignal: need at least 16 samples");
    if (!mask.empty() && mask.size() != values.size())
      throw InputError("SampledSignal: mask size mismatch");
  }
};

/// Model of the signal beyond the sampled window, used to integrate the
/// Hilbert tails semi-analytically (the signals here decay only like 1/t,
/// so raw truncation converges too slowly).
using TailModel = std::function<double(double)>;

namespace detail {

inline std::vector<double> bridge_masked(const SampledSignal& s) {
  std::vector<double> v = s.values;
  if (s.mask.empty()) return v;
  const std::size_t n = v.size();
  std::size_t k = 0;
  while (k < n) {
    if (s.valid(k)) {
      ++k;
      continue;
    }
    std::size_t hi = k;
    while (hi < n && !s.valid(hi)) ++hi;
    const bool has_lo = k > 0, has_hi = hi < n;
    for (std::size_t j = k; j < hi; ++j) {
      if (has_lo && has_hi) {
        const double w = static_cast<double>(j - (k - 1)) / static_cast<double>(hi - (k - 1));
        v[j] = (1.0 - w) * v[k - 1] + w * v[hi];
      } else if (has_lo) {
        v[j] = v[k - 1];
      } else if (has_hi) {
        v[j] = v[hi];
      } else {
        throw NumericError("SampledSignal: every sample masked");
      }
    }
    k = hi;
  }
  return v;
}

inline void check_mask_density(const SampledSignal& s, double t_eval) {
  if (s.mask.empty()) return;
  const std::size_t n = s.size();
  std::size_t masked_total = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (!s.valid(k)) ++masked_total;
  if (masked_total == 0) return;
  if (static_cast<double>(masked_total) > 0.05 * static_cast<double>(n))
    throw NumericError("hilbert_pv: more than 5% of the window is masked");
  // Per decade of distance from t_eval (in grid steps); thin decades are
  // skipped, a lone clamped neighbor is what the interpolation is for.
  double lo = 1.0;
  while (lo * s.dt < (s.t_end() - s.t0)) {
    const double hi = lo * 10.0;
    std::size_t count = 0, masked = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = std::abs(s.t(k) - t_eval) / s.dt;
      if (d >= lo && d < hi) {
        ++count;
        if (!s.valid(k)) ++masked;
      }
    }
    if (count >= 40 && static_cast<double>(masked) > 0.05 * static_cast<double>(count))
      throw NumericError("hilbert_pv: masked-sample density above 5% in a distance decade");
    lo = hi;
  }
}

// (1/pi) * integral of model(t')/(t - t') over (-inf, t0] and [t_end, inf),
// each mapped to s in (0, 1] by t' = T/s so the integrand stays smooth.
inline double hilbert_tail(const TailModel& model, double t0, double t_end, double t) {
  double acc = 0.0;
  const auto one_side = [&](double T) {
    const auto g = [&](double sv) {
      const double tp = T / sv;
      return model(tp) / (t - tp) * (std::abs(T) / (sv * sv));
    };
    return integrate_adaptive(g, 0.0, 1.0, 1e-10, 40).value;
  };
  if (t_end > 0.0) acc += one_side(t_end);
  if (t0 < 0.0) acc += one_side(t0);
  return acc / pi;
}

}  // namespace detail

/// Principal-value Hilbert transform of a sampled signal at one point:
///   (1/pi) PV integral over the window of f(t')/(t_eval - t') dt',
/// by singularity subtraction: the regularized integrand
/// (f(t') - f(t_eval))/(t_eval - t') goes through trapezoid panels and the
/// removed term integrates in closed form to f(t_eval) ln((t_eval-t0)/(t_end-t_eval)).
/// A tail model, when supplied, adds the semi-analytic out-of-window part.
inline double hilbert_pv(const SampledSignal& s, double t_eval, const TailModel& tail = {}) {
  s.validate();
  const std::size_t n = s.size();
  const double t_end = s.t_end();
  // 4.5 rather than 5 keeps the fifth sample from either end inside the
  // guard under accumulated grid rounding.
  if (!(t_eval >= s.t0 + 4.5 * s.dt && t_eval <= t_end - 4.5 * s.dt))
    throw InputError("hilbert_pv: t_eval outside the edge-guarded window");
  detail::check_mask_density(s, t_eval);

  const std::vector<double> f = detail::bridge_masked(s);

  // Nearest node and whether t_eval sits on the grid.
  const double kf = (t_eval - s.t0) / s.dt;
  const std::size_t k0 = static_cast<std::size_t>(std::llround(kf));
  const bool on_grid = std::abs(kf - static_cast<double>(k0)) < 1e-9;

  double f_at;
  if (on_grid) {
    f_at = f[k0];
  } else {
    // Cubic Lagrange on the four surrounding nodes.
    const std::size_t i1 = std::min(n - 3, std::max<std::size_t>(1, static_cast<std::size_t>(kf)));
    const std::size_t i0 = i1 - 1;
    double acc = 0.0;
    for (std::size_t j = i0; j < i0 + 4; ++j) {
      double lj = 1.0;
      for (std::size_t l = i0; l < i0 + 4; ++l)
        if (l != j) lj *= (t_eval - s.t(l)) / (s.t(j) - s.t(l));
      acc += lj * f[j];
    }
    f_at = acc;
  }

  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double g;
    if (on_grid && k == k0) {
      // Limit of the regularized integrand is -f'(t_eval); fourth-order
      // stencil so the node does not dominate the panel error.
      g = -(f[k0 - 2] - 8.0 * f[k0 - 1] + 8.0 * f[k0 + 1] - f[k0 + 2]) / (12.0 * s.dt);
    } else {
      g = (f[k] - f_at) / (t_eval - s.t(k));
    }
    sum += (k == 0 || k == n - 1) ? 0.5 * g : g;
  }
  const double window = sum * s.dt + f_at * std::log((t_eval - s.t0) / (t_end - t_eval));

  double out = window / pi;
  if (tail) out += detail::hilbert_tail(tail, s.t0, t_end, t_eval);
  return out;
}

/// Product of unimodular factors removing lower-half zeros:
///   B(t) = prod_n (t - t_n) / (t - conj t_n),  all t''_n < 0.
/// |B| = 1 on the real axis; poles sit at the conjugates in the upper half,
/// so B is analytic where ln chi must be.
struct BlaschkeProduct {
  std::vector<ComplexTime> zeros;

  void validate() const {
    for (const ComplexTime& z : zeros)
      if (!(z.imag() < 0.0))
        throw InputError("BlaschkeProduct: every zero must lie strictly below the real axis");
  }

  Complex value(ComplexTime t) const {
    Complex b(1.0, 0.0);
    for (const ComplexTime& z : zeros) b *= (t - z) / (t - std::conj(z));
    return b;
  }
};

/// Continuous-branch argument of B along the real axis, with the
/// antisymmetric per-factor branch: each factor contributes
/// -2 atan2(t - Re z, |Im z|), which is 0 over the zero, +pi at -infinity,
/// -pi at +infinity (a total sweep of -2 pi per zero).
inline double blaschke_arg(const BlaschkeProduct& b, double t) {
  b.validate();
  double acc = 0.0;
  for (const ComplexTime& z : b.zeros) acc += -2.0 * std::atan2(t - z.real(), -z.imag());
  return acc;
}

namespace detail {

// Branch of arg B that vanishes at t = -infinity, which is where the
// unwrapped direct argument of chi starts from 0: the antisymmetric branch
// shifted down by pi per zero.
inline double blaschke_arg_from_left(const BlaschkeProduct& b, double t) {
  return blaschke_arg(b, t) - pi * static_cast<double>(b.zeros.size());
}

inline TailModel log_mod_tail(const PacketParams& p, double x) {
  // First-order ln chi ~ -w/2 beyond the window, w the prefactor exponent.
  return [p, x](double tp) {
    const Complex zeta = chi_exponent(p, x, ComplexTime(tp, 0.0));
    return 0.5 * zeta.real();  // Re(-w/2) = Re(zeta)/2
  };
}

inline TailModel arg_tail(const PacketParams& p, double x, std::optional<BlaschkeProduct> b) {
  // Model of the signal arg chi (- arg B) beyond the window. The unwrapped
  // direct argument carries the accumulated winding -2 pi per lower zero on
  // the right of the zero region (all preset zeros have t' > 0).
  return [p, x, b = std::move(b)](double tp) {
    const Complex zeta = chi_exponent(p, x, ComplexTime(tp, 0.0));
    double v = 0.5 * zeta.imag();  // Im(-w/2)
    if (b && !b->zeros.empty()) {
      const double wind = tp > 0.0 ? -2.0 * pi * static_cast<double>(b->zeros.size()) : 0.0;
      v += wind - blaschke_arg_from_left(*b, tp);
    }
    return v;
  };
}

}  // namespace detail

/// Phase of chi recovered from its log-modulus through the reciprocal
/// relation arg chi = -H[ln|chi|] (+ arg B when lower-half zeros require the
/// correction), evaluated at the requested times.
inline std::vector<double> kk_phase_from_modulus_at(const PacketParams& p, double x,
                                                    const TimeGrid& grid,
                                                    const std::vector<double>& t_eval,
                                                    const BlaschkeProduct* b = nullptr) {
  if (!analyticity_threshold(p, x) && (b == nullptr || b->zeros.empty()))
    throw InputError(
        "kk_phase_from_modulus: n_r(x) >= 1 puts zeros in the lower half-plane; a Blaschke "
        "product is required");
  if (b) b->validate();

  const ChiPath path = log_chi_path(p, x, grid, ChiKind::convergent);
  SampledSignal sig{grid.t0, grid.dt, path.log_mod, path.clamped};
  const TailModel tail = detail::log_mod_tail(p, x);

  std::vector<double> out(t_eval.size());
  parallel_for(t_eval.size(), [&](std::size_t i) {
    double v = -hilbert_pv(sig, t_eval[i], tail);
    if (b && !b->zeros.empty()) v += detail::blaschke_arg_from_left(*b, t_eval[i]);
    out[i] = v;
  });
  return out;
}

/// Grid-aligned variant; samples inside the edge guard are masked.
inline SampledSignal kk_phase_from_modulus(const PacketParams& p, double x, const TimeGrid& grid,
                                           const BlaschkeProduct* b = nullptr) {
  grid.validate();
  std::vector<double> ts;
  std::vector<std::size_t> idx;
  for (std::size_t k = 5; k + 5 < grid.n; ++k) {
    ts.push_back(grid.t(k));
    idx.push_back(k);
  }
  const std::vector<double> est = kk_phase_from_modulus_at(p, x, grid, ts, b);
  SampledSignal out{grid.t0, grid.dt, std::vector<double>(grid.n, 0.0),
                    std::vector<std::uint8_t>(grid.n, 1)};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.values[idx[i]] = est[i];
    out.mask[idx[i]] = 0;
  }
  return out;
}

/// Mirror relation: ln|chi| = +H[arg chi (- arg B)], the argument taken as
/// the unwrapped direct branch.
inline std::vector<double> kk_modulus_from_phase_at(const PacketParams& p, double x,
                                                    const TimeGrid& grid,
                                                    const std::vector<double>& t_eval,
                                                    const BlaschkeProduct* b = nullptr) {
  if (!analyticity_threshold(p, x) && (b == nullptr || b->zeros.empty()))
    throw InputError(
        "kk_modulus_from_phase: n_r(x) >= 1 puts zeros in the lower half-plane; a Blaschke "
        "product is required");
  if (b) b->validate();

  const ChiPath path = log_chi_path(p, x, grid, ChiKind::convergent);
  std::vector<double> values = path.phase;
  if (b && !b->zeros.empty())
    for (std::size_t k = 0; k < grid.n; ++k)
      values[k] -= detail::blaschke_arg_from_left(*b, grid.t(k));
  SampledSignal sig{grid.t0, grid.dt, std::move(values), path.clamped};

  std::optional<BlaschkeProduct> bcopy;
  if (b && !b->zeros.empty()) bcopy = *b;
  const TailModel tail = detail::arg_tail(p, x, std::move(bcopy));

  std::vector<double> out(t_eval.size());
  parallel_for(t_eval.size(), [&](std::size_t i) { out[i] = hilbert_pv(sig, t_eval[i], tail); });
  return out;
}

inline SampledSignal kk_modulus_from_phase(const PacketParams& p, double x, const TimeGrid& grid,
                                           const BlaschkeProduct* b = nullptr) {
  grid.validate();
  std::vector<double> ts;
  std::vector<std::size_t> idx;
  for (std::size_t k = 5; k + 5 < grid.n; ++k) {
    ts.push_back(grid.t(k));
    idx.push_back(k);
  }
  const std::vector<double> est = kk_modulus_from_phase_at(p, x, grid, ts, b);
  SampledSignal out{grid.t0, grid.dt, std::vector<double>(grid.n, 0.0),
                    std::vector<std::uint8_t>(grid.n, 1)};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.values[idx[i]] = est[i];
    out.mask[idx[i]] = 0;
  }
  return out;
}

struct KkReport {
  double max_err = 0.0;
  double rms_err = 0.0;
  double max_err_doubled = 0.0;
  double rms_err_doubled = 0.0;
  double shrink_ratio = 0.0;  // max_err / max_err_doubled
  bool converged = false;     // errors shrink >= 1.5x under window/sample doubling
  std::size_t report_points = 0;
};

namespace detail {

// Guard for the tail-corrected formulation: the window must cover the
// structure region and end where the first-order tail model is in regime.
inline void check_kk_window(const PacketParams& p, double x, const TimeGrid& grid) {
  const DerivedScales s = derived_scales(p, x);
  const double need = 2.0 * std::max(s.t_r, s.t_d);
  if (!(grid.t0 < -need && grid.t_end() > need))
    throw InputError("kk_verify: window too short for the packet's structure region");
  for (const double T : {grid.t0, grid.t_end()}) {
    const Complex zeta = chi_exponent(p, x, ComplexTime(T, 0.0));
    if (!(std::abs(zeta) < 0.5))
      throw InputError("kk_verify: |ln chi| too large at the window ends for the tail model");
  }
}

struct KkRun {
  ChiPath path;
  std::vector<std::size_t> idx;  // grid indices inside the report window
  std::vector<double> est;       // -H[ln|chi|] (+ arg B) at those indices
  double max_err = 0.0;
  double rms_err = 0.0;
};

inline KkRun kk_run_once(const PacketParams& p, double x, const TimeGrid& grid,
                         const BlaschkeProduct* b, double rep_lo, double rep_hi) {
  KkRun out;
  out.path = log_chi_path(p, x, grid, ChiKind::convergent);
  SampledSignal sig{grid.t0, grid.dt, out.path.log_mod, out.path.clamped};
  const TailModel tail = log_mod_tail(p, x);

  for (std::size_t k = 5; k + 5 < grid.n; ++k) {
    const double t = grid.t(k);
    if (t >= rep_lo && t <= rep_hi) out.idx.push_back(k);
  }
  if (out.idx.empty()) throw InputError("kk_verify: report window contains no grid points");

  out.est.resize(out.idx.size());
  parallel_for(out.idx.size(), [&](std::size_t i) {
    const std::size_t k = out.idx[i];
    const double t = grid.t(k);
    double est = -hilbert_pv(sig, t, tail);
    if (b && !b->zeros.empty()) est += blaschke_arg_from_left(*b, t);
    out.est[i] = est;
  });

  double sq = 0.0;
  for (std::size_t i = 0; i < out.idx.size(); ++i) {
    const double e = std::abs(out.est[i] - out.path.phase[out.idx[i]]);
    out.max_err = std::max(out.max_err, e);
    sq += e * e;
  }
  out.rms_err = std::sqrt(sq / static_cast<double>(out.idx.size()));
  return out;
}

inline BlaschkeProduct lower_half_blaschke(const PacketParams& p, double x) {
  BlaschkeProduct bp;
  const double lower = lower_half_count(p, x);
  if (lower > 1e6)
    throw NumericError("Blaschke correction: lower-half census too large to enumerate");
  if (lower > 0.0)
    for (const ZeroRecord& z : zero_locations(p, x, 1, static_cast<int>(lower)))
      if (z.half_plane == HalfPlane::lower) bp.zeros.push_back(z.t);
  return bp;
}

}  // namespace detail

/// Compare -H[ln|chi|] (+ arg B when flagged) against the unwrapped direct
/// argument over [rep_lo, rep_hi], then repeat with both window and sample
/// count doubled. Convergence means the maximum error shrinks by at least
/// 1.5x.
inline KkReport kk_verify(const PacketParams& p, double x, const TimeGrid& grid,
                          bool with_blaschke, double rep_lo, double rep_hi) {
  grid.validate();
  detail::check_kk_window(p, x, grid);
  if (!(rep_lo < rep_hi)) throw InputError("kk_verify: need rep_lo < rep_hi");

  // Running without the correction where it is needed stays allowed: the
  // residual then reproduces -arg B, which is itself worth verifying.
  std::optional<BlaschkeProduct> b;
  if (with_blaschke) {
    BlaschkeProduct bp = detail::lower_half_blaschke(p, x);
    if (!bp.zeros.empty()) b = std::move(bp);
  }
  const BlaschkeProduct* bp = b ? &*b : nullptr;

  const detail::KkRun base = detail::kk_run_once(p, x, grid, bp, rep_lo, rep_hi);
  const TimeGrid doubled{grid.t0 - static_cast<double>(grid.n / 2) * grid.dt, grid.dt, grid.n * 2};
  const detail::KkRun twice = detail::kk_run_once(p, x, doubled, bp, rep_lo, rep_hi);

  KkReport rep;
  rep.max_err = base.max_err;
  rep.rms_err = base.rms_err;
  rep.max_err_doubled = twice.max_err;
  rep.rms_err_doubled = twice.rms_err;
  rep.shrink_ratio = twice.max_err > 0.0 ? base.max_err / twice.max_err
                                         : std::numeric_limits<double>::infinity();
  rep.converged = rep.shrink_ratio >= 1.5;
  rep.report_points = base.idx.size();
  return rep;
}

}  // namespace wavekk
