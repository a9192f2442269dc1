#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "wavekk/core.hpp"

namespace wavekk {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated |K15 - G7| over accepted panels
  std::size_t panels = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK dqk15 constants).
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
inline constexpr std::array<double, 8> gk_xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk_wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

template <class F>
void gk15_panel(F& f, double a, double b, double& resk, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resg = fc * gk_wg[3];
  resk = fc * gk_wgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * gk_xgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    if (j % 2 == 1) resg += gk_wg[j / 2] * fsum;
    resk += gk_wgk[j] * fsum;
  }
  resk *= h;
  resg *= h;
  err = std::abs(resk - resg);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod panel subdivision on [a, b] to an absolute
/// tolerance. Throws NumericError when the estimated error cannot be driven
/// below the tolerance within the depth cap.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-12,
                                    int max_depth = 48) {
  QuadratureResult out;
  if (a == b) return out;

  struct Panel {
    double a, b;
    int depth;
  };
  std::vector<Panel> stack{{a, b, 0}};
  const double span = std::abs(b - a);
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    double resk = 0.0, err = 0.0;
    detail::gk15_panel(f, p.a, p.b, resk, err);
    const double local_tol = abs_tol * std::abs(p.b - p.a) / span;
    if (err <= std::max(local_tol, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(resk))) {
      out.value += resk;
      out.error += err;
      ++out.panels;
      continue;
    }
    if (p.depth >= max_depth)
      throw NumericError("adaptive quadrature did not converge (depth cap reached)");
    const double mid = 0.5 * (p.a + p.b);
    stack.push_back({p.a, mid, p.depth + 1});
    stack.push_back({mid, p.b, p.depth + 1});
  }
  if (!std::isfinite(out.value))
    throw NumericError("adaptive quadrature produced a non-finite value");
  return out;
}

/// Same, seeded with interior breakpoints (sorted, deduplicated by the
/// caller). Keeps narrow integrand features from slipping between the first
/// coarse panels.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, double abs_tol = 1e-12,
                                    int max_depth = 48) {
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const QuadratureResult part =
        integrate_adaptive(f, breakpoints[i], breakpoints[i + 1], abs_tol, max_depth);
    out.value += part.value;
    out.error += part.error;
    out.panels += part.panels;
  }
  return out;
}

}  // namespace wavekk
