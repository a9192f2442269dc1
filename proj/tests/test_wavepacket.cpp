#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "test_helpers.hpp"
#include "wavekk/wavepacket.hpp"

using namespace wavekk;

namespace {

// Independent modulus/phase product form of the free packet at real t. Used
// as an oracle against the single-exponential evaluation path.
struct ModPhase {
  double mod, phase;
};

ModPhase free_psi_product_form(const PacketParams& p, double x, double t) {
  const double d2 = p.delta * p.delta;
  const double u = x - p.a;
  const double spread2 = d2 + t * t / (4.0 * d2 * p.m * p.m);
  const double mod = std::pow(spread2, -0.25) *
                     std::exp(-std::pow(u - p.K * t / p.m, 2) / (4.0 * d2 + t * t / (d2 * p.m * p.m)));
  const double phase = -0.5 * std::atan(t / (2.0 * d2 * p.m)) +
                       (p.K * (u - p.K * t / (2.0 * p.m)) + t * u * u / (8.0 * p.m * d2 * d2)) /
                           (1.0 + t * t / (4.0 * d2 * d2 * p.m * p.m));
  return {mod, phase};
}

}  // namespace

TEST_CASE("free packet at its initial center", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  const Amplitude v = free_psi(e, e.a, {0.0, 0.0});
  CHECK(std::abs(v) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));  // 1/sqrt(Delta)
  CHECK(std::arg(v) == Approx(0.0).margin(1e-14));
}

TEST_CASE("free packet peak rides at the group velocity", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  for (const double t : {1.0, 3.0, 7.5}) {
    const double x_peak = e.a + e.K * t / e.m;
    const double expected =
        std::pow(e.delta * e.delta + t * t / (4.0 * e.delta * e.delta * e.m * e.m), -0.25);
    CHECK(std::abs(free_psi(e, x_peak, {t, 0.0})) == Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("single-exponential form agrees with the modulus-phase product form", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  for (const double t : {0.3, 1.7, 4.0, 11.0}) {
    for (const double x : {-7.2, -4.0, -1.1}) {
      const LogComplex lg = free_psi_log(e, x, {t, 0.0});
      const ModPhase ref = free_psi_product_form(e, x, t);
      CHECK(std::exp(lg.log_mod) == Approx(ref.mod).epsilon(1e-12));
      CHECK(std::remainder(lg.phase - ref.phase, 2.0 * pi) == Approx(0.0).margin(1e-12));
    }
  }
}

TEST_CASE("free evolution satisfies the Schroedinger equation to O(h^2)", "[wavepacket][oracle]") {
  const PacketParams e = testutil::electron();
  const double x = -3.0, t = 1.0;

  const auto residual = [&](double h) {
    const Amplitude dt_psi =
        (free_psi(e, x, {t + h, 0.0}) - free_psi(e, x, {t - h, 0.0})) / (2.0 * h);
    const Amplitude dxx_psi = (free_psi(e, x + h, {t, 0.0}) - 2.0 * free_psi(e, x, {t, 0.0}) +
                               free_psi(e, x - h, {t, 0.0})) /
                              (h * h);
    return std::abs(Complex(0.0, 1.0) * dt_psi + dxx_psi / (2.0 * e.m));
  };

  // 3-decade step-halving sweep; least-squares slope of ln r against ln h.
  std::vector<double> lh, lr;
  for (int k = 0; k <= 10; ++k) {
    const double h = 0.4 / std::pow(2.0, k);
    lh.push_back(std::log(h));
    lr.push_back(std::log(residual(h)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lh.size());
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sx += lh[i];
    sy += lr[i];
    sxx += lh[i] * lh[i];
    sxy += lh[i] * lr[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= 1.9);
}

TEST_CASE("normalization approaches the separated-packet closed form", "[wavepacket][oracle]") {
  // For |a| >> Delta and K Delta >> 1 the half-line integral of
  // |psi(x) - psi(-x)|^2 collapses to the full-line mass sqrt(2 pi) of one
  // packet (the image term's half-line mass exactly restores the tail lost
  // at the wall), and the oscillatory cross term is bounded by
  // sqrt(2 pi) e^{-a^2/(2 Delta^2)} e^{-2 K^2 Delta^2}.
  const PacketParams far{1.0, -30.0, 3.0, 1.0, "separated"};
  const double n_limit = std::pow(2.0 * pi, -0.25);
  CHECK(normalization(far, 0.0).value == Approx(n_limit).epsilon(1e-12));

  // The electron preset is already separated to ~e^{-32} accuracy.
  CHECK(normalization(testutil::electron(), 0.0).value == Approx(n_limit).epsilon(1e-12));
}

TEST_CASE("normalization is independent of the evaluation time", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  const double n0 = normalization(e, 0.0).value;
  const double n10 = normalization(e, 10.0).value;
  CHECK(std::abs(n10 - n0) < 1e-8 * n0);

  std::vector<double> ns;
  for (const double t : {0.0, 2.5, 5.0, 7.5, 10.0}) ns.push_back(normalization(e, t).value);
  double mean = 0.0;
  for (const double v : ns) mean += v;
  mean /= static_cast<double>(ns.size());
  double var = 0.0;
  for (const double v : ns) var += (v - mean) * (v - mean);
  const double stddev = std::sqrt(var / static_cast<double>(ns.size()));
  CHECK(stddev < 1e-8 * mean);
}

TEST_CASE("degenerate odd extension is flagged", "[wavepacket]") {
  // K -> 0 with a -> 0- erases the difference between packet and image; the
  // parameter validation rejects K = 0 outright and the quadrature flags the
  // near-degenerate survivor.
  CHECK_THROWS_AS(normalization({1.0, -1e-9, 0.0, 1.0, ""}, 0.0), InputError);
  CHECK_THROWS_AS(normalization({1.0, -1e-9, 1e-7, 1.0, ""}, 0.0), NumericError);
}

TEST_CASE("hard-wall boundary condition", "[wavepacket]") {
  const ReflectedState st = ReflectedState::create(testutil::electron());
  double max_mod = 0.0;
  for (double x = -10.0; x < 0.0; x += 0.25)
    max_mod = std::max(max_mod, std::abs(reflected_psi(st, x, 2.5)));
  for (const double t : {0.0, 1.0, 2.5, 6.0, 25.0})
    CHECK(std::abs(reflected_psi(st, 0.0, t)) < 1e-14 * max_mod);
  CHECK_THROWS_AS(reflected_psi(st, 0.5, 1.0), InputError);
}

TEST_CASE("difference of packet and image is antisymmetric under swap", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  for (const double t : {0.0, 1.3, 2.5}) {
    for (const double x : {-6.0, -2.5, -0.3}) {
      const Amplitude d1 = free_psi(e, x, {t, 0.0}) - free_psi(e, -x, {t, 0.0});
      const Amplitude d2 = free_psi(e, -x, {t, 0.0}) - free_psi(e, x, {t, 0.0});
      CHECK(d1 == -d2);  // bitwise: IEEE negation of the swapped difference
    }
  }
}

TEST_CASE("free packet is regular and decaying in the lower half-plane", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  const double m1 = std::abs(free_psi(e, e.a, {1.0, -1.0}));
  const double m5 = std::abs(free_psi(e, e.a, {1.0, -5.0}));
  const double m25 = std::abs(free_psi(e, e.a, {1.0, -25.0}));
  CHECK(m5 < m1);
  CHECK(m25 < m5);
}

TEST_CASE("branch point of the complex-time continuation is guarded", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  const double t_d = dispersion_time(e);  // branch point at i t_d = 8i
  CHECK_THROWS_AS(free_psi(e, -1.0, {0.0, t_d}), NumericError);
  CHECK_THROWS_AS(free_psi(e, -1.0, {1e-10 * t_d, t_d * (1.0 + 1e-12)}), NumericError);
  CHECK_NOTHROW(free_psi(e, -1.0, {0.0, t_d * 1.5}));
}

TEST_CASE("normalized reflected state carries unit probability at all times", "[wavepacket]") {
  const PacketParams e = testutil::electron();
  const ReflectedState st = ReflectedState::create(e);
  const double t_r = reflection_time(e);
  for (const double t : {0.0, t_r, 4.0 * t_r}) {
    const double s = e.delta + detail::packet_spread(e, t);
    const std::array<double, 4> brk{e.a - 10.0 * s, e.a - 3.0 * s, std::min(e.a + 3.0 * s, 0.0),
                                    0.0};
    const auto density = [&](double x) { return std::norm(reflected_psi(st, x, t)); };
    const QuadratureResult q = integrate_adaptive(density, std::span<const double>(brk), 1e-12);
    CHECK(q.value == Approx(1.0).epsilon(1e-9));
  }
}
