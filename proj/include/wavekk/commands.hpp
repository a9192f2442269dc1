#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <filesystem>
#include <string>
#include <vector>

#include "wavekk/core.hpp"
#include "wavekk/diff_fn.hpp"
#include "wavekk/io.hpp"
#include "wavekk/kk.hpp"
#include "wavekk/parallel.hpp"
#include "wavekk/scenarios.hpp"
#include "wavekk/wavepacket.hpp"
#include "wavekk/zeros.hpp"

namespace wavekk::cmd {

inline std::string scales_json(const ScenarioPreset& sc) {
  const DerivedScales s = derived_scales(sc.params, sc.x_obs);
  JsonWriter w;
  w.obj_open();
  w.field("preset", sc.name);
  w.field("label", sc.params.label);
  w.obj_open("params");
  w.field("m", sc.params.m);
  w.field("a", sc.params.a);
  w.field("K", sc.params.K);
  w.field("delta", sc.params.delta);
  w.obj_close();
  w.field("x_obs", sc.x_obs);
  w.obj_open("scales");
  w.field("t_r", s.t_r);
  w.field("t_d", s.t_d);
  w.field("E", s.E);
  w.field("n_r", s.n_r);
  w.obj_close();
  w.obj_open("threshold");
  w.field("analytic", analyticity_threshold(sc.params, sc.x_obs));
  w.field("lower_half_count", lower_half_count(sc.params, sc.x_obs));
  w.obj_close();
  w.arr_open("notes");
  for (const std::string& n : sc.notes) w.elem(n);
  w.arr_close();
  w.arr_open("discrepancies");
  for (const std::string& d : sc.discrepancies) w.elem(d);
  w.arr_close();
  w.obj_close();
  return w.str() + "\n";
}

inline std::string zeros_csv(const PacketParams& p, double x, int n_lo, int n_hi) {
  const std::vector<ZeroRecord> recs = zero_locations(p, x, n_lo, n_hi);
  CsvWriter csv({"n", "t_re", "t_im", "half_plane", "residual"});
  for (const ZeroRecord& z : recs) {
    csv.cell(z.n);
    csv.cell(z.t.real());
    csv.cell(z.t.imag());
    csv.cell(std::string(to_string(z.half_plane)));
    csv.cell(z.residual);
    csv.end_row();
  }
  return csv.str();
}

struct KkCsvResult {
  std::string csv;
  KkReport report;
};

/// Fig.-2 style table over [rep_lo, rep_hi]: the direct log-modulus, raw and
/// unwrapped argument, the reciprocal-relation estimate (with the Blaschke
/// term folded in when requested) and the pointwise residual. Also runs the
/// window/sample doubling protocol and returns its report.
inline KkCsvResult kk_csv(const PacketParams& p, double x, const TimeGrid& grid, bool with_blaschke,
                          double rep_lo, double rep_hi) {
  grid.validate();
  detail::check_kk_window(p, x, grid);
  if (!(rep_lo < rep_hi)) throw InputError("kk: need rep_lo < rep_hi");

  std::optional<BlaschkeProduct> b;
  if (with_blaschke) {
    BlaschkeProduct bp = detail::lower_half_blaschke(p, x);
    if (!bp.zeros.empty()) b = std::move(bp);
  }
  const BlaschkeProduct* bp = b ? &*b : nullptr;

  const detail::KkRun base = detail::kk_run_once(p, x, grid, bp, rep_lo, rep_hi);
  const TimeGrid doubled{grid.t0 - static_cast<double>(grid.n / 2) * grid.dt, grid.dt, grid.n * 2};
  const detail::KkRun twice = detail::kk_run_once(p, x, doubled, bp, rep_lo, rep_hi);

  CsvWriter csv({"t", "log_mod_chi", "arg_chi_raw", "arg_chi_unwrapped", "arg_kk_estimate",
                 "arg_blaschke", "residual"});
  for (std::size_t i = 0; i < base.idx.size(); ++i) {
    const std::size_t k = base.idx[i];
    csv.cell(grid.t(k));
    csv.cell(base.path.log_mod[k]);
    csv.cell(base.path.raw_phase[k]);
    csv.cell(base.path.phase[k]);
    csv.cell(base.est[i]);
    csv.cell(bp ? detail::blaschke_arg_from_left(*bp, grid.t(k)) : 0.0);
    csv.cell(base.est[i] - base.path.phase[k]);
    csv.end_row();
  }

  KkCsvResult out;
  out.csv = csv.str();
  out.report.max_err = base.max_err;
  out.report.rms_err = base.rms_err;
  out.report.max_err_doubled = twice.max_err;
  out.report.rms_err_doubled = twice.rms_err;
  out.report.shrink_ratio = twice.max_err > 0.0 ? base.max_err / twice.max_err
                                                : std::numeric_limits<double>::infinity();
  out.report.converged = out.report.shrink_ratio >= 1.5;
  out.report.report_points = base.idx.size();
  return out;
}

inline std::string kk_report_json(const KkReport& r) {
  JsonWriter w;
  w.obj_open();
  w.field("max_err", r.max_err);
  w.field("rms_err", r.rms_err);
  w.field("max_err_doubled", r.max_err_doubled);
  w.field("rms_err_doubled", r.rms_err_doubled);
  w.field("shrink_ratio", r.shrink_ratio);
  w.field("converged", r.converged);
  w.field("report_points", static_cast<long long>(r.report_points));
  w.obj_close();
  return w.str() + "\n";
}

/// |Psi| and its raw argument over an x-t grid; the wall column x = 0 is
/// exactly zero.
inline std::string field_csv(const PacketParams& p, double x_min, double x_max, std::size_t nx,
                             double t_min, double t_max, std::size_t nt) {
  if (!(x_min < x_max && x_max <= 0.0)) throw InputError("field: need x_min < x_max <= 0");
  if (!(t_min < t_max)) throw InputError("field: need t_min < t_max");
  if (nx < 2 || nt < 2) throw InputError("field: need nx, nt >= 2");
  if (nx * nt > 100000000ull) throw InputError("field: grid larger than 1e8 points");

  const ReflectedState st = ReflectedState::create(p);
  std::vector<double> mod(nx * nt), arg(nx * nt);
  parallel_for(nt, [&](std::size_t ti) {
    const double t = t_min + (t_max - t_min) * static_cast<double>(ti) / static_cast<double>(nt - 1);
    for (std::size_t xi = 0; xi < nx; ++xi) {
      const double x =
          x_min + (x_max - x_min) * static_cast<double>(xi) / static_cast<double>(nx - 1);
      const Amplitude v = reflected_psi(st, x, t);
      const double m = std::abs(v);
      mod[ti * nx + xi] = m;
      arg[ti * nx + xi] = m == 0.0 ? 0.0 : std::arg(v);
    }
  });

  CsvWriter csv({"x", "t", "abs_psi", "arg_psi_raw"});
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const double t = t_min + (t_max - t_min) * static_cast<double>(ti) / static_cast<double>(nt - 1);
    for (std::size_t xi = 0; xi < nx; ++xi) {
      const double x =
          x_min + (x_max - x_min) * static_cast<double>(xi) / static_cast<double>(nx - 1);
      csv.cell(x);
      csv.cell(t);
      csv.cell(mod[ti * nx + xi]);
      csv.cell(arg[ti * nx + xi]);
      csv.end_row();
    }
  }
  return csv.str();
}

inline std::string threshold_json(const PacketParams& p, double x) {
  const DerivedScales s = derived_scales(p, x);
  JsonWriter w;
  w.obj_open();
  w.field("x", x);
  w.field("n_r", s.n_r);
  w.field("analytic", analyticity_threshold(p, x));
  w.field("lower_half_count", lower_half_count(p, x));
  w.obj_close();
  return w.str() + "\n";
}

struct ClassicalReport {
  double rate = 0.0;              // |x| v / (delta^2 / 2), radians per second
  double total_phase = 0.0;       // pi n_r(x) = |x| K
  double deviation_ln = 0.0;      // ln |chi'(0) - 1| = Re zeta(0)
  LogComplex chi_prime_at_t0;     // asymptotic log-domain value
  double t_r_over_t_d = 0.0;
};

/// Order-of-magnitude report for the classical regime (t_r << t_d): rate of
/// phase acquisition at reflection, total phase acquired, and the log-domain
/// deviation of chi' from 1 at t = 0. Never routed through quadrature.
inline ClassicalReport classical_report(const PacketParams& p, double x) {
  const DerivedScales s = derived_scales(p, x);
  ClassicalReport r;
  r.t_r_over_t_d = s.t_r / s.t_d;
  if (!(r.t_r_over_t_d < 1e-3))
    throw RegimeError("classical report: requires t_r / t_d < 1e-3 (formulas are linearized)");
  const double v = p.K / p.m;
  r.rate = std::abs(x) * v / (0.5 * p.delta * p.delta);
  r.total_phase = pi * s.n_r;
  r.deviation_ln = chi_exponent(p, x, ComplexTime(0.0, 0.0)).real();
  r.chi_prime_at_t0 = log_chi_prime(p, x, ComplexTime(0.0, 0.0));
  return r;
}

inline std::string classical_json(const ScenarioPreset& sc) {
  const ClassicalReport r = classical_report(sc.params, sc.x_obs);
  PacketParams wide = sc.params;
  wide.delta *= 1e4;
  const ClassicalReport rw = classical_report(wide, sc.x_obs);

  JsonWriter w;
  w.obj_open();
  w.field("preset", sc.name);
  w.field("x_obs", sc.x_obs);
  w.obj_open("regime");
  w.field("t_r_over_t_d", r.t_r_over_t_d);
  w.field("guard_max", 1e-3);
  w.obj_close();
  w.field("rate_rad_per_s", r.rate);
  w.field("total_phase_rad", r.total_phase);
  w.obj_open("chi_prime_at_t0");
  w.field("deviation_ln", r.deviation_ln);
  w.field("log_mod", r.chi_prime_at_t0.log_mod);
  w.field("phase", r.chi_prime_at_t0.phase);
  w.obj_close();
  w.obj_open("delta_10000x");
  w.field("delta", wide.delta);
  w.field("rate_rad_per_s", rw.rate);
  w.obj_close();
  w.arr_open("notes");
  for (const std::string& n : sc.notes) w.elem(n);
  w.arr_close();
  w.arr_open("discrepancies");
  for (const std::string& d : sc.discrepancies) w.elem(d);
  w.arr_close();
  w.obj_close();
  return w.str() + "\n";
}

struct ScenarioDefaults {
  int n_lo = -20, n_hi = 20;
  TimeGrid kk_grid;
  bool kk_blaschke = false;
  double rep_lo = 0.0, rep_hi = 0.0;
  double x_min = 0.0, x_max = 0.0;
  std::size_t nx = 0, nt = 0;
  double t_min = 0.0, t_max = 0.0;
};

inline ScenarioDefaults scenario_defaults(const ScenarioPreset& sc) {
  const DerivedScales s = derived_scales(sc.params, sc.x_obs);
  ScenarioDefaults d;
  if (sc.name == "electron") {
    d.kk_grid = {-400.0, 800.0 / 32767.0, 32768};
    d.kk_blaschke = false;
    d.rep_lo = 0.0;
    d.rep_hi = 20.0;
    d.x_min = -16.0;
    d.x_max = 0.0;
    d.nx = 161;
    d.t_min = 0.0;
    d.t_max = 10.0;
    d.nt = 101;
  } else if (sc.name == "molecule") {
    d.kk_grid = {-6.0e6, 1.2e7 / 1048575.0, 1048576};
    d.kk_blaschke = true;
    d.rep_lo = s.t_r - 1.5 * s.t_d;
    d.rep_hi = s.t_r + 1.5 * s.t_d;
    d.x_min = -45.0;
    d.x_max = 0.0;
    d.nx = 181;
    d.t_min = 0.0;
    d.t_max = 2.0 * s.t_r;
    d.nt = 101;
  }
  return d;
}

struct ScenarioOutputs {
  std::vector<std::filesystem::path> files;
};

/// Writes the report files for one preset into out_dir: scales.json always;
/// zeros.csv, kk.csv, kk_report.json and field.csv for electron/molecule;
/// classical.json for the classical preset (whose numbers only make sense
/// in log/asymptotic form).
inline ScenarioOutputs cmd_scenario(const std::string& name, const std::filesystem::path& out_dir) {
  const ScenarioPreset& sc = preset(name);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec && !std::filesystem::is_directory(out_dir))
    throw InputError("cannot create output directory: " + out_dir.string());

  ScenarioOutputs out;
  const auto emit = [&](const char* fname, const std::string& content) {
    const std::filesystem::path p = out_dir / fname;
    write_file(p, content);
    out.files.push_back(p);
  };

  emit("scales.json", scales_json(sc));
  if (sc.name == "classical") {
    emit("classical.json", classical_json(sc));
    return out;
  }

  const ScenarioDefaults d = scenario_defaults(sc);
  emit("zeros.csv", zeros_csv(sc.params, sc.x_obs, d.n_lo, d.n_hi));
  const KkCsvResult kk = kk_csv(sc.params, sc.x_obs, d.kk_grid, d.kk_blaschke, d.rep_lo, d.rep_hi);
  emit("kk.csv", kk.csv);
  emit("kk_report.json", kk_report_json(kk.report));
  emit("field.csv", field_csv(sc.params, d.x_min, d.x_max, d.nx, d.t_min, d.t_max, d.nt));
  return out;
}

}  // namespace wavekk::cmd
