#pragma once

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wavekk/commands.hpp"

namespace wavekk::cli {

// Exit codes: 0 success, 2 bad input, 3 numeric non-convergence,
// 4 regime-guard violation.

inline int run(int argc, const char* const* argv) {
  CLI::App app{"wavekk: wave-packet reflection, difference-function zeros and time-domain "
               "modulus-phase reciprocal relations"};
  app.require_subcommand(1);

  // scenario
  std::string sc_name, sc_out;
  CLI::App* sc = app.add_subcommand("scenario", "run a built-in preset and write its report files");
  sc->add_option("name", sc_name, "electron, molecule or classical")->required();
  sc->add_option("--out", sc_out, "output directory")->required();

  // zeros
  std::string z_params, z_out;
  double z_x = 0.0;
  int z_nmin = 0, z_nmax = 0;
  CLI::App* zc = app.add_subcommand("zeros", "closed-form difference-function zeros, polished");
  zc->add_option("--params", z_params, "JSON parameter file")->required();
  zc->add_option("--x", z_x, "observation point, < 0")->required();
  zc->add_option("--n-min", z_nmin, "lowest zero index")->required();
  zc->add_option("--n-max", z_nmax, "highest zero index")->required();
  zc->add_option("--out", z_out, "output CSV path (default: stdout)");

  // kk
  std::string k_params, k_out, k_report;
  double k_x = 0.0, k_tmin = 0.0, k_tmax = 0.0;
  std::size_t k_samples = 0;
  bool k_blaschke = false;
  std::optional<double> k_rmin, k_rmax;
  CLI::App* kc = app.add_subcommand("kk", "reciprocal-relation check of arg chi against -H[ln|chi|]");
  kc->add_option("--params", k_params, "JSON parameter file")->required();
  kc->add_option("--x", k_x, "observation point, < 0")->required();
  kc->add_option("--t-min", k_tmin, "window start")->required();
  kc->add_option("--t-max", k_tmax, "window end")->required();
  kc->add_option("--samples", k_samples, "sample count (>= 16)")->required();
  kc->add_flag("--blaschke", k_blaschke, "fold in the Blaschke term for lower-half zeros");
  kc->add_option("--report-min", k_rmin, "comparison window start (default: t_r - 1.5 t_d)");
  kc->add_option("--report-max", k_rmax, "comparison window end (default: t_r + 1.5 t_d)");
  kc->add_option("--out", k_out, "output CSV path (default: stdout)");
  kc->add_option("--report-out", k_report, "verification report JSON path (default: stderr)");

  // field
  std::string f_params, f_out;
  double f_xmin = 0.0, f_xmax = 0.0, f_tmin = 0.0, f_tmax = 0.0;
  std::size_t f_nx = 0, f_nt = 0;
  CLI::App* fc = app.add_subcommand("field", "|Psi| over an x-t grid");
  fc->add_option("--params", f_params, "JSON parameter file")->required();
  fc->add_option("--x-min", f_xmin)->required();
  fc->add_option("--x-max", f_xmax)->required();
  fc->add_option("--nx", f_nx)->required();
  fc->add_option("--t-min", f_tmin)->required();
  fc->add_option("--t-max", f_tmax)->required();
  fc->add_option("--nt", f_nt)->required();
  fc->add_option("--out", f_out, "output CSV path (default: stdout)");

  // threshold
  std::string th_params;
  double th_x = 0.0;
  CLI::App* tc = app.add_subcommand("threshold", "analyticity threshold n_r(x) < 1 verdict");
  tc->add_option("--params", th_params, "JSON parameter file")->required();
  tc->add_option("--x", th_x, "observation point, < 0")->required();

  try {
    app.parse(argc, argv);

    const auto emit = [](const std::string& content, const std::string& path) {
      if (path.empty())
        std::fputs(content.c_str(), stdout);
      else
        write_file(path, content);
    };

    if (sc->parsed()) {
      const cmd::ScenarioOutputs out = cmd::cmd_scenario(sc_name, sc_out);
      for (const auto& f : out.files) std::fprintf(stdout, "%s\n", f.string().c_str());
    } else if (zc->parsed()) {
      emit(cmd::zeros_csv(load_params_json(z_params), z_x, z_nmin, z_nmax), z_out);
    } else if (kc->parsed()) {
      const PacketParams p = load_params_json(k_params);
      if (k_tmin >= k_tmax) throw InputError("kk: need --t-min < --t-max");
      if (k_samples < 16) throw InputError("kk: need --samples >= 16");
      const TimeGrid grid{k_tmin, (k_tmax - k_tmin) / static_cast<double>(k_samples - 1),
                          k_samples};
      const DerivedScales s = derived_scales(p, k_x);
      const double rlo = k_rmin.value_or(s.t_r - 1.5 * s.t_d);
      const double rhi = k_rmax.value_or(s.t_r + 1.5 * s.t_d);
      const cmd::KkCsvResult res = cmd::kk_csv(p, k_x, grid, k_blaschke, rlo, rhi);
      emit(res.csv, k_out);
      const std::string rep = cmd::kk_report_json(res.report);
      if (k_report.empty())
        std::fputs(rep.c_str(), stderr);
      else
        write_file(k_report, rep);
    } else if (fc->parsed()) {
      emit(cmd::field_csv(load_params_json(f_params), f_xmin, f_xmax, f_nx, f_tmin, f_tmax, f_nt),
           f_out);
    } else if (tc->parsed()) {
      std::fputs(cmd::threshold_json(load_params_json(th_params), th_x).c_str(), stdout);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const RegimeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace wavekk::cli
