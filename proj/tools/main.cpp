// bnk — command-line surface of the velocity-grid laboratory.
//
// Subcommands: simulate, criteria, povzner, appendix, xcheck, snapshot-info.
// Exit codes: 0 success, 2 configuration/contract error, 3 blow-up halt,
// 4 invariant or structural-check violation, 5 I/O format error.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bnk/collision.hpp"
#include "bnk/config.hpp"
#include "bnk/criteria.hpp"
#include "bnk/csvlog.hpp"
#include "bnk/estimates.hpp"
#include "bnk/grid.hpp"
#include "bnk/initial.hpp"
#include "bnk/povzner.hpp"
#include "bnk/scheme.hpp"
#include "bnk/snapshot.hpp"

namespace fs = std::filesystem;
using namespace bnk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitInvariant = 4;
constexpr int kExitIo = 5;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;  // 0: resolve from BNK_THREADS, then config
};

void add_common(CLI::App* cmd, CommonFlags* fl, bool with_out = true) {
  cmd->add_option("--config", fl->config_path, "INI configuration file");
  if (with_out) cmd->add_option("--out", fl->out_dir, "output directory");
  cmd->add_option("--seed", fl->seed, "sampling seed (overrides [mode] seed)")
      ->each([fl](const std::string&) { fl->seed_given = true; });
  cmd->add_option("--threads", fl->threads, "worker threads (overrides BNK_THREADS)");
}

RunConfig resolve_config(const CommonFlags& fl) {
  RunConfig cfg =
      fl.config_path.empty() ? RunConfig{} : load_config(fl.config_path);
  if (!fl.out_dir.empty()) cfg.out_dir = fl.out_dir;
  if (fl.seed_given) cfg.seed = fl.seed;
  if (fl.threads > 0) {
    cfg.threads = fl.threads;
  } else if (const char* env = std::getenv("BNK_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) cfg.threads = t;
  }
  cfg.validate();
  return cfg;
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  std::ofstream echo(dir / "effective_config.ini", std::ios::binary);
  echo << effective_config(cfg);
  return dir;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

void print_checks(std::ostream& os, const SchemeInvariantReport& rep) {
  for (const CheckLine& c : rep.checks) {
    const char* tag = c.gating ? (c.ok ? "pass" : "FAIL") : (c.ok ? "info" : "info!");
    os << "  [" << tag << "] " << c.name << "  margin=" << fmt(c.margin) << "  " << c.detail
       << "\n";
  }
}

// ---------------------------------------------------------------- simulate --

int cmd_simulate(const RunConfig& cfg) {
  const fs::path dir = prepare_out(cfg);
  const VelocityGrid grid = cfg.make_grid();
  const KernelParams params = cfg.kernel_params();
  const QuadratureSpec quad = QuadratureSpec::product(cfg.d);
  Distribution f0 = build_initial(grid, cfg.initial);

  std::ofstream report(dir / "run_report.txt", std::ios::binary);
  const TailReport tail = tail_report(f0, cfg.initial);
  report << "initial family " << cfg.initial.family << ", grid mass "
         << fmt(tail.grid_mass);
  if (tail.has_analytic) {
    report << ", analytic mass " << fmt(tail.analytic_mass) << ", lost fraction "
           << fmt(tail.lost_fraction);
  }
  report << "\n";

  GlobalCriterionReport gc;
  bool have_gc = false;
  if (moment(f0, 0.0) > 0.0 && cfg.s > (double)(cfg.d - 1)) {
    gc = global_criterion(f0, params, cfg.s, cfg.gamma_stride);
    have_gc = true;
    report << "condition_i " << (gc.condition_i ? "true" : "false")
           << " (q_tilde0 " << fmt(gc.q_tilde0) << " vs bound " << fmt(gc.q0_bound)
           << ")\ncondition_ii " << (gc.condition_ii ? "true" : "false")
           << " (gamma(f0) " << fmt(gc.gamma_f0) << " vs Gamma0 " << fmt(gc.gamma0)
           << ")\n";
  }

  SegmentOptions opts;
  opts.threads = cfg.threads;
  opts.keep_states = true;
  opts.blowup_ceiling = cfg.blowup_ceiling;
  opts.user_dt = cfg.practical_dt;
  opts.gamma_R0 = cfg.r0_override > 0.0 ? cfg.r0_override
                  : have_gc             ? gc.r0
                                        : 1.0;
  opts.gamma_stride = cfg.gamma_stride;
  opts.hp_spec = cfg.hyperplane_spec();

  InvariantOptions iopts;
  iopts.moment_s = cfg.s;
  iopts.hp_spec = opts.hp_spec;

  TimeSeries merged;
  std::vector<Distribution> states;
  Distribution state = f0;
  double t_offset = 0.0;
  bool invariant_failure = false;
  int written_snapshots = 0;

  for (int seg = 0; seg < cfg.segments; ++seg) {
    SegmentResult res = run_segment(state, params, cfg.n, quad, opts);
    report << "segment " << seg << ": steps "
           << res.series.times.size() - 1 << ", T0 " << fmt(res.constants.t0)
           << ", Delta_n " << fmt(res.constants.delta_n) << ", K_inf "
           << fmt(res.constants.k_inf) << ", E_inf " << fmt(res.constants.e_inf)
           << "\n";

    if (!res.series.blown_up) {
      const SchemeInvariantReport inv =
          verify_scheme_invariants(res.series, res.states, res.constants, params, iopts);
      print_checks(report, inv);
      if (!inv.all_ok) invariant_failure = true;
    }

    const std::size_t skip = seg == 0 ? 0 : 1;
    for (std::size_t i = skip; i < res.series.times.size(); ++i) {
      merged.times.push_back(t_offset + res.series.times[i]);
      merged.records.push_back(res.series.records[i]);
      merged.drifts.push_back(res.series.drifts[i]);
      states.push_back(res.states[i]);
    }
    for (const std::string& note : res.series.notes) {
      merged.notes.push_back("segment " + std::to_string(seg) + ": " + note);
    }
    t_offset = merged.times.back();
    state = res.final_state;

    if (res.series.blown_up) {
      merged.blown_up = true;
      merged.blowup_step = (int)merged.times.size() - 1;
      merged.t_max_estimate = t_offset;
      break;
    }
  }

  write_timeseries_csv((dir / "timeseries.csv").string(), merged, cfg.csv_digits);
  write_snapshot((dir / "final_state.bnk").string(), state, cfg.gamma, cfg.c_phi);
  if (cfg.snapshot_cadence > 0) {
    for (std::size_t i = 0; i < states.size(); i += (std::size_t)cfg.snapshot_cadence) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%06zu.bnk", i);
      write_snapshot((dir / name).string(), states[i], cfg.gamma, cfg.c_phi);
      ++written_snapshots;
    }
  }

  if (have_gc) {
    monitor_bootstrap(merged, gc, f0);
    report << "bootstrap: max |f|_inf ratio " << fmt(gc.max_linf_ratio)
           << ", max Gamma ratio " << fmt(gc.max_gamma_ratio) << ", t_M ";
    if (gc.t_m_reached) {
      report << "reached at t ~ " << fmt(gc.t_m_estimate) << "\n";
    } else {
      report << "not reached\n";
    }
  }
  for (const std::string& note : merged.notes) report << "note: " << note << "\n";

  if (merged.blown_up) {
    report << "blow-up halt at step " << merged.blowup_step
           << ", T_max estimate " << fmt(merged.t_max_estimate) << "\n";
    std::cout << "blow-up halt; T_max ~ " << fmt(merged.t_max_estimate) << " ("
              << (dir / "run_report.txt").string() << ")\n";
    return kExitBlowup;
  }
  if (invariant_failure) {
    std::cout << "invariant violation; see " << (dir / "run_report.txt").string()
              << "\n";
    return kExitInvariant;
  }
  std::cout << "completed " << merged.times.size() - 1 << " steps to t = "
            << fmt(merged.times.back()) << "; outputs in " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- criteria --

int cmd_criteria(const RunConfig& cfg, const std::string& snapshot_path) {
  const fs::path dir = prepare_out(cfg);
  const Snapshot snap = read_snapshot(snapshot_path);
  KernelParams params = cfg.kernel_params();
  params.c_phi = snap.c_phi;
  params.gamma = snap.gamma;
  params.d = snap.f.grid.d;

  const double m0 = moment(snap.f, 0.0);
  const double m2 = moment(snap.f, 2.0);
  if (m0 <= 0.0) {
    std::cerr << "snapshot carries zero mass; criteria are undefined\n";
    return kExitConfig;
  }

  std::ofstream txt(dir / "criteria_report.txt", std::ios::binary);
  std::ofstream kv(dir / "criteria_report.kv", std::ios::binary);
  const auto put = [&](const std::string& key, const std::string& value) {
    kv << key << "=" << value << "\n";
  };

  const GlobalCriterionReport gc =
      global_criterion(snap.f, params, cfg.s, cfg.gamma_stride);
  txt << "mass " << fmt(m0) << ", energy " << fmt(m2) << "\n";
  txt << "R0 " << fmt(gc.r0) << ", Gamma0 " << fmt(gc.gamma0) << ", Q~0 "
      << fmt(gc.q_tilde0) << " (bound " << fmt(gc.q0_bound) << ")\n";
  txt << "condition_i " << (gc.condition_i ? "true" : "false") << ", condition_ii "
      << (gc.condition_ii ? "true" : "false") << "\n";
  txt << "C_Q " << fmt(gc.c_q) << " (C_sd " << fmt(gc.c_sd) << ", C_dgamma "
      << fmt(gc.c_dgamma) << "), regime exponent " << fmt(gc.regime_exponent)
      << "\n";
  put("m0", fmt(m0));
  put("m2", fmt(m2));
  put("r0", fmt(gc.r0));
  put("gamma0", fmt(gc.gamma0));
  put("q_tilde0", fmt(gc.q_tilde0));
  put("q0_bound", fmt(gc.q0_bound));
  put("gamma_f0", fmt(gc.gamma_f0));
  put("condition_i", gc.condition_i ? "1" : "0");
  put("condition_ii", gc.condition_ii ? "1" : "0");
  put("c_q", fmt(gc.c_q));
  put("regime_exponent", fmt(gc.regime_exponent));

  const SubcriticalVerdict verdict = subcritical_check(m0, m2, cfg.subcritical_mode);
  txt << "subcritical " << (verdict.subcritical ? "true" : "false") << " (m0 "
      << fmt(m0) << " vs threshold " << fmt(verdict.threshold) << ", coefficient "
      << fmt(verdict.coefficient) << ")\n";
  put("subcritical", verdict.subcritical ? "1" : "0");
  put("threshold", fmt(verdict.threshold));
  put("coefficient", fmt(verdict.coefficient));

  const Vec u = (1.0 / m0) * momentum(snap.f);
  const double m2_centered = m2 - norm2(u) * m0;
  const EquilibriumFit fit = equilibrium_fit(m0, u, m2_centered);
  txt << "equilibrium fit: condensate " << fmt(fit.condensate) << ", beta "
      << fmt(fit.beta) << ", mu " << fmt(fit.mu) << ", residuals ("
      << fmt(fit.residual_m0) << ", " << fmt(fit.residual_m2) << ")\n";
  put("condensate", fmt(fit.condensate));
  put("beta", fmt(fit.beta));
  put("mu", fmt(fit.mu));
  put("residual_m0", fmt(fit.residual_m0));
  put("residual_m2", fmt(fit.residual_m2));

  const double tc = critical_temperature(m0);
  txt << "critical temperature " << fmt(tc) << " (unit mass, unit k_B)\n";
  put("t_c", fmt(tc));

  std::cout << "criteria report written to " << (dir / "criteria_report.txt").string()
            << "\n";
  return fit.converged ? kExitOk : kExitInvariant;
}

// ----------------------------------------------------------------- povzner --

int cmd_povzner(const RunConfig& cfg, int samples) {
  const fs::path dir = prepare_out(cfg);
  const QuadratureSpec quad = QuadratureSpec::product(3);
  std::ofstream txt(dir / "povzner_report.txt", std::ios::binary);
  bool all_ok = true;

  const auto describe = [&](const std::string& label, const PovznerReport& rep) {
    txt << label << ": samples " << rep.samples << ", chi support "
        << rep.chi_support << ", C_G^ " << fmt(rep.c_g_hat) << ", C_H^ "
        << fmt(rep.c_h_hat) << ", sign violations " << rep.sign_violations
        << ", identity gap " << fmt(rep.max_identity_gap) << ", F bounds "
        << (rep.declared_bounds_ok ? "ok" : "violated") << " => "
        << (rep.all_ok ? "pass" : "FAIL") << "\n";
    all_ok = all_ok && rep.all_ok;
  };

  describe("convex power (alpha = 1)",
           check_povzner(power_weight_case(1.0), samples, quad, cfg.seed));
  describe("concave power (alpha = -1/2)",
           check_povzner(power_weight_case(-0.5), samples, quad, cfg.seed + 1));
  PovznerReport logrep =
      check_povzner(log_weight_case(), samples, quad, cfg.seed + 2);
  describe("slow log weight", logrep);
  txt << "slow log weight bilinear C_G^ " << fmt(logrep.c_g_bilinear) << "\n";

  const WeightFunctionReport wf = log_weight_report();
  txt << "log weight profile: zero at origin " << (wf.zero_at_origin ? "yes" : "no")
      << ", increasing " << (wf.increasing ? "yes" : "no") << ", concave "
      << (wf.concave ? "yes" : "no") << ", half-gap tail " << fmt(wf.half_gap_tail)
      << ", weighted tail " << fmt(wf.weighted_gap_tail) << " => "
      << (wf.all_ok ? "pass" : "FAIL") << "\n";
  all_ok = all_ok && wf.all_ok;

  std::cout << "povzner report written to " << (dir / "povzner_report.txt").string()
            << "\n";
  return all_ok ? kExitOk : kExitInvariant;
}

// ---------------------------------------------------------------- appendix --

int cmd_appendix(const RunConfig& cfg, int samples) {
  const fs::path dir = prepare_out(cfg);
  std::ofstream txt(dir / "appendix_report.txt", std::ios::binary);
  bool all_ok = true;

  // Convolution decay, base grid vs one refinement.
  const VelocityGrid g1 = cfg.make_grid();
  const VelocityGrid g2 = VelocityGrid::make(cfg.d, 2 * cfg.N, cfg.V);
  const Distribution f1 = build_initial(g1, cfg.initial);
  const Distribution f2 = build_initial(g2, cfg.initial);
  const IntegrationLemmaReport a1 =
      check_integration_lemma(f1, 1.0, 2.0, 4.0, samples, cfg.seed);
  const IntegrationLemmaReport a1r =
      check_integration_lemma(f2, 1.0, 2.0, 4.0, samples, cfg.seed);
  txt << "convolution decay: C^ " << fmt(a1.c_hat) << " (refined "
      << fmt(a1r.c_hat) << "), exponent b " << fmt(a1.b_exponent) << ", finite "
      << (a1.all_finite && a1r.all_finite ? "yes" : "no") << "\n";
  all_ok = all_ok && a1.all_finite && a1r.all_finite;

  // Sphere potential, two sample counts.
  const Vec origin = zero_vec(cfg.d);
  const SphereBoundReport a2 =
      check_sphere_bound(origin, 1.0, 1.0, cfg.d, samples, cfg.seed);
  const SphereBoundReport a2r =
      check_sphere_bound(origin, 1.0, 1.0, cfg.d, 2 * samples, cfg.seed);
  txt << "sphere potential: C^ " << fmt(a2.c_hat) << " (denser sampling "
      << fmt(a2r.c_hat) << "; near " << fmt(a2.c_hat_near) << ", far "
      << fmt(a2.c_hat_far) << ")\n";
  all_ok = all_ok && a2.all_finite && a2r.all_finite;

  // Gaussian sphere concentration over the n-ladder.
  Vec normal = zero_vec(cfg.d);
  normal[0] = 1.0;
  Vec center = zero_vec(cfg.d);
  const DeltaConcentrationReport a3 = check_delta_concentration(
      normal, 0.3, center, 1.0, {1.0, 4.0, 16.0, 64.0, 256.0}, cfg.d);
  txt << "sphere concentration: sup " << fmt(a3.sup_value) << ", reduction gap "
      << fmt(a3.reduction_gap) << ", bounded "
      << (a3.bounded_ok ? "yes" : "NO") << " (ladder";
  for (double v : a3.ladder_values) txt << " " << fmt(v);
  txt << ")\n";
  all_ok = all_ok && a3.bounded_ok;

  // Weighted-decay ODE bound.
  const DecayOdeReport a4 =
      check_decay_ode(1.0, 0.5, 2.0, 1.0, 2.0, {0.0, 1.0, 2.0, 5.0, 10.0, 40.0}, 5.0);
  txt << "decay ODE: threshold " << fmt(a4.v_threshold) << ", max excess "
      << fmt(a4.max_excess) << ", oracle gap " << fmt(a4.oracle_gap) << " => "
      << (a4.all_ok ? "pass" : "FAIL") << "\n";
  all_ok = all_ok && a4.all_ok;

  // Divergence-trend fit on a synthetic 7/t ladder (self-check of the fitter).
  TimeSeries synth;
  for (int k = 1; k <= 8; ++k) {
    synth.times.push_back(0.1 * k);
    MomentsRecord rec;
    rec.m2_plus_gamma = 7.0 / synth.times.back();
    synth.records.push_back(rec);
    synth.drifts.push_back({});
  }
  const PowerFit pf = blowup_rate_fit(synth);
  txt << "rate fit self-check: c " << fmt(pf.c) << ", exponent " << fmt(pf.exponent)
      << "\n";
  all_ok = all_ok && std::abs(pf.c - 7.0) < 1e-9 && std::abs(pf.exponent + 1.0) < 1e-9;

  std::cout << "appendix report written to "
            << (dir / "appendix_report.txt").string() << "\n";
  return all_ok ? kExitOk : kExitInvariant;
}

// ------------------------------------------------------------------ xcheck --

int cmd_xcheck(const RunConfig& cfg, const std::vector<int>& grids) {
  const fs::path dir = prepare_out(cfg);
  KernelParams params = cfg.kernel_params();
  const QuadratureSpec quad = QuadratureSpec::product(cfg.d);

  std::ofstream csv(dir / "xcheck.csv", std::ios::binary);
  csv << "N,probe,gain_quadrature,gain_carleman,rel_gap\n";
  std::vector<double> gaps;
  for (int N : grids) {
    const VelocityGrid g = VelocityGrid::make(cfg.d, N, cfg.V);
    const Distribution f = build_initial(g, cfg.initial);
    double worst = 0.0;
    for (int probe = 0; probe < 2; ++probe) {
      std::array<int, kMaxDim> idx{};
      for (int ax = 0; ax < cfg.d; ++ax) idx[ax] = N / 2;
      if (probe == 1) idx[0] = N / 2 + N / 8;
      const Vec v = g.node(g.index(idx));
      const double a = q_plus(f, v, params, quad);
      const double b = q_plus_carleman(f, v, params);
      const double gap = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
      worst = std::max(worst, gap);
      csv << N << "," << probe << "," << fmt(a) << "," << fmt(b) << "," << fmt(gap)
          << "\n";
    }
    gaps.push_back(worst);
    std::cout << "N = " << N << ": max relative gap " << fmt(worst) << "\n";
  }
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    if (!(gaps[i] < gaps[i - 1])) monotone = false;
  }
  std::cout << "gap trend " << (monotone ? "decreasing" : "NOT decreasing")
            << "; table in " << (dir / "xcheck.csv").string() << "\n";
  return monotone ? kExitOk : kExitInvariant;
}

// ----------------------------------------------------------- snapshot-info --

int cmd_snapshot_info(const std::string& path) {
  const Snapshot snap = read_snapshot(path);
  const SnapshotMeta meta{snap.f.grid.d, snap.f.grid.N, snap.f.grid.V, snap.gamma,
                          snap.c_phi};
  std::cout << "d " << meta.d << ", N " << meta.N << ", V " << fmt(meta.V)
            << ", gamma " << fmt(meta.gamma) << ", c_phi " << fmt(meta.c_phi)
            << "\n";
  std::cout << "mass " << fmt(moment(snap.f, 0.0)) << ", energy "
            << fmt(moment(snap.f, 2.0)) << ", sup " << fmt(sup_norms(snap.f, 0.0).linf)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"velocity-grid laboratory for the bosonic Boltzmann-Nordheim equation"};
  app.require_subcommand(1);

  CommonFlags sim_fl, cri_fl, pov_fl, apx_fl, xck_fl;
  std::string cri_snapshot, info_snapshot;
  int pov_samples = 2000;
  int apx_samples = 48;
  std::vector<int> xck_grids = {16, 24, 32};

  CLI::App* sim = app.add_subcommand("simulate", "run the explicit Euler scheme");
  add_common(sim, &sim_fl);

  CLI::App* cri = app.add_subcommand("criteria", "evaluate the global-existence and "
                                                 "equilibrium criteria on a snapshot");
  add_common(cri, &cri_fl);
  cri->add_option("snapshot", cri_snapshot, "BNKF1 state file")->required();

  CLI::App* pov = app.add_subcommand("povzner", "run the weight-splitting checks");
  add_common(pov, &pov_fl);
  pov->add_option("--samples", pov_samples, "random pairs per case");

  CLI::App* apx = app.add_subcommand("appendix", "run the auxiliary-estimate checks");
  add_common(apx, &apx_fl);
  apx->add_option("--samples", apx_samples, "sample points per estimate");

  CLI::App* xck = app.add_subcommand(
      "xcheck", "gain-term quadrature vs Carleman form over a grid ladder");
  add_common(xck, &xck_fl);
  xck->add_option("--grids", xck_grids, "grid resolutions of the ladder");

  CLI::App* info = app.add_subcommand("snapshot-info", "print a snapshot header");
  info->add_option("snapshot", info_snapshot, "BNKF1 state file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(resolve_config(sim_fl));
    if (cri->parsed()) return cmd_criteria(resolve_config(cri_fl), cri_snapshot);
    if (pov->parsed()) return cmd_povzner(resolve_config(pov_fl), pov_samples);
    if (apx->parsed()) return cmd_appendix(resolve_config(apx_fl), apx_samples);
    if (xck->parsed()) return cmd_xcheck(resolve_config(xck_fl), xck_grids);
    if (info->parsed()) return cmd_snapshot_info(info_snapshot);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SnapshotError& e) {
    std::cerr << "snapshot error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FitFailure& e) {
    std::cerr << "fit failure: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const StepRejected& e) {
    std::cerr << "step rejected: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
