// hamwave: solitary waves and their orbital stability from the command line.
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "checks.hpp"
#include "cli_support.hpp"
#include "hamwave/fkdv_dynamics.hpp"
#include "hamwave/pv_dynamics.hpp"

using namespace hamwave;
using namespace hamwave::cli;

namespace {

struct Context {
  json cfg;
  Provenance prov;
  std::string out;

  std::string path(const std::string& name) const { return out + "/" + name; }
  double num(const char* k) const { return cfg.at(k).get<double>(); }
  int integer(const char* k) const { return cfg.at(k).get<int>(); }
  std::string text(const char* k) const { return cfg.at(k).get<std::string>(); }
  Grid grid() const { return Grid(num("L"), integer("N")); }
};

using Runner = std::function<int(const Context&)>;

struct Subcommand {
  std::string name;
  std::string help;
  std::vector<ParamSpec> specs;
  Runner run;
};

void report_error(const std::string& kind, int code, std::string reason) {
  for (char& ch : reason)
    if (ch == '\n' || ch == '\r') ch = ' ';
  std::cerr << "error kind=" << kind << " code=" << code << " reason=" << reason << std::endl;
}

int fail(const Error& e) {
  int code = exit_code(e.kind());
  report_error(std::string(to_string(e.kind())), code, e.what());
  return code;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Left-aligned columns sized to their widest cell.
void print_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) w[j] = header[j].size();
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size() && j < w.size(); ++j) w[j] = std::max(w[j], r[j].size());
  auto line = [&](const std::vector<std::string>& r) {
    std::string s;
    for (std::size_t j = 0; j < r.size(); ++j) {
      s += r[j];
      if (j + 1 < r.size()) s += std::string(w[j] - r[j].size() + 2, ' ');
    }
    std::cout << s << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  std::cout.flush();
}

/// Shortest round-trip form; NaN becomes an empty cell.
std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Csv {
  std::ostringstream body;
  explicit Csv(const std::string& header) { body << header << '\n'; }
};

void emit_csv(const Context& ctx, const std::string& name, const Csv& csv, const json& seed = nullptr) {
  write_text(ctx.path(name), csv.body.str());
  write_sidecar(ctx.path(name), ctx.prov, seed);
}

void emit_field(const Context& ctx, const std::string& name, const RealField& f) {
  write_csv(ctx.path(name), f);
  write_sidecar(ctx.path(name), ctx.prov);
}

void emit_gnuplot(const Context& ctx, const std::string& stem, const std::string& body) {
  std::string script = "set terminal pngcairo size 900,560\nset output '" + stem +
                       ".png'\nset datafile separator ','\nset key autotitle columnhead\nset grid\n" + body;
  write_text(ctx.path(stem + ".gp"), script);
  write_sidecar(ctx.path(stem + ".gp"), ctx.prov);
}

void emit_report(const Context& ctx, const std::string& name, json report, const json& seed = nullptr) {
  report["provenance"] = ctx.prov.to_json(seed);
  write_json(ctx.path(name), report);
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json spectral_json(const SpectralReport& r) {
  return {{"eigenvalues", vec_json(r.eigenvalues)},
          {"negative_count", r.negative_count},
          {"near_zero_count", r.near_zero_count},
          {"mu_sq", r.mu_sq},
          {"zero_eigenvalue", r.zero_eigenvalue},
          {"zero_defect", std::abs(r.zero_eigenvalue)},
          {"zero_alignment", r.zero_alignment},
          {"gap", r.gap},
          {"zero_tol", r.zero_tol},
          {"configuration_ok", r.configuration_ok},
          {"verdict", r.verdict}};
}

void emit_eigenvalues(const Context& ctx, const SpectralReport& r) {
  Csv csv("index,eigenvalue");
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) csv.body << i << ',' << csv_num(r.eigenvalues(i)) << '\n';
  emit_csv(ctx, "eigenvalues.csv", csv);
  emit_gnuplot(ctx, "eigenvalues",
               "set xlabel 'index'\nset ylabel 'eigenvalue'\nplot 'eigenvalues.csv' using 1:2 with points pt 7\n");
}

int spectral_exit(const SpectralReport& r) {
  if (r.configuration_ok) return 0;
  report_error("SpectralConfigViolation", 4,
               "expected one negative and one near-zero eigenvalue, found " + std::to_string(r.negative_count) +
                   " and " + std::to_string(r.near_zero_count));
  return 4;
}

// --- fKdV -------------------------------------------------------------------

/// Closed-form ground states: alpha = 2 (any p) and Benjamin-Ono (alpha = 1, p = 2).
std::optional<double> exact_ground_state(const ModelParams& mp, double x) {
  if (mp.alpha == 2.0) {
    double s = 1.0 / std::cosh((mp.p - 1) * x / 2);
    return std::pow((mp.p + 1) / 2.0 * s * s, 1.0 / (mp.p - 1));
  }
  if (mp.alpha == 1.0 && mp.p == 2) return 2.0 / (1.0 + x * x);
  return std::nullopt;
}

int run_ground_state(const Context& ctx) {
  ModelParams mp{ctx.num("alpha"), ctx.integer("p")};
  GroundState gs = solve_ground_state(mp, ctx.grid(), ctx.num("tol"), ctx.integer("max_iter"));
  emit_field(ctx, "q.csv", gs.Q);
  emit_gnuplot(ctx, "q", "set xlabel 'x'\nset ylabel 'Q'\nplot 'q.csv' using 1:2 with lines lw 2\n");

  json rep = {{"alpha", mp.alpha}, {"p", mp.p}, {"L", gs.grid.L()}, {"N", gs.grid.N()},
              {"iterations", gs.iterations}, {"residual", gs.residual_norm}};
  std::vector<std::vector<std::string>> rows = {{"iterations", std::to_string(gs.iterations)},
                                                {"residual", g6(gs.residual_norm)}};
  if (exact_ground_state(mp, 0.0)) {
    double err = 0.0;
    for (int j = 0; j < gs.grid.N(); ++j) err = std::max(err, std::abs(gs.Q.v(j) - *exact_ground_state(mp, gs.grid.x(j))));
    rep["max_error_vs_exact"] = err;
    rows.push_back({"max error vs exact", g6(err)});
  }
  emit_report(ctx, "ground_state.json", rep);
  print_table({"ground state", "alpha=" + g6(mp.alpha) + " p=" + std::to_string(mp.p)}, rows);
  return 0;
}

// Domains that resolve the algebraic tails of the small-alpha profiles.
Grid auto_grid(const Context& ctx, double alpha) {
  if (ctx.num("L") > 0 && ctx.integer("N") > 0) return ctx.grid();
  return alpha >= 1.5 ? Grid(40.0, 512) : Grid(200.0, 4096);
}

Verdict numeric_verdict(double d2) {
  if (std::abs(d2) < 1e-8) return Verdict::Critical;
  return d2 > 0 ? Verdict::Stable : Verdict::Unstable;
}

int run_stability_map(const Context& ctx) {
  struct Case {
    ModelParams mp;
    Verdict criterion = Verdict::Critical;
    std::optional<Verdict> numeric;
    double d2 = NAN, closed = NAN;
    std::optional<std::string> inadmissible;  ///< outside the energy-subcritical range
    std::optional<Error> error;
  };
  std::vector<Case> cases;
  for (double alpha : sweep_values(ctx.cfg, "alpha"))
    for (double p : sweep_values(ctx.cfg, "p")) {
      Case cs;
      cs.mp = {alpha, static_cast<int>(p)};
      cases.push_back(cs);
    }

  const double c = ctx.num("c"), h = ctx.num("diff_step");
  parallel_for(cases.size(), [&](std::size_t i) {
    Case& cs = cases[i];
    try {
      cs.criterion = classify_stability(cs.mp);
    } catch (const Error& e) {
      cs.inadmissible = e.what();
      return;
    }
    try {
      SolitonFamily fam{solve_ground_state(cs.mp, auto_grid(ctx, cs.mp.alpha), ctx.num("tol"), ctx.integer("max_iter"))};
      cs.d2 = d_second(fam, c, h);
      cs.closed = d_second_closed_form(fam, c);
      cs.numeric = numeric_verdict(cs.d2);
    } catch (const Error& e) {
      cs.error = e;
    }
  });

  Csv csv("alpha,p,criterion,numeric,agree,d2_numeric,d2_closed,status");
  std::vector<std::vector<std::string>> rows;
  const Error* first_error = nullptr;
  std::size_t admissible = 0;
  for (const Case& cs : cases) {
    std::string crit = cs.inadmissible ? "" : to_string(cs.criterion);
    std::string num = cs.numeric ? to_string(*cs.numeric) : "";
    std::string agree = cs.numeric ? (*cs.numeric == cs.criterion ? "yes" : "no") : "";
    std::string status = cs.inadmissible ? "inadmissible" : cs.error ? std::string(to_string(cs.error->kind())) : "ok";
    csv.body << csv_num(cs.mp.alpha) << ',' << cs.mp.p << ',' << crit << ',' << num << ',' << agree << ',' << csv_num(cs.d2)
             << ',' << csv_num(cs.closed) << ',' << status << '\n';
    auto cell = [](double v) { return std::isnan(v) ? std::string() : g6(v); };
    rows.push_back({g6(cs.mp.alpha), std::to_string(cs.mp.p), crit, num, agree, cell(cs.d2), cell(cs.closed), status});
    if (!cs.inadmissible) ++admissible;
    if (cs.error && !first_error) first_error = &*cs.error;
  }
  emit_csv(ctx, "stability_map.csv", csv);
  emit_gnuplot(ctx, "stability_map",
               "set xlabel 'alpha'\nset ylabel 'p'\nset key outside\n"
               "plot 'stability_map.csv' using 1:(stringcolumn(4) eq 'Stable' ? $2 : 1/0) with points pt 7 title "
               "'stable', \\\n     '' using 1:(stringcolumn(4) eq 'Unstable' ? $2 : 1/0) with points pt 5 title "
               "'unstable', \\\n     '' using 1:(stringcolumn(4) eq 'Critical' ? $2 : 1/0) with points pt 9 title "
               "'critical', \\\n     [0.3:2] 2*x+1 with lines dt 2 title 'p = 2 alpha + 1'\n");
  print_table({"alpha", "p", "criterion", "numeric", "agree", "d''", "closed form", "status"}, rows);
  if (first_error) return fail(*first_error);
  if (admissible == 0) {
    report_error("InvalidParameter", 3, "no admissible (alpha, p) pair in the sweep: " + *cases.front().inadmissible);
    return 3;
  }
  return 0;
}

int run_spectrum(const Context& ctx) {
  ModelParams mp{ctx.num("alpha"), ctx.integer("p")};
  const double c = ctx.num("c");
  SolitonFamily fam{solve_ground_state(mp, ctx.grid(), ctx.num("tol"), ctx.integer("max_iter"))};
  OperatorMatrix m = assemble_linearized(fam, c, fam.ground.grid);
  SpectralReport r = spectral_report(m, fam, c, ctx.integer("keep"), ctx.num("zero_tol"), false);
  json rep = spectral_json(r);
  rep["alpha"] = mp.alpha;
  rep["p"] = mp.p;
  rep["c"] = c;
  rep["symmetry_defect"] = m.symmetry_defect;
  emit_report(ctx, "spectrum.json", rep);
  emit_eigenvalues(ctx, r);
  print_table({"quantity", "value"}, {{"lowest eigenvalue", g6(r.eigenvalues(0))},
                                      {"zero eigenvalue", g6(r.zero_eigenvalue)},
                                      {"zero-mode alignment", g6(r.zero_alignment)},
                                      {"gap", g6(r.gap)},
                                      {"counts (neg, zero)", std::to_string(r.negative_count) + ", " +
                                                                 std::to_string(r.near_zero_count)},
                                      {"verdict", r.verdict}});
  return spectral_exit(r);
}

PerturbationDirection parse_direction(const std::string& s) {
  if (s == "random-even") return PerturbationDirection::RandomEven;
  if (s == "negative-mode") return PerturbationDirection::NegativeMode;
  throw Error(ErrorKind::InvalidParameter, "direction must be random-even or negative-mode, got '" + s + "'");
}

/// One seed passes through unchanged; sweep members get derived streams.
std::uint64_t run_seed(const Context& ctx, std::size_t runs, std::size_t i) {
  auto master = ctx.cfg.at("seed").get<std::uint64_t>();
  return runs == 1 ? master : derive_seed(master, i);
}

std::string run_prefix(std::size_t runs, std::size_t i) { return runs == 1 ? "" : "run" + std::to_string(i) + "_"; }

std::string rho_plot(std::size_t runs, const std::string& xcol) {
  std::string s = "set xlabel 't'\nset ylabel 'orbital distance'\nset logscale y\nplot ";
  for (std::size_t i = 0; i < runs; ++i) {
    if (i) s += ", \\\n     ";
    s += "'" + run_prefix(runs, i) + "trajectory.csv' using 1:" + xcol + " with lines title 'run " +
         std::to_string(i) + "'";
  }
  return s + "\n";
}

int run_evolve(const Context& ctx) {
  ModelParams mp{ctx.num("alpha"), ctx.integer("p")};
  const double c = ctx.num("c");
  const auto deltas = sweep_values(ctx.cfg, "delta");
  const PerturbationDirection dir = parse_direction(ctx.text("direction"));
  SolitonFamily fam{solve_ground_state(mp, ctx.grid())};
  std::optional<SpectralReport> spec;
  if (dir == PerturbationDirection::NegativeMode)
    spec = spectral_report(assemble_linearized(fam, c, fam.ground.grid), fam, c);

  std::vector<ExperimentReport> reps(deltas.size());
  std::vector<std::uint64_t> seeds(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    ExperimentConfig ec;
    ec.delta = deltas[i];
    ec.direction = dir;
    ec.seed = seeds[i] = run_seed(ctx, deltas.size(), i);
    ec.evolution.dt = ctx.num("dt");
    ec.evolution.T_final = ctx.num("T");
    ec.evolution.stride = ctx.integer("stride");
    ec.evolution.integrator = ctx.text("integrator");
    reps[i] = stability_experiment(fam, c, ec, spec ? &*spec : nullptr);
  });

  Csv summary("delta,seed,verdict,sup_rho,t_end,t_exit");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const ExperimentReport& r = reps[i];
    const std::string pre = run_prefix(reps.size(), i);
    write_trajectory_csv(ctx.path(pre + "trajectory.csv"), r.trajectory);
    write_sidecar(ctx.path(pre + "trajectory.csv"), ctx.prov, seeds[i]);
    emit_report(ctx, pre + "report.json",
                {{"alpha", mp.alpha},
                 {"p", mp.p},
                 {"c", c},
                 {"delta", r.config.delta},
                 {"direction", to_string(dir)},
                 {"seed", seeds[i]},
                 {"verdict", to_string(r.verdict)},
                 {"sup_rho", r.sup_rho},
                 {"t_end", r.t_end},
                 {"t_exit", r.t_exit},
                 {"blowup", r.blowup},
                 {"reason", r.reason},
                 {"thresholds", {{"K_stable", r.config.K_stable}, {"K_escape", r.config.K_escape}}}},
                seeds[i]);
    summary.body << csv_num(r.config.delta) << ',' << seeds[i] << ',' << to_string(r.verdict) << ','
                 << csv_num(r.sup_rho) << ',' << csv_num(r.t_end) << ',' << csv_num(r.t_exit) << '\n';
    rows.push_back({g6(r.config.delta), std::to_string(seeds[i]), to_string(r.verdict), g6(r.sup_rho / r.config.delta),
                    g6(r.t_end), r.reason});
  }
  emit_csv(ctx, "summary.csv", summary, ctx.cfg.at("seed"));
  emit_gnuplot(ctx, "rho", rho_plot(reps.size(), "5"));
  print_table({"delta", "seed", "verdict", "sup rho/delta", "t_end", "reason"}, rows);
  return 0;
}

// --- point vortex -------------------------------------------------------------

PVParams pv_params(const Context& ctx, double a) {
  PVParams p;
  p.eps = ctx.num("eps");
  p.a = a;
  p.g = ctx.num("g");
  p.b = ctx.num("b");
  return p;
}

NewtonOptions newton_options(const Context& ctx) {
  NewtonOptions o;
  o.M = ctx.integer("M");
  if (ctx.cfg.contains("tol")) o.tol = ctx.num("tol");
  if (ctx.cfg.contains("max_iter")) o.max_iter = ctx.integer("max_iter");
  return o;
}

PVWave solve_pv(const Context& ctx) {
  return solve_traveling_wave(pv_params(ctx, ctx.num("a")), ctx.grid(), newton_options(ctx));
}

int run_pv_solve(const Context& ctx) {
  PVWave w = solve_pv(ctx);
  const PVParams& p = w.params;
  emit_field(ctx, "eta.csv", w.eta);
  emit_field(ctx, "phi.csv", w.phi);
  emit_gnuplot(ctx, "pv_wave",
               "set xlabel 'x'\nplot 'eta.csv' using 1:2 with lines lw 2 title 'eta', "
               "'phi.csv' using 1:2 with lines lw 2 title 'phi'\n");
  emit_report(ctx, "pv_wave.json",
              {{"eps", p.eps},
               {"a", p.a},
               {"g", p.g},
               {"b", p.b},
               {"c", w.c},
               {"c_leading", -p.eps / (4 * M_PI * p.a)},
               {"residuals", {{"F1", w.res_F1}, {"F2", w.res_F2}, {"F3", w.res_F3}}},
               {"newton_steps", w.newton_steps},
               {"xbar", {w.xbar(0), w.xbar(1)}},
               {"M", w.M},
               {"N", w.grid().N()},
               {"L", w.grid().L()}});
  print_table({"quantity", "value"}, {{"c", g6(w.c)},
                                      {"-eps/(4 pi a)", g6(-p.eps / (4 * M_PI * p.a))},
                                      {"max residual", g6(std::max({w.res_F1, w.res_F2, std::abs(w.res_F3)}))},
                                      {"newton steps", std::to_string(w.newton_steps)}});
  return 0;
}

int run_pv_d2(const Context& ctx) {
  const auto as = sweep_values(ctx.cfg, "a");
  std::vector<double> d2(as.size());
  parallel_for(as.size(), [&](std::size_t i) {
    d2[i] = pv_d_second(pv_params(ctx, as[i]), ctx.grid(), newton_options(ctx), ctx.num("diff_step"));
  });
  Csv csv("a,d2,reference");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < as.size(); ++i) {
    double ref = 4 * M_PI * as[i] * as[i];
    csv.body << csv_num(as[i]) << ',' << csv_num(d2[i]) << ',' << csv_num(ref) << '\n';
    rows.push_back({g6(as[i]), g6(d2[i]), g6(ref), g6(d2[i] / ref - 1)});
  }
  emit_csv(ctx, "d2.csv", csv);
  emit_gnuplot(ctx, "d2",
               "set xlabel 'a'\nset ylabel \"d''\"\nplot 'd2.csv' using 1:2 with linespoints pt 7, "
               "'' using 1:3 with lines dt 2\n");
  print_table({"a", "d''", "4 pi a^2", "relative diff"}, rows);
  return 0;
}

int run_pv_spectrum(const Context& ctx) {
  PVWave w = solve_pv(ctx);
  PVLinearization lin = assemble_pv_Hc(w, ctx.integer("M"));
  SpectralReport r = pv_spectral_report(lin, w, ctx.num("zero_tol"), false);
  double cmin = constrained_rayleigh_min(lin.op, pv_constraints(lin));
  json rep = spectral_json(r);
  rep["eps"] = w.params.eps;
  rep["a"] = w.params.a;
  rep["c"] = w.c;
  rep["dimension"] = lin.op.dim();
  rep["constrained_min"] = cmin;
  rep["dn_symmetry_defect"] = lin.dn_symmetry_defect;
  rep["simplified_a33"] = lin.used_simplified;
  emit_report(ctx, "spectrum.json", rep);
  emit_eigenvalues(ctx, r);
  print_table({"quantity", "value"}, {{"negative eigenvalue", g6(r.eigenvalues(0))},
                                      {"zero eigenvalue", g6(r.zero_eigenvalue)},
                                      {"zero-mode alignment", g6(r.zero_alignment)},
                                      {"gap", g6(r.gap)},
                                      {"constrained minimum", g6(cmin)},
                                      {"verdict", r.verdict}});
  return spectral_exit(r);
}

/// Smooth localized eta bump from `seed`, scaled to H^1 norm delta.
RealField eta_perturbation(const Grid& g, double delta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(-2.0, 2.0), width(0.5, 1.5);
  const double x0 = center(rng), w = width(rng);
  RealField f = RealField::from_function(g, [&](double x) { return std::exp(-(x - x0) * (x - x0) / (w * w)); });
  return (delta / sobolev_norm(f, 1.0, false)) * f;
}

int run_pv_evolve(const Context& ctx) {
  PVWave w = solve_pv(ctx);
  const auto deltas = sweep_values(ctx.cfg, "delta");
  struct Run {
    std::uint64_t seed = 0;
    std::vector<PVTrajectorySample> tr;
    std::optional<Error> error;
  };
  std::vector<Run> runs(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    Run& r = runs[i];
    r.seed = run_seed(ctx, deltas.size(), i);
    PVState u0 = w.state();
    if (deltas[i] != 0.0) u0.eta.v += eta_perturbation(w.grid(), deltas[i], r.seed).v;
    PVEvolutionConfig cfg;
    cfg.dt = ctx.num("dt");
    cfg.T_final = ctx.num("T");
    cfg.stride = ctx.integer("stride");
    cfg.M = ctx.integer("M");
    cfg.exclusion = ctx.num("exclusion");
    try {
      r.tr = pv_evolve(u0, w.params, cfg, &w);
    } catch (const Error& e) {
      r.error = e;
    }
  });

  std::vector<std::vector<std::string>> rows;
  const Error* first_error = nullptr;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    const std::string pre = run_prefix(runs.size(), i);
    json rep = {{"eps", w.params.eps}, {"a", w.params.a}, {"c", w.c}, {"delta", deltas[i]}, {"seed", r.seed}};
    if (r.error) {
      rep["status"] = std::string(to_string(r.error->kind()));
      rep["abort_reason"] = r.error->what();
      rows.push_back({g6(deltas[i]), std::to_string(r.seed), "", "", "", rep["status"]});
      if (!first_error) first_error = &*r.error;
    } else {
      double sup = 0.0, dE = 0.0, dP = 0.0;
      for (const auto& s : r.tr) {
        sup = std::max(sup, s.rho);
        dE = std::max(dE, std::abs(s.E - r.tr[0].E) / std::abs(r.tr[0].E));
        dP = std::max(dP, std::abs(s.P - r.tr[0].P) / std::abs(r.tr[0].P));
      }
      rep["status"] = "ok";
      rep["sup_rho"] = sup;
      rep["energy_drift"] = dE;
      rep["momentum_drift"] = dP;
      rep["t_end"] = r.tr.back().t;
      rep["xbar_end"] = {r.tr.back().xbar(0), r.tr.back().xbar(1)};
      write_pv_trajectory_csv(ctx.path(pre + "trajectory.csv"), r.tr);
      write_sidecar(ctx.path(pre + "trajectory.csv"), ctx.prov, r.seed);
      rows.push_back({g6(deltas[i]), std::to_string(r.seed), g6(sup), g6(dE), g6(dP), "ok"});
    }
    emit_report(ctx, pre + "report.json", rep, r.seed);
  }
  emit_gnuplot(ctx, "rho", rho_plot(runs.size(), "6"));
  print_table({"delta", "seed", "sup rho", "E drift", "P drift", "status"}, rows);
  return first_error ? fail(*first_error) : 0;
}

int run_check(const Context&) {
  int failed = 0;
  checks::run_acceptance([&](const checks::CheckResult& r) {
    std::cout << checks::format_line(r) << std::endl;
    if (!r.pass) ++failed;
  });
  std::cout << (failed ? std::to_string(failed) + " of 11 checks failed" : "all 11 checks passed") << std::endl;
  return failed ? 1 : 0;
}

std::vector<Subcommand> subcommands() {
  auto fkdv_keys = [](double L, int N) {
    return std::vector<ParamSpec>{param("alpha", 2.0), param("p", 2), param("L", L), param("N", N)};
  };
  auto pv_keys = [] {
    return std::vector<ParamSpec>{param("eps", 1e-2), param("a", 1.0), param("g", 1.0), param("b", 1.0),
                                  param("L", 25.6),   param("N", 256), param("M", 4)};
  };
  auto with = [](std::vector<ParamSpec> base, std::vector<ParamSpec> more) {
    base.insert(base.end(), more.begin(), more.end());
    base.push_back(param("out", "out"));
    return base;
  };
  std::vector<ParamSpec> pv_d2_keys = with(pv_keys(), {param("diff_step", 1e-3)});
  pv_d2_keys[1] = sweep_param("a", 1.0);

  return {
      {"ground-state", "fKdV ground state Q at c = 1",
       with(fkdv_keys(50.0, 1024), {param("tol", 1e-12), param("max_iter", 2000)}), run_ground_state},
      {"stability-map", "stability verdicts over (alpha, p) sweeps",
       with({sweep_param("alpha", "0.4,0.6,1,2"), sweep_param("p", "2,3,4,6"), param("c", 1.0), param("L", 0.0),
             param("N", 0), param("diff_step", 1e-3), param("tol", 1e-12), param("max_iter", 2000)},
            {}),
       run_stability_map},
      {"spectrum", "spectrum of the linearized fKdV operator",
       with(fkdv_keys(50.0, 1024), {param("c", 1.0), param("keep", 8), param("zero_tol", 1e-6),
                                    param("tol", 1e-12), param("max_iter", 2000)}),
       run_spectrum},
      {"evolve", "perturbed fKdV soliton evolution with orbital-distance tracking",
       with(fkdv_keys(50.0, 1024),
            {param("c", 1.0), param("dt", 0.0), param("T", 50.0), param("stride", 100), param("delta", 1e-3),
             param("direction", "random-even"), param("seed", 42), param("integrator", "etdrk4")}),
       run_evolve},
      {"pv-solve", "point-vortex traveling wave by Newton",
       with(pv_keys(), {param("tol", 1e-12), param("max_iter", 20)}), run_pv_solve},
      {"pv-d2", "point-vortex moment of instability d''", pv_d2_keys, run_pv_d2},
      {"pv-spectrum", "spectrum of the point-vortex augmented Hessian", with(pv_keys(), {param("zero_tol", 1e-9)}),
       run_pv_spectrum},
      {"pv-evolve", "point-vortex wave evolution with orbital-distance tracking",
       with(pv_keys(), {param("dt", 0.0), param("T", 5.0), param("stride", 25), param("delta", 0.0),
                        param("seed", 42), param("exclusion", 0.2)}),
       run_pv_evolve},
      {"check", "run the acceptance suite", {}, run_check},
  };
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Subcommand> subs = subcommands();
  CLI::App app{"hamwave: solitary waves and orbital stability"};
  app.require_subcommand(1);

  struct Bound {
    CLI::App* app;
    std::string config_file;
    bool dump = false;
    std::map<std::string, std::string> values;
  };
  std::vector<Bound> bound(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    Bound& b = bound[i];
    b.app = app.add_subcommand(subs[i].name, subs[i].help);
    b.app->add_option("--config", b.config_file, "JSON config file; flags override its values");
    b.app->add_flag("--dump-config", b.dump, "print the effective config and exit");
    for (const ParamSpec& s : subs[i].specs)
      b.app->add_option("--" + s.name, b.values[s.name], s.help + " [default: " + s.def.dump() + "]");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("InvalidParameter", 3, e.what());
    return 3;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    Bound& b = bound[i];
    if (!b.app->parsed()) continue;
    try {
      json file;
      if (!b.config_file.empty()) {
        std::ifstream in(b.config_file);
        if (!in) throw Error(ErrorKind::IoError, "cannot open " + b.config_file);
        try {
          file = json::parse(in);
        } catch (const json::exception& e) {
          throw Error(ErrorKind::InvalidParameter, b.config_file + ": " + e.what());
        }
      }
      std::map<std::string, std::string> flags;
      for (const ParamSpec& s : subs[i].specs)
        if (b.app->count("--" + s.name) > 0) flags[s.name] = b.values[s.name];
      Context ctx;
      ctx.cfg = effective_config(subs[i].name, subs[i].specs, file, flags);
      if (b.dump) {
        json j = ctx.cfg;
        j["subcommand"] = subs[i].name;
        std::cout << j.dump(2) << std::endl;
        return 0;
      }
      ctx.prov = Provenance{subs[i].name, ctx.cfg};
      if (ctx.cfg.contains("out")) {
        ctx.out = ctx.text("out");
        std::error_code ec;
        std::filesystem::create_directories(ctx.out, ec);
        if (ec) throw Error(ErrorKind::IoError, "cannot create " + ctx.out + ": " + ec.message());
      }
      return subs[i].run(ctx);
    } catch (const Error& e) {
      return fail(e);
    }
  }
  return 3;
}
