// cdil: command-line front end. Every artifact is JSON and embeds the tool
// version and the full configuration.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "json_io.hpp"

using namespace cdil;
using io::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kInconclusive = 3 };

int exit_for(CertStatus s) {
  switch (s) {
    case CertStatus::Feasible: return kOk;
    case CertStatus::Infeasible: return kInfeasible;
    default: return kInconclusive;
  }
}

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tol = 1e-6;
  std::int64_t max_iter = 200000;
  std::string grid = "8x16";
  int verbose = 0;
};

void write(const Common& c, const std::string& command, json config, json result) {
  json doc;
  doc["tool"] = "cdil";
  doc["version"] = CDIL_VERSION;
  doc["command"] = command;
  doc["config"] = std::move(config);
  doc["result"] = std::move(result);
  const std::string text = doc.dump(2) + "\n";
  if (c.out.empty() || c.out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + c.out);
  f << text;
}

void require_seed(const Common& c, const char* what) {
  if (!c.seed_given) throw ValidationError(std::string(what) + " is stochastic: --seed is required");
}

SolverOptions solver(const Common& c) {
  SolverOptions o;
  o.tol.residual_tol = c.tol;
  o.tol.max_iter = c.max_iter;
  o.tol.validate();
  o.seed = c.seed;
  if (c.verbose > 0)
    o.trace = [](std::int64_t it, double res, double margin, double lmax) {
      std::fprintf(stderr, "  it %lld residual %.3e margin %.3e lmax %.3e\n", static_cast<long long>(it), res, margin,
                   lmax);
    };
  return o;
}

json solver_config(const Common& c) {
  Tolerances t;
  t.residual_tol = c.tol;
  t.max_iter = c.max_iter;
  return {{"tolerances", io::to_json(t)}, {"seed", c.seed}};
}

void add_common(CLI::App* app, Common& c, bool solver_flags, bool seed_flag) {
  app->add_option("--out,-o", c.out, "Output path (default stdout)");
  app->add_flag("-v,--verbose", c.verbose, "Progress on stderr");
  if (seed_flag) app->add_option_function<std::uint64_t>("--seed", [&c](std::uint64_t s) { c.seed = s, c.seed_given = true; }, "Master seed");
  if (solver_flags) {
    app->add_option("--tol", c.tol, "Residual tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", c.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--grid", c.grid, "Test-function grid RxA");
  }
}

// ---------------------------------------------------------------- commands

int cmd_variety(const Common& c, const std::string& b_arg, int samples) {
  const auto b = io::blaschke_from(io::load(b_arg));
  const auto p = variety_polynomial(b);
  json cloud = json::array(), boundary = json::array();
  for (int k = 0; k < samples; ++k) {
    const double t = 2 * std::numbers::pi * k / samples;
    for (const double r : {0.25, 0.5, 0.75}) {
      const cplx z = std::polar(r, t);
      cloud.push_back({io::to_json(b(z)), io::to_json(z * b(z))});
    }
    const cplx w = std::polar(1.0, t);
    boundary.push_back({io::to_json(b(w)), io::to_json(w * b(w))});
  }
  write(c, "variety", {{"B", io::to_json(b)}, {"samples", samples}},
        {{"P", io::to_json(p)}, {"interior_points", cloud}, {"boundary_points", boundary}});
  return kOk;
}

int cmd_lift(const Common& c, const std::string& b_arg, const std::string& z_arg) {
  const auto b = io::blaschke_from(io::load(b_arg));
  const cplx z = io::parse_complex(z_arg);
  json v = json::array();
  for (const cplx x : lift_to_VB(b, z)) v.push_back(io::to_json(x));
  write(c, "lift", {{"B", io::to_json(b)}, {"z", io::to_json(z)}}, {{"point", v}});
  return kOk;
}

int cmd_detrep(const Common& c, const std::string& b_arg) {
  require_seed(c, "detrep");
  const auto b = io::blaschke_from(io::load(b_arg));
  const auto rep = determinantal_rep(b);
  Rng rng(c.seed);
  const auto fit = fit_det_constant(rep, variety_polynomial(b), rng);
  json zs = json::array();
  for (const cplx z : rep.zeros) zs.push_back(io::to_json(z));
  write(c, "detrep", {{"B", io::to_json(b)}, {"seed", c.seed}},
        {{"zeros", zs},
         {"M0", io::to_json(rep.m0)},
         {"M1", io::to_json(rep.m1)},
         {"T", io::to_json(rep.t)},
         {"D", rep.d},
         {"proportionality", {{"constant", io::to_json(fit.constant)}, {"relative_spread", fit.relative_spread}}}});
  return kOk;
}

int cmd_measure_to_blaschke(const Common& c, const std::string& m_arg) {
  const auto mu = io::measure_from(io::load(m_arg));
  const auto r = measure_to_blaschke(mu);
  write(c, "measure-to-blaschke", {{"measure", io::to_json(mu)}},
        {{"B", io::to_json(r.phi)}, {"warnings", r.warnings}});
  return kOk;
}

int cmd_blaschke_to_measure(const Common& c, const std::string& b_arg) {
  const auto b = io::blaschke_from(io::load(b_arg));
  const auto r = blaschke_to_measure(b);
  write(c, "blaschke-to-measure", {{"B", io::to_json(b)}},
        {{"measure", io::to_json(r.mu)}, {"total_mass", r.mu.total_mass()}, {"warnings", r.warnings}});
  return kOk;
}

int cmd_constraints(const Common& c, const std::string& m_arg, const std::string& b_arg) {
  const auto mu = io::measure_from(io::load(m_arg));
  const auto b = io::blaschke_from(io::load(b_arg));
  const auto res = constraint_residuals(mu, b);
  double worst = 0.0;
  for (const double v : res) worst = std::max(worst, v);
  write(c, "constraints", {{"measure", io::to_json(mu)}, {"B", io::to_json(b)}},
        {{"residuals", res}, {"max", worst}});
  return kOk;
}

int cmd_annihilator(const Common& c, const std::string& b_arg, const std::string& algebra) {
  const auto b = io::blaschke_from(io::load(b_arg));
  const auto tag = algebra_from_string(algebra);
  const auto basis = annihilator_for(b, tag);
  write(c, "annihilator", {{"B", io::to_json(b)}, {"algebra", algebra}},
        {{"dimension", basis.dimension()}, {"functionals", io::to_json(basis)}});
  return kOk;
}

int cmd_testfns(const Common& c, const std::string& b_arg, const std::string& algebra) {
  const auto b = io::blaschke_from(io::load(b_arg));
  const auto res = io::parse_grid(c.grid);
  const auto grid = build_grid(algebra_from_string(algebra), b, res);
  json fns = json::array();
  for (const auto& f : grid.functions) fns.push_back(io::to_json(f));
  write(c, "testfns sample", {{"B", io::to_json(b)}, {"algebra", algebra}, {"grid", io::to_json(res)}},
        {{"count", grid.functions.size()}, {"functions", fns}});
  return kOk;
}

int cmd_pick(const Common& c, const std::string& p_arg) {
  const auto j = io::load(p_arg);
  const auto p = io::pick_problem_from(j);
  const auto res = io::parse_grid(c.grid);
  const auto r = pick_check(p, build_grid(p.tag, p.base, res), solver(c));
  json config = solver_config(c);
  config["problem"] = j;
  config["grid"] = io::to_json(res);
  write(c, "pick check", config,
        {{"certificate", io::to_json(r.cert)},
         {"verification", io::to_json(r.report)},
         {"generator_count", r.generator_count},
         {"classical_pick", io::to_json(r.classical)},
         {"classical_psd", r.classical_psd}});
  return r.report.ok || r.cert.status == CertStatus::Inconclusive ? exit_for(r.cert.status) : kInconclusive;
}

struct DilationArgs {
  std::string b_arg, algebra = "AB", p1 = "0.3", p2 = "0,-0.4", unitary;
  int verify_factor = 4;
  bool exploratory = false;
};

int cmd_dilation(const Common& c, const DilationArgs& a) {
  require_seed(c, "dilation certify");
  auto cfg = default_dilation_config();
  if (!a.b_arg.empty()) cfg.base = io::blaschke_from(io::load(a.b_arg));
  cfg.tag = algebra_from_string(a.algebra);
  cfg.p1 = io::parse_complex(a.p1);
  cfg.p2 = io::parse_complex(a.p2);
  if (!a.unitary.empty()) cfg.u = io::matrix_from(io::load(a.unitary));
  cfg.grid = io::parse_grid(c.grid);
  cfg.verify_factor = a.verify_factor;
  cfg.seed = c.seed;
  cfg.exploratory = a.exploratory;
  cfg.opts = solver(c);
  const auto r = dilation_certify(cfg);
  json config = solver_config(c);
  config.update({{"B", io::to_json(cfg.base)},
                 {"algebra", a.algebra},
                 {"p1", io::to_json(cfg.p1)},
                 {"p2", io::to_json(cfg.p2)},
                 {"U", io::to_json(cfg.u)},
                 {"grid", io::to_json(cfg.grid)},
                 {"verify_grid_factor", cfg.verify_factor},
                 {"exploratory", cfg.exploratory}});
  json pts = json::array();
  for (const cplx z : r.nodes.points) pts.push_back(io::to_json(z));
  json result = {{"exploratory", r.exploratory},
                 {"sup_norm", r.sup_norm},
                 {"S", {{"points", pts},
                        {"zero_slots", r.nodes.zero_slots},
                        {"fill", r.nodes.fill},
                        {"vandermonde_min_sv", r.nodes.vandermonde_min_sv}}},
                 {"generator_count", r.generator_count},
                 {"certificate", io::to_json(r.cert)},
                 {"verification", io::to_json(r.report)},
                 {"fine_grid", io::to_json(r.fine_grid)},
                 {"fine_verification", io::to_json(r.fine_report)},
                 {"margin_degradation", r.margin_degradation},
                 {"delta", io::to_json(r.delta)}};
  if (r.exploratory) result["label"] = "exploratory: outside the theorem's hypotheses, expected status unknown";
  write(c, "dilation certify", config, result);
  if (r.cert.status == CertStatus::Inconclusive) return kInconclusive;
  return r.fine_report.ok ? exit_for(r.cert.status) : kInconclusive;
}

int cmd_kv_gap(const Common& c, const std::string& b_arg, int trials, std::size_t f_size) {
  require_seed(c, "kv-gap");
  GapConfig g;
  g.base = b_arg.empty() ? BlaschkeProduct({{0.0, 1}, {0.5, 1}, {-0.5, 1}}) : io::blaschke_from(io::load(b_arg));
  g.trials = trials;
  g.f_size = f_size;
  g.grid = io::parse_grid(c.grid);
  g.seed = c.seed;
  g.opts = solver(c);
  const auto w = generator_gap_search(g);
  json config = solver_config(c);
  config.update({{"B", io::to_json(g.base)}, {"trials", trials}, {"f_size", f_size}, {"grid", io::to_json(g.grid)}});
  json result = {{"found", w.found}, {"trials_run", w.trials_run}};
  if (w.found) {
    json nodes = json::array();
    for (const cplx z : w.nodes) nodes.push_back(io::to_json(z));
    result.update({{"trial", w.trial},
                   {"phi", io::to_json(w.phi)},
                   {"nodes", nodes},
                   {"full", {{"certificate", io::to_json(w.full)}, {"verification", io::to_json(w.full_report)}}},
                   {"restricted",
                    {{"certificate", io::to_json(w.restricted)}, {"verification", io::to_json(w.restricted_report)}}}});
  }
  write(c, "kv-gap", config, result);
  return w.found ? kOk : kInconclusive;
}

struct MinimalityArgs {
  std::string b_arg, family = "AB";
  std::vector<std::string> psi0, center;
  double radius = 0.2;
};

int cmd_minimality(const Common& c, const MinimalityArgs& a) {
  require_seed(c, "minimality");
  MinimalityConfig m;
  m.base = a.b_arg.empty() ? BlaschkeProduct::power_of_z(2) : io::blaschke_from(io::load(a.b_arg));
  m.family = algebra_from_string(a.family);
  for (const auto& s : a.psi0) m.psi0.push_back(io::parse_disk_point(s));
  if (m.psi0.empty()) m.psi0 = {DiskPoint(cplx(0.5))};
  for (const auto& s : a.center) m.center.push_back(io::parse_disk_point(s));
  if (m.center.empty()) m.center = m.psi0;
  m.radius = a.radius;
  m.grid = io::parse_grid(c.grid);
  m.seed = c.seed;
  m.opts = solver(c);
  const auto r = minimality_witness(m);
  json p0 = json::array(), ce = json::array(), nodes = json::array();
  for (const auto& p : m.psi0) p0.push_back(io::to_json(p));
  for (const auto& p : m.center) ce.push_back(io::to_json(p));
  for (const cplx z : r.nodes) nodes.push_back(io::to_json(z));
  json config = solver_config(c);
  config.update({{"B", io::to_json(m.base)},
                 {"family", a.family},
                 {"psi0", p0},
                 {"center", ce},
                 {"radius", m.radius},
                 {"grid", io::to_json(m.grid)}});
  write(c, "minimality", config,
        {{"grid_size", r.grid_size},
         {"removed", r.removed},
         {"grid_spacing", r.grid_spacing},
         {"nodes", nodes},
         {"certificate", io::to_json(r.cert)},
         {"verification", io::to_json(r.report)}});
  if (r.cert.status == CertStatus::Inconclusive) return kInconclusive;
  return r.report.ok ? exit_for(r.cert.status) : kInconclusive;
}

// Quick end-to-end checks of the main entry points.
int cmd_selftest(const Common& c) {
  json checks = json::array();
  bool all = true;
  auto record = [&](const char* name, bool ok, const std::string& detail) {
    all = all && ok;
    checks.push_back({{"check", name}, {"ok", ok}, {"detail", detail}});
    if (c.verbose > 0) std::fprintf(stderr, "%s %s: %s\n", ok ? "ok  " : "FAIL", name, detail.c_str());
  };
  {
    const auto phi = measure_to_blaschke(AtomicMeasure({{1.0, 0.5}, {-1.0, 0.5}})).phi;
    const double err = std::abs(phi(0.3) - 0.09) + std::abs(phi(cplx(0.1, 0.2)) - cplx(0.1, 0.2) * cplx(0.1, 0.2));
    record("measure-to-blaschke", err < 1e-12, "z^2 from atoms at +-1, error " + std::to_string(err));
  }
  {
    const auto p = variety_polynomial(BlaschkeProduct::power_of_z(2));
    const bool ok = p.coeffs.size() == 4 && p.coeffs[3][0] == cplx(1.0) && p.coeffs[0][2] == cplx(-1.0);
    record("variety", ok, "z^2 gives x^3 - y^2");
  }
  {
    const BlaschkeProduct b({{0.0, 1}, {0.5, 1}});
    const PickProblem p{AlgebraTag::Full, b, {0.0, 0.5}, {0.0, 0.3}};
    const auto r = pick_check(p, build_grid(AlgebraTag::Full, b, {4, 8}));
    record("pick gap", r.cert.status == CertStatus::Infeasible && r.report.ok && r.classical_psd,
           std::string("status ") + to_string(r.cert.status));
  }
  {
    GapConfig g;
    g.base = BlaschkeProduct({{0.0, 1}, {0.5, 1}, {-0.5, 1}});
    g.trials = 20;
    g.seed = c.seed;
    const auto w = generator_gap_search(g);
    record("kv-gap", w.found && w.full_report.ok && w.restricted_report.ok,
           "witness at trial " + std::to_string(w.trial));
  }
  {
    MinimalityConfig m;
    m.base = BlaschkeProduct::power_of_z(2);
    m.psi0 = m.center = {DiskPoint(cplx(0.5))};
    m.seed = c.seed;
    const auto r = minimality_witness(m);
    record("minimality", r.cert.status == CertStatus::Infeasible && r.report.ok,
           std::string("status ") + to_string(r.cert.status));
  }
  write(c, "selftest", {{"seed", c.seed}}, {{"passed", all}, {"checks", checks}});
  return all ? kOk : kUsage;
}

void configure_threads() {
  if (const char* v = std::getenv("CDIL_THREADS")) {
    const int n = std::atoi(v);
    if (n < 1) throw ValidationError("CDIL_THREADS must be a positive integer");
    omp_set_num_threads(n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cdil: constrained disk algebras, Pick interpolation and dilation certificates"};
  app.set_version_flag("--version", std::string(CDIL_VERSION));
  app.require_subcommand(1);
  Common c;
  std::function<int()> run;

  std::string b_arg, m_arg, z_arg, algebra = "AB", p_arg;
  int samples = 64;

  auto* variety = app.add_subcommand("variety", "Defining polynomial and sampled points of the variety");
  variety->add_option("--B", b_arg, "Blaschke product (JSON file or inline)")->required();
  variety->add_option("--samples", samples, "Angular samples")->check(CLI::PositiveNumber);
  add_common(variety, c, false, false);
  variety->callback([&] { run = [&] { return cmd_variety(c, b_arg, samples); }; });

  auto* lift = app.add_subcommand("lift", "Point (B, zB, ..., z^{N-1}B) above z");
  lift->add_option("--B", b_arg)->required();
  lift->add_option("--z", z_arg, "re or re,im")->required();
  add_common(lift, c, false, false);
  lift->callback([&] { run = [&] { return cmd_lift(c, b_arg, z_arg); }; });

  auto* detrep = app.add_subcommand("detrep", "Determinantal representation");
  detrep->add_option("--B", b_arg)->required();
  add_common(detrep, c, false, true);
  detrep->callback([&] { run = [&] { return cmd_detrep(c, b_arg); }; });

  auto* m2b = app.add_subcommand("measure-to-blaschke", "Atomic measure to Blaschke product");
  m2b->add_option("--measure", m_arg)->required();
  add_common(m2b, c, false, false);
  m2b->callback([&] { run = [&] { return cmd_measure_to_blaschke(c, m_arg); }; });

  auto* b2m = app.add_subcommand("blaschke-to-measure", "Clark measure of a Blaschke product");
  b2m->add_option("--B", b_arg)->required();
  add_common(b2m, c, false, false);
  b2m->callback([&] { run = [&] { return cmd_blaschke_to_measure(c, b_arg); }; });

  auto* cons = app.add_subcommand("constraints", "Moment constraint residuals of a measure");
  cons->add_option("--measure", m_arg)->required();
  cons->add_option("--B", b_arg)->required();
  add_common(cons, c, false, false);
  cons->callback([&] { run = [&] { return cmd_constraints(c, m_arg, b_arg); }; });

  auto* ann = app.add_subcommand("annihilator", "Annihilator basis");
  ann->add_option("--B", b_arg)->required();
  ann->add_option("--algebra", algebra)->check(CLI::IsMember({"AB", "AB0"}));
  add_common(ann, c, false, false);
  ann->callback([&] { run = [&] { return cmd_annihilator(c, b_arg, algebra); }; });

  auto* testfns = app.add_subcommand("testfns", "Test-function grids");
  testfns->require_subcommand(1);
  auto* sample = testfns->add_subcommand("sample", "Emit the grid");
  sample->add_option("--B", b_arg)->required();
  sample->add_option("--algebra", algebra)->check(CLI::IsMember({"AB", "AB0"}));
  add_common(sample, c, true, false);
  sample->callback([&] { run = [&] { return cmd_testfns(c, b_arg, algebra); }; });

  auto* pick = app.add_subcommand("pick", "Pick interpolation");
  pick->require_subcommand(1);
  auto* check = pick->add_subcommand("check", "Cone feasibility of a Pick problem");
  check->add_option("problem", p_arg, "Problem JSON")->required();
  add_common(check, c, true, false);
  check->callback([&] { run = [&] { return cmd_pick(c, p_arg); }; });

  DilationArgs da;
  auto* dil = app.add_subcommand("dilation", "Rational dilation counterexample");
  dil->require_subcommand(1);
  auto* cert = dil->add_subcommand("certify", "Certify that Delta lies outside the cone");
  cert->add_option("--B", da.b_arg, "Blaschke product (default z m_0.5)");
  cert->add_option("--algebra", da.algebra)->check(CLI::IsMember({"AB", "AB0"}));
  cert->add_option("--p1", da.p1);
  cert->add_option("--p2", da.p2);
  cert->add_option("--unitary", da.unitary, "2x2 unitary with nonzero off-diagonal entries (JSON)");
  cert->add_option("--verify-grid-factor", da.verify_factor, "Refinement factor for re-verification")
      ->check(CLI::PositiveNumber);
  cert->add_flag("--exploratory", da.exploratory, "Allow configurations outside the hypotheses");
  add_common(cert, c, true, true);
  cert->callback([&] { run = [&] { return cmd_dilation(c, da); }; });

  int trials = 500;
  std::size_t f_size = 8;
  auto* gap = app.add_subcommand("kv-gap", "Search for a generator gap witness in A_B^0");
  gap->add_option("--B", b_arg, "Blaschke product (default z m_0.5 m_-0.5)");
  gap->add_option("--trials", trials)->check(CLI::PositiveNumber);
  gap->add_option("--f-size", f_size)->check(CLI::PositiveNumber);
  add_common(gap, c, true, true);
  gap->callback([&] {
    if (gap->count("--grid") == 0) c.grid = "4x8";
    run = [&] { return cmd_kv_gap(c, b_arg, trials, f_size); };
  });

  MinimalityArgs ma;
  auto* mini = app.add_subcommand("minimality", "Remove a neighbourhood of psi_0 and decompose psi_0");
  mini->add_option("--B", ma.b_arg, "Blaschke product (default z^2)");
  mini->add_option("--family", ma.family)->check(CLI::IsMember({"AB", "AB0"}));
  mini->add_option("--psi0", ma.psi0, "Parameters of psi_0 (re,im or inf)");
  mini->add_option("--center", ma.center, "Centre of the removed neighbourhood (default psi0)");
  mini->add_option("--radius", ma.radius)->check(CLI::NonNegativeNumber);
  add_common(mini, c, true, true);
  mini->callback([&] {
    if (mini->count("--grid") == 0) c.grid = "4x8";
    run = [&] { return cmd_minimality(c, ma); };
  });

  auto* self = app.add_subcommand("selftest", "Quick end-to-end checks");
  add_common(self, c, false, true);
  self->callback([&] { run = [&] { return cmd_selftest(c); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    configure_threads();
    return run();
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kInconclusive;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
}
