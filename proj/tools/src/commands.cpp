// Copyright 2026 The gexpect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gexpect/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gexpect/cli/acceptance.hpp"
#include "gexpect/errors.hpp"
#include "gexpect/gpde.hpp"
#include "gexpect/gsde.hpp"
#include "gexpect/lattice.hpp"
#include "gexpect/limits.hpp"
#include "gexpect/scenario.hpp"
#include "gexpect/test_function.hpp"

namespace gexp::cli {

namespace {

using nlohmann::json;

const std::vector<int> kDefaultNs = {8, 32, 128, 512};

TestFunction phi_or(const ExperimentConfig& c, const std::string& fallback) {
  return functions::parse(c.phi.empty() ? fallback : c.phi);
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("--out: cannot write '" + path + "'");
  return out;
}

double scaled(double residual, double reference) {
  return residual / std::max(1.0, std::abs(reference));
}

// The ball game: xi in {-1, 0, 1} with P(xi = +-1) = p/2, p in {0.4, 0.5}.
ScenarioDocument scenario_or_ball_game(const ExperimentConfig& c) {
  if (!c.scenario.empty()) return load_scenario(c.scenario);
  ScenarioSet set({"-1", "0", "1"}, {{0.2, 0.6, 0.2}, {0.25, 0.5, 0.25}});
  std::map<std::string, RandomVariable> vars;
  const RandomVariable xi = RandomVariable::scalar(set, {-1.0, 0.0, 1.0});
  vars.emplace("xi", xi);
  vars.emplace("xi^2", xi.map([](double x) { return x * x; }));
  vars.emplace("|xi|", xi.map([](double x) { return std::abs(x); }));
  return ScenarioDocument{std::move(set), std::move(vars)};
}

void gheat(const ExperimentConfig& c, Report& r) {
  const TestFunction phi = phi_or(c, "square");
  const SolverConfig solver = c.solver(phi.radius());
  const GridFunction u = solve_g_parabolic(phi, c.params, c.horizon, solver);
  const double value = u.evaluate(0.0);
  r.outputs = {{"phi", phi.name()}, {"value", value}, {"half_width", solver.half_width},
               {"nx", solver.nx}, {"t", u.t()}};
  if (c.params.mean_certain()) {
    const double t = c.horizon;
    const double hi = c.params.var_hi;
    if (phi.name() == "square") r.check("second_moment", std::abs(value - hi * t), 1e-2);
    if (phi.name() == "quartic") {
      r.check("fourth_moment_rel", std::abs(value - 3 * hi * hi * t * t) / (3 * hi * hi * t * t),
              1e-2);
    }
    if (phi.name() == "neg:square") {
      r.check("lower_second_moment", std::abs(value + c.params.var_lo * t), 1e-2);
    }
  }
  if (!c.out.empty()) {
    std::ofstream out = open_csv(c.out);
    u.write_csv(out);
  }
}

void maximal(const ExperimentConfig& c, Report& r) {
  const TestFunction phi = phi_or(c, "identity");
  const double value =
      maximal_expectation([&](double x) { return phi(x); }, c.params.mu_lo, c.params.mu_hi);
  r.outputs = {{"phi", phi.name()}, {"value", value}};
}

json rows_json(const ConvergenceReport& rep) {
  json rows = json::array();
  for (const ConvergenceRow& row : rep.rows) {
    rows.push_back({{"n", row.n}, {"value", row.value}, {"abs_error", row.abs_error}});
  }
  return rows;
}

void lln(const ExperimentConfig& c, Report& r) {
  const UncertaintyParams& p = c.params;
  std::string fallback = "dist:[" + std::to_string(p.mu_lo) + "," + std::to_string(p.mu_hi) + "]";
  const TestFunction phi = phi_or(c, fallback);
  // Steps mu +- sqrt(var_lo); Dirac steps when var_lo = 0.
  const StepFamily fam = p.var_lo > 0.0
                             ? StepFamily::shifted_rademacher(p.mu_lo, p.mu_hi, std::sqrt(p.var_lo))
                             : StepFamily::dirac(p.mu_lo, p.mu_hi);
  const double reference =
      maximal_expectation([&](double x) { return phi(x); }, p.mu_lo, p.mu_hi);
  const std::vector<int>& ns = c.n.empty() ? kDefaultNs : c.n;
  const ConvergenceReport rep = convergence_report(fam, phi, ns, reference, Law::kLln, c.dp());
  r.outputs = {{"phi", phi.name()}, {"reference", reference}, {"rows", rows_json(rep)},
               {"step_sigma", p.var_lo > 0.0 ? std::sqrt(p.var_lo) : 0.0}};
  r.require("error_nonincreasing", rep.monotone);
  if (!c.out.empty()) {
    std::ofstream out = open_csv(c.out);
    rep.write_csv(out);
  }
}

void clt(const ExperimentConfig& c, Report& r) {
  if (!c.params.mean_certain()) {
    throw ArgumentError("clt: steps are centred; use --mu 0,0");
  }
  const TestFunction phi = phi_or(c, "call:1");
  const double reference = gnormal_expectation(phi, c.params, c.solver(phi.radius()));
  const StepFamily fam = StepFamily::rademacher(c.params.var_lo, c.params.var_hi);
  const std::vector<int>& ns = c.n.empty() ? kDefaultNs : c.n;
  const ConvergenceReport rep = convergence_report(fam, phi, ns, reference, Law::kClt, c.dp());
  r.outputs = {{"phi", phi.name()}, {"reference", reference}, {"rows", rows_json(rep)}};
  r.require("error_nonincreasing", rep.monotone);
  if (!c.out.empty()) {
    std::ofstream out = open_csv(c.out);
    rep.write_csv(out);
  }
}

LatticeModel lattice_of(const ExperimentConfig& c) {
  return LatticeModel(c.steps, c.horizon, c.params.var_lo, c.params.var_hi);
}

void require_centred(const ExperimentConfig& c, const char* what) {
  if (!c.params.mean_certain()) {
    throw ArgumentError(std::string(what) + ": the lattice has no mean uncertainty; use --mu 0,0");
  }
}

void lattice(const ExperimentConfig& c, Report& r) {
  require_centred(c, "lattice");
  const LatticeModel m = lattice_of(c);
  const TestFunction phi = phi_or(c, "square");
  const auto terminal = [&](double x) { return phi(x); };
  const double markov = markov_expectation(m, terminal, c.dp());
  r.outputs = {{"phi", phi.name()}, {"markov_value", markov}};
  if (m.steps() <= LatticeModel::kExactMaxSteps) {
    const int n = m.steps();
    const double exact =
        lattice_expectation(m, [&](const LatticePath& p) { return phi(p.B(n)); });
    r.outputs["exact_value"] = exact;
    r.check("markov_vs_exact", std::abs(markov - exact), 1e-9);
    if (n >= 2) r.check("characterization", gbm_characterization_residual(m), 1e-10);
  }
  if (phi.name() == "square") {
    const double target = m.var_hi() * m.horizon();
    r.check("second_moment", scaled(std::abs(markov - target), target), 1e-10);
  }
}

void qv(const ExperimentConfig& c, Report& r) {
  require_centred(c, "qv");
  const LatticeModel m = lattice_of(c);
  const QuadraticVariation q = quadratic_variation(m);
  r.check("qv_identity", q.identity_residual, 1e-12);
  r.require("qv_within_envelope", q.within_envelope);
  const std::vector<int> orders = c.n.empty() ? std::vector<int>{1, 2, 3} : c.n;
  json moments = json::array();
  for (int k : orders) {
    const QVMoment mo = qv_moment(m, k);
    const double up = std::pow(m.var_hi() * m.horizon(), k);
    const double lo = std::pow(m.var_lo() * m.horizon(), k);
    moments.push_back({{"n", k}, {"upper", mo.upper}, {"lower", mo.lower}});
    r.check("moment_upper_" + std::to_string(k), scaled(std::abs(mo.upper - up), up), 1e-12);
    r.check("moment_lower_" + std::to_string(k), scaled(std::abs(mo.lower - lo), lo), 1e-12);
    if (k == orders.front()) {
      r.outputs["second_moment"] = mo.second_moment;
      r.check("second_moment_bound", mo.second_moment - mo.second_moment_bound, 0.0);
    }
  }
  r.outputs["moments"] = moments;
}

std::vector<std::pair<std::string, AdaptedProcess>> fixed_etas(const LatticeModel& m) {
  const int n = m.steps();
  return {
      {"one", AdaptedProcess::constant(m, n, 1.0)},
      {"sign(B)", AdaptedProcess::generate(
                      m, n, [](const LatticePath& p) { return p.B(p.length()) >= 0 ? 1.0 : -1.0; })},
      {"sin(B)+<B>", AdaptedProcess::generate(m, n, [](const LatticePath& p) {
         return std::sin(p.B(p.length())) + p.qv(p.length());
       })}};
}

void ito(const ExperimentConfig& c, Report& r) {
  require_centred(c, "ito");
  const LatticeModel m = lattice_of(c);
  json rows = json::array();
  for (const auto& [name, eta] : fixed_etas(m)) {
    const PathFunctional integral = ito_integral(m, eta);
    const double plus = lattice_expectation(m, integral);
    const double minus = lattice_expectation(m, [&](const LatticePath& p) { return -integral(p); });
    const IsometryResult iso = isometry_check(m, eta);
    rows.push_back({{"eta", name}, {"mean", plus}, {"mean_of_negative", minus},
                    {"isometry_lhs", iso.lhs}, {"isometry_rhs", iso.rhs}});
    r.check("mean_" + name, std::abs(plus), 1e-12);
    r.check("mean_of_negative_" + name, std::abs(minus), 1e-12);
    r.check("isometry_" + name, scaled(std::abs(iso.lhs - iso.rhs), iso.lhs), 1e-10);
  }
  r.outputs = {{"rows", rows}};
}

void martingale(const ExperimentConfig& c, Report& r) {
  require_centred(c, "martingale");
  const LatticeModel m = lattice_of(c);
  const int n = m.steps();
  const auto etas = fixed_etas(m);
  const AdaptedProcess zero = AdaptedProcess::constant(m, n, 0.0);
  const AdaptedProcess cosine = AdaptedProcess::generate(
      m, n, [](const LatticePath& p) { return std::cos(p.B(p.length())); });
  const AdaptedProcess level =
      AdaptedProcess::generate(m, n, [](const LatticePath& p) { return p.B(p.length()); });
  r.check("phi=0,eta=1", martingale_residual(m, zero, etas[0].second), 1e-12);
  r.check("phi=sign(B),eta=sin(B)+<B>", martingale_residual(m, etas[1].second, etas[2].second),
          1e-12);
  r.check("phi=cos(B),eta=B", martingale_residual(m, cosine, level), 1e-12);
  const double no_drift = martingale_residual(m, zero, etas[0].second, false);
  r.outputs = {{"no_drift_residual", no_drift}};
  r.require("no_drift_residual_positive", no_drift > 1e-4);
}

void sde(const ExperimentConfig& c, Report& r) {
  require_centred(c, "sde");
  const std::string coeff = c.coeff.empty() ? "bs:0.1,0.52,0.2" : c.coeff;
  const GeomParams g = parse_geometric(coeff);
  const double x0 = c.x0.value_or(1.0);
  const std::vector<int> steps = c.n.empty() ? std::vector<int>{4, 8, 12} : c.n;
  const RefinementStudy study =
      euler_refinement(g, c.params.var_lo, c.params.var_hi, c.horizon, steps, x0);
  json rows = json::array();
  for (const RefinementRow& row : study.rows) {
    rows.push_back(
        {{"steps", row.steps}, {"mean_error", row.mean_error}, {"max_error", row.max_error}});
  }
  r.outputs = {{"coeff", coeff},
               {"closed_form", {{"alpha", g.alpha}, {"beta", g.beta}, {"gamma", g.gamma}}},
               {"rows", rows},
               {"ratios", study.ratios}};
  for (std::size_t i = 0; i < study.ratios.size(); ++i) {
    const double ratio = study.ratios[i];
    r.require("ratio_" + std::to_string(i) + "_in_[1.5,3]", ratio >= 1.5 && ratio <= 3.0);
  }
  if (!c.out.empty()) {
    std::ofstream out = open_csv(c.out);
    out << "steps,mean_error,max_error\n" << std::setprecision(17);
    for (const RefinementRow& row : study.rows) {
      out << row.steps << ',' << row.mean_error << ',' << row.max_error << '\n';
    }
  }
}

void bsde(const ExperimentConfig& c, Report& r) {
  require_centred(c, "bsde");
  const LatticeModel m = lattice_of(c);
  const TestFunction phi = phi_or(c, "square");
  const int n = m.steps();
  const double x0 = c.x0.value_or(0.0);
  const AdaptedProcess x = solve_sde(m, SDESpec::brownian(), x0);
  const PathFunctional xi = [&](const LatticePath& p) { return phi(x.along(p, n)); };
  const BSDESpec spec{xi, [](double, double y) { return -y; }, {}, 1.0, 0.0};
  const PicardResult res = picard_bsde(m, spec, x);
  const double plain = lattice_expectation(m, xi);
  const double discounted = std::exp(-c.horizon) * plain;
  r.outputs = {{"phi", phi.name()},       {"driver", "f(x,y) = -y"},
               {"y0", res.y.root()},      {"iterations", res.iterations},
               {"deltas", res.deltas},    {"discounted_reference", discounted}};
  r.check("y0_vs_discount", std::abs(res.y.root() - discounted), 2e-2);
}

void feynman_kac(const ExperimentConfig& c, Report& r) {
  require_centred(c, "feynman-kac");
  const std::string coeff = c.coeff.empty() ? "brownian" : c.coeff;
  const SDESpec sde_spec = parse_coefficients(coeff);
  const TestFunction phi = phi_or(c, "square");
  const LatticeModel m = lattice_of(c);
  const std::vector<double> xs = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const SolverConfig solver = c.solver(std::max(1.0, phi.radius()));
  const FeynmanKacReport rep =
      feynman_kac_check(sde_spec, MarkovBSDE{phi, {}, {}, 0.0, 0.0}, m, solver, xs);
  json rows = json::array();
  for (const FeynmanKacRow& row : rep.rows) {
    rows.push_back({{"x", row.x}, {"u_lattice", row.u_lattice}, {"u_pde", row.u_pde},
                    {"abs_diff", row.abs_diff}});
  }
  r.outputs = {{"coeff", coeff}, {"phi", phi.name()}, {"rows", rows},
               {"half_width", solver.half_width}};
  if (coeff == "brownian" && phi.name() == "square") {
    r.check("residual", rep.residual, 2e-2);
  } else {
    r.outputs["residual"] = rep.residual;
    r.require("residual_finite", std::isfinite(rep.residual));
  }
  if (!c.out.empty()) {
    std::ofstream out = open_csv(c.out);
    rep.write_csv(out);
  }
}

void risk(const ExperimentConfig& c, Report& r) {
  const ScenarioDocument doc = scenario_or_ball_game(c);
  json rows = json::object();
  for (const auto& [name, x] : doc.variables) {
    if (x.dim() != 1) continue;
    const Expectation e = upper_expectation(doc.set, x);
    const double rho = risk_measure(doc.set, x);
    rows[name] = {{"upper_expectation", e.value}, {"argmax", e.argmax}, {"risk", rho},
                  {"l2_norm", lp_norm(doc.set, x, 2.0)}};
    r.check("rho(X+rho(X))_" + name, std::abs(risk_measure(doc.set, x + rho)), 1e-12);
  }
  r.outputs = {{"variables", rows}};
}

void axioms(const ExperimentConfig& c, Report& r) {
  const ScenarioDocument doc = scenario_or_ball_game(c);
  std::vector<RandomVariable> probes;
  for (const auto& [name, x] : doc.variables) {
    if (x.dim() == 1) probes.push_back(x);
  }
  if (probes.empty()) throw ArgumentError("axioms: the scenario has no scalar variables");
  const AxiomReport rep = check_axioms(doc.set, probes);
  for (const AxiomResult& a : rep.results) {
    r.outputs[a.name] = {{"passed", a.passed}, {"checks", a.checks}};
    r.check(a.name, a.worst_violation, 1e-12);
  }
}

void accept(const ExperimentConfig&, Report& r) {
  for (const CriterionResult& cr : run_acceptance()) {
    r.outputs[std::to_string(cr.id)] = {{"title", cr.title},     {"pass", cr.pass},
                                        {"detail", cr.detail},   {"data", cr.data}};
    r.require("criterion_" + std::to_string(cr.id), cr.pass);
  }
}

using Handler = std::function<void(const ExperimentConfig&, Report&)>;

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> table = {
      {"gheat", gheat},           {"maximal", maximal},
      {"lln", lln},               {"clt", clt},
      {"lattice", lattice},       {"qv", qv},
      {"ito", ito},               {"martingale", martingale},
      {"sde", sde},               {"bsde", bsde},
      {"feynman-kac", feynman_kac}, {"risk", risk},
      {"axioms", axioms},         {"accept", accept}};
  return table;
}

const char* describe(const std::string& name) {
  static const std::map<std::string, const char*> text = {
      {"gheat", "solve u_t = G(u_x, u_xx) and report u(T, 0)"},
      {"maximal", "maximal-distribution expectation over [mu_lo, mu_hi]"},
      {"lln", "robust law of large numbers convergence table"},
      {"clt", "robust central limit convergence table"},
      {"lattice", "E[phi(B_T)] on the volatility lattice"},
      {"qv", "quadratic variation identities and moments"},
      {"ito", "Ito integral mean and isometry checks"},
      {"martingale", "G-martingale residuals"},
      {"sde", "Euler vs closed form refinement study"},
      {"bsde", "Picard iteration for a linear-driver BSDE"},
      {"feynman-kac", "lattice BSDE vs PDE cross-check"},
      {"risk", "upper expectation and risk measure of scenario variables"},
      {"axioms", "sublinear-expectation axiom report"},
      {"accept", "run the full acceptance suite"}};
  return text.at(name);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, h] : handlers()) out.push_back(name);
    return out;
  }();
  return names;
}

Report execute(const ExperimentConfig& cfg) {
  const auto it = std::find_if(handlers().begin(), handlers().end(),
                               [&](const auto& h) { return h.first == cfg.command; });
  if (it == handlers().end()) throw ConfigError("unknown command '" + cfg.command + "'");
  Report report;
  report.command = cfg.command;
  report.inputs = cfg.to_json();
  const auto start = std::chrono::steady_clock::now();
  it->second(cfg, report);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gexpect: sublinear expectation experiments", "gexpect"};
  app.require_subcommand(1);
  std::string var, mu, n_list, config_path;
  Overrides o;
  std::string phi, out_path, coeff, scenario;
  double horizon = 0.0, cfl = 0.0, x0 = 0.0;
  int nx = 0, steps = 0;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--var", var, "variance envelope lo,hi");
    sub->add_option("--mu", mu, "mean envelope lo,hi");
    sub->add_option("--phi", phi, "test function (square, quartic, cube, abs, exp, call:K, dist:[a,b], ...)");
    sub->add_option("--T", horizon, "horizon");
    sub->add_option("--n", n_list, "sample sizes / orders, comma separated");
    sub->add_option("--nx", nx, "PDE grid points (odd)");
    sub->add_option("--cfl", cfl, "fraction of the explicit stability bound");
    sub->add_option("--steps", steps, "lattice steps");
    sub->add_option("--x0", x0, "initial state");
    sub->add_option("--coeff", coeff, "SDE coefficients: linear:a,b | bs:mu,nu,sigma | brownian");
    sub->add_option("--scenario", scenario, "scenario JSON file");
    sub->add_option("--out", out_path, "CSV output path");
    sub->add_option("--config", config_path, "JSON config file; flags override it");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  std::string command;
  CLI::App* chosen = app.get_subcommands().front();
  command = chosen->get_name();
  const auto given = [&](const char* flag) { return chosen->count(flag) > 0; };

  Report report;
  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!cfg.command.empty() && cfg.command != command) {
      throw ConfigError("config command '" + cfg.command + "' does not match '" + command + "'");
    }
    cfg.command = command;
    if (given("--var")) o.var = parse_pair(var, "--var");
    if (given("--mu")) o.mu = parse_pair(mu, "--mu");
    if (given("--phi")) o.phi = phi;
    if (given("--T")) o.horizon = horizon;
    if (given("--n")) o.n = parse_int_list(n_list, "--n");
    if (given("--nx")) o.nx = nx;
    if (given("--cfl")) o.cfl = cfl;
    if (given("--steps")) o.steps = steps;
    if (given("--x0")) o.x0 = x0;
    if (given("--coeff")) o.coeff = coeff;
    if (given("--scenario")) o.scenario = scenario;
    if (given("--out")) o.out = out_path;
    apply(cfg, o);
    report = execute(cfg);
  } catch (const ConfigError& e) {
    err << "gexpect " << command << ": " << e.what() << '\n';
    return kUsage;
  } catch (const ArgumentError& e) {
    err << "gexpect " << command << ": " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "gexpect " << command << ": " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError& e) {
    err << "gexpect " << command << ": " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "gexpect " << command << ": " << e.what() << '\n';
    return kContractFailure;
  }
  out << report.to_json().dump(2) << '\n';
  if (command == "accept") {
    for (const auto& [id, item] : report.outputs.items()) {
      err << (item["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << id << ' '
          << item["title"].get<std::string>() << ": " << item["detail"].get<std::string>()
          << '\n';
    }
  }
  return report.pass ? kPass : kContractFailure;
}

}  // namespace gexp::cli
