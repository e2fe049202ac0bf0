// mdelab: batch driver for LAS runs, distances and verification reports.
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure. Errors are
// reported as one JSON object on stderr.

#include "mdelab/analysis.hpp"
#include "mdelab/error.hpp"
#include "mdelab/fiber_metric.hpp"
#include "mdelab/io.hpp"
#include "mdelab/las.hpp"
#include "mdelab/particles.hpp"
#include "mdelab/transport.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace mdelab;
using io::format_double;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'", "out");
  out << text;
}

std::vector<double> step_times(const Trajectory& traj) {
  std::vector<double> t;
  for (std::size_t l = 0; l < traj.steps.size(); ++l) t.push_back(traj.time(l));
  return t;
}

void check_samples(const std::vector<double>& samples, double horizon) {
  for (double t : samples) {
    if (!(t >= 0.0 && t <= horizon)) {
      throw ValidationError("sample time " + format_double(t) + " outside [0, T]", "sample");
    }
  }
}

double reach_of(const Trajectory& traj) {
  const double r = std::exp(traj.h1 * traj.final_time()) * (traj.initial_radius + 1.0);
  return std::isfinite(r) && r > 0.0 ? r : traj.initial_radius + 1.0;
}

struct SolveArgs {
  std::string pvf, init, out, format = "csv";
  int n = 0;
  double horizon = 1.0;
  std::vector<double> sample;
};

void run_solve(const SolveArgs& a) {
  const auto spec = io::pvf_from_json(io::read_json_file(a.pvf));
  const auto mu0 = io::measure_from_json(io::read_json_file(a.init));
  check_samples(a.sample, a.horizon);
  const auto traj = las_solve(mu0, spec, a.n, a.horizon);
  auto times = a.sample.empty() ? step_times(traj) : a.sample;
  for (double& t : times) t = std::min(t, traj.final_time());
  if (a.format == "json") {
    emit(a.out, io::trajectory_json(traj, times).dump(1) + "\n");
  } else {
    std::ostringstream os;
    io::write_trajectory_csv(os, traj, times);
    emit(a.out, os.str());
  }
}

struct DistArgs {
  std::vector<std::string> files;
  bool lifted = false;
  bool plan = false;
  std::string out;
};

void run_dist(const DistArgs& a) {
  std::ostringstream os;
  WassersteinResult r;
  if (a.lifted) {
    r = lifted_wasserstein(io::lifted_from_json(io::read_json_file(a.files[0])),
                           io::lifted_from_json(io::read_json_file(a.files[1])));
  } else {
    r = wasserstein(io::measure_from_json(io::read_json_file(a.files[0])),
                    io::measure_from_json(io::read_json_file(a.files[1])));
  }
  os << "distance\n" << format_double(r.distance) << '\n';
  if (a.plan) {
    os << "source,target,weight\n";
    for (const auto& e : r.plan.entries) {
      os << e.source << ',' << e.target << ',' << format_double(e.weight) << '\n';
    }
  }
  emit(a.out, os.str());
}

struct FiberArgs {
  std::vector<std::string> files;
  std::string kind = "fiber";
  std::string out;
};

// Two files: one value. More: consecutive pairs, then first against last,
// the order in which a triangle-inequality check reads.
void run_fiber_dist(const FiberArgs& a) {
  const auto kind = parse_fiber_cost_kind(a.kind);
  std::vector<LiftedMeasure> lifts;
  for (const auto& f : a.files) lifts.push_back(io::lifted_from_json(io::read_json_file(f)));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < lifts.size(); ++i) pairs.emplace_back(i, i + 1);
  if (lifts.size() > 2) pairs.emplace_back(0, lifts.size() - 1);
  std::ostringstream os;
  os << "first,second,kind,value,base_distance\n";
  for (const auto& [i, j] : pairs) {
    const auto r = constrained_fiber_cost(lifts[i], lifts[j], kind);
    os << a.files[i] << ',' << a.files[j] << ',' << to_string(kind) << ',' << format_double(r.value)
       << ',' << format_double(r.base_distance) << '\n';
  }
  emit(a.out, os.str());
}

struct ConvergeArgs {
  std::string pvf, init, oracle, out;
  std::vector<int> n_grid;
  double horizon = 1.0;
  int oracle_atoms = 200;
  double a = 0.0, b = 1.0;
};

void run_converge(const ConvergeArgs& a) {
  const auto spec = io::pvf_from_json(io::read_json_file(a.pvf));
  const auto mu0 = io::measure_from_json(io::read_json_file(a.init));
  OracleParams p;
  p.atoms = a.oracle_atoms;
  p.a = a.a;
  p.b = a.b;
  p.initial = mu0;
  p.fiber = spec.fiber;
  p.field = spec.field;
  p.x0 = mu0[0].position[0];
  if (a.oracle == "median_split_delta" && mu0.size() != 1) {
    throw ValidationError("median_split_delta needs a Dirac initial measure", "init");
  }
  const auto report = convergence_study(spec, mu0, make_oracle(a.oracle, p), a.horizon, a.n_grid);
  std::ostringstream os;
  os << "N,error,slope\n";
  for (const auto& r : report.rows) {
    os << r.n_param << ',' << format_double(r.error) << ','
       << (report.slope ? format_double(*report.slope) : "") << '\n';
  }
  emit(a.out, os.str());
}

struct RunArgs {
  std::string pvf, init, out;
  int n = 0;
  double horizon = 1.0;
};

void run_residual(const RunArgs& a) {
  const auto spec = io::pvf_from_json(io::read_json_file(a.pvf));
  const auto mu0 = io::measure_from_json(io::read_json_file(a.init));
  const auto traj = las_solve(mu0, spec, a.n, a.horizon);
  const auto sol = sample_trajectory(traj);
  const auto profile = residual_profile(sol, test_family(mu0, reach_of(traj)));
  std::ostringstream os;
  os << "t,residual\n";
  for (std::size_t k = 0; k < profile.size(); ++k) {
    os << format_double(sol.times[k]) << ',' << format_double(profile[k]) << '\n';
  }
  emit(a.out, os.str());
}

struct CheckArgs : RunArgs {
  std::string nu;
  double k = 1.0;
};

void run_check(const CheckArgs& a) {
  const auto spec = io::pvf_from_json(io::read_json_file(a.pvf));
  const auto mu0 = io::measure_from_json(io::read_json_file(a.init));
  const auto traj = las_solve(mu0, spec, a.n, a.horizon);
  std::ostringstream os;
  os << "check_name,pass,margin\n";
  auto row = [&](const std::string& name, bool pass, double margin) {
    os << name << ',' << (pass ? "true" : "false") << ',' << format_double(margin) << '\n';
  };

  double mass_err = 0.0;
  for (const auto& s : traj.steps) {
    std::vector<double> m;
    for (const auto& atom : s.atoms()) m.push_back(atom.mass);
    mass_err = std::max(mass_err, std::abs(compensated_sum(m) - 1.0));
  }
  row("mass_conservation", mass_err <= 1e-12, 1e-12 - mass_err);

  const auto support = support_bound_check(traj);
  row("support_bound", support.pass, support.margin);

  // At most 21 evenly spread step times keep the pairwise check cheap.
  std::vector<double> times;
  const std::size_t stride = std::max<std::size_t>(1, traj.steps.size() / 20);
  for (std::size_t l = 0; l < traj.steps.size(); l += stride) times.push_back(traj.time(l));
  if (times.back() != traj.final_time()) times.push_back(traj.final_time());
  const auto lip = time_lipschitz_check(traj, times);
  row("time_lipschitz", lip.pass, lip.margin);

  const int half = static_cast<int>(traj.steps.size() - 1) / 2;
  const int rest = static_cast<int>(traj.steps.size() - 1) - half;
  const double gap = semigroup_check(spec, mu0, a.n, static_cast<double>(half) / a.n,
                                     static_cast<double>(rest) / a.n);
  row("semigroup", gap == 0.0, gap == 0.0 ? 0.0 : -gap);

  if (!a.nu.empty()) {
    const auto nu0 = io::measure_from_json(io::read_json_file(a.nu));
    const auto g = gronwall_check(spec, mu0, nu0, a.n, a.horizon, a.k);
    row("gronwall", g.pass, g.worst_margin);
  }
  emit(a.out, os.str());
}

struct ParticleArgs {
  std::string kernel, init, out;
  int n = 0;
  double horizon = 1.0;
};

void run_particles(const ParticleArgs& a) {
  const auto kj = io::read_json_file(a.kernel);
  const auto kernel = io::kernel_from_json(kj);
  std::optional<double> h1;
  if (kj.contains("h1_constant")) {
    if (!kj.at("h1_constant").is_number()) throw ValidationError("expected a number", "h1_constant");
    h1 = kj.at("h1_constant").get<double>();
  }
  const auto state = io::particles_from_json(io::read_json_file(a.init));
  const auto report = meanfield_compare(state, kernel, a.n, a.horizon, h1);
  std::ostringstream os;
  os << "t,gap\n";
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    os << format_double(report.times[k]) << ',' << format_double(report.gaps[k]) << '\n';
  }
  emit(a.out, os.str());
}

int fail(const std::string& kind, const std::string& message, const std::string& field, int code) {
  std::cerr << io::error_json(kind, message, field) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure differential equations: lattice approximate solutions and checks"};
  app.require_subcommand(1);
  std::function<void()> action;

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run the lattice scheme and write the trajectory");
  s->add_option("--pvf", solve.pvf, "vector field JSON")->required();
  s->add_option("--init", solve.init, "initial measure JSON")->required();
  s->add_option("--n", solve.n, "lattice parameter N")->required()->check(CLI::PositiveNumber);
  s->add_option("--horizon", solve.horizon, "final time T")->required()->check(CLI::PositiveNumber);
  s->add_option("--out", solve.out, "output path (default stdout)");
  s->add_option("--sample", solve.sample, "sample times")->delimiter(',');
  s->add_option("--format", solve.format)->check(CLI::IsMember({"csv", "json"}));
  s->callback([&] { action = [&] { run_solve(solve); }; });

  DistArgs dist;
  auto* d = app.add_subcommand("dist", "Wasserstein distance between two measures");
  d->add_option("files", dist.files, "two measure files")->required()->expected(2);
  d->add_flag("--lifted", dist.lifted, "inputs are lifted measures on TR^n");
  d->add_flag("--plan", dist.plan, "also print the optimal plan");
  d->add_option("--out", dist.out);
  d->callback([&] { action = [&] { run_dist(dist); }; });

  FiberArgs fiber;
  auto* f = app.add_subcommand("fiber-dist", "Fiber cost over optimal base plans");
  f->add_option("files", fiber.files, "lifted measure files")->required()->expected(2, 64);
  f->add_option("--kind", fiber.kind, "fiber | combined | one-sided");
  f->add_option("--out", fiber.out);
  f->callback([&] { action = [&] { run_fiber_dist(fiber); }; });

  ConvergeArgs conv;
  auto* c = app.add_subcommand("converge", "Error against a reference solution over an N grid");
  c->add_option("--pvf", conv.pvf)->required();
  c->add_option("--init", conv.init)->required();
  c->add_option("--oracle", conv.oracle, "reference solution name")->required();
  c->add_option("--n-grid", conv.n_grid)->required()->delimiter(',')->check(CLI::PositiveNumber);
  c->add_option("--horizon", conv.horizon)->required()->check(CLI::PositiveNumber);
  c->add_option("--oracle-atoms", conv.oracle_atoms)->check(CLI::PositiveNumber);
  c->add_option("--a", conv.a, "left end for median_split_uniform");
  c->add_option("--b", conv.b, "right end for median_split_uniform");
  c->add_option("--out", conv.out);
  c->callback([&] { action = [&] { run_converge(conv); }; });

  RunArgs resid;
  auto* r = app.add_subcommand("residual", "Weak-form residual of a LAS trajectory");
  r->add_option("--pvf", resid.pvf)->required();
  r->add_option("--init", resid.init)->required();
  r->add_option("--n", resid.n)->required()->check(CLI::PositiveNumber);
  r->add_option("--horizon", resid.horizon)->required()->check(CLI::PositiveNumber);
  r->add_option("--out", resid.out);
  r->callback([&] { action = [&] { run_residual(resid); }; });

  CheckArgs check;
  auto* k = app.add_subcommand("check", "Support, time-Lipschitz, semigroup and Gronwall checks");
  k->add_option("--pvf", check.pvf)->required();
  k->add_option("--init", check.init)->required();
  k->add_option("--n", check.n)->required()->check(CLI::PositiveNumber);
  k->add_option("--horizon", check.horizon)->required()->check(CLI::PositiveNumber);
  k->add_option("--nu", check.nu, "second initial measure for the Gronwall check");
  k->add_option("--k", check.k, "Lipschitz constant K")->check(CLI::PositiveNumber);
  k->add_option("--out", check.out);
  k->callback([&] { action = [&] { run_check(check); }; });

  ParticleArgs part;
  auto* p = app.add_subcommand("particles", "Particle system against the mean-field LAS");
  p->add_option("--kernel", part.kernel)->required();
  p->add_option("--init", part.init)->required();
  p->add_option("--n", part.n)->required()->check(CLI::PositiveNumber);
  p->add_option("--horizon", part.horizon)->required()->check(CLI::PositiveNumber);
  p->add_option("--out", part.out);
  p->callback([&] { action = [&] { run_particles(part); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("validation", e.what(), "arguments", kExitValidation);
  }

  try {
    action();
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), e.field(), kExitValidation);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), "", kExitNumerical);
  } catch (const std::exception& e) {
    return fail("numerical", e.what(), "", kExitNumerical);
  }
  return 0;
}
