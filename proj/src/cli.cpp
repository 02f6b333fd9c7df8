#include "pioia/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "pioia/metrics.hpp"
#include "pioia/oracle.hpp"

namespace pioia {

namespace {

using nlohmann::json;

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string backend_name(const std::string& flag) {
  return flag.empty() ? default_backend_name() : flag;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::string schedule_text(const UcInstance& inst, const CommitmentSchedule& s) {
  std::ostringstream os;
  for (std::size_t g = 0; g < s.u.size(); ++g) {
    os << "  gen " << inst.generators[g].id << ": ";
    for (int v : s.u[g]) os << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto parse_one = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-') {
      throw std::invalid_argument("bad seed '" + s + "' in '" + text + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t a = parse_one(text.substr(0, dots)), b = parse_one(text.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty seed range '" + text + "'");
    if (b - a >= 100000) throw std::invalid_argument("seed range '" + text + "' is too long");
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(parse_one(item));
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  return seeds;
}

json run_summary(const SolverState& state, const UcInstance& inst, FormulationVariant variant,
                 Method method, const AlgoParams& params, std::optional<double> obj_star) {
  json j;
  j["method"] = to_string(method);
  j["variant"] = to_string(variant);
  j["ub"] = num(state.ub);
  j["lb"] = num(state.lb);
  j["gap"] = num(gap(state.ub, state.lb));
  if (obj_star) j["optg"] = num(optg(state.ub, *obj_star));
  j["vio"] = state.incumbent ? num(violation(inst, variant, state.incumbent->primal)) : json(nullptr);
  j["runtime_s"] = state.elapsed();
  json ms = json::object();
  for (const auto& [name, t] : milestones(state.trace, obj_star, default_milestones(params.eps))) {
    ms[name] = t ? json(*t) : json(nullptr);
  }
  j["milestones"] = ms;
  j["cut_counts"] = {{"soc", state.pool.count(CutKind::kSoc)},
                     {"cap", state.pool.count(CutKind::kCap)},
                     {"benders", state.pool.count(CutKind::kBenders)}};
  j["termination"] = to_string(state.termination);
  j["iterations"] = state.iteration;
  j["events"] = state.events;
  return j;
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const FormulationVariant variant = parse_variant(args.variant);
    const Method method = parse_method(args.method);
    if (method == Method::kM4 && variant == FormulationVariant::kF1) {
      throw std::invalid_argument("method m4 cannot be combined with variant f1: the time-block "
                                  "Benders subproblems need load slacks (use f2 or f3)");
    }
    args.params.validate();
    const UcInstance inst = load_instance(args.instance);
    auto backend = make_backend(backend_name(args.backend));
    const SolverState state = run_pioia(inst, variant, method, args.params, *backend);

    if (!args.trace_path.empty()) state.trace.write_csv(args.trace_path);
    const json summary = run_summary(state, inst, variant, method, args.params, args.obj_star);
    if (!args.summary_path.empty()) write_json(summary, args.summary_path);

    out << "method " << to_string(method) << ", variant " << to_string(variant) << ": "
        << to_string(state.termination) << " after " << state.iteration << " iterations\n";
    out << "UB " << format_number(state.ub) << "  LB " << format_number(state.lb) << "  gap "
        << format_number(gap(state.ub, state.lb)) << "\n";
    if (args.obj_star) out << "OptG " << format_number(optg(state.ub, *args.obj_star)) << "\n";
    if (state.incumbent) out << "schedule:\n" << schedule_text(inst, state.incumbent->schedule);

    if (state.termination == Termination::kConverged) return 0;
    if (state.incumbent) {
      err << "stopped before convergence (" << to_string(state.termination) << ")\n";
      return 2;
    }
    err << "error: no feasible schedule found (" << to_string(state.termination) << ")\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_perturb(const PerturbArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.seeds.empty()) throw std::invalid_argument("no seeds given");
    const UcInstance inst = load_instance(args.instance);
    const std::string stem = std::filesystem::path(args.instance).stem().string();
    std::filesystem::create_directories(args.out_dir);
    for (std::uint64_t seed : args.seeds) {
      std::vector<double> factors;
      const UcInstance p = perturb_loads(inst, args.sigma, seed, args.scale_q, &factors);
      json j = instance_to_json(p);
      j["perturbation"] = {{"source", std::filesystem::path(args.instance).filename().string()},
                           {"source_hash", hash_hex(instance_hash(inst))},
                           {"sigma", args.sigma},
                           {"seed", seed},
                           {"scale_q", args.scale_q},
                           {"factors", factors}};
      const auto path = std::filesystem::path(args.out_dir) / (stem + "_s" + std::to_string(seed) + ".json");
      write_json(j, path.string());
      out << path.string() << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_oracle(const OracleArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const FormulationVariant variant = parse_variant(args.variant);
    const UcInstance inst = load_instance(args.instance);
    const std::string name = backend_name(args.backend);
    auto backend = make_backend(name);
    const OracleResult r = brute_force_optimum(inst, variant, *backend);
    out << "obj* " << format_number(r.obj_star) << "  (" << r.enumerated << " schedules, " << r.solved
        << " solved, " << r.infeasible << " infeasible)\n";
    if (!std::isfinite(r.obj_star)) {
      err << "error: no admissible schedule has a feasible inner model\n";
      return 1;
    }
    out << "schedule:\n" << schedule_text(inst, r.schedule);
    if (args.cross_check) {
      auto other = make_backend(name == "ipm" ? "reference" : "ipm");
      const SolveOutcome o = other->solve_continuous(build_inner(inst, r.schedule, variant));
      const double rel = std::abs(o.objective - r.obj_star) / std::max(1.0, std::abs(r.obj_star));
      out << "cross-check " << to_string(o.status) << " " << format_number(o.objective) << " (rel diff "
          << format_number(rel) << ")\n";
      if (o.status != SolveStatus::kOptimal || rel > 1e-6) {
        err << "error: backends disagree on the best schedule\n";
        return 1;
      }
    }
    if (!args.golden_path.empty()) {
      write_golden({hash_hex(instance_hash(inst)), variant, r.obj_star, r.schedule}, args.golden_path);
      out << "wrote " << args.golden_path << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Progressive outer-inner approximation for SOC-relaxed network-constrained unit commitment"};
  app.require_subcommand(1);

  SolveArgs s;
  std::optional<double> obj_star;
  auto* solve = app.add_subcommand("solve", "run a method on an instance");
  solve->add_option("--instance", s.instance, "instance JSON")->required();
  solve->add_option("--variant", s.variant, "f1 | f2 | f3")->capture_default_str();
  solve->add_option("--method", s.method, "m1 | m2 | m3 | m4")->capture_default_str();
  solve->add_option("--eps", s.params.eps, "relative gap target")->capture_default_str();
  solve->add_option("--abs-gap", s.params.abs_gap, "absolute gap target")->capture_default_str();
  solve->add_option("--eps-tol", s.params.eps_tol, "violation tolerance")->capture_default_str();
  solve->add_option("--eps-par", s.params.eps_par, "parallel-cut tolerance")->capture_default_str();
  solve->add_option("--p-cut", s.params.p_cut, "share of violations cut")->capture_default_str();
  solve->add_option("--mip-gap-init", s.params.mip_gap_init, "initial MIP gap")->capture_default_str();
  solve->add_option("--solver-time-init", s.params.solver_time_init, "initial MILP time limit (s)")
      ->capture_default_str();
  solve->add_option("--eps-lp", s.params.eps_lp, "LP stage gain threshold")->capture_default_str();
  solve->add_option("--eps-ig", s.params.eps_ig, "IG stage gain threshold")->capture_default_str();
  solve->add_option("--k-ig", s.params.k_ig, "generators per IG round (0: ceil(G/4))")->capture_default_str();
  solve->add_option("--max-iter", s.params.max_iter, "round cap per stage")->capture_default_str();
  solve->add_option("--time-budget", s.params.time_budget, "wall budget (s)")->capture_default_str();
  solve->add_option("--backend", s.backend, "ipm | reference (default: PIOIA_BACKEND or ipm)");
  solve->add_option("--seed", s.seed, "recorded; the run itself is deterministic")->capture_default_str();
  solve->add_option("--trace", s.trace_path, "trace CSV path");
  solve->add_option("--summary", s.summary_path, "summary JSON path");
  solve->add_option("--obj-star", obj_star, "known optimum for OptG");
  std::string soc_norm = "supporting";
  solve->add_option("--soc-norm", soc_norm, "supporting | literal")->capture_default_str();

  PerturbArgs p;
  std::string seeds;
  std::string perturb_q = "on";
  auto* perturb = app.add_subcommand("perturb", "write load-perturbed copies of an instance");
  perturb->add_option("--instance", p.instance, "instance JSON")->required();
  perturb->add_option("--sigma", p.sigma, "stddev of the scale noise")->required();
  perturb->add_option("--seeds", seeds, "N, A..B or a comma list")->required();
  perturb->add_option("--out", p.out_dir, "output directory")->capture_default_str();
  perturb->add_option("--perturb-q", perturb_q, "scale reactive load too: on | off")->capture_default_str();

  OracleArgs o;
  auto* oracle = app.add_subcommand("oracle", "brute-force optimum of a tiny instance");
  oracle->add_option("--instance", o.instance, "instance JSON")->required();
  oracle->add_option("--variant", o.variant, "f1 | f2 | f3")->capture_default_str();
  oracle->add_option("--backend", o.backend, "ipm | reference");
  oracle->add_option("--golden", o.golden_path, "write a golden record here");
  oracle->add_flag("--cross-check", o.cross_check, "reprice the schedule with the other backend");

  int n_buses = 3, n_gens = 2, horizon = 4;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a random small instance");
  synth->add_option("--buses", n_buses)->capture_default_str();
  synth->add_option("--gens", n_gens)->capture_default_str();
  synth->add_option("--horizon", horizon)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out", synth_out, "output JSON")->required();

  std::vector<std::string> rev(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (*solve) {
    s.obj_star = obj_star;
    if (soc_norm == "supporting") {
      s.params.soc_norm = SocCutNorm::kSupporting;
    } else if (soc_norm == "literal") {
      s.params.soc_norm = SocCutNorm::kLiteral;
    } else {
      err << "error: --soc-norm must be supporting or literal\n";
      return 1;
    }
    return cmd_solve(s, out, err);
  }
  if (*perturb) {
    try {
      p.seeds = parse_seed_list(seeds);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
    if (perturb_q != "on" && perturb_q != "off") {
      err << "error: --perturb-q must be on or off\n";
      return 1;
    }
    p.scale_q = perturb_q == "on";
    return cmd_perturb(p, out, err);
  }
  if (*synth) {
    try {
      write_instance(generate_synthetic(n_buses, n_gens, horizon, synth_seed), synth_out);
      out << synth_out << "\n";
      return 0;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return cmd_oracle(o, out, err);
}

}  // namespace pioia
