#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dar/adversary.hpp"
#include "dar/analysis.hpp"
#include "dar/model.hpp"
#include "dar/offline.hpp"
#include "dar/online.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitInconsistent = 3;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

dar::instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dar::domain_error("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return dar::parse_instance(text.str());
}

// write-then-rename so repeated invocations produce byte-identical files
// with no partial states
void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw dar::domain_error("cannot write '" + tmp + "'");
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw dar::domain_error("cannot rename '" + tmp + "' to '" + path + "'");
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    atomic_write(path, content);
}

int cmd_opt(const std::string& file) {
  dar::instance inst = load_instance(file);
  dar::offline_query q;
  q.requests = inst.requests;
  q.cap = inst.cap;
  dar::offline_solution sol = dar::optimal_schedule(q);
  std::cout << "OPT " << num(sol.makespan) << "\n";
  for (const dar::schedule_event& e : sol.sched.events)
    std::cout << "  t=" << num(e.time) << " "
              << (e.kind == dar::event_kind::pickup ? "pickup" : "dropoff")
              << " request " << e.request_index << " at "
              << num(e.position) << "\n";
  return 0;
}

int cmd_run(const std::string& alg_spec, const std::string& file) {
  dar::instance inst = load_instance(file);
  auto alg = dar::make_algorithm(alg_spec);
  dar::simulation_result res = dar::simulate(*alg, inst);
  std::cout << "ALG " << num(res.completion_time) << "\n";
  bool have_opt = false;
  double opt_value = 0;
  try {
    opt_value = dar::opt(inst);
    have_opt = true;
  } catch (const dar::search_limit_error&) {
    std::cout << "OPT skipped (instance beyond exact-solver limit)\n";
  }
  if (have_opt) {
    std::cout << "OPT " << num(opt_value) << "\n";
    double ratio = opt_value == 0 ? 1.0 : res.completion_time / opt_value;
    std::cout << "ratio " << num(ratio) << "\n";
  }
  for (const dar::schedule_record& s : res.schedules)
    std::cout << "S_" << s.index << " t=" << num(s.start_time)
              << " p=" << num(s.start_position) << " end_t=" << num(s.end_time)
              << " end_p=" << num(s.end_position) << " serves "
              << s.request_ids.size() << "\n";
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const dar::request& r = inst.requests[i];
    std::cout << "request " << i << " (" << num(r.origin) << ","
              << num(r.destination) << ";" << num(r.release) << ")"
              << " pickup t=" << num(res.pickup_times[i]) << " dropoff t="
              << num(res.dropoff_times[i]) << "\n";
  }
  if (have_opt && alg_spec.rfind("smarterstart:", 0) == 0) {
    double theta = std::stod(alg_spec.substr(std::string("smarterstart:").size()));
    dar::audit_report audit = dar::audit_simulation(res, inst, theta);
    int failures = 0;
    for (const dar::audit_entry& e : audit.entries)
      if (e.applicable && !e.pass) ++failures;
    std::cout << "audit " << (audit.all_pass() ? "PASS" : "FAIL") << " ("
              << audit.entries.size() << " checks, " << failures
              << " failures)\n";
    if (!audit.all_pass()) return kExitInconsistent;
  }
  return 0;
}

int cmd_adversary(const std::string& alg_spec, double rho, int cap,
                  const std::string& out, bool rho_given) {
  dar::adversary_config cfg;
  cfg.cap = cap;
  cfg.rho = rho_given ? rho : dar::solve_constants().rho_lb;
  auto alg = dar::eagerize(dar::make_algorithm(alg_spec));
  dar::adversary_transcript tr = dar::run_general_lower_bound(*alg, cfg);
  std::string inst_path = out.empty() ? "adversary_instance.txt" : out;
  atomic_write(inst_path, dar::serialize_instance(tr.realized_instance()));
  atomic_write(inst_path + ".log", tr.event_log());
  std::cout << "branch " << tr.branch << "\n";
  std::cout << "ALG " << num(tr.alg_completion) << " OPT "
            << num(tr.opt_value) << " ratio " << num(tr.ratio) << "\n";
  std::cout << "instance " << inst_path << " log " << inst_path << ".log\n";
  if (!(tr.ratio >= cfg.rho - 1e-6)) {
    std::cerr << "ratio fell short of rho - 1e-6\n";
    return kExitInconsistent;
  }
  return 0;
}

int cmd_gen(const std::string& family, double theta, double eps, double q,
            const std::string& out) {
  dar::instance inst;
  if (family == "waiting")
    inst = dar::gen_waiting_lb(theta, eps);
  else if (family == "nowaiting")
    inst = dar::gen_nowaiting_lb(theta, eps);
  else if (family == "gt2")
    inst = dar::gen_theta_gt2(theta, eps);
  else if (family == "luring")
    inst = dar::gen_luring(q, eps, theta);
  else
    throw dar::domain_error("unknown family '" + family +
                            "' (waiting | nowaiting | gt2 | luring)");
  emit(out, dar::serialize_instance(inst));
  return 0;
}

int cmd_sweep(const std::string& grid_spec, double eps,
              const std::string& out) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(grid_spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      step <= 0 || hi < lo)
    throw dar::domain_error("grid must be lo:hi:step with step > 0");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    double t = lo + k * step;
    if (t > hi + step * 1e-9) break;
    grid.push_back(t);
  }
  emit(out, dar::sweep_to_csv(dar::sweep_theta(grid, eps)));
  return 0;
}

int cmd_bounds() {
  dar::bound_constants c = dar::solve_constants();
  std::cout << "rho_lb=" << num(c.rho_lb) << " theta_star="
            << num(c.theta_star) << " rho_star=" << num(c.rho_star) << "\n";
  std::cout << "brackets: rho_lb in [" << num(c.rho_lb_bracket.lo) << ", "
            << num(c.rho_lb_bracket.hi) << "], theta_star in ["
            << num(c.theta_star_bracket.lo) << ", "
            << num(c.theta_star_bracket.hi) << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dial-a-ride on the line: exact solver, online algorithms, "
               "lower-bound adversary"};
  app.require_subcommand(1);

  std::string file, alg_spec, out, family, grid;
  double rho = 0, eps = 1e-3, theta = 0, q = 1.0;
  int cap = 1;

  CLI::App* c_opt = app.add_subcommand("opt", "exact offline optimum");
  c_opt->add_option("file", file, "instance file")->required();

  CLI::App* c_run = app.add_subcommand("run", "simulate an online algorithm");
  c_run->add_option("algorithm", alg_spec,
                    "ignore | smartstart:T | smarterstart:T | replan")
      ->required();
  c_run->add_option("file", file, "instance file")->required();

  CLI::App* c_adv =
      app.add_subcommand("adversary", "run the general lower-bound adversary");
  c_adv->add_option("algorithm", alg_spec, "algorithm (eagerized internally)")
      ->required();
  CLI::Option* rho_opt =
      c_adv->add_option("--rho", rho, "target ratio (default: computed root)");
  c_adv->add_option("--capacity", cap, "finite capacity c >= 1");
  c_adv->add_option("--out", out, "instance output path");

  CLI::App* c_gen = app.add_subcommand("gen", "write a tight instance");
  c_gen->add_option("family", family, "waiting | nowaiting | gt2 | luring")
      ->required();
  c_gen->add_option("theta", theta, "SmarterStart parameter")->required();
  c_gen->add_option("eps", eps, "slack")->required();
  c_gen->add_option("--q", q, "luring target position (luring only)");
  c_gen->add_option("--out", out, "output path (default: stdout)");

  CLI::App* c_sweep = app.add_subcommand("sweep", "bound curves over a grid");
  c_sweep->add_option("grid", grid, "lo:hi:step")->required();
  c_sweep->add_option("--eps", eps, "generator slack");
  c_sweep->add_option("--out", out, "output path (default: stdout)");

  app.add_subcommand("bounds", "print the certified constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_opt->parsed()) return cmd_opt(file);
    if (c_run->parsed()) return cmd_run(alg_spec, file);
    if (c_adv->parsed())
      return cmd_adversary(alg_spec, rho, cap, out, rho_opt->count() > 0);
    if (c_gen->parsed()) return cmd_gen(family, theta, eps, q, out);
    if (c_sweep->parsed()) return cmd_sweep(grid, eps, out);
    return cmd_bounds();
  } catch (const dar::simulation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const dar::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconsistent;
  }
}
