#ifndef DAR_ADVERSARY_HPP
#define DAR_ADVERSARY_HPP

#include <limits>
#include <string>
#include <vector>

#include "dar/model.hpp"
#include "dar/online.hpp"

// The reactive lower-bound adversary: plays against a deterministic eager
// algorithm and forces ratio >= rho on the realized request sequence, plus
// the fixed generators for the tight SmarterStart instance families.

namespace dar {

struct adversary_config {
  double rho = 0.0;      // target ratio; must lie in (2.056, 2.06)
  int cap = 1;           // finite capacity c >= 1
  double epsilon = 1e-3; // slack for the early-exit bookkeeping only
};

// delta := (3 rho^2 - 11) / (-3 rho^3 + 15 rho - 4); validated against the
// interval the construction's inequalities need.
double delta_for(double rho);

// ell(t) = (4 - rho) t - (2 rho - 2) t_L in the path-time diagram.
line line_ell(double t_l, double rho);

// (t_R*, t_L*): earliest admissible serve times for the critical pair.
struct critical_times {
  double t_r_star = 0.0;  // (2 rho - 2) t_L + (rho - 2) t_R
  double t_l_star = 0.0;  // (2 rho - 2) t_R + (rho - 2) t_L
};
critical_times critical_thresholds(double t_l, double t_r, double rho);

// Right-hand side of criticality property (v).
double criticality_ratio_bound(double rho);

struct critical_check {
  bool sweeps_serve_all = false;   // (i)
  bool both_unserved_at_tr = false;  // (ii) first part
  bool position_between = false;     // (ii) second part
  bool right_not_early = false;      // (iii)
  bool left_not_early = false;       // (iv)
  bool ratio_bound = false;          // (v)
  double ratio_margin = 0.0;         // bound - t_R/t_L
  bool all() const {
    return sweeps_serve_all && both_unserved_at_tr && position_between &&
           right_not_early && left_not_early && ratio_bound;
  }
};

struct critical_inputs {
  request sigma_r;  // (t_R, t_R; t_R)
  request sigma_l;  // (-t_L, -t_L; t_L)
  std::vector<request> history;  // everything released up to t_R
  trajectory path;               // covers [0, max serve time]
  double serve_r = 0.0;          // observed/extrapolated serve times
  double serve_l = 0.0;
  double rho = 0.0;
  capacity cap;
};

critical_check check_critical(const critical_inputs& in);

struct released_entry {
  request req;
  std::string trigger;
};

struct adversary_transcript {
  std::vector<released_entry> released;
  int cap = 1;
  double rho = 0.0;
  bool mirrored = false;
  std::string branch;  // stage1-late-load | stage1-split-delivery |
                       // case1 | case2.1 | case2.2
  // trigger times; NaN where the run never got there
  double t_l = std::numeric_limits<double>::quiet_NaN();
  double t_r = std::numeric_limits<double>::quiet_NaN();
  double w = std::numeric_limits<double>::quiet_NaN();
  double t0_plus = std::numeric_limits<double>::quiet_NaN();
  double t_mid = std::numeric_limits<double>::quiet_NaN();
  double p0 = std::numeric_limits<double>::quiet_NaN();
  double p1 = std::numeric_limits<double>::quiet_NaN();
  critical_check criticality;
  bool reached_stage_two = false;
  double alg_completion = 0.0;
  double opt_value = 0.0;   // offline solver on the realized instance
  double claimed_opt = 0.0; // the construction's closed form for the branch
  double ratio = 0.0;
  trajectory alg_path;
  std::string algorithm;

  instance realized_instance() const;
  std::string event_log() const;  // one line per event: "t=<time> <what>"
};

struct eagerness_violation : simulation_error {
  using simulation_error::simulation_error;
};

// Runs the two-stage construction against `alg` (wrap with eagerize() first
// unless the algorithm is eager by itself). Mirrors the world internally
// when the algorithm drifts right before time 1.
adversary_transcript run_general_lower_bound(online_algorithm& alg,
                                             const adversary_config& cfg);

// Tight-instance generators. Each produces the family from the matching
// SmarterStart lower-bound proof, parameterized so that the simulated ratio
// lands exactly on (bound - eps).
instance gen_waiting_lb(double theta, double eps);    // f1, 1 < theta < 2
instance gen_nowaiting_lb(double theta, double eps);  // f2, golden <= theta <= 2
instance gen_theta_gt2(double theta, double eps);     // g1/g2, theta > 2
instance gen_luring(double q, double eps, double theta);

}  // namespace dar

#endif  // DAR_ADVERSARY_HPP
