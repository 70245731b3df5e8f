#ifndef DAR_ANALYSIS_HPP
#define DAR_ANALYSIS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dar/model.hpp"
#include "dar/online.hpp"

// Closed-form bound curves, certified constants, theta sweeps, ratio
// computation, and the structural audit of simulation traces.

namespace dar {

enum class bound_kind { f1, f2, g1, g2 };

// f1 = (2T^2-T+1)/(T^2-1), f2 = (3T^2+3)/(2T+1),
// g1 = (3T^2-2T+1)/(T^2-1), g2 = 4T/(T+1); all for theta > 1.
double bound_value(bound_kind kind, double theta);

struct bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct bound_constants {
  double rho_lb = 0.0;    // second largest root of 4r^3 - 26r^2 + 39r - 5
  bracket rho_lb_bracket;
  double theta_star = 0.0;  // largest solution > 1 of f1 = f2
  bracket theta_star_bracket;
  double rho_star = 0.0;  // f1(theta_star) = f2(theta_star)
};

// Roots isolated by sign-change scanning plus bisection to 1e-12.
bound_constants solve_constants();

struct ratio_report {
  std::vector<double> ratios;
  double supremum = 0.0;
};

// ratio_i = ALG(inst_i) / OPT(inst_i), with 0/0 = 1; OPT = 0 with ALG > 0
// is an error.
ratio_report competitive_ratio(
    const std::function<std::unique_ptr<online_algorithm>()>& make,
    const std::vector<instance>& instances);

struct sweep_row {
  double theta = 0.0;
  std::optional<double> f1, f2, g1, g2;
  std::optional<double> sim_ratio_waiting, sim_ratio_nowaiting, sim_ratio_gt2;
};

// One row per grid point: the bound curves where defined plus the simulated
// SmarterStart(theta) ratio on each applicable tight-instance family.
std::vector<sweep_row> sweep_theta(const std::vector<double>& grid,
                                   double eps);
std::string sweep_to_csv(const std::vector<sweep_row>& rows);

struct audit_entry {
  int schedule_index = 0;
  std::string check;      // "starting-time" | "schedule-length" |
                          // "length-from-origin" | "rightmost-point"
  bool applicable = true;
  bool pass = true;
  double margin = 0.0;    // bound minus observed; >= -1e-9 passes
};

struct audit_report {
  std::vector<audit_entry> entries;
  bool all_pass() const {
    for (const audit_entry& e : entries)
      if (e.applicable && !e.pass) return false;
    return true;
  }
};

// Per-schedule checks of the starting-time bound t_j >= |p_{j+1}|/(theta-1),
// the schedule-length bound (1 + (theta-1)/(theta+1)) OPT, and the two
// imported schedule-geometry bounds (applied mirrored when |x_-| > x_+).
audit_report audit_simulation(const simulation_result& result,
                              const instance& inst, double theta);

}  // namespace dar

#endif  // DAR_ANALYSIS_HPP
