#include "dar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dar/adversary.hpp"
#include "dar/offline.hpp"

namespace dar {

namespace {

double guard_theta(double theta) {
  if (!(theta > 1.0)) throw domain_error("theta > 1 required");
  return theta;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo > 0) == (fm > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// all roots in [lo, hi] found by sign scanning with the given step
std::vector<std::pair<double, bracket>> scan_roots(
    const std::function<double(double)>& f, double lo, double hi,
    double step) {
  std::vector<std::pair<double, bracket>> out;
  double prev = lo, fprev = f(lo);
  for (double t = lo + step; t <= hi + step / 2; t += step) {
    double ft = f(t);
    if (fprev == 0.0) out.push_back({prev, {prev, prev}});
    else if ((fprev > 0) != (ft > 0))
      out.push_back({bisect(f, prev, t), {prev, t}});
    prev = t;
    fprev = ft;
  }
  return out;
}

}  // namespace

double bound_value(bound_kind kind, double theta) {
  guard_theta(theta);
  switch (kind) {
    case bound_kind::f1:
      return (2 * theta * theta - theta + 1) / (theta * theta - 1);
    case bound_kind::f2:
      return (3 * theta * theta + 3) / (2 * theta + 1);
    case bound_kind::g1:
      return (3 * theta * theta - 2 * theta + 1) / (theta * theta - 1);
    case bound_kind::g2:
      return 4 * theta / (theta + 1);
  }
  throw domain_error("unknown bound kind");
}

bound_constants solve_constants() {
  auto cubic = [](double r) {
    return ((4 * r - 26) * r + 39) * r - 5;
  };
  auto roots = scan_roots(cubic, 0.0, 10.0, 0.01);
  if (roots.size() != 3)
    throw domain_error("root bracketing failed for the lower-bound cubic");
  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  bound_constants c;
  c.rho_lb = roots[1].first;  // second largest of the three
  c.rho_lb_bracket = roots[1].second;

  // f1 = f2 cleared of denominators: 3 t^4 - 4 t^3 - t - 4 = 0
  auto quartic = [](double t) {
    return ((3 * t - 4) * t * t - 1) * t - 4;
  };
  auto troots = scan_roots(quartic, 1.0 + 1e-9, 10.0, 0.01);
  if (troots.empty())
    throw domain_error("root bracketing failed for f1 = f2");
  c.theta_star = troots.back().first;
  c.theta_star_bracket = troots.back().second;
  if (std::abs(bound_value(bound_kind::f1, c.theta_star) -
               bound_value(bound_kind::f2, c.theta_star)) > 1e-9)
    throw domain_error("theta_star does not satisfy f1 = f2");
  c.rho_star = bound_value(bound_kind::f1, c.theta_star);
  return c;
}

ratio_report competitive_ratio(
    const std::function<std::unique_ptr<online_algorithm>()>& make,
    const std::vector<instance>& instances) {
  ratio_report rep;
  for (const instance& inst : instances) {
    auto alg = make();
    double alg_time = simulate(*alg, inst).completion_time;
    double opt_time = opt(inst);
    double ratio;
    if (opt_time == 0.0) {
      if (alg_time > kTol)
        throw domain_error("positive completion on an OPT-0 instance");
      ratio = 1.0;
    } else {
      ratio = alg_time / opt_time;
    }
    rep.ratios.push_back(ratio);
    rep.supremum = std::max(rep.supremum, ratio);
  }
  return rep;
}

std::vector<sweep_row> sweep_theta(const std::vector<double>& grid,
                                   double eps) {
  const double golden = (1 + std::sqrt(5.0)) / 2;
  std::vector<sweep_row> rows;
  for (double theta : grid) {
    guard_theta(theta);
    sweep_row row;
    row.theta = theta;
    row.f1 = bound_value(bound_kind::f1, theta);
    row.f2 = bound_value(bound_kind::f2, theta);
    if (theta > 2) {
      if (theta <= 1 + std::sqrt(2.0))
        row.g1 = bound_value(bound_kind::g1, theta);
      else
        row.g2 = bound_value(bound_kind::g2, theta);
    }
    auto simulated = [&](const instance& inst) {
      auto alg = make_smarterstart(theta);
      return simulate(*alg, inst).completion_time / opt(inst);
    };
    if (theta > 1 && theta < 2)
      row.sim_ratio_waiting = simulated(gen_waiting_lb(theta, eps));
    if (theta >= golden && theta <= 2)
      row.sim_ratio_nowaiting = simulated(gen_nowaiting_lb(theta, eps));
    if (theta > 2) row.sim_ratio_gt2 = simulated(gen_theta_gt2(theta, eps));
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string csv_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  return buf;
}

}  // namespace

std::string sweep_to_csv(const std::vector<sweep_row>& rows) {
  std::ostringstream os;
  os << "theta,f1,f2,g1,g2,sim_ratio_waiting,sim_ratio_nowaiting,"
        "sim_ratio_gt2\n";
  for (const sweep_row& r : rows) {
    char theta[64];
    std::snprintf(theta, sizeof theta, "%.12g", r.theta);
    os << theta << ',' << csv_cell(r.f1) << ',' << csv_cell(r.f2) << ','
       << csv_cell(r.g1) << ',' << csv_cell(r.g2) << ','
       << csv_cell(r.sim_ratio_waiting) << ','
       << csv_cell(r.sim_ratio_nowaiting) << ',' << csv_cell(r.sim_ratio_gt2)
       << "\n";
  }
  return os.str();
}

audit_report audit_simulation(const simulation_result& result,
                              const instance& inst, double theta) {
  guard_theta(theta);
  audit_report rep;
  const double opt_value = opt(inst);
  double x_minus = 0, x_plus = 0;
  for (const request& r : inst.requests) {
    x_minus = std::min({x_minus, r.origin, r.destination});
    x_plus = std::max({x_plus, r.origin, r.destination});
  }
  const double y = opt_value - (-x_minus) - x_plus;
  const bool right_heavy = -x_minus <= x_plus;

  // ids in schedule records index the releases in time order
  std::vector<int> order(inst.requests.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.requests[a].release < inst.requests[b].release;
  });

  for (const schedule_record& s : result.schedules) {
    double y_lo = 0, y_hi = 0;
    bool first = true;
    std::vector<request> members;
    for (int id : s.request_ids) {
      const request& r = inst.requests[order[id]];
      members.push_back(r);
      if (first) {
        y_lo = std::min(r.origin, r.destination);
        y_hi = std::max(r.origin, r.destination);
        first = false;
      } else {
        y_lo = std::min({y_lo, r.origin, r.destination});
        y_hi = std::max({y_hi, r.origin, r.destination});
      }
    }

    audit_entry start;
    start.schedule_index = s.index;
    start.check = "starting-time";
    start.margin = s.start_time - std::abs(s.end_position) / (theta - 1);
    start.pass = start.margin >= -kTol;
    rep.entries.push_back(start);

    audit_entry len;
    len.schedule_index = s.index;
    len.check = "schedule-length";
    len.margin =
        (1 + (theta - 1) / (theta + 1)) * opt_value - s.length();
    len.pass = len.margin >= -kTol;
    rep.entries.push_back(len);

    audit_entry from_zero;
    from_zero.schedule_index = s.index;
    from_zero.check = "length-from-origin";
    {
      offline_query q;
      q.start_time = s.start_time;
      q.start_position = 0.0;
      q.requests = members;
      q.cap = inst.cap;
      double len0 = optimal_schedule(q).makespan;
      from_zero.margin = (-std::min(0.0, y_lo)) + std::max(0.0, y_hi) + y -
                         len0;
      from_zero.pass = from_zero.margin >= -kTol;
    }
    rep.entries.push_back(from_zero);

    audit_entry rightmost;
    rightmost.schedule_index = s.index;
    rightmost.check = right_heavy ? "rightmost-point" : "rightmost-point-mirrored";
    {
      double reach = std::abs(s.start_position) +
                     std::abs(s.start_position - s.end_position) + y;
      if (right_heavy) {
        double visited = result.path.max_position(s.start_time, s.end_time);
        rightmost.margin = reach - (-std::min(0.0, y_lo)) - visited;
      } else {
        double visited = result.path.min_position(s.start_time, s.end_time);
        rightmost.margin = reach - std::max(0.0, y_hi) - (-visited);
      }
      rightmost.pass = rightmost.margin >= -kTol;
    }
    rep.entries.push_back(rightmost);
  }
  return rep;
}

}  // namespace dar
