#include "dar/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dar/offline.hpp"

namespace dar {

namespace {

double sgn(double v) { return v >= 0 ? 1.0 : -1.0; }

void require_rho(double rho) {
  if (!(rho > 2.056 && rho < 2.06))
    throw domain_error("rho outside validated interval (2.056, 2.06)");
}

// Non-owning mirror: the adversary plays the construction in a world where
// the algorithm's early drift points left, and un-mirrors the transcript.
class mirror_view final : public online_algorithm {
 public:
  explicit mirror_view(online_algorithm& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name(); }
  void reset() override { inner_.reset(); }
  plan on_change(const observation& obs) override {
    neg_ = *obs.requests;
    for (request& r : neg_) {
      r.origin = -r.origin;
      r.destination = -r.destination;
    }
    observation m = obs;
    m.position = -obs.position;
    m.requests = &neg_;
    plan p = inner_.on_change(m);
    for (traj_point& q : p.path) q.pos = -q.pos;
    return p;
  }
  std::vector<schedule_record> schedule_records() const override {
    return inner_.schedule_records();
  }

 private:
  online_algorithm& inner_;
  std::vector<request> neg_;
};

// Earliest feasible pickup/dropoff times when serving along a fixed tour;
// greedy earliest choice, which is exact for the histories this check sees
// (identical transports plus point requests).
bool tour_serves_all(const trajectory& tour,
                     const std::vector<request>& history, capacity cap) {
  std::vector<std::pair<double, double>> spans;
  for (const request& r : history) {
    auto tp = tour.first_time_at(r.origin, r.release);
    if (!tp) return false;
    auto td = tour.first_time_at(r.destination, *tp);
    if (!td) return false;
    spans.push_back({*tp, *td});
  }
  if (cap.is_finite()) {
    for (const auto& [tp, td] : spans) {
      int overlap = 0;
      for (const auto& [op, od] : spans)
        if (op <= tp && tp < od) ++overlap;
      if (overlap > cap.value()) return false;
    }
  }
  return true;
}

}  // namespace

double delta_for(double rho) {
  require_rho(rho);
  return (3 * rho * rho - 11) / (-3 * rho * rho * rho + 15 * rho - 4);
}

line line_ell(double t_l, double rho) {
  if (!(t_l > 0)) throw domain_error("t_L > 0 required");
  return {4 - rho, -(2 * rho - 2) * t_l};
}

critical_times critical_thresholds(double t_l, double t_r, double rho) {
  if (!(0 < t_l && t_l <= t_r))
    throw domain_error("0 < t_L <= t_R required");
  return {(2 * rho - 2) * t_l + (rho - 2) * t_r,
          (2 * rho - 2) * t_r + (rho - 2) * t_l};
}

double criticality_ratio_bound(double rho) {
  return (4 * rho * rho - 30 * rho + 50) /
         (-8 * rho * rho + 50 * rho - 66);
}

critical_check check_critical(const critical_inputs& in) {
  critical_check out;
  const double t_r = in.sigma_r.origin;
  const double t_l = -in.sigma_l.origin;

  trajectory sweep_lr;  // 0 -> -t_L -> t_R
  sweep_lr.append(0, 0);
  sweep_lr.append(t_l, -t_l);
  sweep_lr.append(2 * t_l + t_r, t_r);
  trajectory sweep_rl;  // 0 -> t_R -> -t_L
  sweep_rl.append(0, 0);
  sweep_rl.append(t_r, t_r);
  sweep_rl.append(2 * t_r + t_l, -t_l);
  out.sweeps_serve_all = tour_serves_all(sweep_lr, in.history, in.cap) &&
                         tour_serves_all(sweep_rl, in.history, in.cap);

  out.both_unserved_at_tr = in.serve_r > t_r && in.serve_l > t_r;
  double at_tr = in.path.position_at(t_r);
  out.position_between = at_tr >= -t_l - kTol && at_tr <= t_r + kTol;

  critical_times stars = critical_thresholds(t_l, t_r, in.rho);
  out.right_not_early =
      !(in.serve_r < in.serve_l) || in.serve_r >= stars.t_r_star - kTol;
  out.left_not_early =
      !(in.serve_l < in.serve_r) || in.serve_l >= stars.t_l_star - kTol;

  double bound = criticality_ratio_bound(in.rho);
  out.ratio_margin = bound - t_r / t_l;
  out.ratio_bound = out.ratio_margin >= -kTol;
  return out;
}

instance adversary_transcript::realized_instance() const {
  instance inst;
  inst.cap = capacity::finite(cap);
  for (const released_entry& e : released) inst.requests.push_back(e.req);
  return inst;
}

std::string adversary_transcript::event_log() const {
  std::ostringstream os;
  os << "algorithm " << algorithm << (mirrored ? " (world mirrored)" : "")
     << ", rho " << format_double(rho) << ", capacity " << cap << "\n";
  for (const released_entry& e : released)
    os << "t=" << format_double(e.req.release) << " release ("
       << format_double(e.req.origin) << "," << format_double(e.req.destination)
       << ";" << format_double(e.req.release) << ") " << e.trigger << "\n";
  os << "t=" << format_double(alg_completion) << " last request served\n";
  os << "branch " << branch << "\n";
  os << "alg " << format_double(alg_completion) << " opt "
     << format_double(opt_value) << " ratio " << format_double(ratio) << "\n";
  return os.str();
}

namespace {

// First t >= T0 with delay(t) = (rho-1)(t - T0) on the extrapolated motion;
// delay switches branch when sigma_0 gets served and is piecewise linear in
// between. Scans refined breakpoints, then solves the active segment.
double find_fixpoint_time(const trajectory& traj, double rho, double p0,
                          double p1, double t_start, double serve0,
                          double serve1) {
  std::vector<double> ts{t_start, serve1};
  if (serve0 > t_start && serve0 < serve1) ts.push_back(serve0);
  const auto& pts = traj.points();
  for (const traj_point& p : pts)
    if (p.time > t_start && p.time < serve1) ts.push_back(p.time);
  // kinks of |pos - level| for both service targets
  for (double level : {p0, p1})
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      double xa = pts[k].pos, xb = pts[k + 1].pos;
      if ((xa - level) * (xb - level) < 0) {
        double t = pts[k].time + (level - xa) * (pts[k + 1].time - pts[k].time) /
                                     (xb - xa);
        if (t > t_start && t < serve1) ts.push_back(t);
      }
    }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  auto h = [&](double t) {
    double pos = traj.position_at(t);
    double d;
    if (t < serve0)
      d = t + std::abs(pos - p0) - (rho - 2) * std::abs(p0) -
          (2 * rho - 2) * std::abs(p1);
    else
      d = t + std::abs(pos - p1) - (rho - 1) * std::abs(p0) -
          (2 * rho - 1) * std::abs(p1);
    return d - (rho - 1) * (t - t_start);
  };

  double prev_t = ts.front();
  double prev_h = h(prev_t);
  if (prev_h <= 1e-12) return prev_t;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    double cur_h = h(ts[i]);
    if (cur_h <= 1e-12) {
      if (cur_h < -1e-12)
        return prev_t + prev_h * (ts[i] - prev_t) / (prev_h - cur_h);
      return ts[i];
    }
    prev_t = ts[i];
    prev_h = cur_h;
  }
  throw simulation_error("adversary: no delay fixpoint before sigma_1 is served");
}

}  // namespace

adversary_transcript run_general_lower_bound(online_algorithm& alg,
                                             const adversary_config& cfg) {
  require_rho(cfg.rho);
  if (cfg.cap < 1) throw domain_error("capacity must be a finite c >= 1");
  const double rho = cfg.rho;
  const double delta = delta_for(rho);

  for (int attempt = 0; attempt < 2; ++attempt) {
    const bool mirrored = attempt == 1;
    mirror_view mirrored_alg(alg);
    online_algorithm& player = mirrored ? static_cast<online_algorithm&>(
                                              mirrored_alg)
                                        : alg;
    sim_engine eng(player, capacity::finite(cfg.cap), {});
    if (eng.extrapolated_position(1.0) > 0) {
      if (mirrored)
        throw simulation_error("adversary: drift cannot be mirrored away");
      continue;  // w.l.o.g. pos(1) <= 0: replay against the mirrored world
    }

    adversary_transcript tr;
    tr.algorithm = alg.name();
    tr.mirrored = mirrored;
    tr.cap = cfg.cap;
    tr.rho = rho;

    auto note = [&](const request& r, const std::string& why) {
      tr.released.push_back({r, why});
    };

    // stage 1: c transports (1, delta; 1) at time 1
    std::vector<request> initial(cfg.cap, request{1.0, delta, 1.0});
    std::vector<int> init_ids = eng.release_at(1.0, initial);
    for (const request& r : initial)
      note(r, "initial transport toward delta=" + format_double(delta));

    double t_l = 0.0, first_drop = std::numeric_limits<double>::infinity();
    for (int id : init_ids) {
      auto tp = eng.planned_pickup_time(id);
      auto td = eng.planned_serve_time(id);
      if (!tp || !td)
        throw simulation_error("adversary: plan never serves the initial requests");
      t_l = std::max(t_l, *tp);
      first_drop = std::min(first_drop, *td);
    }

    auto finish = [&](const std::string& branch, double claimed) {
      eng.run_to_completion();
      tr.branch = branch;
      tr.claimed_opt = claimed;
      tr.alg_completion = eng.completion_time();
      tr.alg_path = eng.executed();
      tr.opt_value = opt(tr.realized_instance());
      tr.ratio = tr.alg_completion / tr.opt_value;
      if (mirrored) {
        for (released_entry& e : tr.released) {
          e.req.origin = -e.req.origin;
          e.req.destination = -e.req.destination;
        }
        tr.p0 = -tr.p0;
        tr.p1 = -tr.p1;
        trajectory unmirrored;
        for (const traj_point& p : tr.alg_path.points())
          unmirrored.append(p.time, -p.pos);
        tr.alg_path = unmirrored;
      }
      return tr;
    };

    if (first_drop < t_l)
      return finish("stage1-split-delivery", delta);
    if (t_l >= rho * delta - (delta - 1))
      return finish("stage1-late-load", delta);

    tr.t_l = t_l;
    request sigma_l{-t_l, -t_l, t_l};
    int id_l = eng.release_at(t_l, {sigma_l})[0];
    note(sigma_l, "t_L: all c initial requests loaded");

    // the eager server now drives the full load straight to delta
    if (std::abs(eng.extrapolated_position(t_l + (delta - 1)) - delta) > 1e-6)
      throw eagerness_violation(
          "algorithm deviates from direct delivery while fully loaded");

    line ell = line_ell(t_l, rho);
    auto crossing = eng.extrapolated_crossing(ell, t_l);
    if (!crossing)
      throw simulation_error("adversary: trajectory never crosses ell");
    double t_r = *crossing;
    tr.t_r = t_r;
    request sigma_r{t_r, t_r, t_r};
    int id_r = eng.release_at(t_r, {sigma_r})[0];
    note(sigma_r, "t_R: first crossing of ell");

    auto serve_l = eng.planned_serve_time(id_l);
    auto serve_r = eng.planned_serve_time(id_r);
    if (!serve_l || !serve_r)
      throw simulation_error("adversary: plan never serves a critical request");

    critical_inputs ci;
    ci.sigma_r = sigma_r;
    ci.sigma_l = sigma_l;
    for (const released_entry& e : tr.released) ci.history.push_back(e.req);
    ci.path = eng.extrapolated_trajectory(std::max(*serve_l, *serve_r) + 1.0);
    ci.serve_r = *serve_r;
    ci.serve_l = *serve_l;
    ci.rho = rho;
    ci.cap = capacity::finite(cfg.cap);
    tr.criticality = check_critical(ci);
    tr.reached_stage_two = true;

    // stage 2
    double p0, p1, serve0, serve1;
    int id1;
    if (*serve_r < *serve_l) {
      p0 = t_r;
      p1 = -t_l;
      serve0 = *serve_r;
      serve1 = *serve_l;
      id1 = id_l;
    } else {
      p0 = -t_l;
      p1 = t_r;
      serve0 = *serve_l;
      serve1 = *serve_r;
      id1 = id_r;
    }
    tr.p0 = p0;
    tr.p1 = p1;
    const double base = 2 * std::abs(p1) + std::abs(p0);
    if (serve1 <= base + 1e-12)
      throw simulation_error(
          "adversary: state inconsistent, sigma_1 served before the delay "
          "window opens");

    trajectory future = eng.extrapolated_trajectory(serve1 + 1.0);
    double t0_plus =
        find_fixpoint_time(future, rho, p0, p1, base, serve0, serve1);
    double w = (rho - 1) * (t0_plus - base);
    tr.w = w;
    tr.t0_plus = t0_plus;

    double p0p = p0 + sgn(p0) * w / (rho - 1);
    request sigma_0p{p0p, p0p, t0_plus};
    int id0p = eng.release_at(t0_plus, {sigma_0p})[0];
    note(sigma_0p, "t_0^+: delay fixpoint, W=" + format_double(w));

    double here = eng.position();
    if (std::abs(here - p1) <= std::abs(here - p0p) + 1e-12)
      return finish("case1", t0_plus);

    auto s1 = eng.planned_serve_time(id1);
    auto s0p = eng.planned_serve_time(id0p);
    if (!s1 || !s0p)
      throw simulation_error("adversary: plan never serves a stage-two request");
    if (*s1 < *s0p) return finish("case1", t0_plus);
    if (*s0p >= std::abs(2 * p0p - 3 * p1) - 1e-12)
      return finish("case2.1", t0_plus);

    line midline{sgn(p0) * 0.5, 1.5 * p1};
    auto meet = eng.extrapolated_crossing(midline, t0_plus);
    if (!meet)
      throw simulation_error("adversary: no midpoint meeting time");
    double t_mid = *meet;
    tr.t_mid = t_mid;
    double pmm = sgn(p0) * t_mid + 2 * p1;
    request sigma_0pp{pmm, pmm, t_mid};
    eng.release_at(t_mid, {sigma_0pp});
    note(sigma_0pp, "t_mid: server meets the midpoint line");
    return finish("case2.2", t_mid);
  }
  throw simulation_error("adversary: unreachable");
}

// ---------------------------------------------------------------------------
// tight-instance generators

instance gen_waiting_lb(double theta, double eps) {
  if (!(theta > 1 && theta < 2))
    throw domain_error("theta must lie in (1, 2)");
  if (!(eps > 0 && eps < theta / (theta + 1)))
    throw domain_error("eps must lie in (0, theta/(theta+1))");
  double ep = (theta + 1) / (2 * theta) * eps;
  double u = 1 / (theta - 1);
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 1, 0}, {-u + ep, 1, u + ep}};
  return inst;
}

instance gen_nowaiting_lb(double theta, double eps) {
  const double golden = (1 + std::sqrt(5.0)) / 2;
  if (!(theta >= golden && theta <= 2))
    throw domain_error("theta must lie in [(1+sqrt(5))/2, 2] ~ [1.61803, 2]");
  double ep = (2 * theta + 1) / ((5 * theta - 3) * (theta - 1)) * eps;
  if (!(eps > 0 && ep < 0.25))
    throw domain_error("eps too large for the no-waiting construction");
  double u = 1 / (theta - 1);
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 1, 0},
                   {2 + u - 2 * ep, 2 + u - 2 * ep, u + ep},
                   {-u, -u, u + ep},
                   {3 * u * u - ep, 3 * u * u - ep, 3 * u * u + 2 * u}};
  return inst;
}

instance gen_theta_gt2(double theta, double eps) {
  if (!(theta > 2)) throw domain_error("theta must exceed 2");
  if (!(eps > 0)) throw domain_error("eps must be positive");
  double u = 1 / (theta - 1);
  // waiting happens before S_2 iff theta^2 - 2 theta - 1 < -2 eps' (theta-1)
  double ep = (theta + 1) / (4 * theta - 2) * eps;  // tight for g1
  double disc = theta * theta - 2 * theta - 1;
  bool waits = disc < -2 * ep * (theta - 1);
  if (!waits) ep = (theta + 1) / (4 * theta - 4) * eps;  // tight for g2
  double cap_ep = std::min(theta / (2 * theta - 2),
                           waits ? (theta * theta - theta - 2) / ((theta - 1) * (theta - 1))
                                 : u);
  if (!(ep < cap_ep))
    throw domain_error("eps too large for the theta > 2 construction");
  double start2 = (theta - 2) / (2 * theta - 2) + ep;
  double r3 = std::max((theta + 1) * u * u, theta * u) + ep;
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 1, 0},
                   {start2, 1, u + ep},
                   {-u + ep, -u + ep, u + ep},
                   {1, 1, r3}};
  return inst;
}

instance gen_luring(double q, double eps, double theta) {
  if (!(q > 0 && eps > 0)) throw domain_error("q and eps must be positive");
  if (!(theta > 1)) throw domain_error("theta > 1 required");
  int k = static_cast<int>(std::ceil(q / eps - 1e-12));
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests.push_back(
      {(theta - 1) * eps, (theta - 1) * eps, (theta - 1) * eps});
  for (int i = 2; i <= k; ++i)
    inst.requests.push_back({i * eps, i * eps, i * eps});
  return inst;
}

}  // namespace dar
