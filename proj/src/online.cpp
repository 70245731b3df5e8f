#include "dar/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double plan_position(const plan& p, double t) {
  const auto& pts = p.path;
  if (pts.empty()) throw simulation_error("plan without path");
  if (t <= pts.front().time) return pts.front().pos;
  if (t >= pts.back().time) return pts.back().pos;
  auto it = std::upper_bound(
      pts.begin(), pts.end(), t,
      [](double v, const traj_point& q) { return v < q.time; });
  const traj_point& hi = *it;
  const traj_point& lo = *(it - 1);
  double w = (t - lo.time) / (hi.time - lo.time);
  return lo.pos + w * (hi.pos - lo.pos);
}

void push_point(std::vector<traj_point>& path, double t, double x) {
  if (!path.empty()) {
    if (path.back().time == t && path.back().pos == x) return;
    if (t < path.back().time) throw simulation_error("plan path not ordered");
    if (t == path.back().time) return;  // keep the first value at a tie
  }
  path.push_back({t, x});
}

std::string theta_tag(double theta) {
  std::ostringstream os;
  os << theta;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// simulation kernel

sim_engine::sim_engine(online_algorithm& alg, capacity cap,
                       simulation_options opts)
    : alg_(alg), cap_(cap), opts_(opts) {
  alg_.reset();
  executed_.append(0.0, 0.0);
  horizon_ = opts_.horizon_factor;
  observation obs;
  obs.now = 0.0;
  obs.position = 0.0;
  obs.requests = &requests_;
  obs.cap = cap_;
  set_plan(alg_.on_change(obs));
}

void sim_engine::update_horizon() {
  double lo = 0, hi = 0, last_release = 0;
  for (const request& r : requests_) {
    lo = std::min({lo, r.origin, r.destination});
    hi = std::max({hi, r.origin, r.destination});
    last_release = std::max(last_release, r.release);
  }
  horizon_ = opts_.horizon_factor * (last_release + 2 * (hi - lo) + 1.0);
}

void sim_engine::apply_event(const planned_event& e) {
  if (e.request_id < 0 || e.request_id >= static_cast<int>(requests_.size()))
    throw simulation_error("plan references unknown request");
  if (e.time > horizon_)
    throw simulation_error("time horizon exceeded (non-serving plan?)");
  const request& r = requests_[e.request_id];
  double at = plan_position(plan_, e.time);
  if (e.kind == event_kind::pickup) {
    if (carried_[e.request_id] || served(e.request_id))
      throw simulation_error("duplicate pickup in plan");
    if (std::abs(at - r.origin) > kTol)
      throw simulation_error("pickup away from request origin");
    if (e.time < r.release - kTol)
      throw simulation_error("pickup before release");
    if (!cap_.allows(load_)) throw simulation_error("capacity exceeded");
    carried_[e.request_id] = 1;
    ++load_;
    pick_time_[e.request_id] = e.time;
  } else {
    if (!carried_[e.request_id])
      throw simulation_error("dropoff of a request not carried");
    if (std::abs(at - r.destination) > kTol)
      throw simulation_error("dropoff away from destination (non-preemptive)");
    carried_[e.request_id] = 0;
    --load_;
    drop_time_[e.request_id] = e.time;
    completion_ = std::max(completion_, e.time);
  }
}

void sim_engine::advance_to(double t) {
  if (t < now_ - kTol) throw simulation_error("kernel time went backwards");
  t = std::max(t, now_);
  double done = now_;
  auto record_path_until = [&](double upto) {
    for (const traj_point& p : plan_.path)
      if (p.time > done && p.time <= upto) executed_.append(p.time, p.pos);
    done = std::max(done, upto);
  };
  while (next_event_ < plan_.events.size() &&
         plan_.events[next_event_].time <= t) {
    const planned_event& e = plan_.events[next_event_];
    record_path_until(e.time);
    executed_.append(e.time, plan_position(plan_, e.time));
    apply_event(e);
    ++next_event_;
  }
  record_path_until(t);
  pos_ = plan_position(plan_, t);
  executed_.append(t, pos_);
  now_ = t;
}

void sim_engine::set_plan(plan p) {
  if (p.path.empty()) p.path.push_back({now_, pos_});
  if (std::abs(p.path.front().time - now_) > kTol ||
      std::abs(p.path.front().pos - pos_) > kTol)
    throw simulation_error("plan does not start at the server's state");
  p.path.front() = {now_, pos_};
  std::vector<traj_point> clean;
  for (const traj_point& q : p.path) {
    if (!clean.empty()) {
      double dt = q.time - clean.back().time;
      if (dt < 0) throw simulation_error("plan path not ordered");
      if (dt == 0) {
        if (std::abs(q.pos - clean.back().pos) > kTol)
          throw simulation_error("plan teleports");
        continue;
      }
      if (std::abs(q.pos - clean.back().pos) > dt + kTol)
        throw simulation_error("plan exceeds unit speed");
    }
    clean.push_back(q);
  }
  p.path = std::move(clean);
  double last = now_ - kTol;
  for (const planned_event& e : p.events) {
    if (e.time < last) throw simulation_error("plan events not ordered");
    last = e.time;
  }
  plan_ = std::move(p);
  next_event_ = 0;
  // actions scheduled for the current instant happen now
  while (next_event_ < plan_.events.size() &&
         plan_.events[next_event_].time <= now_) {
    apply_event(plan_.events[next_event_]);
    ++next_event_;
  }
}

std::vector<int> sim_engine::release_at(double time,
                                        const std::vector<request>& batch) {
  advance_to(time);
  std::vector<int> ids;
  for (const request& r : batch) {
    if (std::abs(r.release - time) > kTol)
      throw simulation_error("release time does not match injection time");
    ids.push_back(static_cast<int>(requests_.size()));
    requests_.push_back(r);
    carried_.push_back(0);
    pick_time_.push_back(kNaN);
    drop_time_.push_back(kNaN);
  }
  update_horizon();
  observation obs;
  obs.now = now_;
  obs.position = pos_;
  obs.requests = &requests_;
  obs.cap = cap_;
  obs.served.resize(requests_.size());
  for (std::size_t i = 0; i < requests_.size(); ++i)
    obs.served[i] = served(static_cast<int>(i));
  for (std::size_t i = 0; i < requests_.size(); ++i)
    if (carried_[i]) obs.carried.push_back(static_cast<int>(i));
  set_plan(alg_.on_change(obs));
  return ids;
}

void sim_engine::run_to_completion() {
  double t_end = now_;
  if (!plan_.events.empty())
    t_end = std::max(t_end, plan_.events.back().time);
  if (t_end > horizon_)
    throw simulation_error("time horizon exceeded (non-serving plan?)");
  advance_to(t_end);
  for (std::size_t i = 0; i < requests_.size(); ++i)
    if (!served(static_cast<int>(i)))
      throw simulation_error("plan exhausted with unserved requests");
}

double sim_engine::extrapolated_position(double t) const {
  if (t < now_ - kTol) throw simulation_error("extrapolation into the past");
  return plan_position(plan_, t);
}

std::optional<double> sim_engine::planned_pickup_time(int id) const {
  if (pick_time_[id] == pick_time_[id]) return pick_time_[id];
  for (std::size_t k = next_event_; k < plan_.events.size(); ++k)
    if (plan_.events[k].request_id == id &&
        plan_.events[k].kind == event_kind::pickup)
      return plan_.events[k].time;
  return std::nullopt;
}

std::optional<double> sim_engine::planned_serve_time(int id) const {
  if (drop_time_[id] == drop_time_[id]) return drop_time_[id];
  for (std::size_t k = next_event_; k < plan_.events.size(); ++k)
    if (plan_.events[k].request_id == id &&
        plan_.events[k].kind == event_kind::dropoff)
      return plan_.events[k].time;
  return std::nullopt;
}

std::optional<double> sim_engine::extrapolated_crossing(const line& l,
                                                        double from) const {
  from = std::max(from, now_);
  const auto& pts = plan_.path;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (pts[k + 1].time < from) continue;
    double t0 = std::max(pts[k].time, from);
    double x0 = plan_position(plan_, t0);
    double g0 = x0 - l.value(t0);
    double g1 = pts[k + 1].pos - l.value(pts[k + 1].time);
    if (g0 == 0.0) return t0;
    if (g1 == 0.0) return pts[k + 1].time;
    if ((g0 > 0) != (g1 > 0))
      return t0 + g0 * (pts[k + 1].time - t0) / (g0 - g1);
  }
  // idle tail at the final position
  double tail_t = std::max(from, pts.back().time);
  double x = pts.back().pos;
  double g = x - l.value(tail_t);
  if (g == 0.0) return tail_t;
  if (l.slope == 0.0) return std::nullopt;
  double t = (x - l.intercept) / l.slope;
  if (t >= tail_t) return t;
  return std::nullopt;
}

trajectory sim_engine::extrapolated_trajectory(double until) const {
  trajectory t = executed_;
  for (const traj_point& p : plan_.path)
    if (p.time > now_ && p.time <= until) t.append(p.time, p.pos);
  if (until > now_) t.append(until, plan_position(plan_, until));
  return t;
}

simulation_result simulate(online_algorithm& alg, const instance& inst,
                           const simulation_options& opts) {
  validate_instance(inst);
  const int n = static_cast<int>(inst.requests.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.requests[a].release < inst.requests[b].release;
  });
  sim_engine eng(alg, inst.cap, opts);
  std::vector<int> engine_id(n, -1);
  int i = 0;
  while (i < n) {
    int j = i;
    double r = inst.requests[order[i]].release;
    std::vector<request> batch;
    while (j < n && inst.requests[order[j]].release == r)
      batch.push_back(inst.requests[order[j++]]);
    std::vector<int> ids = eng.release_at(r, batch);
    for (int k = i; k < j; ++k) engine_id[order[k]] = ids[k - i];
    i = j;
  }
  eng.run_to_completion();

  simulation_result res;
  res.completion_time = eng.completion_time();
  res.path = eng.executed();
  res.schedules = eng.schedule_records();
  res.pickup_times.assign(n, kNaN);
  res.dropoff_times.assign(n, kNaN);
  for (int k = 0; k < n; ++k) {
    res.pickup_times[k] = eng.pickup_times()[engine_id[k]];
    res.dropoff_times[k] = eng.dropoff_times()[engine_id[k]];
  }
  return res;
}

// ---------------------------------------------------------------------------
// start-time rules

double smarterstart_start_time(double now, const std::vector<request>& known,
                               capacity cap, double theta, int search_limit) {
  if (!(theta > 1.0)) throw domain_error("theta > 1 required");
  if (known.empty()) return now;
  offline_query q;
  q.start_time = now;
  q.start_position = 0.0;
  q.requests = known;
  q.cap = cap;
  double len = optimal_schedule(q, search_limit).makespan;
  return std::max(now, len / (theta - 1.0));
}

double smartstart_start_time(double now, double position,
                             const std::vector<request>& unserved,
                             capacity cap, double theta, int search_limit) {
  if (!(theta > 1.0)) throw domain_error("theta > 1 required");
  if (unserved.empty()) return now;
  offline_query q;
  q.start_time = now;
  q.start_position = position;
  q.requests = unserved;
  q.cap = cap;
  double len = optimal_schedule(q, search_limit).makespan;
  return std::max(now, len / (theta - 1.0));
}

// ---------------------------------------------------------------------------
// schedule-based algorithms (Ignore family)

namespace {

// The waiting rules need L over everything released so far, which can
// exceed the default exact-solver limit on long chains (the luring family
// has q/eps requests). Collinear chains prune to nothing in the search, so
// the algorithms run with the solver's hard cap instead of the default.
constexpr int kAlgorithmSearchLimit = 20;

struct plan_piece {
  std::vector<traj_point> path;
  std::vector<planned_event> events;
};

// Lays the witness schedule out as committed motion. Waiting for a release
// shows up as a zero-slope segment at the pickup position.
plan_piece piece_from_schedule(const schedule& s,
                               const std::vector<int>& id_of) {
  plan_piece pc;
  pc.path.push_back({s.start_time, s.start_position});
  double t = s.start_time, x = s.start_position;
  for (const schedule_event& e : s.events) {
    double arrive = t + std::abs(e.position - x);
    push_point(pc.path, arrive, e.position);
    if (e.time > arrive) push_point(pc.path, e.time, e.position);
    pc.events.push_back({e.time, e.kind, id_of[e.request_index]});
    t = e.time;
    x = e.position;
  }
  return pc;
}

class schedule_driven : public online_algorithm {
 public:
  explicit schedule_driven(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }

  void reset() override {
    done_.clear();
    pending_.reset();
  }

  plan on_change(const observation& obs) override {
    if (pending_ && pending_->rec.start_time < obs.now) {
      done_.push_back(std::move(*pending_));
      pending_.reset();
    }
    const entry* current = nullptr;
    if (!done_.empty() && done_.back().rec.end_time > obs.now)
      current = &done_.back();
    double free_t = current ? current->rec.end_time : obs.now;
    double free_p = current ? current->rec.end_position : obs.position;

    std::vector<char> covered(obs.requests->size(), 0);
    if (current)
      for (int id : current->rec.request_ids) covered[id] = 1;
    std::vector<int> ids;
    for (int id = 0; id < static_cast<int>(obs.requests->size()); ++id)
      if (!obs.served[id] && !covered[id]) ids.push_back(id);

    pending_.reset();
    if (!ids.empty()) {
      offline_query q;
      q.start_position = free_p;
      q.cap = obs.cap;
      // A request can already be on board here only when a release hits the
      // exact instant a schedule starts: the same-time pickup has happened,
      // the revised schedule continues with it loaded.
      std::vector<int> carried_local;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        q.requests.push_back((*obs.requests)[ids[k]]);
        if (std::find(obs.carried.begin(), obs.carried.end(), ids[k]) !=
            obs.carried.end())
          carried_local.push_back(static_cast<int>(k));
      }
      q.start_time = start_time_rule(free_t, free_p, obs, q.requests);
      offline_solution sol = optimal_schedule_carrying(q, carried_local,
                                                       search_limit_);
      entry e;
      e.rec.start_time = q.start_time;
      e.rec.start_position = free_p;
      // end_time from the witness event chain itself; start + makespan can
      // differ in the last ulp and would misalign the next anchor
      e.rec.end_time = sol.sched.end_time();
      e.rec.end_position = sol.sched.end_position;
      e.rec.request_ids = ids;
      e.piece = piece_from_schedule(sol.sched, ids);
      pending_ = std::move(e);
    }

    plan p;
    p.path.push_back({obs.now, obs.position});
    double tail_t = obs.now, tail_x = obs.position;
    auto splice = [&](const plan_piece& pc, double from) {
      for (const traj_point& q : pc.path)
        if (q.time > from) push_point(p.path, q.time, q.pos);
      for (const planned_event& e : pc.events)
        if (e.time > from) p.events.push_back(e);
    };
    if (current) {
      splice(current->piece, obs.now);
      tail_t = current->rec.end_time;
      tail_x = current->rec.end_position;
    }
    if (pending_) {
      if (pending_->rec.start_time > tail_t)
        push_point(p.path, pending_->rec.start_time, tail_x);  // wait
      splice(pending_->piece, obs.now - 1.0);  // include same-instant events
    }
    return p;
  }

  std::vector<schedule_record> schedule_records() const override {
    std::vector<schedule_record> out;
    for (const entry& e : done_) out.push_back(e.rec);
    if (pending_) out.push_back(pending_->rec);
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j].index = static_cast<int>(j) + 1;
    return out;
  }

 protected:
  virtual double start_time_rule(double free_time, double free_pos,
                                 const observation& obs,
                                 const std::vector<request>& deferred) = 0;
  int search_limit_ = kAlgorithmSearchLimit;

 private:
  struct entry {
    schedule_record rec;
    plan_piece piece;
  };
  std::string name_;
  std::vector<entry> done_;
  std::optional<entry> pending_;
};

class ignore_alg final : public schedule_driven {
 public:
  ignore_alg() : schedule_driven("ignore") {}

 protected:
  double start_time_rule(double free_time, double, const observation&,
                         const std::vector<request>&) override {
    return free_time;  // always starts its schedule immediately
  }
};

class smartstart_alg final : public schedule_driven {
 public:
  explicit smartstart_alg(double theta)
      : schedule_driven("smartstart:" + theta_tag(theta)), theta_(theta) {
    if (!(theta > 1.0)) throw domain_error("theta > 1 required");
  }

 protected:
  double start_time_rule(double free_time, double free_pos,
                         const observation& obs,
                         const std::vector<request>& deferred) override {
    return smartstart_start_time(free_time, free_pos, deferred, obs.cap,
                                 theta_, search_limit_);
  }

 private:
  double theta_;
};

class smarterstart_alg final : public schedule_driven {
 public:
  explicit smarterstart_alg(double theta)
      : schedule_driven("smarterstart:" + theta_tag(theta)), theta_(theta) {
    if (!(theta > 1.0)) throw domain_error("theta > 1 required");
  }

 protected:
  double start_time_rule(double free_time, double, const observation& obs,
                         const std::vector<request>&) override {
    // waiting depends on everything released so far, served or not,
    // measured from the origin
    return smarterstart_start_time(free_time, *obs.requests, obs.cap, theta_,
                                   search_limit_);
  }

 private:
  double theta_;
};

// Recomputes the optimal schedule for all unserved requests at every
// release, honoring whatever it currently carries.
class greedy_replan_alg final : public online_algorithm {
 public:
  std::string name() const override { return "replan"; }
  void reset() override { recs_.clear(); }

  plan on_change(const observation& obs) override {
    if (!recs_.empty() && recs_.back().end_time > obs.now) {
      recs_.back().end_time = obs.now;
      recs_.back().end_position = obs.position;
    }
    std::vector<int> ids;
    for (int id = 0; id < static_cast<int>(obs.requests->size()); ++id)
      if (!obs.served[id]) ids.push_back(id);
    plan p;
    p.path.push_back({obs.now, obs.position});
    if (ids.empty()) return p;

    offline_query q;
    q.start_time = obs.now;
    q.start_position = obs.position;
    q.cap = obs.cap;
    std::vector<int> carried_local;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      q.requests.push_back((*obs.requests)[ids[k]]);
      if (std::find(obs.carried.begin(), obs.carried.end(), ids[k]) !=
          obs.carried.end())
        carried_local.push_back(static_cast<int>(k));
    }
    offline_solution sol =
        optimal_schedule_carrying(q, carried_local, kAlgorithmSearchLimit);
    plan_piece pc = piece_from_schedule(sol.sched, ids);
    for (const traj_point& pt : pc.path)
      if (pt.time > obs.now) push_point(p.path, pt.time, pt.pos);
    p.events = pc.events;

    schedule_record rec;
    rec.index = static_cast<int>(recs_.size()) + 1;
    rec.start_time = obs.now;
    rec.start_position = obs.position;
    rec.end_time = sol.sched.end_time();
    rec.end_position = sol.sched.end_position;
    rec.request_ids = ids;
    recs_.push_back(rec);
    return p;
  }

  std::vector<schedule_record> schedule_records() const override {
    return recs_;
  }

 private:
  std::vector<schedule_record> recs_;
};

// ---------------------------------------------------------------------------
// eagerize wrapper (Observation 1)

class eagerized_alg final : public online_algorithm {
 public:
  explicit eagerized_alg(std::unique_ptr<online_algorithm> inner)
      : inner_(std::move(inner)) {}

  std::string name() const override { return "eager(" + inner_->name() + ")"; }

  void reset() override {
    inner_->reset();
    have_plan_ = false;
    iplan_ = {};
    iev_ = 0;
    inner_served_.clear();
    inner_carried_.clear();
    episode_ = false;
    ep_ids_.clear();
    ep_dest_ = 0;
  }

  plan on_change(const observation& obs) override {
    const int n = static_cast<int>(obs.requests->size());
    inner_served_.resize(n, 0);
    inner_carried_.resize(n, 0);
    advance_virtual(obs);

    observation iobs = obs;
    iobs.position = have_plan_ ? plan_position(iplan_, obs.now) : 0.0;
    iobs.served = inner_served_;
    iobs.carried.clear();
    for (int id = 0; id < n; ++id)
      if (inner_carried_[id]) iobs.carried.push_back(id);
    iplan_ = inner_->on_change(iobs);
    for (const planned_event& e : iplan_.events)
      if (e.request_id < 0 || e.request_id >= n)
        throw simulation_error("eagerize: wrapped plan references an unknown request");
    iev_ = 0;
    have_plan_ = true;
    return transform(obs);
  }

  std::vector<schedule_record> schedule_records() const override {
    return inner_->schedule_records();
  }

 private:
  void advance_virtual(const observation& obs) {
    if (!have_plan_) return;
    while (iev_ < iplan_.events.size() && iplan_.events[iev_].time <= obs.now) {
      const planned_event& e = iplan_.events[iev_];
      if (e.kind == event_kind::pickup) {
        inner_carried_[e.request_id] = 1;
        if (!episode_) maybe_open_episode(obs);
      } else {
        inner_carried_[e.request_id] = 0;
        inner_served_[e.request_id] = 1;
        if (episode_) {
          bool open = false;
          for (int id : ep_ids_)
            if (!inner_served_[id]) open = true;
          if (!open) {
            episode_ = false;
            ep_ids_.clear();
          }
        }
      }
      ++iev_;
    }
  }

  void maybe_open_episode(const observation& obs) {
    if (!obs.cap.is_finite()) return;
    std::vector<int> ids;
    for (int id = 0; id < static_cast<int>(inner_carried_.size()); ++id)
      if (inner_carried_[id]) ids.push_back(id);
    if (static_cast<int>(ids.size()) != obs.cap.value()) return;
    double d = (*obs.requests)[ids[0]].destination;
    for (int id : ids)
      if (std::abs((*obs.requests)[id].destination - d) > kTol) return;
    episode_ = true;
    ep_ids_ = ids;
    ep_dest_ = d;
  }

  // last inner-plan index (>= ev) that drops one of `ids`; npos if none
  std::size_t last_drop_index(std::size_t ev,
                              const std::vector<int>& ids) const {
    std::size_t last = std::string::npos;
    for (std::size_t k = ev; k < iplan_.events.size(); ++k) {
      const planned_event& e = iplan_.events[k];
      if (e.kind == event_kind::dropoff &&
          std::find(ids.begin(), ids.end(), e.request_id) != ids.end())
        last = k;
    }
    return last;
  }

  plan transform(const observation& obs) {
    const auto& reqs = *obs.requests;
    plan w;
    w.path.push_back({obs.now, obs.position});
    double t = obs.now, x = obs.position;
    std::size_t ev = iev_;
    std::vector<char> vc = inner_carried_;
    int vload = 0;
    for (char c : vc) vload += c;

    auto copy_until = [&](double upto) {
      for (const traj_point& q : iplan_.path)
        if (q.time > t && q.time <= upto) push_point(w.path, q.time, q.pos);
      push_point(w.path, upto, plan_position(iplan_, upto));
    };

    if (episode_) {
      std::vector<int> hauling;
      for (int id : ep_ids_)
        if (std::find(obs.carried.begin(), obs.carried.end(), id) !=
            obs.carried.end())
          hauling.push_back(id);
      if (!hauling.empty()) {
        double arrive = t + std::abs(ep_dest_ - x);
        push_point(w.path, arrive, ep_dest_);
        for (int id : hauling)
          w.events.push_back({arrive, event_kind::dropoff, id});
        t = arrive;
        x = ep_dest_;
      }
      std::size_t last = last_drop_index(ev, ep_ids_);
      if (last != std::string::npos) {
        double s = iplan_.events[last].time;
        for (std::size_t k = ev; k <= last; ++k) {
          const planned_event& e = iplan_.events[k];
          bool ep_drop = e.kind == event_kind::dropoff &&
                         std::find(ep_ids_.begin(), ep_ids_.end(),
                                   e.request_id) != ep_ids_.end();
          if (!ep_drop)
            throw simulation_error(
                "eagerize: wrapped algorithm interleaves actions during a "
                "full-load delivery");
          vc[e.request_id] = 0;
          --vload;
        }
        ev = last + 1;
        if (s > t) push_point(w.path, s, ep_dest_);
        t = std::max(t, s);
      }
      x = ep_dest_;
    }

    while (true) {
      // next moment the inner plan reaches a full load with one destination
      std::size_t trig = std::string::npos;
      std::vector<int> trig_ids;
      double trig_dest = 0;
      {
        std::vector<char> scan = vc;
        int load = vload;
        for (std::size_t k = ev; k < iplan_.events.size(); ++k) {
          const planned_event& e = iplan_.events[k];
          if (e.kind == event_kind::pickup) {
            scan[e.request_id] = 1;
            ++load;
            if (obs.cap.is_finite() && load == obs.cap.value()) {
              std::vector<int> ids;
              for (int id = 0; id < static_cast<int>(scan.size()); ++id)
                if (scan[id]) ids.push_back(id);
              double d = reqs[ids[0]].destination;
              bool common = true;
              for (int id : ids)
                if (std::abs(reqs[id].destination - d) > kTol) common = false;
              if (common) {
                trig = k;
                trig_ids = ids;
                trig_dest = d;
                break;
              }
            }
          } else {
            scan[e.request_id] = 0;
            --load;
          }
        }
      }
      if (trig == std::string::npos) {
        for (const traj_point& q : iplan_.path)
          if (q.time > t) push_point(w.path, q.time, q.pos);
        for (std::size_t k = ev; k < iplan_.events.size(); ++k)
          w.events.push_back(iplan_.events[k]);
        break;
      }
      double tau = iplan_.events[trig].time;
      copy_until(tau);
      for (std::size_t k = ev; k <= trig; ++k) {
        const planned_event& e = iplan_.events[k];
        w.events.push_back(e);
        if (e.kind == event_kind::pickup) {
          vc[e.request_id] = 1;
          ++vload;
        } else {
          vc[e.request_id] = 0;
          --vload;
        }
      }
      ev = trig + 1;
      t = tau;
      x = plan_position(iplan_, tau);

      std::size_t last = last_drop_index(ev, trig_ids);
      if (last == std::string::npos) {
        // inner never delivers them (infeasible plan; let the kernel complain)
        for (const traj_point& q : iplan_.path)
          if (q.time > t) push_point(w.path, q.time, q.pos);
        for (std::size_t k = ev; k < iplan_.events.size(); ++k)
          w.events.push_back(iplan_.events[k]);
        break;
      }
      bool interleaved = false;
      for (std::size_t k = ev; k <= last; ++k) {
        const planned_event& e = iplan_.events[k];
        bool ep_drop = e.kind == event_kind::dropoff &&
                       std::find(trig_ids.begin(), trig_ids.end(),
                                 e.request_id) != trig_ids.end();
        if (!ep_drop) interleaved = true;
      }
      double s = iplan_.events[last].time;
      if (interleaved) {
        // the wrapped plan splits the delivery; mirror it verbatim here
        copy_until(s);
        for (std::size_t k = ev; k <= last; ++k) {
          const planned_event& e = iplan_.events[k];
          w.events.push_back(e);
          if (e.kind == event_kind::pickup) {
            vc[e.request_id] = 1;
            ++vload;
          } else {
            vc[e.request_id] = 0;
            --vload;
          }
        }
        ev = last + 1;
        t = s;
        x = plan_position(iplan_, s);
        continue;
      }
      double arrive = t + std::abs(trig_dest - x);
      push_point(w.path, arrive, trig_dest);
      for (int id : trig_ids)
        w.events.push_back({arrive, event_kind::dropoff, id});
      for (std::size_t k = ev; k <= last; ++k) {
        vc[iplan_.events[k].request_id] = 0;
        --vload;
      }
      ev = last + 1;
      if (s > arrive) push_point(w.path, s, trig_dest);
      t = std::max(arrive, s);
      x = trig_dest;
    }
    return w;
  }

  std::unique_ptr<online_algorithm> inner_;
  bool have_plan_ = false;
  plan iplan_;
  std::size_t iev_ = 0;
  std::vector<char> inner_served_;
  std::vector<char> inner_carried_;
  bool episode_ = false;
  std::vector<int> ep_ids_;
  double ep_dest_ = 0;
};

// ---------------------------------------------------------------------------
// mirror adapter

class mirrored_alg final : public online_algorithm {
 public:
  explicit mirrored_alg(std::unique_ptr<online_algorithm> inner)
      : inner_(std::move(inner)) {}

  std::string name() const override {
    return "mirror(" + inner_->name() + ")";
  }
  void reset() override { inner_->reset(); }

  plan on_change(const observation& obs) override {
    neg_ = *obs.requests;
    for (request& r : neg_) {
      r.origin = -r.origin;
      r.destination = -r.destination;
    }
    observation m = obs;
    m.position = -obs.position;
    m.requests = &neg_;
    plan p = inner_->on_change(m);
    for (traj_point& q : p.path) q.pos = -q.pos;
    return p;
  }

  std::vector<schedule_record> schedule_records() const override {
    std::vector<schedule_record> out = inner_->schedule_records();
    for (schedule_record& r : out) {
      r.start_position = -r.start_position;
      r.end_position = -r.end_position;
    }
    return out;
  }

 private:
  std::unique_ptr<online_algorithm> inner_;
  std::vector<request> neg_;
};

}  // namespace

std::unique_ptr<online_algorithm> make_ignore() {
  return std::make_unique<ignore_alg>();
}

std::unique_ptr<online_algorithm> make_smartstart(double theta) {
  return std::make_unique<smartstart_alg>(theta);
}

std::unique_ptr<online_algorithm> make_smarterstart(double theta) {
  return std::make_unique<smarterstart_alg>(theta);
}

std::unique_ptr<online_algorithm> make_greedy_replan() {
  return std::make_unique<greedy_replan_alg>();
}

std::unique_ptr<online_algorithm> eagerize(
    std::unique_ptr<online_algorithm> inner) {
  return std::make_unique<eagerized_alg>(std::move(inner));
}

std::unique_ptr<online_algorithm> make_mirrored(
    std::unique_ptr<online_algorithm> inner) {
  return std::make_unique<mirrored_alg>(std::move(inner));
}

std::unique_ptr<online_algorithm> make_algorithm(const std::string& spec) {
  std::string name = spec;
  double theta = 0;
  bool has_theta = false;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    try {
      theta = std::stod(spec.substr(colon + 1));
      has_theta = true;
    } catch (const std::exception&) {
      throw domain_error("bad theta in algorithm spec '" + spec + "'");
    }
  }
  if (name == "ignore") return make_ignore();
  if (name == "replan") return make_greedy_replan();
  if (name == "smartstart" || name == "smarterstart") {
    if (!has_theta)
      throw domain_error(name + " needs a parameter, e.g. " + name + ":1.5");
    return name == "smartstart" ? make_smartstart(theta)
                                : make_smarterstart(theta);
  }
  throw domain_error("unknown algorithm '" + name +
                     "' (ignore | smartstart:T | smarterstart:T | replan)");
}

}  // namespace dar
