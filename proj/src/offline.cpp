#include "dar/offline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace dar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct search {
  const std::vector<request>* reqs = nullptr;
  int n = 0;
  capacity cap;
  double best = kInf;
  std::vector<int> best_seq;             // event codes: 2i pickup, 2i+1 dropoff
  std::vector<int> seq;
  std::unordered_map<std::uint64_t, double> seen;  // state -> earliest time

  double release_floor = 0.0;  // max_i (r_i + |a_i - b_i|), a completion bound

  // packs two 20-bit masks plus the last event; n is capped at 20 in solve()
  static std::uint64_t key(unsigned picked, unsigned dropped, int last) {
    return static_cast<std::uint64_t>(picked) |
           (static_cast<std::uint64_t>(dropped) << 20) |
           (static_cast<std::uint64_t>(last + 1) << 40);
  }

  double lower_bound(double time, double pos, unsigned picked,
                     unsigned dropped) const {
    double lo = pos, hi = pos;
    bool any = false;
    for (int i = 0; i < n; ++i) {
      if (dropped & (1u << i)) continue;
      const request& r = (*reqs)[i];
      if (!(picked & (1u << i))) {
        lo = std::min(lo, std::min(r.origin, r.destination));
        hi = std::max(hi, std::max(r.origin, r.destination));
      } else {
        lo = std::min(lo, r.destination);
        hi = std::max(hi, r.destination);
      }
      any = true;
    }
    if (!any) return time;
    // must still touch both extremes
    double travel = std::min(2 * (pos - lo) + (hi - pos),
                             2 * (hi - pos) + (pos - lo));
    return std::max(time + travel, release_floor);
  }

  void dfs(double time, double pos, unsigned picked, unsigned dropped,
           int last, int load) {
    if (dropped == (1u << n) - 1u) {
      if (time < best) {
        best = time;
        best_seq = seq;
      }
      return;
    }
    if (lower_bound(time, pos, picked, dropped) >= best) return;
    auto k = key(picked, dropped, last);
    auto it = seen.find(k);
    if (it != seen.end() && it->second <= time) return;
    seen[k] = time;

    // candidate next events, nearest-completion first (deterministic ties)
    struct cand {
      double t;
      int code;
      double x;
    };
    cand cands[40];
    int m = 0;
    for (int i = 0; i < n; ++i) {
      unsigned bit = 1u << i;
      const request& r = (*reqs)[i];
      if (picked & bit) {
        if (!(dropped & bit))
          cands[m++] = {time + std::abs(r.destination - pos), 2 * i + 1,
                        r.destination};
      } else if (cap.allows(load)) {
        cands[m++] = {std::max(time + std::abs(r.origin - pos), r.release),
                      2 * i, r.origin};
      }
    }
    std::sort(cands, cands + m, [](const cand& a, const cand& b) {
      return a.t != b.t ? a.t < b.t : a.code < b.code;
    });
    for (int j = 0; j < m; ++j) {
      bool is_pick = (cands[j].code & 1) == 0;
      int i = cands[j].code / 2;
      seq.push_back(cands[j].code);
      dfs(cands[j].t, cands[j].x, picked | (is_pick ? (1u << i) : 0u),
          dropped | (is_pick ? 0u : (1u << i)), cands[j].code,
          load + (is_pick ? 1 : -1));
      seq.pop_back();
    }
  }
};

// Requests carried from the start have no pickup event in the witness; the
// feasibility checker is only applied to unloaded queries.
schedule build_witness(const offline_query& q, const std::vector<int>& seq) {
  schedule s;
  s.start_time = q.start_time;
  s.start_position = q.start_position;
  double time = q.start_time;
  double pos = q.start_position;
  for (int code : seq) {
    int i = code / 2;
    const request& r = q.requests[i];
    schedule_event e;
    e.request_index = i;
    if ((code & 1) == 0) {
      e.kind = event_kind::pickup;
      e.position = r.origin;
      time = std::max(time + std::abs(r.origin - pos), r.release);
    } else {
      e.kind = event_kind::dropoff;
      e.position = r.destination;
      time += std::abs(r.destination - pos);
    }
    e.time = time;
    pos = e.position;
    s.events.push_back(e);
  }
  s.end_position = pos;
  return s;
}

offline_solution solve(const offline_query& q, unsigned pre_picked,
                       int search_limit) {
  const int n = static_cast<int>(q.requests.size());
  if (n > search_limit)
    throw search_limit_error("search limit exceeded (" + std::to_string(n) +
                             " > " + std::to_string(search_limit) + ")");
  if (n > 20) throw search_limit_error("search limit exceeded");
  for (const request& r : q.requests)
    if (!std::isfinite(r.origin) || !std::isfinite(r.destination) ||
        !std::isfinite(r.release))
      throw invariant_violation("offline: non-finite request");

  search s;
  s.reqs = &q.requests;
  s.n = n;
  s.cap = q.cap;
  for (int i = 0; i < n; ++i) {
    const request& r = q.requests[i];
    if (!(pre_picked & (1u << i)))
      s.release_floor = std::max(
          s.release_floor, r.release + std::abs(r.origin - r.destination));
  }
  int load = 0;
  for (int i = 0; i < n; ++i)
    if (pre_picked & (1u << i)) ++load;
  if (n == 0) {
    offline_solution empty;
    empty.makespan = 0.0;
    empty.sched.start_time = q.start_time;
    empty.sched.start_position = q.start_position;
    empty.sched.end_position = q.start_position;
    return empty;
  }
  s.dfs(q.start_time, q.start_position, pre_picked, 0u, -1, load);
  offline_solution sol;
  sol.makespan = s.best - q.start_time;
  sol.sched = build_witness(q, s.best_seq);
  return sol;
}

void brute(const offline_query& q, double time, double pos, unsigned picked,
           unsigned dropped, int load, double& best) {
  const int n = static_cast<int>(q.requests.size());
  if (dropped == (1u << n) - 1u) {
    best = std::min(best, time);
    return;
  }
  for (int i = 0; i < n; ++i) {
    unsigned bit = 1u << i;
    const request& r = q.requests[i];
    if (picked & bit) {
      if (!(dropped & bit))
        brute(q, time + std::abs(r.destination - pos), r.destination, picked,
              dropped | bit, load - 1, best);
    } else if (q.cap.allows(load)) {
      brute(q, std::max(time + std::abs(r.origin - pos), r.release), r.origin,
            picked | bit, dropped, load + 1, best);
    }
  }
}

}  // namespace

offline_solution optimal_schedule(const offline_query& q, int search_limit) {
  if (q.start_time < 0) throw invariant_violation("start_time >= 0 violated");
  return solve(q, 0u, search_limit);
}

offline_solution optimal_schedule_carrying(const offline_query& q,
                                           const std::vector<int>& carried,
                                           int search_limit) {
  if (q.start_time < 0) throw invariant_violation("start_time >= 0 violated");
  unsigned picked = 0;
  for (int i : carried) picked |= 1u << i;
  return solve(q, picked, search_limit);
}

double opt(const instance& inst, int search_limit) {
  offline_query q;
  q.start_time = 0.0;
  q.start_position = 0.0;
  q.requests = inst.requests;
  q.cap = inst.cap;
  return optimal_schedule(q, search_limit).makespan;
}

double brute_force_makespan(const offline_query& q) {
  const int n = static_cast<int>(q.requests.size());
  if (n > 6) throw search_limit_error("brute force limited to 6 requests");
  if (n == 0) return 0.0;
  double best = kInf;
  brute(q, q.start_time, q.start_position, 0u, 0u, 0, best);
  return best - q.start_time;
}

}  // namespace dar
