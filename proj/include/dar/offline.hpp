#ifndef DAR_OFFLINE_HPP
#define DAR_OFFLINE_HPP

#include <vector>

#include "dar/model.hpp"

// Exact computation of L(t, p, R): the smallest makespan of a schedule that
// starts at position p at time t and serves all requests in R respecting
// release times. The clock stops at the last service; there is no return
// leg (open variant).

namespace dar {

struct offline_query {
  double start_time = 0.0;
  double start_position = 0.0;
  std::vector<request> requests;
  capacity cap;
};

struct offline_solution {
  double makespan = 0.0;  // L(t, p, R); completion time is start_time + makespan
  schedule sched;         // witness, feasible under check_schedule
};

struct search_limit_error : domain_error {
  using domain_error::domain_error;
};

inline constexpr int kDefaultSearchLimit = 10;

// Branch-and-bound over interleavings of pickup/dropoff events respecting
// pickup-before-dropoff and the capacity bound; per-order timing is greedy
// (drive directly to the next event point, wait there if its release has
// not arrived). Dominance on (served set, carried set, last event) prunes.
offline_solution optimal_schedule(const offline_query& q,
                                  int search_limit = kDefaultSearchLimit);

// Same search, but the server already carries the listed requests (indices
// into q.requests); their pickups are treated as done. Used by replanning
// algorithms that revise mid-carry.
offline_solution optimal_schedule_carrying(const offline_query& q,
                                           const std::vector<int>& carried,
                                           int search_limit = kDefaultSearchLimit);

// OPT(sigma) = L(0, 0, sigma).
double opt(const instance& inst, int search_limit = kDefaultSearchLimit);

// Independent oracle: exhaustively enumerates every capacity-feasible
// interleaving with no pruning or memoization, greedy timing per order.
// Only for |R| <= 6.
double brute_force_makespan(const offline_query& q);

}  // namespace dar

#endif  // DAR_OFFLINE_HPP
