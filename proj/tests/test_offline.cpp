#include <doctest.h>

#include <cmath>
#include <random>

#include "dar/adversary.hpp"
#include "dar/offline.hpp"

using namespace dar;

namespace {

offline_query random_query(std::mt19937& rng, int max_n) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> rel(0.0, 10.0);
  std::uniform_int_distribution<int> nd(0, max_n);
  std::uniform_int_distribution<int> cd(0, 3);
  offline_query q;
  q.start_time = rel(rng) / 2;
  q.start_position = pos(rng);
  int c = cd(rng);
  q.cap = c == 3 ? capacity::unbounded() : capacity::finite(c + 1);
  int n = nd(rng);
  for (int i = 0; i < n; ++i) q.requests.push_back({pos(rng), pos(rng), rel(rng)});
  return q;
}

}  // namespace

TEST_CASE("single point request costs 1 from the origin at any time") {
  for (double t : {0.0, 0.5, 3.0, 100.0}) {
    offline_query q;
    q.start_time = t;
    q.requests = {{1, 1, 0}};
    q.cap = capacity::finite(1);
    CHECK(optimal_schedule(q).makespan == doctest::Approx(1).epsilon(1e-12));
  }
}

TEST_CASE("empty request set costs nothing") {
  offline_query q;
  q.cap = capacity::finite(1);
  CHECK(optimal_schedule(q).makespan == 0);
  CHECK(brute_force_makespan(q) == 0);
}

TEST_CASE("capacity changes the optimal interleaving") {
  offline_query q;
  q.requests = {{0, 2, 0}, {1, 1, 0}};
  q.cap = capacity::finite(1);
  // loaded with (0,2), the server cannot touch (1,1) en route
  CHECK(optimal_schedule(q).makespan == doctest::Approx(3).epsilon(1e-12));
  CHECK(brute_force_makespan(q) == doctest::Approx(3).epsilon(1e-12));
  q.cap = capacity::finite(2);
  CHECK(optimal_schedule(q).makespan == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("release times are respected") {
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{5, 5, 9}};
  CHECK(opt(inst) == doctest::Approx(9).epsilon(1e-12));
}

TEST_CASE("opt matches the waiting-family closed form") {
  // OPT = (theta+1)/(theta-1) at theta = 1.5
  CHECK(opt(gen_waiting_lb(1.5, 0.01)) == doctest::Approx(5).epsilon(1e-12));
}

TEST_CASE("opt matches the no-waiting-family closed form") {
  // OPT = 2/(theta-1) + 3/(theta-1)^2 at theta = 1.8
  CHECK(opt(gen_nowaiting_lb(1.8, 0.01)) ==
        doctest::Approx(7.1875).epsilon(1e-12));
}

TEST_CASE("search limit is enforced") {
  offline_query q;
  q.cap = capacity::finite(1);
  for (int i = 0; i < 11; ++i)
    q.requests.push_back({double(i), double(i), 0});
  CHECK_THROWS_AS(optimal_schedule(q), search_limit_error);
  CHECK_THROWS_AS(brute_force_makespan(q), search_limit_error);
}

TEST_CASE("solver agrees with the brute-force oracle") {
  std::mt19937 rng(2024);
  for (int it = 0; it < 150; ++it) {
    offline_query q = random_query(rng, 5);
    double fast = optimal_schedule(q).makespan;
    double slow = brute_force_makespan(q);
    REQUIRE(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("witness schedules are feasible and match the makespan") {
  std::mt19937 rng(99);
  for (int it = 0; it < 100; ++it) {
    offline_query q = random_query(rng, 6);
    offline_solution sol = optimal_schedule(q);
    CHECK_NOTHROW(check_schedule(sol.sched, q.requests, q.cap));
    CHECK(sol.sched.end_time() ==
          doctest::Approx(q.start_time + sol.makespan).epsilon(1e-12));
  }
}

TEST_CASE("L is non-increasing in the start time") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dt(0.0, 5.0);
  for (int it = 0; it < 100; ++it) {
    offline_query q = random_query(rng, 4);
    offline_query later = q;
    later.start_time = q.start_time + dt(rng);
    CHECK(optimal_schedule(q).makespan >=
          optimal_schedule(later).makespan - 1e-9);
  }
}

TEST_CASE("L satisfies the triangle inequality in the start position") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  for (int it = 0; it < 100; ++it) {
    offline_query q = random_query(rng, 4);
    offline_query moved = q;
    moved.start_position = pos(rng);
    double lhs = optimal_schedule(q).makespan;
    double rhs = std::abs(q.start_position - moved.start_position) +
                 optimal_schedule(moved).makespan;
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("prefix sets never cost more than the optimum of the whole") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> dt(0.0, 12.0);
  for (int it = 0; it < 100; ++it) {
    offline_query q = random_query(rng, 5);
    q.start_position = 0;
    q.start_time = 0;
    instance inst;
    inst.cap = q.cap;
    inst.requests = q.requests;
    double whole = opt(inst);
    double t = dt(rng);
    offline_query prefix;
    prefix.start_time = t;
    prefix.start_position = 0;
    prefix.cap = q.cap;
    for (const request& r : q.requests)
      if (r.release <= t) prefix.requests.push_back(r);
    CHECK(optimal_schedule(prefix).makespan <= whole + 1e-9);
  }
}

TEST_CASE("carrying solver continues a partial load") {
  // carrying (0,2) from position 1 at time 1: deliver at 2, come back for (1,1)
  offline_query q;
  q.start_time = 1;
  q.start_position = 1;
  q.requests = {{0, 2, 0}, {1, 1, 0}};
  q.cap = capacity::finite(1);
  offline_solution sol = optimal_schedule_carrying(q, {0});
  CHECK(sol.makespan == doctest::Approx(2).epsilon(1e-12));
  // with a free slot the point request is served in passing
  q.cap = capacity::finite(2);
  CHECK(optimal_schedule_carrying(q, {0}).makespan ==
        doctest::Approx(1).epsilon(1e-12));
}
