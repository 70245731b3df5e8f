#include <doctest.h>

#include <cmath>
#include <random>

#include "dar/adversary.hpp"
#include "dar/analysis.hpp"
#include "dar/offline.hpp"
#include "dar/online.hpp"

using namespace dar;

namespace {

instance random_instance(std::mt19937& rng, int max_n) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> rel(0.0, 10.0);
  std::uniform_int_distribution<int> nd(0, max_n);
  std::uniform_int_distribution<int> cd(0, 3);
  instance inst;
  int c = cd(rng);
  inst.cap = c == 3 ? capacity::unbounded() : capacity::finite(c + 1);
  int n = nd(rng);
  for (int i = 0; i < n; ++i)
    inst.requests.push_back({pos(rng), pos(rng), rel(rng)});
  return inst;
}

// Test double: never moves. Exercises the horizon guard.
class couch final : public online_algorithm {
 public:
  std::string name() const override { return "couch"; }
  void reset() override {}
  plan on_change(const observation& obs) override {
    plan p;
    p.path.push_back({obs.now, obs.position});
    return p;
  }
};

// Test double: emits a super-speed plan; the kernel must reject it.
class cheetah final : public online_algorithm {
 public:
  std::string name() const override { return "cheetah"; }
  void reset() override {}
  plan on_change(const observation& obs) override {
    plan p;
    p.path.push_back({obs.now, obs.position});
    if (!obs.requests->empty()) {
      p.path.push_back({obs.now + 0.1, obs.position + 5.0});
      p.events.push_back({obs.now + 0.1, event_kind::pickup, 0});
    }
    return p;
  }
};

// Test double for the eagerize fixtures: delivers whatever it carries,
// then collects everything else (origins in id order), dawdling for
// `pause` time units whenever it reaches a full load. All fixtures using
// it share one destination.
class dawdler final : public online_algorithm {
 public:
  explicit dawdler(double pause) : pause_(pause) {}
  std::string name() const override { return "dawdler"; }
  void reset() override {}

  plan on_change(const observation& obs) override {
    plan p;
    p.path.push_back({obs.now, obs.position});
    double t = obs.now, x = obs.position;
    auto deliver = [&](const std::vector<int>& ids) {
      double dest = (*obs.requests)[ids.front()].destination;
      double arrive = t + std::abs(dest - x);
      if (arrive > t) p.path.push_back({arrive, dest});
      for (int id : ids) p.events.push_back({arrive, event_kind::dropoff, id});
      t = arrive;
      x = dest;
    };
    if (!obs.carried.empty()) deliver(obs.carried);
    std::vector<int> to_pick;
    for (int id = 0; id < static_cast<int>(obs.requests->size()); ++id)
      if (!obs.served[id] &&
          std::find(obs.carried.begin(), obs.carried.end(), id) ==
              obs.carried.end())
        to_pick.push_back(id);
    std::vector<int> on_board;
    for (int id : to_pick) {
      const request& r = (*obs.requests)[id];
      double arrive = t + std::abs(r.origin - x);
      if (arrive > t) p.path.push_back({arrive, r.origin});
      double at = std::max(arrive, r.release);
      if (at > arrive) p.path.push_back({at, r.origin});
      p.events.push_back({at, event_kind::pickup, id});
      t = at;
      x = r.origin;
      on_board.push_back(id);
      bool full = obs.cap.is_finite() &&
                  static_cast<int>(on_board.size()) == obs.cap.value();
      if (full || id == to_pick.back()) {
        if (full && pause_ > 0) {
          p.path.push_back({t + pause_, x});
          t += pause_;
        }
        deliver(on_board);
        on_board.clear();
      }
    }
    return p;
  }

 private:
  double pause_;
};

// Test double: one scripted run that splits a common-destination delivery
// around an unrelated pickup. Exercises eagerize's verbatim fallback.
class splitter final : public online_algorithm {
 public:
  std::string name() const override { return "splitter"; }
  void reset() override {}
  plan on_change(const observation& obs) override {
    plan p;
    p.path.push_back({obs.now, obs.position});
    if (obs.now != 0.0 || obs.requests->size() != 3) return p;
    p.path.push_back({1, 1});
    p.path.push_back({3, 3});
    p.path.push_back({4, 2});
    p.path.push_back({5, 3});
    p.events = {{1, event_kind::pickup, 0},  {1, event_kind::pickup, 1},
                {3, event_kind::dropoff, 0}, {4, event_kind::pickup, 2},
                {4, event_kind::dropoff, 2}, {5, event_kind::dropoff, 1}};
    return p;
  }
};

// Test double: serves the single request absurdly late.
class snail final : public online_algorithm {
 public:
  std::string name() const override { return "snail"; }
  void reset() override {}
  plan on_change(const observation& obs) override {
    plan p;
    p.path.push_back({obs.now, obs.position});
    if (obs.requests->empty()) return p;
    const request& r = (*obs.requests)[0];
    double start = 1e7;
    p.path.push_back({start, obs.position});
    double arrive = start + std::abs(r.origin - obs.position);
    p.path.push_back({arrive, r.origin});
    p.events.push_back({arrive, event_kind::pickup, 0});
    double done = arrive + std::abs(r.destination - r.origin);
    if (done > arrive) p.path.push_back({done, r.destination});
    p.events.push_back({done, event_kind::dropoff, 0});
    return p;
  }
};

}  // namespace

TEST_CASE("smarterstart start-time rule") {
  capacity c1 = capacity::finite(1);
  CHECK(smarterstart_start_time(0, {{1, 1, 0}}, c1, 1.5) ==
        doctest::Approx(2).epsilon(1e-12));
  CHECK(smarterstart_start_time(3.5, {}, c1, 1.5) == 3.5);
  // waiting-family second schedule at theta = 1.5, eps = 0.01
  double theta = 1.5, eps = 0.01;
  double ep = (theta + 1) / (2 * theta) * eps;
  std::vector<request> known = {{1, 1, 0},
                                {-1 / (theta - 1) + ep, 1, 1 / (theta - 1) + ep}};
  double t2 = smarterstart_start_time(theta / (theta - 1), known, c1, theta);
  CHECK(t2 == doctest::Approx(2 / ((theta - 1) * (theta - 1)) +
                              (1 - 2 * ep) / (theta - 1))
                  .epsilon(1e-12));
  CHECK(t2 == doctest::Approx(9.9666666666666668).epsilon(1e-12));
  CHECK_THROWS_AS(smarterstart_start_time(0, known, c1, 1.0), domain_error);
}

TEST_CASE("smartstart start-time rule") {
  capacity c1 = capacity::finite(1);
  CHECK(smartstart_start_time(0, 0, {{1, 1, 0}}, c1, 2.0) ==
        doctest::Approx(1).epsilon(1e-12));
  CHECK(smartstart_start_time(7, 3, {}, c1, 2.0) == 7);
  // luring step: from (i-1)eps with a request at i*eps the rule never binds
  double eps = 0.05;
  for (int i = 2; i <= 5; ++i) {
    double t = smartstart_start_time(i * eps, (i - 1) * eps,
                                     {{i * eps, i * eps, i * eps}}, c1, 2.0);
    CHECK(t == doctest::Approx(i * eps).epsilon(1e-12));
  }
}

TEST_CASE("smarterstart serves a lone request per the closed form") {
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 1, 0}};
  auto alg = make_smarterstart(1.5);
  simulation_result res = simulate(*alg, inst);
  REQUIRE(res.schedules.size() == 1);
  CHECK(res.schedules[0].start_time == doctest::Approx(2).epsilon(1e-12));
  CHECK(res.completion_time == doctest::Approx(3).epsilon(1e-12));
}

TEST_CASE("every algorithm finishes the empty instance at time 0") {
  instance inst;
  inst.cap = capacity::finite(1);
  for (auto make : {make_ignore, make_greedy_replan}) {
    auto alg = make();
    CHECK(simulate(*alg, inst).completion_time == 0);
  }
  auto sm = make_smarterstart(1.5);
  CHECK(simulate(*sm, inst).completion_time == 0);
}

TEST_CASE("smarterstart reproduces the waiting-family trace") {
  double theta = 1.5, eps = 0.01;
  instance inst = gen_waiting_lb(theta, eps);
  auto alg = make_smarterstart(theta);
  simulation_result res = simulate(*alg, inst);
  CHECK(res.completion_time == doctest::Approx(15.95).epsilon(1e-12));
  CHECK(res.completion_time / opt(inst) ==
        doctest::Approx(3.19).epsilon(1e-12));
  REQUIRE(res.schedules.size() == 2);
  CHECK(res.schedules[1].start_time ==
        doctest::Approx(9.9666666666666668).epsilon(1e-12));
}

TEST_CASE("ignore starts immediately and defers mid-schedule arrivals") {
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 1, 0}, {-1, -1, 0.5}};
  auto alg = make_ignore();
  simulation_result res = simulate(*alg, inst);
  REQUIRE(res.schedules.size() == 2);
  CHECK(res.schedules[0].start_time == 0);
  CHECK(res.schedules[0].end_time == doctest::Approx(1).epsilon(1e-12));
  CHECK(res.completion_time == doctest::Approx(3).epsilon(1e-12));
}

TEST_CASE("no-waiting family chains S_3 directly after S_2") {
  double theta = 1.8;
  instance inst = gen_nowaiting_lb(theta, 1e-3);
  auto alg = make_smarterstart(theta);
  simulation_result res = simulate(*alg, inst);
  REQUIRE(res.schedules.size() == 3);
  CHECK(res.schedules[2].start_time ==
        doctest::Approx(res.schedules[1].end_time).epsilon(1e-12));
}

TEST_CASE("waiting-rule consistency at emitted start times") {
  double theta = 1.7;
  instance inst = gen_waiting_lb(theta, 1e-3);
  auto alg = make_smarterstart(theta);
  simulation_result res = simulate(*alg, inst);
  for (const schedule_record& s : res.schedules) {
    std::vector<request> known;
    for (const request& r : inst.requests)
      if (r.release <= s.start_time) known.push_back(r);
    offline_query q;
    q.start_time = s.start_time;
    q.requests = known;
    q.cap = inst.cap;
    double len = optimal_schedule(q).makespan;
    CHECK(s.start_time >= len / (theta - 1) - 1e-9);
  }
}

TEST_CASE("simulation is deterministic") {
  std::mt19937 rng(31);
  for (int it = 0; it < 20; ++it) {
    instance inst = random_instance(rng, 5);
    auto a = make_smarterstart(1.7);
    auto b = make_smarterstart(1.7);
    simulation_result ra = simulate(*a, inst);
    simulation_result rb = simulate(*b, inst);
    REQUIRE(ra.completion_time == rb.completion_time);
    REQUIRE(ra.path.points().size() == rb.path.points().size());
    for (std::size_t k = 0; k < ra.path.points().size(); ++k)
      REQUIRE(ra.path.points()[k] == rb.path.points()[k]);
  }
}

TEST_CASE("online never beats offline") {
  std::mt19937 rng(41);
  for (int it = 0; it < 40; ++it) {
    instance inst = random_instance(rng, 4);
    double best = opt(inst);
    for (int which = 0; which < 4; ++which) {
      std::unique_ptr<online_algorithm> alg;
      switch (which) {
        case 0: alg = make_ignore(); break;
        case 1: alg = make_smartstart(1.5); break;
        case 2: alg = make_smarterstart(1.7); break;
        default: alg = make_greedy_replan(); break;
      }
      CHECK(simulate(*alg, inst).completion_time >= best - 1e-9);
    }
  }
}

TEST_CASE("starting-time lower bound holds on smarterstart runs") {
  std::mt19937 rng(53);
  double theta = 1.7124907481;
  for (int it = 0; it < 30; ++it) {
    instance inst = random_instance(rng, 4);
    auto alg = make_smarterstart(theta);
    simulation_result res = simulate(*alg, inst);
    for (const schedule_record& s : res.schedules)
      CHECK(s.start_time >= std::abs(s.end_position) / (theta - 1) - 1e-9);
  }
}

TEST_CASE("luring drags smartstart but not smarterstart") {
  instance lure = gen_luring(1.0, 0.1, 2.0);
  CHECK(lure.requests.size() == 10);
  auto fast = make_smartstart(2.0);
  simulation_result res = simulate(*fast, lure);
  auto reach = res.path.first_time_at(1.0, 0.0);
  REQUIRE(reach.has_value());
  CHECK(*reach == doctest::Approx(1.1).epsilon(1e-12));

  auto better = make_smarterstart(2.0);
  simulation_result res2 = simulate(*better, lure);
  auto reach2 = res2.path.first_time_at(1.0, 0.0);
  REQUIRE(reach2.has_value());
  CHECK(*reach2 >= 1.0 - 1e-9);
}

TEST_CASE("degenerate single-step luring chain") {
  instance lure = gen_luring(0.1, 0.1, 2.0);
  CHECK(lure.requests.size() == 1);
  auto a = make_smartstart(2.0);
  auto b = make_smarterstart(2.0);
  CHECK(simulate(*a, lure).completion_time ==
        simulate(*b, lure).completion_time);
}

TEST_CASE("horizon guard flags a non-serving algorithm") {
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 1, 0}};
  couch lazy;
  CHECK_THROWS_AS(simulate(lazy, inst), simulation_error);
}

TEST_CASE("kernel rejects an over-speed plan") {
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{5, 5, 0}};
  cheetah fast;
  CHECK_THROWS_AS(simulate(fast, inst), simulation_error);
}

TEST_CASE("eagerize leaves an already-eager algorithm unchanged") {
  std::mt19937 rng(61);
  for (int it = 0; it < 15; ++it) {
    instance inst = random_instance(rng, 4);
    auto plain = make_ignore();
    auto eager = eagerize(make_ignore());
    simulation_result a = simulate(*plain, inst);
    simulation_result b = simulate(*eager, inst);
    REQUIRE(a.completion_time == doctest::Approx(b.completion_time).epsilon(1e-12));
    REQUIRE(a.path.points().size() == b.path.points().size());
    for (std::size_t k = 0; k < a.path.points().size(); ++k) {
      CHECK(a.path.points()[k].time ==
            doctest::Approx(b.path.points()[k].time).epsilon(1e-12));
      CHECK(a.path.points()[k].pos ==
            doctest::Approx(b.path.points()[k].pos).epsilon(1e-12));
    }
  }
}

TEST_CASE("eagerize removes a dawdler's full-load pause") {
  instance inst;
  inst.cap = capacity::finite(2);
  double delta = 2.4;
  inst.requests = {{1, delta, 1}, {1, delta, 1}};

  dawdler slow(1.0);
  simulation_result lazy_run = simulate(slow, inst);
  auto eager = eagerize(std::make_unique<dawdler>(1.0));
  simulation_result eager_run = simulate(*eager, inst);

  // delivery happens a full pause earlier, completion never later
  CHECK(lazy_run.completion_time ==
        doctest::Approx(2 + 1 + (delta - 1)).epsilon(1e-12));
  CHECK(eager_run.completion_time ==
        doctest::Approx(2 + (delta - 1)).epsilon(1e-12));
  CHECK(eager_run.completion_time <= lazy_run.completion_time + 1e-12);

  // the eager server drives the full load straight: pos(t_L + (delta-1)) = delta
  CHECK(eager_run.path.position_at(2 + (delta - 1)) ==
        doctest::Approx(delta).epsilon(1e-12));
}

TEST_CASE("eagerize handles releases during a delivery episode") {
  double delta = 2.4142135623730951;
  instance inst;
  inst.cap = capacity::finite(2);
  // third request shares the destination and lands mid-delivery
  for (double r3 : {2.5, 4.0}) {
    inst.requests = {{1, delta, 1}, {1, delta, 1}, {0, delta, r3}};
    dawdler plain(1.0);
    simulation_result a = simulate(plain, inst);
    auto eager = eagerize(std::make_unique<dawdler>(1.0));
    simulation_result b = simulate(*eager, inst);
    CHECK(b.completion_time <= a.completion_time + 1e-9);
    // the full load still reaches delta strictly earlier
    CHECK(b.dropoff_times[0] < a.dropoff_times[0] - 0.4);
    CHECK(b.dropoff_times[1] < a.dropoff_times[1] - 0.4);
    CHECK(b.dropoff_times[2] == doctest::Approx(a.dropoff_times[2]));
  }
}

TEST_CASE("eagerize mirrors a split delivery verbatim") {
  instance inst;
  inst.cap = capacity::finite(2);
  inst.requests = {{1, 3, 0}, {1, 3, 0}, {2, 2, 0}};
  splitter plain;
  simulation_result a = simulate(plain, inst);
  auto eager = eagerize(std::make_unique<splitter>());
  simulation_result b = simulate(*eager, inst);
  CHECK(a.completion_time == doctest::Approx(5).epsilon(1e-12));
  CHECK(b.completion_time == doctest::Approx(a.completion_time).epsilon(1e-12));
  for (std::size_t i = 0; i < inst.requests.size(); ++i)
    CHECK(a.dropoff_times[i] == doctest::Approx(b.dropoff_times[i]).epsilon(1e-12));
}

TEST_CASE("a release at the exact start of a schedule joins it mid-load") {
  // S_2 starts at t = 2 with an instant pickup at the server's position;
  // the release at the same instant is seen first and the revised schedule
  // keeps the already-loaded request on board.
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{0, 2, 0}, {2, 3, 1}, {5, 5, 2}};
  auto alg = make_ignore();
  simulation_result res = simulate(*alg, inst);
  CHECK(res.pickup_times[1] == doctest::Approx(2).epsilon(1e-12));
  CHECK(res.dropoff_times[1] == doctest::Approx(3).epsilon(1e-12));
  CHECK(res.completion_time == doctest::Approx(5).epsilon(1e-12));
}

TEST_CASE("the horizon guard also stops an absurdly slow plan") {
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 1, 0}};
  snail slow;
  CHECK_THROWS_AS(simulate(slow, inst), simulation_error);
}

TEST_CASE("algorithm specs parse or fail loudly") {
  CHECK(make_algorithm("ignore")->name() == "ignore");
  CHECK(make_algorithm("replan")->name() == "replan");
  CHECK(make_algorithm("smartstart:1.5")->name() == "smartstart:1.5");
  CHECK(make_algorithm("smarterstart:1.7125")->name() ==
        "smarterstart:1.7125");
  CHECK_THROWS_AS(make_algorithm("smartstart"), domain_error);
  CHECK_THROWS_AS(make_algorithm("smarterstart:zero"), domain_error);
  CHECK_THROWS_AS(make_algorithm("smarterstart:0.5"), domain_error);
  CHECK_THROWS_AS(make_algorithm("teleport"), domain_error);
}

TEST_CASE("eagerize never hurts on random instances") {
  std::mt19937 rng(71);
  for (int it = 0; it < 15; ++it) {
    instance inst = random_instance(rng, 4);
    inst.cap = capacity::finite(2);
    auto plain = make_smartstart(1.5);
    auto eager = eagerize(make_smartstart(1.5));
    CHECK(simulate(*eager, inst).completion_time <=
          simulate(*plain, inst).completion_time + 1e-9);
  }
}

TEST_CASE("greedy replan revises mid-carry and stays feasible") {
  instance inst;
  inst.cap = capacity::finite(1);
  inst.requests = {{1, 2.4, 1}, {-2, -2, 2}};
  auto alg = make_greedy_replan();
  simulation_result res = simulate(*alg, inst);
  // pick (1,2.4) at 2, forced to deliver first, then sweep left
  CHECK(res.completion_time == doctest::Approx(2 + 1.4 + 4.4).epsilon(1e-12));
}

TEST_CASE("schedule records replay through the feasibility checker") {
  double theta = 1.8;
  instance inst = gen_nowaiting_lb(theta, 1e-3);
  auto alg = make_smarterstart(theta);
  simulation_result res = simulate(*alg, inst);
  // indices contiguous from 1, t_0 = p_0 = 0 convention
  for (std::size_t j = 0; j < res.schedules.size(); ++j)
    CHECK(res.schedules[j].index == static_cast<int>(j) + 1);
  // every request served exactly once
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    CHECK(res.pickup_times[i] == res.pickup_times[i]);
    CHECK(res.dropoff_times[i] == res.dropoff_times[i]);
  }
  CHECK(res.completion_time ==
        doctest::Approx(res.schedules.back().end_time).epsilon(1e-12));
}
