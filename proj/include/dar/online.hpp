#ifndef DAR_ONLINE_HPP
#define DAR_ONLINE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dar/model.hpp"
#include "dar/offline.hpp"

// The online-algorithm interface, the event-driven simulation kernel, and
// the algorithms Ignore, Smartstart, SmarterStart, a greedy replanning
// baseline, and the eagerize wrapper.
//
// Contract: a deterministic online algorithm gains no information between
// releases, so its motion is fully determined until the next release. The
// kernel asks for a plan at time 0 and after every release; the returned
// plan commits the server's motion and all pickup/dropoff actions under the
// assumption that nothing else arrives. This is what lets both the kernel
// and the reactive adversary extrapolate the server's future.

namespace dar {

struct simulation_error : domain_error {
  using domain_error::domain_error;
};

struct planned_event {
  double time = 0.0;
  event_kind kind = event_kind::pickup;
  int request_id = -1;  // kernel id (order of release)
};

// Committed motion from the current moment until everything known is
// served. path[0] is the current (time, position); after the last path
// point the server idles there. An idle server publishes a single-point
// path.
struct plan {
  std::vector<traj_point> path;
  std::vector<planned_event> events;  // nondecreasing times
};

// What an algorithm sees when asked to (re)plan. `requests` lists every
// request released so far; ids are indices into it.
struct observation {
  double now = 0.0;
  double position = 0.0;
  std::vector<int> carried;
  std::vector<char> served;
  const std::vector<request>* requests = nullptr;
  capacity cap;
};

// One executed offline sub-tour S_j of a schedule-based algorithm.
struct schedule_record {
  int index = 0;            // j, 1-based
  double start_time = 0.0;  // t_j
  double start_position = 0.0;
  double end_position = 0.0;
  double end_time = 0.0;
  std::vector<int> request_ids;
  double length() const { return end_time - start_time; }
};

class online_algorithm {
 public:
  virtual ~online_algorithm() = default;
  virtual std::string name() const = 0;
  virtual void reset() = 0;
  virtual plan on_change(const observation& obs) = 0;
  virtual std::vector<schedule_record> schedule_records() const { return {}; }
};

struct simulation_result {
  double completion_time = 0.0;  // ALG(sigma)
  trajectory path;
  std::vector<schedule_record> schedules;
  // aligned with the instance's request order; NaN when never performed
  std::vector<double> pickup_times;
  std::vector<double> dropoff_times;
};

struct simulation_options {
  double horizon_factor = 1000.0;  // abort at factor * (opt upper bound + 1)
};

// Stepwise kernel shared by simulate() and the adversary. Feed releases in
// nondecreasing time order; between releases the committed plan can be
// inspected and extrapolated.
class sim_engine {
 public:
  sim_engine(online_algorithm& alg, capacity cap,
             simulation_options opts = {});

  // Advances the world to `time` (executing plan events due by then, with
  // same-instant plan events before the release becomes visible), appends
  // the batch, and lets the algorithm replan. Returns the assigned ids.
  std::vector<int> release_at(double time, const std::vector<request>& batch);

  // Executes the rest of the committed plan. Throws simulation_error if
  // released requests remain unserved afterwards.
  void run_to_completion();

  double now() const { return now_; }
  double position() const { return pos_; }
  const std::vector<request>& requests() const { return requests_; }
  bool served(int id) const { return drop_time_[id] == drop_time_[id]; }
  double completion_time() const { return completion_; }
  const trajectory& executed() const { return executed_; }
  const std::vector<double>& pickup_times() const { return pick_time_; }
  const std::vector<double>& dropoff_times() const { return drop_time_; }
  std::vector<schedule_record> schedule_records() const {
    return alg_.schedule_records();
  }

  // Extrapolation over the committed plan (no further releases assumed).
  double extrapolated_position(double t) const;
  std::optional<double> planned_pickup_time(int id) const;
  std::optional<double> planned_serve_time(int id) const;
  // First time >= from where the extrapolated position meets the line;
  // searches the plan and the constant idle tail after it.
  std::optional<double> extrapolated_crossing(const line& l,
                                              double from) const;
  trajectory extrapolated_trajectory(double until) const;

 private:
  void advance_to(double t);
  void apply_event(const planned_event& e);
  void set_plan(plan p);
  void update_horizon();

  online_algorithm& alg_;
  capacity cap_;
  simulation_options opts_;
  double now_ = 0.0;
  double pos_ = 0.0;
  double completion_ = 0.0;
  double horizon_;
  std::vector<request> requests_;
  std::vector<char> carried_;
  std::vector<double> pick_time_;
  std::vector<double> drop_time_;
  int load_ = 0;
  trajectory executed_;
  plan plan_;
  std::size_t next_event_ = 0;
};

// Event-driven run of `alg` on `inst`.
simulation_result simulate(online_algorithm& alg, const instance& inst,
                           const simulation_options& opts = {});

// Start-time rules. Both return min{t' >= now : t' >= L(...)/(theta-1)};
// with a fixed known set no release can bind past `now`, so L is constant
// in t' and the unique crossing has the closed form max(now, L/(theta-1)).
//
// SmarterStart measures L from the origin over every request released so
// far (served or not); Smartstart measures it from the server's current
// position over the unserved ones.
double smarterstart_start_time(double now, const std::vector<request>& known,
                               capacity cap, double theta,
                               int search_limit = kDefaultSearchLimit);
double smartstart_start_time(double now, double position,
                             const std::vector<request>& unserved,
                             capacity cap, double theta,
                             int search_limit = kDefaultSearchLimit);

std::unique_ptr<online_algorithm> make_ignore();
std::unique_ptr<online_algorithm> make_smartstart(double theta);
std::unique_ptr<online_algorithm> make_smarterstart(double theta);
std::unique_ptr<online_algorithm> make_greedy_replan();

// Observation-1 wrapper: whenever the wrapped server is fully loaded with
// requests sharing one destination, drive there directly, deliver, idle
// until the wrapped algorithm's own delivery moment, then mirror it again.
// Never later than the wrapped algorithm on any sequence.
std::unique_ptr<online_algorithm> eagerize(
    std::unique_ptr<online_algorithm> inner);

// Runs `inner` in a world reflected through the origin.
std::unique_ptr<online_algorithm> make_mirrored(
    std::unique_ptr<online_algorithm> inner);

// Parses "ignore", "smartstart:1.5", "smarterstart:1.7125", "replan".
std::unique_ptr<online_algorithm> make_algorithm(const std::string& spec);

}  // namespace dar

#endif  // DAR_ONLINE_HPP
