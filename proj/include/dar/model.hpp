#ifndef DAR_MODEL_HPP
#define DAR_MODEL_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types for dial-a-ride on the line: requests, capacitated
// instances, unit-speed trajectories, schedules, and the instance file
// format. Everything is an immutable value after construction.

namespace dar {

// Absolute tolerance for all time/position comparisons.
inline constexpr double kTol = 1e-9;

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invariant_violation : domain_error {
  using domain_error::domain_error;
};

struct parse_error : domain_error {
  parse_error(int line_no, const std::string& msg)
      : domain_error("line " + std::to_string(line_no) + ": " + msg),
        line(line_no) {}
  int line;
};

// A transportation request (a, b; r): appears at position `origin` at time
// `release` and has to be moved to `destination`.
struct request {
  double origin = 0.0;
  double destination = 0.0;
  double release = 0.0;

  bool is_transport() const { return origin != destination; }
  friend bool operator==(const request&, const request&) = default;
};

// Server capacity c in N ∪ {∞}; the unbounded case is a check that always
// passes.
class capacity {
 public:
  capacity() = default;  // unbounded
  static capacity finite(int c) { return capacity(c); }
  static capacity unbounded() { return capacity(); }

  bool is_finite() const { return value_ >= 0; }
  int value() const {
    if (!is_finite()) throw domain_error("capacity: unbounded has no value");
    return value_;
  }
  // True if one more request may be loaded on top of `load` carried ones.
  bool allows(int load) const { return value_ < 0 || load < value_; }

  friend bool operator==(const capacity&, const capacity&) = default;

 private:
  explicit capacity(int c) : value_(c) {}
  int value_ = -1;
};

struct instance {
  capacity cap = capacity::finite(1);
  std::vector<request> requests;
};

// Checks all request/instance invariants; returns the instance unchanged.
// Throws invariant_violation naming the index and the violated invariant.
const instance& validate_instance(const instance& inst);

// Reflects every request through the origin: (a,b;r) -> (-a,-b;r).
instance mirror_instance(instance inst);

// A line position(t) = slope*t + intercept in the path-time diagram.
struct line {
  double slope = 0.0;
  double intercept = 0.0;
  double value(double t) const { return slope * t + intercept; }
};

inline line mirror_line(const line& l) { return {-l.slope, -l.intercept}; }

struct traj_point {
  double time = 0.0;
  double pos = 0.0;
  friend bool operator==(const traj_point&, const traj_point&) = default;
};

// Piecewise-linear unit-speed server path. Waiting is a zero-slope segment.
class trajectory {
 public:
  trajectory() = default;
  explicit trajectory(std::vector<traj_point> pts);

  // Appends a breakpoint; enforces increasing time and |dx| <= dt + kTol.
  void append(double time, double pos);

  bool empty() const { return points_.empty(); }
  const std::vector<traj_point>& points() const { return points_; }
  double start_time() const;
  double end_time() const;
  double start_position() const;
  double end_position() const;

  // Linear interpolation; throws domain_error outside [start, end].
  double position_at(double t) const;

  // Smallest t >= from with position_at(t) == l.value(t), by per-segment
  // linear solve. none if the trajectory never meets the line in its span.
  std::optional<double> first_crossing(const line& l, double from) const;

  // Smallest t >= from with position_at(t) == x.
  std::optional<double> first_time_at(double x, double from) const;

  // Extremes of the position over [t0, t1] (clamped to the span).
  double max_position(double t0, double t1) const;
  double min_position(double t0, double t1) const;

 private:
  std::vector<traj_point> points_;
};

enum class event_kind { pickup, dropoff };

struct schedule_event {
  double time = 0.0;
  event_kind kind = event_kind::pickup;
  int request_index = -1;
  double position = 0.0;
};

// One offline tour: ordered pickup/dropoff events starting at
// (start_time, start_position) and ending at end_position.
struct schedule {
  double start_time = 0.0;
  double start_position = 0.0;
  double end_position = 0.0;
  std::vector<schedule_event> events;

  double end_time() const {
    return events.empty() ? start_time : events.back().time;
  }
};

// All four feasibility checks: pickup-after-release, dropoff-at-destination,
// capacity bound, and unit-speed reachability between consecutive events.
// Events at equal timestamps are taken in list order (dropoffs are expected
// first, which frees capacity). Throws invariant_violation on the first
// violated check.
void check_schedule(const schedule& s, const std::vector<request>& requests,
                    capacity cap);

// Instance file format (see README): '#' comments, one "capacity" line,
// then "request a b r" lines. The parser sorts requests by release time,
// keeping file order on ties.
instance parse_instance(const std::string& text);
std::string serialize_instance(const instance& inst);

// Number formatting used across the tools: shortest text that round-trips
// a binary64 value.
std::string format_double(double v);

}  // namespace dar

#endif  // DAR_MODEL_HPP
