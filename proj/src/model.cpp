#include "dar/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace dar {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

const instance& validate_instance(const instance& inst) {
  if (inst.cap.is_finite() && inst.cap.value() < 1)
    throw invariant_violation("capacity >= 1 violated");
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const request& r = inst.requests[i];
    if (!finite(r.origin) || !finite(r.destination) || !finite(r.release))
      throw invariant_violation("finite fields violated at index " +
                                std::to_string(i));
    if (r.release < 0)
      throw invariant_violation("release >= 0 violated at index " +
                                std::to_string(i));
  }
  return inst;
}

instance mirror_instance(instance inst) {
  for (request& r : inst.requests) {
    r.origin = -r.origin;
    r.destination = -r.destination;
  }
  return inst;
}

trajectory::trajectory(std::vector<traj_point> pts) {
  for (const traj_point& p : pts) append(p.time, p.pos);
}

void trajectory::append(double time, double pos) {
  if (!finite(time) || !finite(pos))
    throw invariant_violation("trajectory: non-finite breakpoint");
  if (!points_.empty()) {
    const traj_point& last = points_.back();
    if (time == last.time && pos == last.pos) return;  // dedupe
    double dt = time - last.time;
    if (dt <= 0) throw invariant_violation("trajectory: time not increasing");
    if (std::abs(pos - last.pos) > dt + kTol)
      throw invariant_violation("trajectory: unit speed violated");
  }
  points_.push_back({time, pos});
}

double trajectory::start_time() const {
  if (points_.empty()) throw domain_error("trajectory: empty");
  return points_.front().time;
}

double trajectory::end_time() const {
  if (points_.empty()) throw domain_error("trajectory: empty");
  return points_.back().time;
}

double trajectory::start_position() const {
  if (points_.empty()) throw domain_error("trajectory: empty");
  return points_.front().pos;
}

double trajectory::end_position() const {
  if (points_.empty()) throw domain_error("trajectory: empty");
  return points_.back().pos;
}

double trajectory::position_at(double t) const {
  if (points_.empty()) throw domain_error("trajectory: empty");
  if (t < start_time() - kTol || t > end_time() + kTol)
    throw domain_error("trajectory: time outside span");
  t = std::clamp(t, start_time(), end_time());
  auto it = std::upper_bound(
      points_.begin(), points_.end(), t,
      [](double v, const traj_point& p) { return v < p.time; });
  if (it == points_.begin()) return points_.front().pos;
  if (it == points_.end()) return points_.back().pos;
  const traj_point& hi = *it;
  const traj_point& lo = *(it - 1);
  double w = (t - lo.time) / (hi.time - lo.time);
  return lo.pos + w * (hi.pos - lo.pos);
}

std::optional<double> trajectory::first_crossing(const line& l,
                                                 double from) const {
  if (points_.empty()) return std::nullopt;
  from = std::max(from, start_time());
  if (from > end_time()) return std::nullopt;
  if (points_.size() == 1) {
    const traj_point& p = points_.front();
    if (p.pos == l.value(p.time)) return p.time;
    return std::nullopt;
  }
  for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
    const traj_point& a = points_[k];
    const traj_point& b = points_[k + 1];
    if (b.time < from) continue;
    double t0 = std::max(a.time, from);
    double g0 = position_at(t0) - l.value(t0);
    double g1 = b.pos - l.value(b.time);
    if (g0 == 0.0) return t0;
    if (g1 == 0.0) return b.time;
    if ((g0 > 0) != (g1 > 0)) {
      // root of the linear gap on [t0, b.time]
      double t = t0 + g0 * (b.time - t0) / (g0 - g1);
      return std::clamp(t, t0, b.time);
    }
  }
  return std::nullopt;
}

std::optional<double> trajectory::first_time_at(double x, double from) const {
  return first_crossing(line{0.0, x}, from);
}

double trajectory::max_position(double t0, double t1) const {
  t0 = std::max(t0, start_time());
  t1 = std::min(t1, end_time());
  if (t1 < t0) throw domain_error("trajectory: empty window");
  double best = std::max(position_at(t0), position_at(t1));
  for (const traj_point& p : points_)
    if (p.time > t0 && p.time < t1) best = std::max(best, p.pos);
  return best;
}

double trajectory::min_position(double t0, double t1) const {
  t0 = std::max(t0, start_time());
  t1 = std::min(t1, end_time());
  if (t1 < t0) throw domain_error("trajectory: empty window");
  double best = std::min(position_at(t0), position_at(t1));
  for (const traj_point& p : points_)
    if (p.time > t0 && p.time < t1) best = std::min(best, p.pos);
  return best;
}

void check_schedule(const schedule& s, const std::vector<request>& requests,
                    capacity cap) {
  const int n = static_cast<int>(requests.size());
  std::vector<int> picked(n, 0), dropped(n, 0);
  double t = s.start_time;
  double x = s.start_position;
  int load = 0;
  for (std::size_t k = 0; k < s.events.size(); ++k) {
    const schedule_event& e = s.events[k];
    if (e.request_index < 0 || e.request_index >= n)
      throw invariant_violation("schedule: unknown request index");
    const request& r = requests[e.request_index];
    if (e.time < t - kTol)
      throw invariant_violation("schedule: event times not nondecreasing");
    if (std::abs(e.position - x) > (e.time - t) + kTol)
      throw invariant_violation("schedule: unreachable event (unit speed)");
    if (e.kind == event_kind::pickup) {
      if (picked[e.request_index]++)
        throw invariant_violation("schedule: duplicate pickup");
      if (std::abs(e.position - r.origin) > kTol)
        throw invariant_violation("schedule: pickup not at origin");
      if (e.time < r.release - kTol)
        throw invariant_violation("schedule: pickup before release");
      if (!cap.allows(load))
        throw invariant_violation("schedule: capacity exceeded");
      ++load;
    } else {
      if (!picked[e.request_index] || dropped[e.request_index]++)
        throw invariant_violation("schedule: dropoff without pickup");
      if (std::abs(e.position - r.destination) > kTol)
        throw invariant_violation("schedule: dropoff not at destination");
      --load;
    }
    t = std::max(t, e.time);
    x = e.position;
  }
  if (std::abs(x - s.end_position) > kTol)
    throw invariant_violation("schedule: end position mismatch");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0;
  std::sscanf(buf, "%lg", &back);
  if (back == v) {
    // try shorter forms that still round-trip
    for (int prec = 1; prec < 17; ++prec) {
      char cand[64];
      std::snprintf(cand, sizeof cand, "%.*g", prec, v);
      std::sscanf(cand, "%lg", &back);
      if (back == v) return cand;
    }
  }
  return buf;
}

instance parse_instance(const std::string& text) {
  instance inst;
  bool have_capacity = false;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<request, int>> reqs;  // request + file order
  while (std::getline(in, raw)) {
    ++line_no;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    std::istringstream ls(s);
    std::string word;
    if (!(ls >> word)) continue;  // blank / comment line
    if (word == "capacity") {
      if (have_capacity) throw parse_error(line_no, "duplicate capacity line");
      std::string v;
      if (!(ls >> v)) throw parse_error(line_no, "missing capacity value");
      if (v == "inf") {
        inst.cap = capacity::unbounded();
      } else {
        try {
          std::size_t used = 0;
          int c = std::stoi(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
          if (c < 1) throw parse_error(line_no, "capacity >= 1 violated");
          inst.cap = capacity::finite(c);
        } catch (const parse_error&) {
          throw;
        } catch (const std::exception&) {
          throw parse_error(line_no, "bad capacity value '" + v + "'");
        }
      }
      have_capacity = true;
    } else if (word == "request") {
      request r;
      if (!(ls >> r.origin >> r.destination >> r.release))
        throw parse_error(line_no, "request needs three decimals: a b r");
      std::string extra;
      if (ls >> extra) throw parse_error(line_no, "trailing tokens");
      if (!have_capacity)
        throw parse_error(line_no, "request before capacity line");
      reqs.push_back({r, static_cast<int>(reqs.size())});
    } else {
      throw parse_error(line_no, "unknown directive '" + word + "'");
    }
  }
  if (!have_capacity) throw parse_error(line_no, "missing capacity line");
  std::stable_sort(reqs.begin(), reqs.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.release < b.first.release;
                   });
  for (auto& [r, _] : reqs) inst.requests.push_back(r);
  try {
    validate_instance(inst);
  } catch (const invariant_violation& e) {
    throw parse_error(line_no, e.what());
  }
  return inst;
}

std::string serialize_instance(const instance& inst) {
  std::ostringstream out;
  out << "capacity "
      << (inst.cap.is_finite() ? std::to_string(inst.cap.value()) : "inf")
      << "\n";
  for (const request& r : inst.requests)
    out << "request " << format_double(r.origin) << " "
        << format_double(r.destination) << " " << format_double(r.release)
        << "\n";
  return out.str();
}

}  // namespace dar
