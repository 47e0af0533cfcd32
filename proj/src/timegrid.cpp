#include "loadsched/timegrid.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "loadsched/errors.hpp"
#include "loadsched/kernels.hpp"

namespace loadsched {
namespace {

constexpr int kMinutesPerDay = 1440;

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ParseError(0, "invalid " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

int aligned_slots(ClockTime clock, const TimeGrid& grid) {
  grid.check();
  if (clock.minutes < 0 || clock.minutes > kMinutesPerDay)
    throw BoundaryError("clock " + clock.label() + " outside the day");
  if (clock.minutes % grid.slot_minutes != 0)
    throw BoundaryError("clock " + clock.label() + " is not on a " + std::to_string(grid.slot_minutes) +
                        "-minute slot boundary");
  return clock.minutes / grid.slot_minutes;
}

}  // namespace

TimeGrid TimeGrid::with_slot_minutes(int slot_minutes) {
  if (slot_minutes <= 0 || kMinutesPerDay % slot_minutes != 0)
    throw ValidationError("slot length " + std::to_string(slot_minutes) + " min does not divide the day");
  TimeGrid grid{kMinutesPerDay / slot_minutes, slot_minutes};
  return grid;
}

void TimeGrid::check() const {
  if (slot_count <= 0 || slot_minutes <= 0 || slot_count * slot_minutes != kMinutesPerDay)
    throw ValidationError("time grid must satisfy slot_count * slot_minutes = 1440");
}

ClockTime ClockTime::parse(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || text.size() - colon != 3)
    throw ParseError(0, "clock '" + std::string(text) + "' is not hh:mm");
  const int hours = parse_int(text.substr(0, colon), "hour");
  const int minutes = parse_int(text.substr(colon + 1), "minute");
  if (hours < 0 || minutes < 0 || minutes > 59 || hours * 60 + minutes > kMinutesPerDay)
    throw ParseError(0, "clock '" + std::string(text) + "' out of range");
  return ClockTime{hours * 60 + minutes};
}

std::string ClockTime::label() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

Slot slot_ending_at(ClockTime clock, const TimeGrid& grid) {
  const int n = aligned_slots(clock, grid);
  // 00:00 closes the previous day; as an end time it is the last slot.
  return n == 0 ? grid.slot_count : n;
}

Slot slot_starting_at(ClockTime clock, const TimeGrid& grid) {
  const int n = aligned_slots(clock, grid);
  if (n >= grid.slot_count) throw BoundaryError("no slot starts at " + clock.label());
  return n + 1;
}

std::string slot_label(Slot t, const TimeGrid& grid) { return ClockTime{t * grid.slot_minutes}.label(); }

PeriodCalendar::PeriodCalendar(std::vector<SlotRange> peak_intervals, int slot_count)
    : intervals_(std::move(peak_intervals)),
      mask_(static_cast<std::size_t>(std::max(slot_count, 0)), 0.0),
      normal_(static_cast<std::size_t>(std::max(slot_count, 0)), 1.0) {
  if (slot_count <= 0) throw ValidationError("calendar needs a positive slot count");
  std::sort(intervals_.begin(), intervals_.end(),
            [](const SlotRange& a, const SlotRange& b) { return a.first < b.first; });
  std::vector<std::string> problems;
  for (const auto& r : intervals_) {
    if (r.first < 1 || r.last > slot_count || r.first > r.last) {
      problems.push_back("peak interval " + std::to_string(r.first) + "-" + std::to_string(r.last) +
                         " outside 1.." + std::to_string(slot_count));
      continue;
    }
    for (Slot t = r.first; t <= r.last; ++t) {
      auto& m = mask_[static_cast<std::size_t>(t - 1)];
      if (m != 0.0) {
        problems.push_back("peak interval " + std::to_string(r.first) + "-" + std::to_string(r.last) +
                           " overlaps another interval");
        break;
      }
      m = 1.0;
      normal_[static_cast<std::size_t>(t - 1)] = 0.0;
    }
  }
  if (!problems.empty()) throw ValidationError(problems);
}

PeriodCalendar PeriodCalendar::standard(const TimeGrid& grid) {
  return from_clock_ranges("07:00-11:00,18:00-22:00", grid);
}

PeriodCalendar PeriodCalendar::from_clock_ranges(std::string_view ranges, const TimeGrid& grid) {
  std::vector<SlotRange> intervals;
  ranges = trim(ranges);
  while (!ranges.empty()) {
    const auto comma = ranges.find(',');
    const auto item = trim(ranges.substr(0, comma));
    ranges = comma == std::string_view::npos ? std::string_view{} : ranges.substr(comma + 1);
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string_view::npos)
      throw ParseError(0, "period '" + std::string(item) + "' is not hh:mm-hh:mm");
    const auto from = ClockTime::parse(item.substr(0, dash));
    const auto to = ClockTime::parse(item.substr(dash + 1));
    if (to.minutes <= from.minutes)
      throw ValidationError("period '" + std::string(item) + "' ends before it starts");
    intervals.push_back({slot_starting_at(from, grid), slot_ending_at(to, grid)});
  }
  return PeriodCalendar(std::move(intervals), grid.slot_count);
}

int PeriodCalendar::peak_slot_count() const {
  int n = 0;
  for (const auto& r : intervals_) n += r.size();
  return n;
}

std::string PeriodCalendar::clock_ranges(const TimeGrid& grid) const {
  std::string out;
  for (const auto& r : intervals_) {
    if (!out.empty()) out += ',';
    out += ClockTime{(r.first - 1) * grid.slot_minutes}.label() + "-" +
           ClockTime{r.last * grid.slot_minutes}.label();
  }
  return out;
}

std::string_view to_string(LoadClass c) {
  switch (c) {
    case LoadClass::common_nonshiftable: return "common-nonshiftable";
    case LoadClass::selective_nonshiftable: return "selective-nonshiftable";
    case LoadClass::common_shiftable: return "common-shiftable";
    case LoadClass::selective_shiftable: return "selective-shiftable";
  }
  return "unknown";
}

LoadClass parse_load_class(std::string_view text) {
  for (auto c : {LoadClass::common_nonshiftable, LoadClass::selective_nonshiftable,
                 LoadClass::common_shiftable, LoadClass::selective_shiftable})
    if (to_string(c) == text) return c;
  throw ParseError(0, "unknown load class '" + std::string(text) + "'");
}

bool is_shiftable(LoadClass c) {
  return c == LoadClass::common_shiftable || c == LoadClass::selective_shiftable;
}

bool RunSpec::window_feasible(const TimeGrid& grid) const {
  return allowed_start_min >= 1 && allowed_start_min <= allowed_start_max &&
         allowed_start_max + duration_slots - 1 <= grid.slot_count;
}

void check_appliance(const Appliance& a, const TimeGrid& grid) {
  std::vector<std::string> problems;
  const std::string who = "appliance '" + a.id + "'";
  if (a.id.empty()) problems.push_back("appliance with empty id");
  if (!(a.power_rate_watts > 0.0)) problems.push_back(who + ": power rate must be positive");
  if (a.runs.empty()) problems.push_back(who + ": needs at least one run");
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    const auto& r = a.runs[i];
    const std::string run = who + " run " + std::to_string(i);
    if (r.duration_slots < 1) problems.push_back(run + ": duration must be at least one slot");
    if (r.baseline_start < 1 || r.baseline_end() > grid.slot_count)
      problems.push_back(run + ": baseline " + std::to_string(r.baseline_start) + "-" +
                         std::to_string(r.baseline_end()) + " outside the day");
    if (!a.shiftable() &&
        (r.allowed_start_min != r.baseline_start || r.allowed_start_max != r.baseline_start))
      problems.push_back(run + ": non-shiftable run must keep its baseline window");
  }
  if (!problems.empty()) throw ValidationError(problems);
}

RunSpec full_day_run(int duration_slots, Slot baseline_start, const TimeGrid& grid) {
  return RunSpec{duration_slots, baseline_start, 1, grid.slot_count - duration_slots + 1};
}

Schedule Schedule::baseline(std::span<const Appliance> appliances) {
  Schedule s;
  for (const auto& a : appliances) {
    auto& starts = s.assignments[a.id];
    for (const auto& r : a.runs) starts.push_back(r.baseline_start);
  }
  return s;
}

std::vector<Violation> validate(std::span<const Appliance> appliances, const Schedule& schedule) {
  std::vector<Violation> out;
  for (const auto& a : appliances) {
    const auto it = schedule.assignments.find(a.id);
    const std::size_t assigned = it == schedule.assignments.end() ? 0 : it->second.size();
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      const int run = static_cast<int>(i);
      if (i >= assigned) {
        out.push_back({Violation::Kind::missing_run, a.id, run,
                       a.id + "#" + std::to_string(i) + ": no start assigned"});
        continue;
      }
      const auto& r = a.runs[i];
      const Slot s = it->second[i];
      if (s < r.allowed_start_min || s > r.allowed_start_max)
        out.push_back({Violation::Kind::window, a.id, run,
                       a.id + "#" + std::to_string(i) + ": start " + std::to_string(s) + " outside " +
                           std::to_string(r.allowed_start_min) + ".." + std::to_string(r.allowed_start_max)});
    }
    for (std::size_t i = a.runs.size(); i < assigned; ++i)
      out.push_back({Violation::Kind::extra_run, a.id, static_cast<int>(i),
                     a.id + "#" + std::to_string(i) + ": start assigned to a run that does not exist"});
  }
  for (const auto& [id, starts] : schedule.assignments) {
    const bool known = std::any_of(appliances.begin(), appliances.end(),
                                   [&](const Appliance& a) { return a.id == id; });
    if (!known) out.push_back({Violation::Kind::unknown_appliance, id, -1, id + ": not in the catalog"});
  }
  return out;
}

void add_run(LoadProfile& profile, Slot start, int duration_slots, double kw) {
  kernels::active().add_constant(profile.demand.data() + (start - 1), static_cast<std::size_t>(duration_slots),
                                 kw);
}

LoadProfile build_load_profile(std::span<const Appliance> appliances, const Schedule& schedule,
                               const TimeGrid& grid) {
  grid.check();
  const auto violations = validate(appliances, schedule);
  if (!violations.empty()) {
    std::vector<std::string> messages;
    for (const auto& v : violations) messages.push_back(v.message);
    throw ValidationError(messages);
  }
  auto profile = LoadProfile::zeros(grid);
  for (const auto& a : appliances) {
    const auto& starts = schedule.assignments.at(a.id);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      const Slot s = starts[i];
      if (s < 1 || s + a.runs[i].duration_slots - 1 > grid.slot_count)
        throw ValidationError(a.id + "#" + std::to_string(i) + ": run starting at " + std::to_string(s) +
                              " leaves the day");
      add_run(profile, s, a.runs[i].duration_slots, a.power_kw());
    }
  }
  return profile;
}

double total_energy_kwh(const LoadProfile& profile, const TimeGrid& grid) {
  return kernels::sum(profile.demand) * grid.slot_hours();
}

PeakLoad peak_load(const LoadProfile& profile) {
  if (profile.demand.empty()) return {};
  const auto k = kernels::argmax(profile.demand);
  return {profile.demand[k], static_cast<Slot>(k + 1)};
}

PeriodEnergy period_energy(const LoadProfile& profile, const PeriodCalendar& calendar, const TimeGrid& grid) {
  if (static_cast<int>(profile.demand.size()) != calendar.slot_count())
    throw DomainError("profile length does not match the calendar");
  const double h = grid.slot_hours();
  return {kernels::dot(profile.demand, calendar.peak_mask()) * h,
          kernels::dot(profile.demand, calendar.normal_mask()) * h};
}

}  // namespace loadsched
