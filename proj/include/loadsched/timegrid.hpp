#pragma once

// Slotted day, appliance catalog model, schedules and load aggregation.
//
// Slots are 1-based. Slot t covers ((t-1)*slot_minutes, t*slot_minutes]
// minutes after midnight and is labelled by its end time, so with the
// default 5-minute grid slot 60 ends at 05:00 and slot 288 at 24:00.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace loadsched {

using Slot = int;

struct TimeGrid {
  int slot_count = 288;
  int slot_minutes = 5;

  /// Grid with the given slot length; it must divide the day evenly.
  static TimeGrid with_slot_minutes(int slot_minutes);

  double slot_hours() const { return slot_minutes / 60.0; }
  bool contains(Slot t) const { return t >= 1 && t <= slot_count; }
  void check() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Minutes after midnight, 0..1440.
struct ClockTime {
  int minutes = 0;

  /// Parses "hh:mm"; "24:00" is accepted.
  static ClockTime parse(std::string_view text);
  std::string label() const;

  friend bool operator==(const ClockTime&, const ClockTime&) = default;
};

/// Slot whose interval ends exactly at `clock` (24:00 -> slot_count).
Slot slot_ending_at(ClockTime clock, const TimeGrid& grid);
/// First slot whose interval begins at `clock` (00:00 -> 1).
Slot slot_starting_at(ClockTime clock, const TimeGrid& grid);
/// "hh:mm" end-of-slot label.
std::string slot_label(Slot t, const TimeGrid& grid);

struct SlotRange {
  Slot first = 1;
  Slot last = 1;

  int size() const { return last - first + 1; }
  friend bool operator==(const SlotRange&, const SlotRange&) = default;
};

/// Partition of the day into peak intervals and normal slots.
class PeriodCalendar {
 public:
  /// Throws ValidationError on overlapping or out-of-range intervals.
  PeriodCalendar(std::vector<SlotRange> peak_intervals, int slot_count);

  /// Peak 07:00-11:00 and 18:00-22:00, i.e. slots 85-132 and 217-264 on the
  /// default grid.
  static PeriodCalendar standard(const TimeGrid& grid = {});
  /// Builds from clock ranges such as "07:00-11:00,18:00-22:00".
  static PeriodCalendar from_clock_ranges(std::string_view ranges, const TimeGrid& grid = {});

  bool is_peak(Slot t) const { return mask_.at(static_cast<std::size_t>(t - 1)) != 0.0; }
  const std::vector<SlotRange>& peak_intervals() const { return intervals_; }
  int slot_count() const { return static_cast<int>(mask_.size()); }
  int peak_slot_count() const;
  /// 1.0 for peak slots, 0.0 otherwise; index t-1.
  std::span<const double> peak_mask() const { return mask_; }
  std::span<const double> normal_mask() const { return normal_; }
  /// Same notation accepted by from_clock_ranges.
  std::string clock_ranges(const TimeGrid& grid = {}) const;

  friend bool operator==(const PeriodCalendar& a, const PeriodCalendar& b) {
    return a.intervals_ == b.intervals_ && a.mask_.size() == b.mask_.size();
  }

 private:
  std::vector<SlotRange> intervals_;
  std::vector<double> mask_;
  std::vector<double> normal_;
};

enum class LoadClass {
  common_nonshiftable,
  selective_nonshiftable,
  common_shiftable,
  selective_shiftable,
};

std::string_view to_string(LoadClass c);
LoadClass parse_load_class(std::string_view text);
bool is_shiftable(LoadClass c);

struct RunSpec {
  int duration_slots = 1;
  Slot baseline_start = 1;
  Slot allowed_start_min = 1;
  Slot allowed_start_max = 1;

  Slot baseline_end() const { return baseline_start + duration_slots - 1; }
  /// Nonempty start range that keeps the whole run inside the day.
  bool window_feasible(const TimeGrid& grid) const;

  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct Appliance {
  std::string id;
  std::string name;
  double power_rate_watts = 0.0;
  LoadClass load_class = LoadClass::common_nonshiftable;
  std::vector<RunSpec> runs;

  double power_kw() const { return power_rate_watts / 1000.0; }
  bool shiftable() const { return is_shiftable(load_class); }

  friend bool operator==(const Appliance&, const Appliance&) = default;
};

/// Structural checks: positive power, at least one run, baseline runs inside
/// the day, non-shiftable windows pinned to the baseline. Throws
/// ValidationError naming the appliance. Window feasibility of shiftable runs
/// is left to the scheduler.
void check_appliance(const Appliance& appliance, const TimeGrid& grid = {});

/// Allowed window spanning the whole day for a run of `duration_slots`.
RunSpec full_day_run(int duration_slots, Slot baseline_start, const TimeGrid& grid = {});

struct Schedule {
  /// appliance id -> one start slot per run, matched by position.
  std::map<std::string, std::vector<Slot>> assignments;

  static Schedule baseline(std::span<const Appliance> appliances);

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct Violation {
  enum class Kind { window, missing_run, extra_run, unknown_appliance };
  Kind kind;
  std::string appliance_id;
  int run_index = -1;
  std::string message;
};

std::vector<Violation> validate(std::span<const Appliance> appliances, const Schedule& schedule);

struct LoadProfile {
  std::vector<double> demand;  // kW, index t-1

  static LoadProfile zeros(const TimeGrid& grid = {}) {
    return LoadProfile{std::vector<double>(static_cast<std::size_t>(grid.slot_count), 0.0)};
  }
  double at(Slot t) const { return demand.at(static_cast<std::size_t>(t - 1)); }

  friend bool operator==(const LoadProfile&, const LoadProfile&) = default;
};

/// Adds `kw` to slots start..start+duration-1.
void add_run(LoadProfile& profile, Slot start, int duration_slots, double kw);

/// Throws ValidationError when the schedule is invalid or leaves the day.
LoadProfile build_load_profile(std::span<const Appliance> appliances, const Schedule& schedule,
                               const TimeGrid& grid = {});

double total_energy_kwh(const LoadProfile& profile, const TimeGrid& grid = {});

struct PeakLoad {
  double kw = 0.0;
  Slot slot = 1;
};

/// Maximum demand and the earliest slot attaining it.
PeakLoad peak_load(const LoadProfile& profile);

struct PeriodEnergy {
  double peak_kwh = 0.0;
  double normal_kwh = 0.0;
};

PeriodEnergy period_energy(const LoadProfile& profile, const PeriodCalendar& calendar,
                           const TimeGrid& grid = {});

}  // namespace loadsched
