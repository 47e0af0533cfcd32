#pragma once

// Cost-minimizing placement of appliance runs: coordinate descent over run
// start slots, an exhaustive oracle, and the report metrics.

#include <cstdint>
#include <span>
#include <vector>

#include "loadsched/tariff.hpp"
#include "loadsched/timegrid.hpp"

namespace loadsched {

enum class Objective { total_cost, extended_consumption };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

struct Problem {
  std::vector<Appliance> appliances;
  Tariff tariff = ToUTariff(1.0, 1.0, PeriodCalendar::standard());
  TimeGrid grid{};
  Objective objective = Objective::total_cost;
  int max_sweeps = 100;
  /// Pairs of runs whose joint start space has at most this many points are
  /// also moved together once single-run moves stall; 0 disables.
  std::uint64_t pair_budget = 4096;
  /// Workers used to score the candidate starts of one run; results do not
  /// depend on this.
  unsigned threads = 1;
};

struct ScheduleReport {
  double total_cost = 0.0;
  double total_energy = 0.0;  // kWh
  PeakLoad peak{};
  PeriodEnergy period_energy{};
  double desired_cost = 0.0;
  double actual_cost = 0.0;
  double extended_energy = 0.0;  // kWh above the allowance
  double extension_factor = 1.0;
  int pib_events = 0;
};

struct Extension {
  double desired_kwh = 0.0;
  double extended_kwh = 0.0;
  double factor = 1.0;
};

/// Splits demand against the allowance level + ca per slot. Throws
/// DivisionError when all energy is extended.
Extension extended_consumption(const LoadProfile& profile, std::span<const double> levels, double ca_kw,
                               const TimeGrid& grid = {});

/// Throws ValidationError for an invalid schedule.
ScheduleReport evaluate(const Problem& problem, const Schedule& schedule);

struct Solution {
  Schedule schedule;
  ScheduleReport report;
  int sweeps = 0;
  /// Objective of the winning descent at its starting point, then after each
  /// sweep.
  std::vector<double> trajectory;
};

/// Coordinate descent. Each sweep moves every shiftable run in catalog order
/// to its best start with the others held fixed; when a sweep changes
/// nothing, small run pairs are moved jointly before stopping. Descents start
/// from the baseline, from every window start and from every window end; the
/// best result wins, earlier descents on ties. Throws InfeasibleError naming
/// the first run without a feasible start.
Solution optimize(const Problem& problem);

/// Exact minimizer by enumeration of shiftable run starts; ties go to the
/// lexicographically smallest start vector. Throws SizeError above the guard.
Solution brute_force(const Problem& problem, std::uint64_t size_guard = 10'000'000);

struct Reduction {
  double cost_pct = 0.0;
  double peak_pct = 0.0;
};

/// 100*(1 - optimized/baseline) for cost and peak kW. Throws DivisionError
/// when a baseline figure is zero.
Reduction compare(const ScheduleReport& baseline, const ScheduleReport& optimized);

}  // namespace loadsched
