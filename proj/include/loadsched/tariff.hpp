#pragma once

// Slot cost functions, the consumption-level ladder with its hysteresis
// state machine, daily billing and revenue calibration.
//
// All slot costs take per-slot energy in kWh (demand kW x slot hours).
// Levels, allowances and consumption used by the hysteresis are in kW.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loadsched/timegrid.hpp"

namespace loadsched {

struct QuadraticParams {
  double a = 1.0;  // cost/(kWh)^2
  double b = 0.0;  // cost/kWh
  double c = 0.0;  // cost

  void check() const;
  friend bool operator==(const QuadraticParams&, const QuadraticParams&) = default;
};

/// a*e^2 + b*e + c. Throws DomainError for negative energy.
double quad_slot_cost(const QuadraticParams& params, double energy_kwh);

/// Quadratic tariff whose coefficients are either day-constant or per slot.
class QuadraticTariff {
 public:
  explicit QuadraticTariff(QuadraticParams constant, int slot_count = 288);
  /// One entry per slot.
  explicit QuadraticTariff(std::vector<QuadraticParams> per_slot);

  const QuadraticParams& at(Slot t) const { return params_.at(static_cast<std::size_t>(t - 1)); }
  int slot_count() const { return static_cast<int>(params_.size()); }
  bool day_constant() const;
  std::span<const double> a() const { return a_; }
  std::span<const double> b() const { return b_; }
  std::span<const double> c() const { return c_; }

  friend bool operator==(const QuadraticTariff& x, const QuadraticTariff& y) { return x.params_ == y.params_; }

 private:
  std::vector<QuadraticParams> params_;
  std::vector<double> a_, b_, c_;
};

class ToUTariff {
 public:
  ToUTariff(double normal_rate, double peak_rate, PeriodCalendar calendar);

  double normal_rate() const { return normal_rate_; }
  double peak_rate() const { return peak_rate_; }
  const PeriodCalendar& calendar() const { return calendar_; }
  double rate(Slot t) const { return calendar_.is_peak(t) ? peak_rate_ : normal_rate_; }
  /// Rate for slot t at index t-1.
  std::span<const double> rates() const { return rates_; }

  friend bool operator==(const ToUTariff& x, const ToUTariff& y) {
    return x.normal_rate_ == y.normal_rate_ && x.peak_rate_ == y.peak_rate_ && x.calendar_ == y.calendar_;
  }

 private:
  double normal_rate_;
  double peak_rate_;
  PeriodCalendar calendar_;
  std::vector<double> rates_;
};

/// Throws DomainError for negative energy or a slot outside the calendar.
double tou_slot_cost(const ToUTariff& tariff, Slot t, double energy_kwh);

/// Two-step inclining block rate, applied per slot.
struct StepTariff {
  double threshold = 1.0;  // kWh per slot
  double low_rate = 1.0;
  double high_rate = 2.0;

  void check() const;
  friend bool operator==(const StepTariff&, const StepTariff&) = default;
};

double step_slot_cost(const StepTariff& tariff, double energy_kwh);

/// Consumption levels base + k*step, k = 0..top_index(), capped by max_level.
struct LevelLadder {
  double base = 0.02;
  double step = 0.07;
  double max_level = 11.0;

  void check() const;
  int top_index() const;
  double level(int k) const { return base + k * step; }
  double top_level() const { return level(top_index()); }
  /// Index of the largest level <= consumption, clamped to [0, top_index()].
  int snap_index(double consumption_kw) const;
  /// Index of `level` when it is a ladder value.
  std::optional<int> index_of(double level_kw) const;

  friend bool operator==(const LevelLadder&, const LevelLadder&) = default;
};

double snap_level(const LevelLadder& ladder, double consumption_kw);

struct AclpsConfig {
  double r1 = 1.0;  // cost/((kWh)^2 kW)
  double r2 = 0.0;  // cost/(kWh kW)
  double r3 = 0.0;  // cost/kW
  LevelLadder ladder{};
  double ca_plus = 0.07;   // kW, normal-period allowance
  double ca_minus = 0.07;  // kW, peak-period required reduction
  PeriodCalendar calendar = PeriodCalendar::standard();
  /// nullopt: snap of the mean demand of the billed (baseline) profile.
  std::optional<double> initial_level;

  void check() const;
  friend bool operator==(const AclpsConfig&, const AclpsConfig&) = default;
};

/// (r1*L)e^2 + (r2*L)e + r3*L. Throws DomainError when `level_kw` is not a
/// ladder value or the energy is negative.
double aclps_slot_cost(const AclpsConfig& config, double level_kw, double energy_kwh);

enum class PibEventKind { rate_up, rate_down_incentive };

std::string_view to_string(PibEventKind kind);

struct PibEvent {
  Slot slot = 0;
  PibEventKind kind = PibEventKind::rate_up;
  double old_level = 0.0;
  double new_level = 0.0;

  friend bool operator==(const PibEvent&, const PibEvent&) = default;
};

/// Current consumption level, its price parameters and the change history.
class PibState {
 public:
  /// Starts at snap_level(initial_level_kw).
  PibState(const AclpsConfig& config, double initial_level_kw);

  double level() const { return level_; }
  int level_index() const { return index_; }
  /// (r1*L, r2*L, r3*L)
  const QuadraticParams& price_params() const { return price_; }
  const std::vector<PibEvent>& events() const { return events_; }
  /// Last slot fed to advance(); 0 before the first step.
  Slot last_slot() const { return last_slot_; }

  /// In-place form of pib_step.
  std::optional<PibEvent> advance(const AclpsConfig& config, Slot t, double consumption_kw);

 private:
  void set_index(const AclpsConfig& config, int index);

  int index_ = 0;
  double level_ = 0.0;
  QuadraticParams price_{};
  std::vector<PibEvent> events_;
  Slot last_slot_ = 0;
};

struct PibStepResult {
  PibState state;
  std::optional<PibEvent> event;
};

/// Normal slot: the rate holds while |consumption - level| <= ca_plus.
/// Peak slot: the rate holds while consumption <= level - ca_minus.
/// Otherwise the level moves to snap_level(consumption); an event is emitted
/// when the level actually changes. Throws SequencingError unless t is after
/// the previous step.
PibStepResult pib_step(PibState state, const AclpsConfig& config, Slot t, double consumption_kw);

using Tariff = std::variant<QuadraticTariff, StepTariff, ToUTariff, AclpsConfig>;

std::string describe(const Tariff& tariff);
/// Calendar carried by the tariff, or the standard calendar for tariffs
/// without one.
PeriodCalendar calendar_of(const Tariff& tariff, const TimeGrid& grid = {});

struct PibTrace {
  double initial_level = 0.0;
  std::vector<double> levels;  // level billed in slot t at index t-1
  std::vector<PibEvent> events;
};

/// Level in force before the first slot.
double resolve_initial_level(const AclpsConfig& config, const LoadProfile& profile);

/// Runs the hysteresis over the day; slot t is billed at the level in force
/// before its own consumption is observed.
PibTrace run_pib(const AclpsConfig& config, const LoadProfile& profile, const TimeGrid& grid = {});

struct Bill {
  double total = 0.0;
  std::vector<double> slot_costs;
  std::optional<PibTrace> pib;
};

Bill daily_bill(const Tariff& tariff, const LoadProfile& profile, const TimeGrid& grid = {});
/// Same total as daily_bill without the per-slot breakdown.
double bill_total(const Tariff& tariff, const LoadProfile& profile, const TimeGrid& grid = {});
/// ACLPS total for a precomputed level trace.
double aclps_total(const AclpsConfig& config, std::span<const double> levels, const LoadProfile& profile,
                   const TimeGrid& grid = {});

/// Scales (r1, r2, r3) so the baseline bill equals `target`. Throws
/// CalibrationError when the baseline bill is zero or the target is not
/// positive.
AclpsConfig calibrate_revenue(const AclpsConfig& config, const LoadProfile& baseline, double target,
                              const TimeGrid& grid = {});

}  // namespace loadsched
