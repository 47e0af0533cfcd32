#include "loadsched/tariff.hpp"

#include <cmath>
#include <cstdio>

#include "loadsched/errors.hpp"
#include "loadsched/kernels.hpp"

namespace loadsched {
namespace {

// Tolerance for ladder membership and band edges; kW values on the ladder are
// sums of decimal steps and never exact in binary.
constexpr double kLevelEps = 1e-9;
constexpr double kBandEps = 1e-12;

void require_energy(double energy_kwh) {
  if (!(energy_kwh >= 0.0)) throw DomainError("energy must be non-negative");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> slot_energy(const LoadProfile& profile, const TimeGrid& grid) {
  std::vector<double> e(profile.demand.size());
  kernels::active().scale(profile.demand.data(), grid.slot_hours(), e.data(), e.size());
  return e;
}

void require_length(const LoadProfile& profile, int slot_count) {
  if (static_cast<int>(profile.demand.size()) != slot_count)
    throw DomainError("profile has " + std::to_string(profile.demand.size()) + " slots, tariff expects " +
                      std::to_string(slot_count));
}

}  // namespace

void QuadraticParams::check() const {
  if (!(a > 0.0) || !(b >= 0.0) || !(c >= 0.0))
    throw ValidationError("quadratic tariff needs a > 0, b >= 0, c >= 0");
}

double quad_slot_cost(const QuadraticParams& p, double energy_kwh) {
  require_energy(energy_kwh);
  return (p.a * energy_kwh + p.b) * energy_kwh + p.c;
}

QuadraticTariff::QuadraticTariff(QuadraticParams constant, int slot_count)
    : QuadraticTariff(std::vector<QuadraticParams>(static_cast<std::size_t>(slot_count), constant)) {}

QuadraticTariff::QuadraticTariff(std::vector<QuadraticParams> per_slot) : params_(std::move(per_slot)) {
  if (params_.empty()) throw ValidationError("quadratic tariff needs at least one slot");
  for (const auto& p : params_) {
    p.check();
    a_.push_back(p.a);
    b_.push_back(p.b);
    c_.push_back(p.c);
  }
}

bool QuadraticTariff::day_constant() const {
  for (const auto& p : params_)
    if (!(p == params_.front())) return false;
  return true;
}

ToUTariff::ToUTariff(double normal_rate, double peak_rate, PeriodCalendar calendar)
    : normal_rate_(normal_rate), peak_rate_(peak_rate), calendar_(std::move(calendar)) {
  if (!(normal_rate_ > 0.0) || !(peak_rate_ > 0.0)) throw ValidationError("ToU rates must be positive");
  if (peak_rate_ < normal_rate_) throw ValidationError("ToU peak rate must not be below the normal rate");
  rates_.resize(static_cast<std::size_t>(calendar_.slot_count()));
  for (Slot t = 1; t <= calendar_.slot_count(); ++t) rates_[static_cast<std::size_t>(t - 1)] = rate(t);
}

double tou_slot_cost(const ToUTariff& tariff, Slot t, double energy_kwh) {
  require_energy(energy_kwh);
  if (t < 1 || t > tariff.calendar().slot_count()) throw DomainError("slot " + std::to_string(t) + " out of range");
  return tariff.rate(t) * energy_kwh;
}

void StepTariff::check() const {
  if (!(threshold > 0.0)) throw ValidationError("step tariff threshold must be positive");
  if (!(low_rate > 0.0) || high_rate < low_rate)
    throw ValidationError("step tariff needs high_rate >= low_rate > 0");
}

double step_slot_cost(const StepTariff& t, double energy_kwh) {
  require_energy(energy_kwh);
  if (energy_kwh <= t.threshold) return t.low_rate * energy_kwh;
  return t.low_rate * t.threshold + t.high_rate * (energy_kwh - t.threshold);
}

void LevelLadder::check() const {
  if (!(base > 0.0) || !(step > 0.0) || max_level < base)
    throw ValidationError("level ladder needs base > 0, step > 0, max_level >= base");
}

int LevelLadder::top_index() const {
  return static_cast<int>(std::floor((max_level - base) / step + kLevelEps));
}

int LevelLadder::snap_index(double consumption_kw) const {
  if (!(consumption_kw > base)) return 0;
  const int k = static_cast<int>(std::floor((consumption_kw - base) / step + kLevelEps));
  return std::min(k, top_index());
}

std::optional<int> LevelLadder::index_of(double level_kw) const {
  const double k = std::round((level_kw - base) / step);
  if (k < 0 || k > top_index()) return std::nullopt;
  const int ki = static_cast<int>(k);
  if (std::abs(level(ki) - level_kw) > kLevelEps) return std::nullopt;
  return ki;
}

double snap_level(const LevelLadder& ladder, double consumption_kw) {
  return ladder.level(ladder.snap_index(consumption_kw));
}

void AclpsConfig::check() const {
  ladder.check();
  if (!(r1 > 0.0) || !(r2 >= 0.0) || !(r3 >= 0.0))
    throw ValidationError("ACLPS needs r1 > 0, r2 >= 0, r3 >= 0");
  if (!(ca_plus > 0.0) || !(ca_minus >= 0.0)) throw ValidationError("ACLPS needs ca_plus > 0, ca_minus >= 0");
  if (initial_level && !(*initial_level >= 0.0)) throw ValidationError("initial level must be non-negative");
}

double aclps_slot_cost(const AclpsConfig& config, double level_kw, double energy_kwh) {
  require_energy(energy_kwh);
  if (!config.ladder.index_of(level_kw)) throw DomainError("level " + fmt(level_kw) + " kW is not on the ladder");
  return ((config.r1 * level_kw) * energy_kwh + config.r2 * level_kw) * energy_kwh + config.r3 * level_kw;
}

std::string_view to_string(PibEventKind kind) {
  return kind == PibEventKind::rate_up ? "rate-up" : "rate-down-incentive";
}

PibState::PibState(const AclpsConfig& config, double initial_level_kw) {
  set_index(config, config.ladder.snap_index(initial_level_kw));
}

void PibState::set_index(const AclpsConfig& config, int index) {
  index_ = index;
  level_ = config.ladder.level(index);
  price_ = {config.r1 * level_, config.r2 * level_, config.r3 * level_};
}

std::optional<PibEvent> PibState::advance(const AclpsConfig& config, Slot t, double consumption_kw) {
  if (t <= last_slot_)
    throw SequencingError("hysteresis stepped with slot " + std::to_string(t) + " after slot " +
                          std::to_string(last_slot_));
  last_slot_ = t;
  const bool holds = config.calendar.is_peak(t)
                         ? consumption_kw <= level_ - config.ca_minus + kBandEps
                         : std::abs(consumption_kw - level_) <= config.ca_plus + kBandEps;
  if (holds) return std::nullopt;
  const int next = config.ladder.snap_index(consumption_kw);
  if (next == index_) return std::nullopt;
  PibEvent ev{t, next < index_ ? PibEventKind::rate_down_incentive : PibEventKind::rate_up, level_,
              config.ladder.level(next)};
  set_index(config, next);
  events_.push_back(ev);
  return ev;
}

PibStepResult pib_step(PibState state, const AclpsConfig& config, Slot t, double consumption_kw) {
  auto event = state.advance(config, t, consumption_kw);
  return {std::move(state), event};
}

std::string describe(const Tariff& tariff) {
  struct Visitor {
    std::string operator()(const QuadraticTariff& q) const {
      if (q.day_constant()) {
        const auto& p = q.at(1);
        return "quadratic a=" + fmt(p.a) + " b=" + fmt(p.b) + " c=" + fmt(p.c);
      }
      return "quadratic (per-slot coefficients)";
    }
    std::string operator()(const StepTariff& s) const {
      return "step threshold=" + fmt(s.threshold) + " low=" + fmt(s.low_rate) + " high=" + fmt(s.high_rate);
    }
    std::string operator()(const ToUTariff& t) const {
      return "tou peak=" + fmt(t.peak_rate()) + " normal=" + fmt(t.normal_rate()) + " periods=" +
             t.calendar().clock_ranges();
    }
    std::string operator()(const AclpsConfig& c) const {
      return "aclps r=(" + fmt(c.r1) + "," + fmt(c.r2) + "," + fmt(c.r3) + ") ca=" + fmt(c.ca_plus) + "/" +
             fmt(c.ca_minus) + " ladder=" + fmt(c.ladder.base) + ":" + fmt(c.ladder.step) + ":" +
             fmt(c.ladder.max_level);
    }
  };
  return std::visit(Visitor{}, tariff);
}

PeriodCalendar calendar_of(const Tariff& tariff, const TimeGrid& grid) {
  if (const auto* t = std::get_if<ToUTariff>(&tariff)) return t->calendar();
  if (const auto* c = std::get_if<AclpsConfig>(&tariff)) return c->calendar;
  return PeriodCalendar::standard(grid);
}

double resolve_initial_level(const AclpsConfig& config, const LoadProfile& profile) {
  if (config.initial_level) return snap_level(config.ladder, *config.initial_level);
  const double mean = profile.demand.empty() ? 0.0 : kernels::sum(profile.demand) / profile.demand.size();
  return snap_level(config.ladder, mean);
}

PibTrace run_pib(const AclpsConfig& config, const LoadProfile& profile, const TimeGrid& grid) {
  require_length(profile, config.calendar.slot_count());
  require_length(profile, grid.slot_count);
  PibTrace trace;
  trace.initial_level = resolve_initial_level(config, profile);
  PibState state(config, trace.initial_level);
  trace.levels.resize(profile.demand.size());
  for (Slot t = 1; t <= grid.slot_count; ++t) {
    trace.levels[static_cast<std::size_t>(t - 1)] = state.level();
    state.advance(config, t, profile.demand[static_cast<std::size_t>(t - 1)]);
  }
  trace.events = state.events();
  return trace;
}

double aclps_total(const AclpsConfig& config, std::span<const double> levels, const LoadProfile& profile,
                   const TimeGrid& grid) {
  require_length(profile, grid.slot_count);
  if (levels.size() != profile.demand.size()) throw DomainError("level trace length mismatch");
  const auto& k = kernels::active();
  const std::size_t n = levels.size();
  std::vector<double> a(n), b(n), c(n);
  k.scale(levels.data(), config.r1, a.data(), n);
  k.scale(levels.data(), config.r2, b.data(), n);
  k.scale(levels.data(), config.r3, c.data(), n);
  const auto e = slot_energy(profile, grid);
  return k.quadratic(e.data(), a.data(), b.data(), c.data(), n);
}

double bill_total(const Tariff& tariff, const LoadProfile& profile, const TimeGrid& grid) {
  require_length(profile, grid.slot_count);
  const auto& k = kernels::active();
  const std::size_t n = profile.demand.size();
  struct Visitor {
    const LoadProfile& profile;
    const TimeGrid& grid;
    const kernels::KernelTable& k;
    std::size_t n;

    double operator()(const QuadraticTariff& q) const {
      require_length(profile, q.slot_count());
      const auto e = slot_energy(profile, grid);
      return k.quadratic(e.data(), q.a().data(), q.b().data(), q.c().data(), n);
    }
    double operator()(const StepTariff& s) const {
      const auto e = slot_energy(profile, grid);
      return k.step(e.data(), n, s.threshold, s.low_rate, s.high_rate);
    }
    double operator()(const ToUTariff& t) const {
      require_length(profile, t.calendar().slot_count());
      const auto e = slot_energy(profile, grid);
      return k.dot(e.data(), t.rates().data(), n);
    }
    double operator()(const AclpsConfig& c) const {
      const auto trace = run_pib(c, profile, grid);
      return aclps_total(c, trace.levels, profile, grid);
    }
  };
  return std::visit(Visitor{profile, grid, k, n}, tariff);
}

Bill daily_bill(const Tariff& tariff, const LoadProfile& profile, const TimeGrid& grid) {
  Bill bill;
  bill.total = bill_total(tariff, profile, grid);
  const double h = grid.slot_hours();
  bill.slot_costs.resize(profile.demand.size());
  std::optional<PibTrace> trace;
  if (const auto* c = std::get_if<AclpsConfig>(&tariff)) trace = run_pib(*c, profile, grid);
  for (Slot t = 1; t <= grid.slot_count; ++t) {
    const std::size_t i = static_cast<std::size_t>(t - 1);
    const double e = profile.demand[i] * h;
    bill.slot_costs[i] = std::visit(
        [&](const auto& tf) -> double {
          using T = std::decay_t<decltype(tf)>;
          if constexpr (std::is_same_v<T, QuadraticTariff>) return quad_slot_cost(tf.at(t), e);
          else if constexpr (std::is_same_v<T, StepTariff>) return step_slot_cost(tf, e);
          else if constexpr (std::is_same_v<T, ToUTariff>) return tou_slot_cost(tf, t, e);
          else return aclps_slot_cost(tf, trace->levels[i], e);
        },
        tariff);
  }
  bill.pib = std::move(trace);
  return bill;
}

AclpsConfig calibrate_revenue(const AclpsConfig& config, const LoadProfile& baseline, double target,
                              const TimeGrid& grid) {
  if (!(target > 0.0)) throw CalibrationError("revenue target must be positive");
  const double current = bill_total(config, baseline, grid);
  if (!(current > 0.0)) throw CalibrationError("baseline bill is zero; nothing to scale");
  const double kappa = target / current;
  AclpsConfig out = config;
  out.r1 *= kappa;
  out.r2 *= kappa;
  out.r3 *= kappa;
  return out;
}

}  // namespace loadsched
