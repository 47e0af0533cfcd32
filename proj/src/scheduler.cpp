#include "loadsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "loadsched/errors.hpp"
#include "loadsched/kernels.hpp"

namespace loadsched {
namespace {

struct RunRef {
  std::size_t appliance;
  std::size_t run;
  double kw;
  int duration;
  Slot lo;
  Slot hi;
  bool movable;
};

struct Score {
  double primary;  // cost, or the extension factor
  double cost;
};

bool less_than(double a, double b) { return a < b - 1e-12 * std::max(1.0, std::abs(b)); }

std::string run_label(const Appliance& a, std::size_t i) { return a.id + "#" + std::to_string(i); }

class Engine {
 public:
  explicit Engine(const Problem& problem) : p_(problem) {
    p_.grid.check();
    if (p_.max_sweeps < 1) throw ValidationError("max_sweeps must be at least 1");
    for (std::size_t ai = 0; ai < p_.appliances.size(); ++ai) {
      const auto& a = p_.appliances[ai];
      check_appliance(a, p_.grid);
      for (std::size_t ri = 0; ri < a.runs.size(); ++ri) {
        const auto& r = a.runs[ri];
        if (!r.window_feasible(p_.grid))
          throw InfeasibleError(run_label(a, ri), "run " + run_label(a, ri) + " has no feasible start: window " +
                                                      std::to_string(r.allowed_start_min) + ".." +
                                                      std::to_string(r.allowed_start_max) + " with duration " +
                                                      std::to_string(r.duration_slots) + " in a " +
                                                      std::to_string(p_.grid.slot_count) + "-slot day");
        if (r.baseline_start < r.allowed_start_min || r.baseline_start > r.allowed_start_max)
          throw ValidationError("run " + run_label(a, ri) + ": baseline start outside its allowed window");
        runs_.push_back({ai, ri, a.power_kw(), r.duration_slots, r.allowed_start_min, r.allowed_start_max,
                         a.shiftable() && r.allowed_start_min < r.allowed_start_max});
      }
    }
  }

  const std::vector<RunRef>& runs() const { return runs_; }

  std::vector<Slot> baseline_starts() const {
    std::vector<Slot> s;
    for (const auto& r : runs_) s.push_back(p_.appliances[r.appliance].runs[r.run].baseline_start);
    return s;
  }

  /// Profile of every run except the skipped ones (runs_.size() skips none).
  LoadProfile profile_without(const std::vector<Slot>& starts, std::size_t skip,
                              std::size_t skip2 = std::size_t(-1)) const {
    auto profile = LoadProfile::zeros(p_.grid);
    for (std::size_t i = 0; i < runs_.size(); ++i)
      if (i != skip && i != skip2) add_run(profile, starts[i], runs_[i].duration, runs_[i].kw);
    return profile;
  }

  Score score(const LoadProfile& profile) const {
    if (const auto* c = std::get_if<AclpsConfig>(&p_.tariff)) {
      const auto trace = run_pib(*c, profile, p_.grid);
      const double cost = aclps_total(*c, trace.levels, profile, p_.grid);
      if (p_.objective == Objective::total_cost) return {cost, cost};
      return {extended_consumption(profile, trace.levels, c->ca_plus, p_.grid).factor, cost};
    }
    const double cost = bill_total(p_.tariff, profile, p_.grid);
    return {p_.objective == Objective::total_cost ? cost : 1.0, cost};
  }

  bool better(const Score& a, const Score& b) const {
    if (p_.objective == Objective::total_cost) return less_than(a.cost, b.cost);
    if (less_than(a.primary, b.primary)) return true;
    if (less_than(b.primary, a.primary)) return false;
    return less_than(a.cost, b.cost);
  }

  /// Scores every start in [lo, hi] for run `i` over `base`; index s-lo.
  std::vector<Score> scan(const LoadProfile& base, std::size_t i) const {
    const auto& r = runs_[i];
    const std::size_t n = static_cast<std::size_t>(r.hi - r.lo + 1);
    std::vector<Score> out(n);
    auto work = [&](std::size_t from, std::size_t to) {
      LoadProfile candidate;
      for (std::size_t k = from; k < to; ++k) {
        candidate = base;
        add_run(candidate, r.lo + static_cast<Slot>(k), r.duration, r.kw);
        out[k] = score(candidate);
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(p_.threads, 1, n);
    if (workers == 1) {
      work(0, n);
      return out;
    }
    {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t from = w * chunk;
        const std::size_t to = std::min(n, from + chunk);
        if (from < to) pool.emplace_back(work, from, to);
      }
    }
    return out;
  }

  Schedule to_schedule(const std::vector<Slot>& starts) const {
    Schedule s;
    for (const auto& a : p_.appliances) s.assignments[a.id].resize(a.runs.size());
    for (std::size_t i = 0; i < runs_.size(); ++i)
      s.assignments[p_.appliances[runs_[i].appliance].id][runs_[i].run] = starts[i];
    return s;
  }

 private:
  const Problem& p_;
  std::vector<RunRef> runs_;
};

// Joint moves of two runs; accepts the first strictly improving pair in
// catalog order, at its best (lexicographically earliest) placement.
bool pair_pass(const Engine& engine, std::uint64_t budget, std::vector<Slot>& starts, Score& current) {
  const auto& runs = engine.runs();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].movable) continue;
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      if (!runs[j].movable) continue;
      const auto wi = static_cast<std::uint64_t>(runs[i].hi - runs[i].lo + 1);
      const auto wj = static_cast<std::uint64_t>(runs[j].hi - runs[j].lo + 1);
      if (wi * wj > budget) continue;
      const auto base = engine.profile_without(starts, i, j);
      std::optional<Score> best;
      Slot best_i = starts[i], best_j = starts[j];
      LoadProfile candidate;
      for (Slot si = runs[i].lo; si <= runs[i].hi; ++si) {
        for (Slot sj = runs[j].lo; sj <= runs[j].hi; ++sj) {
          candidate = base;
          add_run(candidate, si, runs[i].duration, runs[i].kw);
          add_run(candidate, sj, runs[j].duration, runs[j].kw);
          const Score s = engine.score(candidate);
          if (!best || engine.better(s, *best)) {
            best = s;
            best_i = si;
            best_j = sj;
          }
        }
      }
      if ((best_i != starts[i] || best_j != starts[j]) && engine.better(*best, current)) {
        starts[i] = best_i;
        starts[j] = best_j;
        current = *best;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(Objective objective) {
  return objective == Objective::total_cost ? "total-cost" : "extended-consumption";
}

Objective parse_objective(std::string_view text) {
  if (text == "total-cost") return Objective::total_cost;
  if (text == "extended-consumption") return Objective::extended_consumption;
  throw ParseError(0, "unknown objective '" + std::string(text) + "'");
}

Extension extended_consumption(const LoadProfile& profile, std::span<const double> levels, double ca_kw,
                               const TimeGrid& grid) {
  if (levels.size() != profile.demand.size() || static_cast<int>(levels.size()) != grid.slot_count)
    throw DomainError("level trace must cover every slot");
  std::vector<double> allowance(levels.size());
  kernels::active().scale(levels.data(), 1.0, allowance.data(), allowance.size());
  kernels::active().add_constant(allowance.data(), allowance.size(), ca_kw);
  const auto sums = kernels::active().excess(profile.demand.data(), allowance.data(), allowance.size());
  const double h = grid.slot_hours();
  Extension out{sums.within * h, sums.over * h, 1.0};
  if (out.extended_kwh > 0.0) {
    if (!(out.desired_kwh > 0.0)) throw DivisionError("extension factor undefined: no desired consumption");
    out.factor = 1.0 + out.extended_kwh / out.desired_kwh;
  }
  return out;
}

ScheduleReport evaluate(const Problem& problem, const Schedule& schedule) {
  const auto profile = build_load_profile(problem.appliances, schedule, problem.grid);
  const auto bill = daily_bill(problem.tariff, profile, problem.grid);
  ScheduleReport r;
  r.total_cost = bill.total;
  r.total_energy = total_energy_kwh(profile, problem.grid);
  r.peak = peak_load(profile);
  r.period_energy = period_energy(profile, calendar_of(problem.tariff, problem.grid), problem.grid);
  r.actual_cost = bill.total;
  r.desired_cost = bill.total;
  if (bill.pib) {
    const auto& cfg = std::get<AclpsConfig>(problem.tariff);
    const auto ext = extended_consumption(profile, bill.pib->levels, cfg.ca_plus, problem.grid);
    r.extended_energy = ext.extended_kwh;
    r.extension_factor = ext.factor;
    r.desired_cost = bill.total / ext.factor;
    r.pib_events = static_cast<int>(bill.pib->events.size());
  }
  return r;
}

namespace {

struct Descent {
  std::vector<Slot> starts;
  Score value;
  int sweeps = 0;
  std::vector<double> trajectory;
};

Descent descend(const Engine& engine, const Problem& problem, std::vector<Slot> starts) {
  const auto& runs = engine.runs();
  Descent d;
  Score current = engine.score(engine.profile_without(starts, runs.size()));
  d.trajectory.push_back(current.primary);
  for (int sweep = 1; sweep <= problem.max_sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!runs[i].movable) continue;
      const auto scores = engine.scan(engine.profile_without(starts, i), i);
      std::size_t best = 0;
      for (std::size_t k = 1; k < scores.size(); ++k)
        if (engine.better(scores[k], scores[best])) best = k;
      const Slot best_start = runs[i].lo + static_cast<Slot>(best);
      if (best_start != starts[i] && engine.better(scores[best], current)) {
        starts[i] = best_start;
        current = scores[best];
        changed = true;
      }
    }
    if (!changed) changed = pair_pass(engine, problem.pair_budget, starts, current);
    d.sweeps = sweep;
    d.trajectory.push_back(current.primary);
    if (!changed) break;
  }
  d.starts = std::move(starts);
  d.value = current;
  return d;
}

}  // namespace

Solution optimize(const Problem& problem) {
  const Engine engine(problem);
  const auto& runs = engine.runs();
  auto best = descend(engine, problem, engine.baseline_starts());
  for (int mode = 0; mode < 2; ++mode) {
    auto starts = engine.baseline_starts();
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (runs[i].movable) starts[i] = mode == 0 ? runs[i].lo : runs[i].hi;
    auto d = descend(engine, problem, std::move(starts));
    if (engine.better(d.value, best.value)) best = std::move(d);
  }
  Solution sol;
  sol.sweeps = best.sweeps;
  sol.trajectory = std::move(best.trajectory);
  sol.schedule = engine.to_schedule(best.starts);
  sol.report = evaluate(problem, sol.schedule);
  return sol;
}

Solution brute_force(const Problem& problem, std::uint64_t size_guard) {
  const Engine engine(problem);
  const auto& runs = engine.runs();
  auto starts = engine.baseline_starts();

  std::vector<std::size_t> movable;
  std::uint64_t combos = 1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].movable) continue;
    movable.push_back(i);
    const auto width = static_cast<std::uint64_t>(runs[i].hi - runs[i].lo + 1);
    if (combos > size_guard / width)
      throw SizeError("enumeration exceeds the size guard of " + std::to_string(size_guard));
    combos *= width;
  }

  auto fixed = LoadProfile::zeros(problem.grid);
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (!runs[i].movable) add_run(fixed, starts[i], runs[i].duration, runs[i].kw);
  for (auto i : movable) starts[i] = runs[i].lo;

  std::vector<Slot> best_starts = starts;
  std::optional<Score> best;
  LoadProfile candidate;
  while (true) {
    candidate = fixed;
    for (auto i : movable) add_run(candidate, starts[i], runs[i].duration, runs[i].kw);
    const Score s = engine.score(candidate);
    if (!best || engine.better(s, *best)) {
      best = s;
      best_starts = starts;
    }
    // odometer: last movable run varies fastest
    std::size_t d = movable.size();
    while (d > 0) {
      const auto i = movable[d - 1];
      if (starts[i] < runs[i].hi) {
        ++starts[i];
        break;
      }
      starts[i] = runs[i].lo;
      --d;
    }
    if (d == 0) break;
  }

  Solution sol;
  sol.schedule = engine.to_schedule(best_starts);
  sol.report = evaluate(problem, sol.schedule);
  sol.trajectory.push_back(best->primary);
  return sol;
}

Reduction compare(const ScheduleReport& baseline, const ScheduleReport& optimized) {
  if (!(baseline.total_cost > 0.0)) throw DivisionError("baseline cost is zero");
  if (!(baseline.peak.kw > 0.0)) throw DivisionError("baseline peak is zero");
  return {100.0 * (1.0 - optimized.total_cost / baseline.total_cost),
          100.0 * (1.0 - optimized.peak.kw / baseline.peak.kw)};
}

}  // namespace loadsched
