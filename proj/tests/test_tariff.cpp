#include <doctest.h>

#include <cmath>
#include <random>

#include "loadsched/errors.hpp"
#include "loadsched/tariff.hpp"
#include "support.hpp"

using namespace loadsched;

namespace {

LoadProfile constant(double kw) { return LoadProfile{std::vector<double>(288, kw)}; }

AclpsConfig aclps(double r1, double r2, double r3) {
  AclpsConfig c;
  c.r1 = r1;
  c.r2 = r2;
  c.r3 = r3;
  return c;
}

// Normal-period calendar: no peak slots.
AclpsConfig all_normal() {
  AclpsConfig c;
  c.calendar = PeriodCalendar({}, 288);
  return c;
}

bool on_ladder(const LevelLadder& ladder, double level) { return ladder.index_of(level).has_value(); }

}  // namespace

TEST_CASE("quad_slot_cost") {
  CHECK(quad_slot_cost({1, 0, 0}, 2) == 4);
  CHECK(quad_slot_cost({2, 1, 1}, 0) == 1);
  CHECK(quad_slot_cost({0.5, 1, 0}, 3) == 7.5);
  CHECK_THROWS_AS(quad_slot_cost({1, 0, 0}, -0.1), DomainError);
  CHECK_THROWS_AS(QuadraticTariff(QuadraticParams{0, 1, 0}), ValidationError);
  CHECK_THROWS_AS(QuadraticTariff(QuadraticParams{1, -1, 0}), ValidationError);
}

TEST_CASE("tou_slot_cost") {
  const ToUTariff tou(45.54, 144.52, PeriodCalendar::standard());
  CHECK(tou_slot_cost(tou, 10, 0) == 0);
  CHECK(tou_slot_cost(tou, 220, 0) == 0);
  CHECK(tou_slot_cost(tou, 10, 1.2 / 12) == doctest::Approx(4.554).epsilon(1e-12));
  CHECK(tou_slot_cost(tou, 220, 0.1) == doctest::Approx(14.452).epsilon(1e-12));
  CHECK_THROWS_AS(tou_slot_cost(tou, 10, -1), DomainError);
  CHECK_THROWS_AS(tou_slot_cost(tou, 0, 1), DomainError);
  CHECK_THROWS_AS(ToUTariff(50, 40, PeriodCalendar::standard()), ValidationError);
  CHECK_THROWS_AS(ToUTariff(0, 40, PeriodCalendar::standard()), ValidationError);
}

TEST_CASE("step_slot_cost") {
  const StepTariff s{1, 10, 20};
  CHECK(step_slot_cost(s, 0) == 0);
  CHECK(step_slot_cost(s, 1) == 10);
  CHECK(step_slot_cost(s, 1.5) == 20);
  CHECK_THROWS_AS(step_slot_cost(s, -1), DomainError);
  CHECK_THROWS_AS(StepTariff({1, 20, 10}).check(), ValidationError);
  CHECK_THROWS_AS(StepTariff({0, 10, 20}).check(), ValidationError);
}

TEST_CASE("level ladder") {
  const LevelLadder ladder;
  CHECK(ladder.top_index() == 156);
  CHECK(ladder.top_level() == doctest::Approx(10.94).epsilon(1e-12));
  CHECK(snap_level(ladder, 0.02) == doctest::Approx(0.02));
  CHECK(snap_level(ladder, 0.16) == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(snap_level(ladder, 12.0) == ladder.top_level());
  CHECK(snap_level(ladder, 0.0) == ladder.level(0));
  CHECK(snap_level(ladder, 1.2) == doctest::Approx(1.14).epsilon(1e-12));
  CHECK(ladder.index_of(1.0) == 14);
  CHECK_FALSE(ladder.index_of(1.01).has_value());
}

TEST_CASE("snap_level is idempotent and lands on the ladder") {
  const LevelLadder ladder;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 13.0);
  for (int i = 0; i < 5000; ++i) {
    const double x = d(rng);
    const double s = snap_level(ladder, x);
    CHECK(snap_level(ladder, s) == s);
    CHECK(on_ladder(ladder, s));
    if (x >= ladder.base && x <= ladder.max_level) {
      CHECK(s <= x + 1e-9);
      CHECK(x - s < ladder.step);
    }
  }
}

TEST_CASE("aclps_slot_cost") {
  CHECK(aclps_slot_cost(aclps(1, 0, 0), 1.0, 2) == doctest::Approx(4).epsilon(1e-12));
  CHECK(aclps_slot_cost(aclps(1, 1, 1), 0.02, 0) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(aclps_slot_cost(aclps(2, 0, 0), 0.44, 3) == doctest::Approx(2 * 0.44 * 9).epsilon(1e-12));
  CHECK_THROWS_AS(aclps_slot_cost(aclps(1, 0, 0), 0.0, 1), DomainError);
  CHECK_THROWS_AS(aclps_slot_cost(aclps(1, 0, 0), 0.5, 1), DomainError);
  CHECK_THROWS_AS(aclps_slot_cost(aclps(1, 0, 0), 1.0, -1), DomainError);
}

TEST_CASE("aclps_slot_cost is linear in the level") {
  const auto c = aclps(1.3, 0.4, 0.05);
  const LevelLadder ladder;
  const double unit = aclps_slot_cost(c, ladder.level(0), 0.7) / ladder.level(0);
  for (int k = 0; k <= ladder.top_index(); k += 7) {
    const double level = ladder.level(k);
    CHECK(aclps_slot_cost(c, level, 0.7) == doctest::Approx(unit * level).epsilon(1e-12));
  }
}

TEST_CASE("pib_step") {
  const auto cfg = all_normal();
  const PibState start(cfg, 1.0);
  REQUIRE(start.level() == doctest::Approx(1.0).epsilon(1e-12));

  auto r = pib_step(start, cfg, 1, 1.05);
  CHECK(r.state.level() == start.level());
  CHECK_FALSE(r.event);

  r = pib_step(start, cfg, 1, 1.20);
  CHECK(r.state.level() == doctest::Approx(1.14).epsilon(1e-12));
  REQUIRE(r.event);
  CHECK(r.event->kind == PibEventKind::rate_up);
  CHECK(r.event->slot == 1);

  r = pib_step(start, cfg, 1, 0.50);
  CHECK(r.state.level() == doctest::Approx(0.44).epsilon(1e-12));
  REQUIRE(r.event);
  CHECK(r.event->kind == PibEventKind::rate_down_incentive);

  CHECK(r.state.price_params().a == doctest::Approx(cfg.r1 * 0.44).epsilon(1e-12));
  CHECK_THROWS_AS(pib_step(r.state, cfg, 1, 0.5), SequencingError);
  CHECK_NOTHROW(pib_step(r.state, cfg, 2, 0.5));
}

TEST_CASE("pib band edges") {
  const auto cfg = all_normal();
  const PibState start(cfg, 1.0);
  const double level = start.level();
  CHECK_FALSE(pib_step(start, cfg, 1, level + 0.07).event);
  CHECK_FALSE(pib_step(start, cfg, 1, level - 0.07).event);

  AclpsConfig peak;
  peak.calendar = PeriodCalendar({{1, 288}}, 288);
  const PibState p(peak, 1.0);
  CHECK_FALSE(pib_step(p, peak, 1, p.level() - 0.07).event);
  const auto up = pib_step(p, peak, 1, 1.5);
  REQUIRE(up.event);
  CHECK(up.event->kind == PibEventKind::rate_up);
  // Inside the normal band but above the peak hold line: re-snapped, same level.
  const auto same = pib_step(p, peak, 1, 1.0);
  CHECK(same.state.level() == p.level());
  CHECK_FALSE(same.event);
}

TEST_CASE("pib hysteresis on synthesized traces") {
  const auto cfg = all_normal();
  const LevelLadder& ladder = cfg.ladder;
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int k0 = std::uniform_int_distribution<int>(5, 140)(rng);
    PibState state(cfg, ladder.level(k0));
    const double start_level = state.level();
    std::uniform_real_distribution<double> inside(-0.069, 0.069);

    // Never leaving the band: constant level, no events.
    for (Slot t = 1; t <= 288; ++t) state.advance(cfg, t, start_level + inside(rng));
    CHECK(state.events().empty());
    CHECK(state.level() == start_level);

    // Alternate band exits with in-band stretches.
    PibState moving(cfg, ladder.level(k0));
    int exits = 0;
    std::uniform_real_distribution<double> jump(0.08, 1.5);
    std::bernoulli_distribution up(0.5);
    for (Slot t = 1; t <= 288; ++t) {
      const double level = moving.level();
      double c;
      if (t % 6 == 0) {
        const bool rise = level < 1.7 || (level < 5.0 && up(rng));
        c = rise ? level + jump(rng) : level - jump(rng);
        ++exits;
      } else {
        c = level + inside(rng);
      }
      const double before = moving.level();
      const auto ev = moving.advance(cfg, t, c);
      CHECK(on_ladder(ladder, moving.level()));
      if (ev) {
        CHECK(ev->old_level == before);
        CHECK(ev->new_level == moving.level());
        CHECK((ev->kind == PibEventKind::rate_down_incentive) == (ev->new_level < ev->old_level));
      }
    }
    CHECK(static_cast<int>(moving.events().size()) == exits);
    for (std::size_t i = 1; i < moving.events().size(); ++i)
      CHECK(moving.events()[i].slot > moving.events()[i - 1].slot);
  }
}

TEST_CASE("run_pib bills each slot at the prior level") {
  auto cfg = all_normal();
  cfg.initial_level = 1.0;
  auto p = constant(1.0);
  p.demand[9] = 2.0;
  const auto trace = run_pib(cfg, p);
  CHECK(trace.initial_level == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace.levels[9] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace.levels[10] == doctest::Approx(1.98).epsilon(1e-12));
  REQUIRE(trace.events.size() == 2);
  CHECK(trace.events[0].slot == 10);
  CHECK(trace.events[1].slot == 11);
  CHECK(trace.events[1].kind == PibEventKind::rate_down_incentive);
}

TEST_CASE("initial level defaults to the snapped mean") {
  AclpsConfig cfg;
  CHECK(resolve_initial_level(cfg, constant(1.2)) == doctest::Approx(1.14).epsilon(1e-12));
  cfg.initial_level = 0.5;
  CHECK(resolve_initial_level(cfg, constant(1.2)) == doctest::Approx(0.44).epsilon(1e-12));
}

TEST_CASE("daily_bill") {
  const auto cal = PeriodCalendar::standard();
  const Tariff tou = ToUTariff(45.54, 144.52, cal);
  const auto bill = daily_bill(tou, constant(1.2));
  CHECK(bill.total == doctest::Approx(9.6 * 144.52 + 19.2 * 45.54).epsilon(1e-12));
  CHECK(bill.total == doctest::Approx(2261.76).epsilon(1e-12));
  CHECK(bill.slot_costs.size() == 288);
  CHECK_FALSE(bill.pib);

  for (const Tariff& t : {tou, Tariff(QuadraticTariff(QuadraticParams{1, 2, 0})), Tariff(StepTariff{0.5, 1, 2}),
                          Tariff(aclps(1, 1, 0))})
    CHECK(daily_bill(t, LoadProfile::zeros()).total == 0.0);

  const auto apps = test::table1();
  const auto base = build_load_profile(apps, Schedule::baseline(apps));
  std::mt19937_64 rng(2);
  for (const Tariff& t : {tou, Tariff(QuadraticTariff(QuadraticParams{1, 2, 0.01})), Tariff(StepTariff{0.05, 1, 2}),
                          Tariff(aclps(1, 0.5, 0.01))}) {
    const auto b = daily_bill(t, base);
    double sum = 0;
    for (double c : b.slot_costs) sum += c;
    CHECK(b.total == doctest::Approx(sum).epsilon(1e-12));
    CHECK(bill_total(t, base) == b.total);
  }
  CHECK(daily_bill(Tariff(aclps(1, 0, 0)), base).pib.has_value());
}

TEST_CASE("aclps bill is linear in the rate vector") {
  const auto apps = test::table1();
  const auto base = build_load_profile(apps, Schedule::baseline(apps));
  const auto c = aclps(0.8, 0.3, 0.02);
  const double b = bill_total(c, base);
  for (double k : {0.5, 2.0, 3.7}) {
    CHECK(bill_total(aclps(0.8 * k, 0.3 * k, 0.02 * k), base) == doctest::Approx(k * b).epsilon(1e-12));
  }
  const double parts = bill_total(aclps(0.8, 0, 0), base) + bill_total(aclps(1e-300, 0.3, 0), base) +
                       bill_total(aclps(1e-300, 0, 0.02), base);
  CHECK(b == doctest::Approx(parts).epsilon(1e-12));
}

TEST_CASE("calibrate_revenue") {
  const auto apps = test::table1();
  const auto base = build_load_profile(apps, Schedule::baseline(apps));
  const auto c = aclps(1, 0.2, 0.01);
  const double bill = bill_total(c, base);

  const auto half = calibrate_revenue(c, base, bill / 2);
  CHECK(half.r1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.r2 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(half.r3 == doctest::Approx(0.005).epsilon(1e-12));

  const auto same = calibrate_revenue(c, base, bill);
  CHECK(same.r1 == doctest::Approx(c.r1).epsilon(1e-15));

  const auto target = calibrate_revenue(AclpsConfig{}, base, 4.0125);
  CHECK(std::abs(bill_total(target, base) - 4.0125) <= 1e-9);

  CHECK_THROWS_AS(calibrate_revenue(aclps(1, 0.2, 0), LoadProfile::zeros(), 1.0), CalibrationError);
  CHECK_THROWS_AS(calibrate_revenue(c, base, 0.0), CalibrationError);
}

TEST_CASE("slot costs are monotone and convex over random parameters") {
  std::mt19937_64 rng(42);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const LevelLadder ladder;
  const int n = 40;
  for (int draw = 0; draw < 1000; ++draw) {
    const double h = u(0.001, 0.05);
    const QuadraticParams q{u(0.01, 5), u(0, 3), u(0, 1)};
    const double normal = u(0.01, 2);
    const ToUTariff tou(normal, normal * u(1, 4), PeriodCalendar::standard());
    const double low = u(0.01, 2);
    const StepTariff step{u(0.01, 1), low, low * u(1, 3)};
    const auto ac = aclps(u(0.01, 3), u(0, 2), u(0, 1));
    const double level = ladder.level(std::uniform_int_distribution<int>(0, ladder.top_index())(rng));
    const Slot slot = std::uniform_int_distribution<int>(1, 288)(rng);

    auto cost = [&](int kind, double e) {
      switch (kind) {
        case 0: return quad_slot_cost(q, e);
        case 1: return tou_slot_cost(tou, slot, e);
        case 2: return step_slot_cost(step, e);
        default: return aclps_slot_cost(ac, level, e);
      }
    };
    for (int kind = 0; kind < 4; ++kind) {
      CAPTURE(kind);
      CAPTURE(draw);
      for (int i = 0; i + 1 < n; ++i) CHECK(cost(kind, i * h) < cost(kind, (i + 1) * h));
      if (kind == 0 || kind == 3) {
        for (int i = 1; i + 1 < n; ++i) {
          const double second = cost(kind, (i + 1) * h) - 2 * cost(kind, i * h) + cost(kind, (i - 1) * h);
          CHECK(second > 0);
        }
      }
    }
    const double below = std::nextafter(step.threshold, 0.0);
    CHECK(std::abs(step_slot_cost(step, step.threshold) - step_slot_cost(step, below)) <= 1e-12);
    CHECK(std::abs(step_slot_cost(step, std::nextafter(step.threshold, 2.0)) - step_slot_cost(step, step.threshold)) <=
          1e-12);
  }
}

TEST_CASE("configs validate their invariants") {
  auto c = AclpsConfig{};
  CHECK_NOTHROW(c.check());
  c.r1 = 0;
  CHECK_THROWS_AS(c.check(), ValidationError);
  c = AclpsConfig{};
  c.ca_plus = 0;
  CHECK_THROWS_AS(c.check(), ValidationError);
  c = AclpsConfig{};
  c.ladder.step = 0;
  CHECK_THROWS_AS(c.check(), ValidationError);
}

TEST_CASE("calendar_of") {
  const auto cal = PeriodCalendar({{10, 20}}, 288);
  CHECK(calendar_of(ToUTariff(1, 2, cal)) == cal);
  CHECK(calendar_of(StepTariff{}) == PeriodCalendar::standard());
  AclpsConfig a;
  a.calendar = cal;
  CHECK(calendar_of(a) == cal);
}
