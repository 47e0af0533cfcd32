#include "loadsched/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace loadsched {

Problem random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto integer = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  Problem p;
  const TimeGrid& grid = p.grid;

  const int background = integer(1, 3);
  for (int i = 0; i < background; ++i) {
    Appliance a;
    a.id = "fixed" + std::to_string(i);
    a.name = a.id;
    a.power_rate_watts = std::round(uniform(50.0, 2000.0));
    a.load_class = LoadClass::common_nonshiftable;
    const int d = integer(1, 96);
    const Slot s = integer(1, grid.slot_count - d + 1);
    a.runs.push_back({d, s, s, s});
    p.appliances.push_back(a);
  }

  // Windows share a region so runs compete for the same slots.
  const Slot region = integer(1, grid.slot_count - 60);
  const int shiftable = integer(1, 3);
  for (int i = 0; i < shiftable; ++i) {
    Appliance a;
    a.id = "run" + std::to_string(i);
    a.name = a.id;
    a.power_rate_watts = std::round(uniform(200.0, 3000.0));
    a.load_class = LoadClass::common_shiftable;
    const int d = integer(1, 12);
    const int width = integer(1, 24);
    const Slot lo = std::min(region + integer(0, 24), grid.slot_count - d - width + 2);
    const Slot hi = lo + width - 1;
    a.runs.push_back({d, integer(lo, hi), lo, hi});
    p.appliances.push_back(a);
  }

  // The calendar puts peak around the shared region half of the time.
  const auto calendar = integer(0, 1) == 0
                            ? PeriodCalendar::standard(grid)
                            : PeriodCalendar({{region + 12, std::min(region + 36, grid.slot_count)}}, grid.slot_count);
  switch (integer(0, 3)) {
    case 0: {
      const double normal = uniform(0.05, 0.5);
      p.tariff = ToUTariff(normal, normal * uniform(1.0, 4.0), calendar);
      break;
    }
    case 1:
      p.tariff = QuadraticTariff(QuadraticParams{uniform(0.1, 2.0), uniform(0.0, 1.0), uniform(0.0, 0.1)},
                                 grid.slot_count);
      break;
    case 2: {
      const double low = uniform(0.1, 1.0);
      p.tariff = StepTariff{uniform(0.05, 0.3), low, low * uniform(1.0, 3.0)};
      break;
    }
    default: {
      AclpsConfig c;
      c.r1 = uniform(0.5, 2.0);
      c.r2 = uniform(0.0, 1.0);
      c.r3 = uniform(0.0, 0.1);
      c.calendar = calendar;
      p.tariff = c;
      break;
    }
  }
  return p;
}

}  // namespace loadsched
