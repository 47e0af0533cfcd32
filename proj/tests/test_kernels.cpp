#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "loadsched/kernels.hpp"

using namespace loadsched::kernels;

namespace {

std::vector<Isa> isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (available(isa)) out.push_back(isa);
  return out;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Plain loops with a single accumulator.
double naive_sum(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s;
}

}  // namespace

TEST_CASE("scalar is always available and detection picks an available ISA") {
  CHECK(available(Isa::scalar));
  CHECK(available(active_isa()));
  CHECK(table(Isa::scalar).isa == Isa::scalar);
}

TEST_CASE("every ISA matches the scalar reference bit for bit") {
  std::mt19937_64 rng(7);
  const auto& ref = table(Isa::scalar);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 13u, 288u, 1001u}) {
    const auto x = random_vector(rng, n, -3.0, 5.0);
    const auto y = random_vector(rng, n, -1.0, 1.0);
    const auto a = random_vector(rng, n, 0.0, 2.0);
    const auto b = random_vector(rng, n, 0.0, 1.0);
    const auto c = random_vector(rng, n, 0.0, 0.1);
    const auto e = random_vector(rng, n, 0.0, 0.5);
    const auto limit = random_vector(rng, n, -1.0, 3.0);
    for (Isa isa : isas()) {
      CAPTURE(to_string(isa));
      CAPTURE(n);
      const auto& k = table(isa);
      CHECK(k.sum(x.data(), n) == ref.sum(x.data(), n));
      CHECK(k.dot(x.data(), y.data(), n) == ref.dot(x.data(), y.data(), n));
      CHECK(k.quadratic(e.data(), a.data(), b.data(), c.data(), n) ==
            ref.quadratic(e.data(), a.data(), b.data(), c.data(), n));
      CHECK(k.step(e.data(), n, 0.2, 1.5, 3.0) == ref.step(e.data(), n, 0.2, 1.5, 3.0));
      const auto ex = k.excess(x.data(), limit.data(), n);
      const auto ex_ref = ref.excess(x.data(), limit.data(), n);
      CHECK(ex.over == ex_ref.over);
      CHECK(ex.within == ex_ref.within);
      CHECK(k.argmax(x.data(), n) == ref.argmax(x.data(), n));

      std::vector<double> s1(n), s2(n);
      k.scale(x.data(), 0.37, s1.data(), n);
      ref.scale(x.data(), 0.37, s2.data(), n);
      CHECK(s1 == s2);
      auto p1 = x, p2 = x;
      k.add_constant(p1.data(), n, 1.25);
      ref.add_constant(p2.data(), n, 1.25);
      CHECK(p1 == p2);
    }
  }
}

TEST_CASE("kernels agree with naive loops") {
  std::mt19937_64 rng(11);
  const std::size_t n = 517;
  const auto x = random_vector(rng, n, 0.0, 4.0);
  const auto limit = random_vector(rng, n, 0.0, 4.0);
  const auto e = random_vector(rng, n, 0.0, 0.5);
  for (Isa isa : isas()) {
    CAPTURE(to_string(isa));
    const auto& k = table(isa);
    CHECK(k.sum(x.data(), n) == doctest::Approx(naive_sum(x)).epsilon(1e-12));

    double dot = 0, quad = 0, step = 0, over = 0, within = 0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += x[i] * limit[i];
      quad += 2.0 * e[i] * e[i] + 0.5 * e[i] + 0.01;
      step += e[i] <= 0.2 ? 1.5 * e[i] : 1.5 * 0.2 + 3.0 * (e[i] - 0.2);
      const double d = std::max(0.0, x[i] - limit[i]);
      over += d;
      within += x[i] - d;
      if (x[i] > x[best]) best = i;
    }
    const std::vector<double> a(n, 2.0), b(n, 0.5), c(n, 0.01);
    CHECK(k.dot(x.data(), limit.data(), n) == doctest::Approx(dot).epsilon(1e-12));
    CHECK(k.quadratic(e.data(), a.data(), b.data(), c.data(), n) == doctest::Approx(quad).epsilon(1e-12));
    CHECK(k.step(e.data(), n, 0.2, 1.5, 3.0) == doctest::Approx(step).epsilon(1e-12));
    const auto ex = k.excess(x.data(), limit.data(), n);
    CHECK(ex.over == doctest::Approx(over).epsilon(1e-12));
    CHECK(ex.within == doctest::Approx(within).epsilon(1e-12));
    CHECK(k.argmax(x.data(), n) == best);
  }
}

TEST_CASE("argmax returns the earliest maximum") {
  const std::vector<double> flat(13, 0.0);
  std::vector<double> twin(29, 1.0);
  twin[9] = 4.0;
  twin[22] = 4.0;
  for (Isa isa : isas()) {
    CHECK(table(isa).argmax(flat.data(), flat.size()) == 0);
    CHECK(table(isa).argmax(twin.data(), twin.size()) == 9);
    CHECK(table(isa).argmax(nullptr, 0) == 0);
  }
}

TEST_CASE("excess treats the limit as inside") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> limit{1.0, 2.0, 2.5, 4.0, 6.0};
  for (Isa isa : isas()) {
    const auto ex = table(isa).excess(x.data(), limit.data(), x.size());
    CHECK(ex.over == 0.5);
    CHECK(ex.within == 14.5);
  }
}

TEST_CASE("force_isa pins dispatch") {
  for (Isa isa : isas()) {
    force_isa(isa);
    CHECK(active_isa() == isa);
    CHECK(active().isa == isa);
  }
  force_isa(std::nullopt);
  CHECK(available(active_isa()));
}
