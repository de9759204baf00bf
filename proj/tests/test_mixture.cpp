#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "interop/mixture.hpp"

using namespace interop;
using fixtures::TempDir;

namespace {

FiveNumberSummary fns(double mn, double q1, double q2, double q3, double mx) {
  return FiveNumberSummary{mn, q1, q2, q3, mx};
}

// Brute-force quantile on a fine grid over the mixture support.
double grid_quantile(const MixtureCDF& mix, double p, int points = 1000000) {
  double lo = mix.min(), hi = mix.max();
  if (p <= 0.0) return lo;
  for (int i = 0; i <= points; ++i) {
    double x = lo + (hi - lo) * double(i) / points;
    if (mix.eval(x) >= p) return x;
  }
  return hi;
}

MixtureCDF random_mixture(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ncomp(1, 6);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::uniform_int_distribution<long long> w(1, 50);
  MixtureCDF mix;
  int n = ncomp(rng);
  for (int i = 0; i < n; ++i) {
    double v[5] = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    std::sort(v, v + 5);
    mix.add(day_cdf(fns(v[0], v[1], v[2], v[3], v[4]), w(rng)));
  }
  return mix;
}

}  // namespace

TEST_CASE("single-day CDF hits the knot probabilities") {
  DayCDF c = day_cdf(fns(0, 1, 2, 3, 4), 10);
  CHECK(c.eval(0) == doctest::Approx(0.0));
  CHECK(c.eval(1) == doctest::Approx(0.25));
  CHECK(c.eval(2) == doctest::Approx(0.5));
  CHECK(c.eval(3) == doctest::Approx(0.75));
  CHECK(c.eval(4) == doctest::Approx(1.0));
  CHECK(c.eval(-1) == 0.0);
  CHECK(c.eval(5) == 1.0);
}

TEST_CASE("single-day CDF interpolates linearly between knots") {
  DayCDF c = day_cdf(fns(0, 1, 2, 3, 4), 1);
  CHECK(c.eval(0.5) == doctest::Approx(0.125));
  CHECK(c.eval(1.5) == doctest::Approx(0.375));
  CHECK(c.eval(3.8) == doctest::Approx(0.95));
}

TEST_CASE("ties become right-continuous steps") {
  // point mass: every knot equal
  DayCDF point = day_cdf(fns(7, 7, 7, 7, 7), 3);
  CHECK(point.eval(6.999999) == 0.0);
  CHECK(point.eval(7) == 1.0);
  // partial tie: min == q1
  DayCDF c = day_cdf(fns(1, 1, 2, 3, 4), 1);
  CHECK(c.eval(1) == doctest::Approx(0.25));
  CHECK(c.eval(0.999999) == 0.0);
}

TEST_CASE("day_cdf validates ordering and count") {
  CHECK_THROWS_AS(day_cdf(fns(0, 2, 1, 3, 4), 1), Error);
  CHECK_THROWS_AS(day_cdf(fns(0, 1, 2, 3, 4), 0), Error);
  CHECK_THROWS_AS(day_cdf(fns(0, 1, 2, 3, 4), -5), Error);
}

TEST_CASE("single-component mixture reproduces the day quantiles") {
  MixtureCDF mix;
  mix.add(day_cdf(fns(10, 20, 30, 40, 50), 17));
  CHECK(mixture_quantile(mix, 0.25) == doctest::Approx(20).epsilon(1e-9));
  CHECK(mixture_quantile(mix, 0.5) == doctest::Approx(30).epsilon(1e-9));
  CHECK(mixture_quantile(mix, 0.75) == doctest::Approx(40).epsilon(1e-9));
  CHECK(mixture_quantile(mix, 0.0) == doctest::Approx(10));
  CHECK(mixture_quantile(mix, 1.0) == doctest::Approx(50));
}

TEST_CASE("two-day count-weighted fixture has median 3.2") {
  MixtureCDF mix;
  mix.add(day_cdf(fns(0, 1, 2, 3, 4), 1));
  mix.add(day_cdf(fns(0, 2, 4, 6, 8), 3));
  // hand check: 0.25*F1(3.2) + 0.75*F2(3.2) = 0.25*0.8 + 0.75*0.4 = 0.5
  CHECK(mix.eval(3.2) == doctest::Approx(0.5));
  double q = mixture_quantile(mix, 0.5);
  CHECK(std::fabs(q - 3.2) <= 1e-6);
  CHECK(std::fabs(q - grid_quantile(mix, 0.5)) <= 1e-5);
}

TEST_CASE("quantile matches a fine-grid oracle on random mixtures") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> up(0.01, 0.99);
  for (int t = 0; t < 25; ++t) {
    MixtureCDF mix = random_mixture(rng);
    double p = up(rng);
    double q = mixture_quantile(mix, p);
    double ref = grid_quantile(mix, p, 100000);
    double span = mix.max() - mix.min();
    // grid resolution bounds the oracle error
    CHECK(std::fabs(q - ref) <= span / 100000 + 1e-9);
    // definitional check: F(q) >= p and F just below q < p
    CHECK(mix.eval(q) >= p - 1e-9);
  }
}

TEST_CASE("mixture CDF and quantile are monotone") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    MixtureCDF mix = random_mixture(rng);
    std::uniform_real_distribution<double> u(mix.min(), mix.max());
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(mix.eval(a) <= mix.eval(b) + 1e-15);
    std::uniform_real_distribution<double> up(0.0, 1.0);
    double p = up(rng), q = up(rng);
    if (p > q) std::swap(p, q);
    CHECK(mixture_quantile(mix, p) <= mixture_quantile(mix, q) + 1e-9);
  }
}

TEST_CASE("duplicating a component with doubled count changes nothing") {
  MixtureCDF a, b;
  a.add(day_cdf(fns(0, 1, 2, 3, 4), 2));
  a.add(day_cdf(fns(5, 6, 7, 8, 9), 3));
  b.add(day_cdf(fns(0, 1, 2, 3, 4), 1));
  b.add(day_cdf(fns(0, 1, 2, 3, 4), 1));
  b.add(day_cdf(fns(5, 6, 7, 8, 9), 3));
  for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    CHECK(mixture_quantile(a, p) ==
          doctest::Approx(mixture_quantile(b, p)).epsilon(1e-9));
  }
}

TEST_CASE("quantile input validation") {
  MixtureCDF mix;
  CHECK_THROWS_AS(mixture_quantile(mix, 0.5), Error);  // no components
  mix.add(day_cdf(fns(0, 1, 2, 3, 4), 1));
  CHECK_THROWS_AS(mixture_quantile(mix, -0.1), Error);
  CHECK_THROWS_AS(mixture_quantile(mix, 1.1), Error);
  CHECK_THROWS_AS(mixture_quantile(mix, std::nan("")), Error);
}

TEST_CASE("window_summary groups by bridge and counts no-summary days") {
  TempDir dir;
  Taxonomy tax = fixtures::toy_taxonomy(dir);
  std::string csv = std::string(fixtures::kFlowHeader) + "\n" +
                    // hop: one day with a value summary, one day without
                    "hop,a,b,2024-03-01,1,,10,,,,,0,1,2,3,4\n" +
                    "hop,a,b,2024-03-02,3,,30,,,,,0,2,4,6,8\n" +
                    "hop,b,c,2024-03-03,5,,50,,,,,,,,,\n" +
                    // official_ab: summaries absent entirely
                    "official_ab,a,b,2024-03-01,7,,70,,,,,,,,,\n";
  FlowPanel flows = load_flow_panel(dir.write("f.csv", csv), tax);
  auto rows = window_summary(flows, DistGroup::Bridge, DistMetric::Value);
  REQUIRE(rows.size() == 2);
  const auto& hop = rows[0].entity == "hop" ? rows[0] : rows[1];
  const auto& off = rows[0].entity == "hop" ? rows[1] : rows[0];
  CHECK(hop.entity == "hop");
  CHECK(hop.n == 9);  // includes the summary-less day
  CHECK(hop.d == 3);
  REQUIRE(hop.q2.has_value());
  CHECK(std::fabs(*hop.q2 - 3.2) <= 1e-6);  // counts 1 and 3 reproduce the fixture
  CHECK(*hop.iqr == doctest::Approx(*hop.q3 - *hop.q1));
  CHECK(off.n == 7);
  CHECK(off.d == 1);
  CHECK_FALSE(off.q2.has_value());
  CHECK_FALSE(off.iqr.has_value());
}

TEST_CASE("window_summary chain grouping credits both endpoints") {
  TempDir dir;
  Taxonomy tax = fixtures::toy_taxonomy(dir);
  std::string csv = std::string(fixtures::kFlowHeader) + "\n" +
                    "hop,a,b,2024-03-01,4,,10,,,,,0,1,2,3,4\n";
  FlowPanel flows = load_flow_panel(dir.write("f.csv", csv), tax);
  auto rows = window_summary(flows, DistGroup::Chain, DistMetric::Value);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK((r.entity == "a" || r.entity == "b"));
    CHECK(r.n == 4);
    CHECK(r.d == 1);
    REQUIRE(r.q2.has_value());
    CHECK(*r.q2 == doctest::Approx(2.0));
  }
}
