#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fvsg/pressure_law.hpp"

using namespace fvsg;

namespace {

// Adaptive Simpson quadrature, used as the independent oracle for the
// closed-form h and H.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  return adaptive_simpson(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol, 40);
}

}  // namespace

TEST_CASE("closed-form enthalpy and primitive match the defining integrals") {
  for (double gamma : {1.0, 5.0 / 3.0, 2.0, 3.0}) {
    PressureLaw law(gamma);
    for (double s : {0.05, 0.3, 1.0, 2.0, 7.5}) {
      const double h_quad =
          integrate([&](double t) { return law.r_prime(t) / t; }, 1.0, s);
      REQUIRE_THAT(law.enthalpy(s), Catch::Matchers::WithinAbs(h_quad, 1e-11 * (1 + std::abs(h_quad))));
      const double H_quad = integrate([&](double t) { return law.enthalpy(t); }, 1.0, s);
      REQUIRE_THAT(law.primitive(s), Catch::Matchers::WithinAbs(H_quad, 1e-11 * (1 + std::abs(H_quad))));
    }
  }
}

TEST_CASE("pressure law fixed values") {
  PressureLaw g53(5.0 / 3.0);
  CHECK(g53.enthalpy(1.0) == 0.0);
  CHECK(g53.g_inverse(0.0) == 1.0);
  CHECK(g53.enthalpy_zero_limit() == Catch::Approx(-2.5));
  CHECK(g53.g_inverse(-2.5 - 1.0) == 0.0);  // below h(0+)

  PressureLaw g2(2.0);
  CHECK(g2.primitive(2.0) == Catch::Approx(1.0));
  CHECK(g2.primitive(0.0) == Catch::Approx(1.0));
  CHECK(g2.r(0.0) == 0.0);
  CHECK(g2.r_prime(0.0) == 0.0);

  PressureLaw g1(1.0);
  CHECK(g1.r_prime(0.7) == 1.0);
  CHECK(g1.g_inverse(0.0) == 1.0);
  CHECK(g1.primitive(1.0) == 0.0);
  CHECK_THROWS_AS(g1.enthalpy(0.0), std::invalid_argument);
  CHECK_THROWS_AS(g2.enthalpy(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(PressureLaw(0.5), std::invalid_argument);
}

TEST_CASE("g is the generalized inverse of h") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> us(1e-3, 10.0);
  for (double gamma : {1.0, 5.0 / 3.0, 2.0, 3.0}) {
    PressureLaw law(gamma);
    for (int i = 0; i < 1000; ++i) {
      const double s = us(rng);
      const double back = law.g_inverse(law.enthalpy(s));
      REQUIRE_THAT(back, Catch::Matchers::WithinRel(s, 1e-12));
    }
  }
}

TEST_CASE("bernoulli fixed values and branches") {
  CHECK(bernoulli(0.0) == 1.0);
  CHECK_THAT(bernoulli(1.0), Catch::Matchers::WithinRel(1.0 / (std::exp(1.0) - 1.0), 1e-14));
  CHECK_THAT(bernoulli(1.0), Catch::Matchers::WithinAbs(0.5819767, 1e-7));
  // large positive argument must not overflow
  const double b800 = bernoulli(800.0);
  CHECK(b800 >= 0.0);
  CHECK(b800 <= 1e-300);
  CHECK(std::isfinite(bernoulli(-800.0)));
  CHECK_THAT(bernoulli(-800.0), Catch::Matchers::WithinRel(800.0, 1e-12));

  // series and exact branches agree at the switch point
  for (double x : {1e-4, -1e-4}) {
    const double series = 1.0 - x / 2.0 + x * x / 12.0 - x * x * x * x / 720.0;
    const double exact = x / std::expm1(x);
    CHECK_THAT(series, Catch::Matchers::WithinRel(exact, 1e-13));
    CHECK_THAT(bernoulli(x), Catch::Matchers::WithinRel(exact, 1e-13));
  }
}

TEST_CASE("bernoulli properties: B(x)-B(-x)=-x, positivity, monotone") {
  for (double x : {1e-6, -1e-6, 0.5, -0.5, 10.0, -10.0, 50.0, -50.0}) {
    const double lhs = bernoulli(x) - bernoulli(-x);
    REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(-x, 1e-12 * std::max(1.0, std::abs(x))));
  }
  double prev = bernoulli(-60.0);
  CHECK(prev > 0.0);
  for (double x = -59.5; x <= 60.0; x += 0.5) {
    const double b = bernoulli(x);
    CHECK(b > 0.0);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("dr examples") {
  PressureLaw g2(2.0);
  CHECK(dr_log_mean(g2, 3.0, 3.0) == Catch::Approx(6.0));
  CHECK(dr_log_mean(g2, 0.0, 4.0) == Catch::Approx(4.0));
  CHECK_THAT(dr_log_mean(g2, 1.0, std::exp(1.0)),
             Catch::Matchers::WithinRel(2.0 * (std::exp(1.0) - 1.0), 1e-13));
  CHECK(dr_midpoint(g2, 1.0, 3.0) == Catch::Approx(4.0));

  PressureLaw g53(5.0 / 3.0);
  CHECK(dr_midpoint(g53, 0.0, 0.0) == 0.0);

  PressureLaw g1(1.0);
  CHECK(dr_midpoint(g1, 0.3, 17.0) == 1.0);
  CHECK(dr_log_mean(g1, 0.3, 17.0) == 1.0);

  CHECK_THROWS_AS(dr_log_mean(g2, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dr_midpoint(g2, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("dr_log_mean is symmetric and satisfies the mean-value bracket") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uu(0.0, 8.0);
  std::uniform_int_distribution<int> zero(0, 19);
  for (double gamma : {1.0, 5.0 / 3.0, 2.0, 3.0}) {
    PressureLaw law(gamma);
    for (int i = 0; i < 1000; ++i) {
      double a = uu(rng), b = uu(rng);
      if (zero(rng) == 0) a = 0.0;
      const double d1 = dr_log_mean(law, a, b);
      const double d2 = dr_log_mean(law, b, a);
      REQUIRE(d1 == d2);
      const double lo = law.r_prime(std::min(a, b));
      const double hi = law.r_prime(std::max(a, b));
      if (a * b > 0.0) {
        REQUIRE(d1 >= lo - 1e-12 * (1.0 + hi));
        REQUIRE(d1 <= hi + 1e-12 * (1.0 + hi));
      }
      REQUIRE(d1 >= 0.0);
    }
    // equal arguments hit r'(a) exactly
    for (double a : {0.2, 1.0, 3.7})
      REQUIRE(dr_log_mean(law, a, a) == law.r_prime(a));
  }
}
