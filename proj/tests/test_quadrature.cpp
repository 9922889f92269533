#include <catch2/catch_amalgamated.hpp>

#include "finsler/qmc.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/quotients.hpp"

using namespace finsler;
using Catch::Approx;

TEST_CASE("graded adaptive quadrature on smooth and endpoint-singular integrands") {
  CHECK(integrate_graded([](double x) { return x * x; }, 0, 1).value ==
        Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(integrate_graded([](double x) { return std::sin(x); }, 0, 3).value ==
        Approx(1.0 - std::cos(3.0)).epsilon(1e-12));
  auto sing = integrate_graded([](double x) { return 1.0 / std::sqrt(x); }, 0, 1);
  CHECK(sing.converged);
  CHECK(sing.value == Approx(2.0).epsilon(1e-9));
  auto logsing = integrate_graded([](double x) { return std::log(x); }, 0, 1);
  CHECK(logsing.value == Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("divergence is flagged by missing endpoint decay") {
  auto h1 = integrate_graded([](double x) { return 1.0 / x; }, 0, 1);
  CHECK(h1.diverged);
  auto h2 = integrate_graded([](double x) { return 1.0 / (x * x); }, 0, 1);
  CHECK(h2.diverged);
  auto right = integrate_graded([](double x) { return 1.0 / (1.0 - x); }, 0, 1);
  CHECK(right.diverged);
  CHECK_THROWS_AS(integrate_or_throw([](double x) { return 1.0 / x; }, 0, 1),
                  std::runtime_error);
}

TEST_CASE("radial profile integral: reference values") {
  // g = 1, n = 3: int_0^1 s^2 ds = 1/3
  auto one = radial_integral([](double) { return 1.0; }, 3);
  CHECK(one.value == Approx(1.0 / 3.0).epsilon(1e-11));

  // g = e^-r maps to the Beta integral B(3, 2) = 1/12
  auto beta = radial_integral([](double r) { return std::exp(-r); }, 3);
  CHECK(beta.value == Approx(1.0 / 12.0).epsilon(1e-11));
  // and e^-2r to B(3, 3) = 1/30
  auto beta2 = radial_integral([](double r) { return std::exp(-2 * r); }, 3);
  CHECK(beta2.value == Approx(1.0 / 30.0).epsilon(1e-11));

  // r^-2 (integrable for n = 3) against the independent oracle value
  auto fin = radial_integral([](double r) { return std::pow(r, -2.0); }, 3);
  CHECK_FALSE(fin.diverged);
  CHECK(fin.value == Approx(0.52324814376454784).epsilon(1e-10));

  // divergence for p >= n, including the borderline p = n
  CHECK(radial_integral([](double r) { return std::pow(r, -3.0); }, 3).diverged);
  CHECK(radial_integral([](double r) { return std::pow(r, -3.5); }, 3).diverged);
  CHECK(radial_integral([](double r) { return std::pow(r, -4.0); }, 3).diverged);

  // truncated version: int over B+(R) of 1, radial part
  double R = 1.0;
  auto part = radial_profile_integral([](double) { return 1.0; }, 3, -std::expm1(-R));
  CHECK(part.value == Approx(0.084193485942549056).epsilon(1e-11));
}

TEST_CASE("halton sequence and QMC ball volume") {
  // first few base-2 and base-3 Halton points
  CHECK(detail::halton(1, 2) == Approx(0.5));
  CHECK(detail::halton(2, 2) == Approx(0.25));
  CHECK(detail::halton(3, 2) == Approx(0.75));
  CHECK(detail::halton(1, 3) == Approx(1.0 / 3.0));
  CHECK(detail::halton(2, 3) == Approx(2.0 / 3.0));

  auto vol = qmc_box_integral([](const Vec& x) { return norm2(x) < 1.0; },
                              [](const Vec&) { return 1.0; }, {-1, -1, -1}, {1, 1, 1}, 400000, 7);
  CHECK(vol.value ==
        Approx(4.0 * std::numbers::pi / 3.0).margin(3 * std::max(vol.standard_error, 1e-4)));
  CHECK(vol.accepted > 0);
  CHECK(vol.standard_error > 0);

  // determinism for a fixed seed
  auto vol2 = qmc_box_integral([](const Vec& x) { return norm2(x) < 1.0; },
                               [](const Vec&) { return 1.0; }, {-1, -1, -1}, {1, 1, 1}, 400000, 7);
  CHECK(vol.value == vol2.value);
  CHECK(vol.standard_error == vol2.standard_error);
}

TEST_CASE("QMC cross-validates the radial reduction") {
  // f = e^{-2 r(x)} on the Funk ball, BH measure (density 1):
  // radial value is  n omega_n * B(3,3) = 4 pi / 30
  double radial = 4 * std::numbers::pi * (1.0 / 30.0);
  auto mc = qmc_box_integral(
      [](const Vec& x) { return norm2(x) < 1.0; },
      [](const Vec& x) {
        double r = -std::log1p(-norm2(x));
        return std::exp(-2 * r);
      },
      {-1, -1, -1}, {1, 1, 1}, 500000, 12345);
  CHECK(mc.value == Approx(radial).margin(3 * mc.standard_error));

  // integrable singularity r^-2: still consistent between the two paths
  double radial_sing = 4 * std::numbers::pi * 0.52324814376454784;
  auto mc2 = qmc_box_integral(
      [](const Vec& x) { return norm2(x) < 1.0; },
      [](const Vec& x) {
        double r = -std::log1p(-norm2(x));
        return std::pow(r, -2.0);
      },
      {-1, -1, -1}, {1, 1, 1}, 500000, 99);
  CHECK(mc2.value == Approx(radial_sing).margin(3 * mc2.standard_error));
}
