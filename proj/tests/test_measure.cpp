#include <catch2/catch_amalgamated.hpp>

#include "finsler/measure.hpp"
#include "finsler/qmc.hpp"
#include "helpers.hpp"

using namespace finsler;
using Catch::Approx;
using test_helpers::sample_ball_points;

TEST_CASE("euclidean ball volumes") {
  CHECK(euclidean_ball_volume(2) == Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(euclidean_ball_volume(3) == Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
}

TEST_CASE("domain volume by spherical quadrature") {
  CHECK(domain_volume(ConvexDomain{MinkowskiNorm::euclidean(3)}).value ==
        Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-6));
  CHECK(domain_volume(ConvexDomain{MinkowskiNorm::ellipsoid({1.0, 0.5})}).value ==
        Approx(0.5 * std::numbers::pi).epsilon(1e-8));

  // l4 disc: closed Gamma-function value, plus an independent grid oracle
  double vol = domain_volume(ConvexDomain{MinkowskiNorm::power_sum(2, 2)}).value;
  CHECK(vol == Approx(3.7081493546027438).epsilon(1e-8));
  int inside = 0;
  const int grid = 2000;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double x = -1.0 + (2.0 * i + 1.0) / grid, y = -1.0 + (2.0 * j + 1.0) / grid;
      if (x * x * x * x + y * y * y * y < 1.0) ++inside;
    }
  double grid_oracle = 4.0 * inside / (grid * grid);
  CHECK(vol == Approx(grid_oracle).epsilon(1e-3));

  // n = 4 goes through the QMC path with a reported standard error
  auto v4 = gauge_ball_volume(4, [](const Vec& w) { return norm2(w); });
  CHECK(v4.value == Approx(euclidean_ball_volume(4)).margin(3 * std::max(v4.standard_error, 1e-6)));
}

TEST_CASE("Busemann-Hausdorff densities") {
  auto mink = FinslerMetricSpec::minkowski(MinkowskiNorm::euclidean(3));
  CHECK(bh_density(mink, {0.3, 0, 0}) == Approx(1.0).epsilon(1e-6));

  auto ball2 = FinslerMetricSpec::explicit_ball_funk(2);
  CHECK(bh_density(ball2, {0.3, 0.0}) == Approx(1.0).epsilon(1e-5));

  CHECK(MeasureSpec::constant_density(2.5).density({0.1, 0.2}) == 2.5);
  CHECK_THROWS_AS(MeasureSpec::constant_density(-1.0), std::invalid_argument);

  // constancy across the domain for a generic Funk metric
  auto ell = FinslerMetricSpec::funk(MinkowskiNorm::ellipsoid({1.0, 0.6, 1.3}));
  auto pts = sample_ball_points(3, 20, 0.55);
  std::vector<double> vals;
  for (auto& x : pts) vals.push_back(bh_density(ell, x));
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= vals.size();
  for (double v : vals) CHECK(std::fabs(v - mean) < 1e-5 * mean);
  auto bh_ell = MeasureSpec::busemann_hausdorff(ell);
  CHECK(bh_ell.density({0.1, 0.0, 0.0}) == Approx(mean).epsilon(1e-5));

  // interpolated ball family: closed Randers-ball form vs the numeric path
  for (double a : {0.0, 0.5, 0.8}) {
    auto spec = FinslerMetricSpec::interpolated_funk(3, a);
    auto meas = MeasureSpec::busemann_hausdorff(spec);
    for (Vec x : {Vec{0.3, 0, 0}, Vec{0.1, -0.4, 0.2}}) {
      CHECK(meas.density(x) == Approx(bh_density(spec, x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("polar radial profile of the Funk ball") {
  CHECK(polar_density_funk(3, std::log(2.0)) == Approx(0.125).epsilon(1e-14));
  for (double r : {1e-6, 1e-4, 1e-3})
    CHECK(polar_density_funk(3, r) / (r * r) == Approx(1.0).margin(2e-3));
  CHECK_THROWS_AS(polar_density_funk(3, 0.0), std::domain_error);
  CHECK_THROWS_AS(polar_density_funk(3, -1.0), std::domain_error);
}

TEST_CASE("comparison functions and the volume bound") {
  CHECK(ComparisonProfile::s_k(0.0, 1.7) == Approx(1.7));
  CHECK(ComparisonProfile::s_k(-1.0, 1.3) == Approx(std::sinh(1.3)).epsilon(1e-14));
  CHECK(ComparisonProfile::c_k(-1.0, 1.3) == Approx(std::cosh(1.3)).epsilon(1e-14));
  CHECK(ComparisonProfile::s_k(1.0, 0.6) == Approx(std::sin(0.6)).epsilon(1e-14));
  CHECK(ComparisonProfile::s_k(0.25, 0.0) == 0.0);
  CHECK(ComparisonProfile::c_k(0.25, 0.0) == 1.0);

  // c_k is the derivative of s_k
  double h = 1e-6;
  for (double k : {-1.0, -0.25, 0.0, 0.25, 1.0})
    for (double t = 0.25; t <= 5.0; t += 0.25) {
      double fd = (ComparisonProfile::s_k(k, t + h) - ComparisonProfile::s_k(k, t - h)) / (2 * h);
      CHECK(ComparisonProfile::c_k(k, t) == Approx(fd).margin(1e-8));
    }

  // equality case: Funk-ball profile meets the bound at ratio 1 for n = 2, 3
  for (int n : {2, 3}) {
    ComparisonProfile profile{0.5, 0.5 * (n + 1) / (n - 1), n};
    std::vector<double> grid;
    for (int i = 0; i < 120; ++i) grid.push_back(0.01 * std::pow(1000.0, i / 119.0));
    auto rep = check_comparison(profile, [n](double r) { return polar_density_funk(n, r); }, grid);
    CHECK(rep.bound_holds);
    CHECK(rep.equality_case);
    CHECK(rep.max_ratio == Approx(1.0).margin(1e-8));
  }

  // strict inequality when the density is depressed below the bound
  ComparisonProfile profile{0.5, 1.0, 3};
  auto rep = check_comparison(
      profile, [](double r) { return 0.9 * polar_density_funk(3, r); }, {0.5, 1.0, 2.0});
  CHECK(rep.bound_holds);
  CHECK_FALSE(rep.equality_case);
}

TEST_CASE("integral of distortion") {
  auto ball3 = FinslerMetricSpec::explicit_ball_funk(3);
  auto bh3 = MeasureSpec::busemann_hausdorff(ball3);
  Vec o3 = {0, 0, 0};
  auto r3 = integral_of_distortion(ball3, bh3, o3);
  CHECK(r3.analytic == Approx(4 * std::numbers::pi).epsilon(1e-14));
  CHECK_FALSE(r3.numeric_available);

  auto ball2 = FinslerMetricSpec::explicit_ball_funk(2);
  auto bh2 = MeasureSpec::busemann_hausdorff(ball2);
  Vec o2 = {0, 0};
  auto r2 = integral_of_distortion(ball2, bh2, o2);
  CHECK(r2.analytic == Approx(2 * std::numbers::pi).epsilon(1e-12));
  REQUIRE(r2.numeric_available);
  CHECK(r2.numeric == Approx(r2.analytic).epsilon(1e-3));

  // generic domain, n = 2: the identity is nontrivial but still exact
  auto ell = FinslerMetricSpec::funk(MinkowskiNorm::ellipsoid({1.0, 0.5}));
  auto bhe = MeasureSpec::busemann_hausdorff(ell);
  auto re = integral_of_distortion(ell, bhe, o2);
  CHECK(re.numeric == Approx(2 * std::numbers::pi).epsilon(1e-3));

  // doubling the density doubles the integral
  auto rc = integral_of_distortion(ball2, MeasureSpec::constant_density(2.0), o2);
  CHECK(rc.analytic == Approx(2 * r2.analytic).epsilon(1e-5));
  CHECK(rc.numeric == Approx(2 * r2.numeric).epsilon(1e-6));
}

TEST_CASE("local finiteness probe") {
  auto ball3 = FinslerMetricSpec::explicit_ball_funk(3);
  auto bh = MeasureSpec::busemann_hausdorff(ball3);
  Vec o = {0, 0, 0};

  auto fin = local_finiteness_probe(ball3, bh, o, 2.0, 1.0);
  CHECK_FALSE(fin.diverged);
  CHECK(fin.value > 0);
  CHECK(std::isfinite(fin.value));

  auto div = local_finiteness_probe(ball3, bh, o, 3.0, 1.0);
  CHECK(div.diverged);
  auto div2 = local_finiteness_probe(ball3, bh, o, 3.5, 1.0);
  CHECK(div2.diverged);

  // p = 0 gives the (finite) measure of the forward ball
  auto m = local_finiteness_probe(ball3, bh, o, 0.0, 1.0);
  CHECK_FALSE(m.diverged);
  CHECK(m.value == Approx(4 * std::numbers::pi * 0.084193485942549056).epsilon(1e-8));
  CHECK_THROWS_AS(local_finiteness_probe(ball3, bh, o, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("polar profile integrates to the forward-ball measure (QMC cross-check)") {
  auto ball3 = FinslerMetricSpec::explicit_ball_funk(3);
  auto bh = MeasureSpec::busemann_hausdorff(ball3);
  Vec o = {0, 0, 0};
  double R = 1.2;
  double radial = local_finiteness_probe(ball3, bh, o, 0.0, R).value;

  // direct QMC measure of B+_0(R) = {|x| < 1 - e^-R}
  double s_max = -std::expm1(-R);
  auto mc = qmc_box_integral(
      [&](const Vec& x) { return norm2(x) < 1.0; },
      [&](const Vec& x) { return norm2(x) < s_max ? 1.0 : 0.0; },
      {-1, -1, -1}, {1, 1, 1}, 200000, 99);
  CHECK(radial == Approx(mc.value).margin(3 * mc.standard_error));
}
