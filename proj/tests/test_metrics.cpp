#include <catch2/catch_amalgamated.hpp>

#include "finsler/metrics.hpp"
#include "helpers.hpp"

using namespace finsler;
using Catch::Approx;
using test_helpers::sample_ball_points;
using test_helpers::sample_vectors;

namespace {
const auto kBall3 = FinslerMetricSpec::explicit_ball_funk(3);
const auto kFunk3 = FinslerMetricSpec::funk(MinkowskiNorm::euclidean(3));
const auto kHilbert3 = FinslerMetricSpec::hilbert(MinkowskiNorm::euclidean(3));
}  // namespace

TEST_CASE("metric evaluation on the explicit ball") {
  Vec x = {0.5, 0, 0};
  CHECK(metric_eval(kBall3, x, {1, 0, 0}) == Approx(2.0).epsilon(1e-14));
  CHECK(metric_eval(kBall3, x, {-1, 0, 0}) == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(metric_eval(kHilbert3, x, {1, 0, 0}) == Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(metric_eval(kBall3, x, {0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(metric_eval(kBall3, {1.0, 0, 0}, {1, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(metric_eval(kBall3, {0.1, 0}, {1, 0, 0}), std::invalid_argument);
}

TEST_CASE("implicit Funk solve matches the closed ball form") {
  auto xs = sample_ball_points(3, 100);
  auto ys = sample_vectors(3, 100, 555);
  for (size_t i = 0; i < xs.size(); ++i) {
    if (norm2(ys[i]) < 0.05) continue;
    double a = metric_eval(kFunk3, xs[i], ys[i]);
    double b = metric_eval(kBall3, xs[i], ys[i]);
    CHECK(a == Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("Funk defining equation and homogeneity") {
  auto spec = FinslerMetricSpec::funk(MinkowskiNorm::ellipsoid({1.0, 0.6, 1.3}));
  auto xs = sample_ball_points(3, 30);
  auto ys = sample_vectors(3, 30, 777);
  for (size_t i = 0; i < xs.size(); ++i) {
    Vec x = 0.9 * xs[i];  // gauge of the ellipsoid can exceed |x|
    if (spec.norm(x) >= 0.95 || norm2(ys[i]) < 0.05) continue;
    double F = metric_eval(spec, x, ys[i]);
    Vec z = x + (1.0 / F) * ys[i];
    CHECK(spec.norm(z) == Approx(1.0).margin(1e-10));
    for (double a : {0.5, 2.0, 7.0})
      CHECK(metric_eval(spec, x, a * ys[i]) == Approx(a * F).epsilon(1e-12));
  }
}

TEST_CASE("co-metric closed form and generic agreement") {
  CHECK(cometric_eval(kBall3, {0, 0, 0}, {0.3, -0.4, 1.0}) ==
        Approx(norm2({0.3, -0.4, 1.0})).epsilon(1e-12));
  CHECK(cometric_eval(kBall3, {0.5, 0, 0}, {-1, 0, 0}) == Approx(1.5).epsilon(1e-12));
  auto xs = sample_ball_points(3, 10);
  auto xis = sample_vectors(3, 10, 4242);
  for (size_t i = 0; i < xs.size(); ++i) {
    if (norm2(xis[i]) < 0.1) continue;
    double closed = cometric_eval(kBall3, xs[i], xis[i]);
    double generic = cometric_eval(kBall3, xs[i], xis[i], /*force_generic=*/true);
    CHECK(generic == Approx(closed).epsilon(1e-6));
    CHECK(closed > 0);
  }
}

TEST_CASE("duality pairing") {
  auto xs = sample_ball_points(3, 15);
  auto ys = sample_vectors(3, 15, 31);
  auto xis = sample_vectors(3, 15, 63);
  for (size_t i = 0; i < xs.size(); ++i) {
    if (norm2(ys[i]) < 0.1 || norm2(xis[i]) < 0.1) continue;
    double F = metric_eval(kBall3, xs[i], ys[i]);
    double Fs = cometric_eval(kBall3, xs[i], xis[i]);
    CHECK(dot(ys[i], xis[i]) <= F * Fs * (1 + 1e-8));
  }
}

TEST_CASE("metric reversibility") {
  auto mink = FinslerMetricSpec::minkowski(MinkowskiNorm::power_sum(3, 2));
  CHECK(metric_reversibility(mink, {0.3, 0.1, 0}) == Approx(1.0).epsilon(1e-8));
  CHECK(metric_reversibility(kBall3, {0.5, 0, 0}) == Approx(3.0).epsilon(1e-9));
  // the sup is approached along |x| -> 1
  auto a05 = FinslerMetricSpec::interpolated_funk(3, 0.5);
  double lam = metric_reversibility(a05, {0.999, 0, 0}, 256);
  CHECK(lam == Approx(3.0).epsilon(0.01));
  // Funk bracket at general points: lambda phi = 1 collapses it to (1+phi)/(1-phi)
  for (auto& x : sample_ball_points(3, 5, 0.7)) {
    double phi = norm2(x);
    double l = metric_reversibility(kBall3, x);
    CHECK(l == Approx((1 + phi) / (1 - phi)).epsilon(1e-7));
  }
}

TEST_CASE("forward distance and its special values") {
  Vec o = {0, 0, 0}, h = {0.5, 0, 0};
  CHECK(funk_distance(kBall3, o, h) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(funk_distance(kBall3, h, o) == Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(funk_distance(kBall3, h, h) == 0.0);
  CHECK_THROWS_AS(funk_distance(kBall3, o, {1.2, 0, 0}), std::domain_error);

  // d(0,x) = -ln(1-phi(x)) on a generic domain
  auto spec = FinslerMetricSpec::funk(MinkowskiNorm::ellipsoid({1.0, 0.6, 1.3}));
  for (auto& x : sample_ball_points(3, 20, 0.6)) {
    CHECK(funk_distance(spec, o, x) == Approx(-std::log1p(-spec.norm(x))).epsilon(1e-11));
    CHECK(funk_distance(spec, x, o) == Approx(std::log1p(spec.norm(-x))).epsilon(1e-11));
  }
}

TEST_CASE("triangle inequality and asymmetry") {
  auto pts = sample_ball_points(3, 60, 0.85);
  for (size_t i = 0; i + 2 < pts.size(); i += 3) {
    double d12 = funk_distance(kBall3, pts[i], pts[i + 1]);
    double d13 = funk_distance(kBall3, pts[i], pts[i + 2]);
    double d32 = funk_distance(kBall3, pts[i + 2], pts[i + 1]);
    CHECK(d12 <= d13 + d32 + 1e-9);
    double d21 = funk_distance(kBall3, pts[i + 1], pts[i]);
    CHECK(d12 > 0);
    CHECK(d21 > 0);
    CHECK(std::isfinite(d12 / d21));
  }
}

TEST_CASE("Hilbert distance is symmetric") {
  auto pts = sample_ball_points(3, 40, 0.9);
  for (size_t i = 0; i + 1 < pts.size(); i += 2) {
    double d = funk_distance(kHilbert3, pts[i], pts[i + 1]);
    double dr = funk_distance(kHilbert3, pts[i + 1], pts[i]);
    CHECK(d == Approx(dr).margin(1e-10));
  }
}

TEST_CASE("forward completeness proxy and reversibility blow-up") {
  Vec o = {0, 0, 0};
  Vec dir = normalized({0.3, -0.2, 0.93});
  double prev = 0;
  for (int k = 1; k <= 12; ++k) {
    double rho = 1.0 - std::pow(10.0, -k / 3.0);
    Vec x = rho * dir;
    double d = funk_distance(kBall3, o, x);
    CHECK(d > prev);  // monotone growth toward the boundary
    prev = d;
    CHECK(funk_distance(kBall3, x, o) <= std::log(2.0) + 1e-12);  // backward stays bounded
  }
  CHECK(prev > 9.0);
  for (double rho : {0.9, 0.99, 0.999}) {
    Vec x = rho * dir;
    double lam = metric_reversibility(kBall3, x);
    CHECK(lam >= (1 + rho) / (1 - rho) * (1 - 1e-9));
  }
}

TEST_CASE("spray coefficients") {
  auto mink = FinslerMetricSpec::minkowski(MinkowskiNorm::power_sum(3, 2));
  auto G0 = spray_coefficients(mink, {0.2, 0.1, 0}, {1.0, -0.5, 2.0});
  for (double g : G0) CHECK(g == Approx(0.0).margin(1e-14));

  // Funk spray G = (F/2) y, including the worked example G = (1,0,0)
  auto Ge = spray_coefficients(kBall3, {0.5, 0, 0}, {1, 0, 0});
  CHECK(Ge[0] == Approx(1.0).epsilon(1e-10));
  CHECK(Ge[1] == Approx(0.0).margin(1e-12));
  auto xs = sample_ball_points(3, 10);
  auto ys = sample_vectors(3, 10, 91);
  for (size_t i = 0; i < xs.size(); ++i) {
    if (norm2(ys[i]) < 0.1) continue;
    double F = metric_eval(kBall3, xs[i], ys[i]);
    auto G = spray_coefficients(kBall3, xs[i], ys[i]);
    for (int j = 0; j < 3; ++j)
      CHECK(G[j] == Approx(0.5 * F * ys[i][j]).margin(1e-10 * (1 + F)));
    // 2-homogeneity in y
    auto G2 = spray_coefficients(kBall3, xs[i], 2.0 * ys[i]);
    for (int j = 0; j < 3; ++j) CHECK(G2[j] == Approx(4.0 * G[j]).epsilon(1e-8));
  }
}

TEST_CASE("geodesics: straight traces, speed law, arclength consistency") {
  auto mink = FinslerMetricSpec::minkowski(MinkowskiNorm::euclidean(3));
  auto line = geodesic_integrate(mink, {0.1, 0, 0}, {0, 1, 0}, 0.5, 100);
  for (auto& st : line) {
    CHECK(st.position[0] == Approx(0.1).margin(1e-12));
    CHECK(st.position[1] == Approx(st.parameter).margin(1e-12));
    CHECK(metric_eval(mink, st.position, st.velocity) == Approx(1.0).epsilon(1e-12));
  }

  // Funk ball from the origin along e1 up to arclength ln 2 ends at e1/2,
  // and |x(t)| = 1 - e^-t along the way (unit-speed radial law)
  auto states = geodesic_integrate(kBall3, {0, 0, 0}, {1, 0, 0}, std::log(2.0), 700);
  auto& last = states.back();
  CHECK(last.position[0] == Approx(0.5).margin(1e-6));
  CHECK(last.position[1] == Approx(0.0).margin(1e-12));
  for (size_t i = 0; i < states.size(); i += 100) {
    CHECK(states[i].position[0] == Approx(-std::expm1(-states[i].parameter)).margin(1e-6));
    CHECK(metric_eval(kBall3, states[i].position, states[i].velocity) ==
          Approx(1.0).epsilon(1e-6));
  }

  // integrated arclength to a generic target equals the ray-formula distance
  auto pts = sample_ball_points(3, 6, 0.7);
  for (size_t i = 0; i + 1 < pts.size(); i += 2) {
    double ray = funk_distance(kBall3, pts[i], pts[i + 1]);
    double geo = geodesic_arclength_to_point(kBall3, pts[i], pts[i + 1]);
    CHECK(geo == Approx(ray).margin(1e-6));
  }

  // interpolated family: straight chords, arclength matches the combined form
  auto a05 = FinslerMetricSpec::interpolated_funk(3, 0.5);
  Vec p = {0.1, -0.2, 0.05}, q = {0.4, 0.3, -0.1};
  CHECK(geodesic_arclength_to_point(a05, p, q) ==
        Approx(funk_distance(a05, p, q)).margin(1e-6));
}

TEST_CASE("projective factor") {
  CHECK(projective_factor(kHilbert3, {0, 0, 0}, {0.2, 1.0, 0}) == Approx(0.0).margin(1e-12));
  CHECK(projective_factor(kBall3, {0.5, 0, 0}, {1, 0, 0}) == Approx(1.0).epsilon(1e-12));
  CHECK(projective_factor(kHilbert3, {0.5, 0, 0}, {1, 0, 0}) ==
        Approx(2.0 / 3.0).epsilon(1e-10));
  // generic formula agrees on every kind that carries position dependence
  auto xs = sample_ball_points(3, 8);
  auto ys = sample_vectors(3, 8, 222);
  for (size_t i = 0; i < xs.size(); ++i) {
    if (norm2(ys[i]) < 0.1) continue;
    CHECK(projective_factor_generic(kBall3, xs[i], ys[i]) ==
          Approx(projective_factor(kBall3, xs[i], ys[i])).margin(1e-9));
    CHECK(projective_factor_generic(kHilbert3, xs[i], ys[i]) ==
          Approx(projective_factor(kHilbert3, xs[i], ys[i])).margin(1e-9));
  }
}

TEST_CASE("eikonal residual") {
  Vec o = {0, 0, 0};
  CHECK(eikonal_residual(kBall3, o, {0.3, 0.2, 0}) < 1e-6);
  auto ell = FinslerMetricSpec::funk(MinkowskiNorm::ellipsoid({1.0, 0.6, 1.3}));
  for (auto& x : sample_ball_points(3, 5, 0.5)) {
    CHECK(eikonal_residual(ell, o, x) < 1e-5);
  }
  // irreversibility witness: reversing the differential breaks the identity
  Vec x = {0.4, 0.1, 0.0};
  double h = 1e-6;
  Vec dr(3);
  for (int i = 0; i < 3; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    dr[i] = (funk_distance(kBall3, o, xp) - funk_distance(kBall3, o, xm)) / (2 * h);
  }
  CHECK(std::fabs(cometric_eval(kBall3, x, -dr) - 1.0) > 0.1);
  CHECK_THROWS_AS(eikonal_residual(kBall3, o, o), std::domain_error);
}
