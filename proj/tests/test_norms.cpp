#include <catch2/catch_amalgamated.hpp>

#include "finsler/norms.hpp"
#include "helpers.hpp"

using namespace finsler;
using Catch::Approx;
using test_helpers::sample_vectors;

TEST_CASE("norm evaluation on the reference families") {
  CHECK(eval_norm(MinkowskiNorm::euclidean(2), {3, 4}) == Approx(5.0));
  // (1^4 + 1^4)^(1/4) = 2^(1/4)
  CHECK(eval_norm(MinkowskiNorm::power_sum(2, 2), {1, 1}) ==
        Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
  // sqrt(sqrt(1) + 1) on the (1,0),(0,0) split point
  CHECK(eval_norm(MinkowskiNorm::quartic_split(2, 2), {1, 0, 0, 0}) ==
        Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eval_norm(MinkowskiNorm::ellipsoid({1.0, 0.5}), {0, 0.5}) == Approx(1.0));
  CHECK(eval_norm(MinkowskiNorm::euclidean(3), {0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(eval_norm(MinkowskiNorm::euclidean(3), {1, 2}), std::invalid_argument);
}

TEST_CASE("dual norm closed forms and brute-force oracle") {
  CHECK(dual_norm(MinkowskiNorm::euclidean(2), {3, 4}) == Approx(5.0));
  CHECK(dual_norm(MinkowskiNorm::power_sum(3, 2), {0, 0, 0}) == 0.0);

  // l4 conjugate at (1,1): brute-force maximization of <y,xi> over the l4
  // unit sphere, refined on a fine angular grid, must match 2^(3/4)
  auto l4 = MinkowskiNorm::power_sum(2, 2);
  Vec xi = {1, 1};
  double brute = 0;
  for (int i = 0; i < 200000; ++i) {
    double th = 2 * std::numbers::pi * i / 200000;
    Vec y = {std::cos(th), std::sin(th)};
    brute = std::max(brute, dot(y, xi) / l4(y));
  }
  double closed = dual_norm(l4, xi);
  CHECK(closed == Approx(std::pow(2.0, 0.75)).epsilon(1e-14));
  CHECK(brute == Approx(closed).epsilon(1e-8));

  // quartic split goes through the generic ascent path
  auto qs = MinkowskiNorm::quartic_split(1, 1);
  double generic = dual_norm(qs, {1.0, 0.5});
  double brute_qs = 0;
  for (int i = 0; i < 200000; ++i) {
    double th = 2 * std::numbers::pi * i / 200000;
    Vec y = {std::cos(th), std::sin(th)};
    brute_qs = std::max(brute_qs, (y[0] + 0.5 * y[1]) / qs(y));
  }
  CHECK(generic == Approx(brute_qs).epsilon(1e-7));
}

TEST_CASE("legendre transform") {
  auto eu = MinkowskiNorm::euclidean(2);
  auto L = legendre_transform(eu, {3, 4});
  CHECK(L[0] == Approx(3.0).epsilon(1e-12));
  CHECK(L[1] == Approx(4.0).epsilon(1e-12));
  CHECK(legendre_transform(eu, {0, 0}) == Vec{0, 0});

  // l4 at an axis point: gradient of phi^2/2, cross-checked by differences
  auto l4 = MinkowskiNorm::power_sum(2, 2);
  auto La = legendre_transform(l4, {1, 0});
  CHECK(La[0] == Approx(1.0).epsilon(1e-10));
  CHECK(La[1] == Approx(0.0).margin(1e-10));
  double h = 1e-6;
  auto f2 = [&](Vec y) { return 0.5 * l4(y) * l4(y); };
  for (auto& y : sample_vectors(2, 10)) {
    if (norm2(y) < 0.2) continue;
    auto L2 = legendre_transform(l4, y);
    for (int j = 0; j < 2; ++j) {
      Vec yp = y, ym = y;
      yp[j] += h;
      ym[j] -= h;
      CHECK(L2[j] == Approx((f2(yp) - f2(ym)) / (2 * h)).margin(1e-7));
    }
  }
}

TEST_CASE("duality gap and legendre round trip") {
  std::vector<MinkowskiNorm> norms = {MinkowskiNorm::euclidean(3),
                                      MinkowskiNorm::power_sum(3, 2),
                                      MinkowskiNorm::ellipsoid({1.0, 0.7, 1.4}),
                                      MinkowskiNorm::randers({0.3, 0.1, -0.2})};
  auto ys = sample_vectors(3, 40);
  auto xis = sample_vectors(3, 25, 999);
  for (auto& nm : norms) {
    for (auto& y : ys) {
      if (norm2(y) < 0.1) continue;
      for (auto& xi : xis) {
        if (norm2(xi) < 0.1) continue;
        CHECK(dot(y, xi) <= eval_norm(nm, y) * dual_norm(nm, xi) * (1 + 1e-8));
      }
      // phi*(L(y)) = phi(y) and <y, L(y)> = phi(y) phi*(L(y))
      auto L = legendre_transform(nm, y);
      double lhs = dual_norm(nm, L);
      CHECK(lhs == Approx(eval_norm(nm, y)).epsilon(1e-8));
      CHECK(dot(y, L) == Approx(eval_norm(nm, y) * lhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("homogeneity and triangle inequality") {
  auto nm = MinkowskiNorm::power_sum(3, 3);
  auto rd = MinkowskiNorm::randers({0.4, 0.0, 0.0});
  for (auto& y : sample_vectors(3, 100)) {
    if (norm2(y) < 0.05) continue;
    for (double a : {0.5, 2.0, 7.0}) {
      CHECK(std::fabs(eval_norm(nm, a * y) - a * eval_norm(nm, y)) <= 1e-12 * eval_norm(nm, y) * a);
      CHECK(std::fabs(eval_norm(rd, a * y) - a * eval_norm(rd, y)) <= 1e-12 * eval_norm(rd, y) * a);
    }
  }
  auto pairs = sample_vectors(3, 60, 321);
  for (size_t i = 0; i + 1 < pairs.size(); i += 2) {
    const Vec &y1 = pairs[i], &y2 = pairs[i + 1];
    CHECK(eval_norm(nm, y1 + y2) <= (eval_norm(nm, y1) + eval_norm(nm, y2)) * (1 + 1e-10));
    CHECK(eval_norm(rd, y1 + y2) <= (eval_norm(rd, y1) + eval_norm(rd, y2)) * (1 + 1e-10));
  }
}

TEST_CASE("reversibility") {
  CHECK(norm_reversibility(MinkowskiNorm::euclidean(3)) == Approx(1.0).epsilon(1e-10));
  CHECK(norm_reversibility(MinkowskiNorm::power_sum(3, 2)) == Approx(1.0).epsilon(1e-10));
  CHECK(norm_reversibility(MinkowskiNorm::power_sum(2, 5)) == Approx(1.0).epsilon(1e-10));
  // phi(y) = |y| + y1/2: sup phi(-y)/phi(y) = (1 + 1/2)/(1 - 1/2) = 3 at y = -e1
  CHECK(norm_reversibility(MinkowskiNorm::randers({0.5, 0.0})) == Approx(3.0).epsilon(1e-9));
}

TEST_CASE("fundamental tensor of a norm") {
  auto eu = MinkowskiNorm::euclidean(3);
  auto g = norm_fundamental_tensor(eu, {0.3, -1.0, 0.4});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(g(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-12));

  std::vector<MinkowskiNorm> norms = {MinkowskiNorm::power_sum(3, 2),
                                      MinkowskiNorm::randers({0.2, -0.3, 0.1}),
                                      MinkowskiNorm::quartic_split(2, 1)};
  for (auto& nm : norms) {
    for (auto& y : sample_vectors(3, 10, 77)) {
      if (norm2(y) < 0.3) continue;
      auto gy = norm_fundamental_tensor(nm, y);
      CHECK(is_spd(gy));
      // Euler identity g_y(y,y) = phi(y)^2 and g_y y = Legendre covector
      double phi = eval_norm(nm, y);
      CHECK(dot(y, matvec(gy, y)) == Approx(phi * phi).epsilon(1e-10));
      auto L = legendre_transform(nm, y);
      auto gyy = matvec(gy, y);
      for (int j = 0; j < 3; ++j) CHECK(gyy[j] == Approx(L[j]).margin(1e-8 * (1 + phi * phi)));
    }
  }
  CHECK_THROWS_AS(norm_fundamental_tensor(eu, {0, 0, 0}), std::domain_error);
}

TEST_CASE("convex domain boundary ray") {
  ConvexDomain dom{MinkowskiNorm::ellipsoid({1.0, 0.5})};
  Vec x = {0.2, 0.1}, d = {1.0, 0.3};
  double t = dom.boundary_ray_parameter(x, d);
  Vec z = x + t * d;
  CHECK(dom.norm(z) == Approx(1.0).margin(1e-12));
  CHECK(dom.contains(x));
  CHECK_FALSE(dom.contains({2.0, 0.0}));
}
