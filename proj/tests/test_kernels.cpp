#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/kernels.hpp"
#include "nloc/orthopoly.hpp"
#include "nloc/quadrature.hpp"

using namespace nloc;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const CutoffFunction> typeA() {
  static const auto c = [] {
    CutoffSpec s;
    s.kind = CutoffKind::TypeA;
    return std::make_shared<const CutoffFunction>(assemble_cutoff(s));
  }();
  return c;
}

std::shared_ptr<const CutoffFunction> typeC() {
  static const auto c = [] {
    CutoffSpec s;
    s.kind = CutoffKind::TypeC;
    return std::make_shared<const CutoffFunction>(assemble_cutoff(s));
  }();
  return c;
}

// a(x) = (1/pi) int_0^2 ahat(s) cos(s x) ds by composite Simpson.
double inverse_transform(const CutoffFunction& c, double x) {
  const int N = 40000;
  const double h = 2.0 / N;
  double acc = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double s = i * h;
    const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * c(s) * std::cos(s * x);
  }
  return acc * h / 3.0 / pi;
}

}  // namespace

TEST_CASE("trig kernel") {
  KernelInstance F(FamilyParams::trig(), typeA(), 4);
  for (double t : {0.1, 0.7, 2.3}) CHECK(trig_kernel(F, -t) == doctest::Approx(trig_kernel(F, t)).epsilon(1e-14));
  // Fourier coefficient at frequency 2n vanishes.
  const int N = 64;
  double c = 0.0;
  for (int k = 0; k < N; ++k) c += trig_kernel(F, 2 * pi * k / N) * std::cos(8.0 * 2 * pi * k / N);
  CHECK(std::abs(c / N) < 1e-13);
  // F_n(t) = pi n sum_j a(n (t + 2 pi j))
  for (double t : {0.0, 0.4, 1.9, 3.0}) {
    double p = 0.0;
    for (int j = -20; j <= 20; ++j) p += inverse_transform(*typeA(), 4.0 * (t + 2 * pi * j));
    CHECK(trig_kernel(F, t) == doctest::Approx(pi * 4.0 * p).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("chebyshev kernel") {
  KernelInstance T(FamilyParams::trig(), typeA(), 32);
  KernelInstance C(FamilyParams::chebyshev(), typeA(), 32);
  KernelInstance J(FamilyParams::jacobi(-0.5, -0.5), typeA(), 32);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = U(rng);
    const double y = U(rng);
    const double th = std::acos(x);
    const double ph = std::acos(y);
    const double v = C(x, y);
    CHECK(v == doctest::Approx((trig_kernel(T, th - ph) + trig_kernel(T, th + ph)) / pi).epsilon(1e-10).scale(1.0));
    CHECK(v == doctest::Approx(C(y, x)).epsilon(1e-12).scale(1.0));
    CHECK(J(x, y) == doctest::Approx(v).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("reproducing property") {
  const int n = 16;
  auto check = [&](const FamilyParams& p, const WeightId& w, const std::vector<double>& xs) {
    for (const auto& cut : {typeA(), typeC()}) {
      KernelInstance K(p, cut, n);
      const auto r = gauss_rule(w, 2 * n + 4);
      for (double x : xs) {
        const auto bx = basis_values(p, 2 * n - 1, x);
        for (int m = 0; m < 2 * n; ++m) {
          double s = 0.0;
          for (int i = 0; i < r.m; ++i) {
            double y = r.nodes[i];
            double wt = r.weights[i];
            if (w.kind == WeightKind::Hermite) wt = r.scaled_weights[i];
            if (w.kind == WeightKind::Laguerre) {
              wt = r.scaled_weights[i] * std::pow(y, w.alpha) / 2.0;
              y = std::sqrt(y);
            }
            s += wt * K(x, y) * basis_values(p, m, y)[m];
          }
          CHECK(s == doctest::Approx((*cut)(static_cast<double>(m) / n) * bx[m]).epsilon(1e-9).scale(1.0));
        }
      }
    }
  };
  check(FamilyParams::chebyshev(), WeightId::jacobi(-0.5, -0.5), {-0.8, 0.3});
  check(FamilyParams::jacobi(2.0, 0.5), WeightId::jacobi(2.0, 0.5), {-0.4, 0.9});
  check(FamilyParams::hermite(1), WeightId::hermite(), {-2.0, 0.5});
  check(FamilyParams::laguerre({2.0}), WeightId::laguerre(2.0), {0.7, 3.0});
}

TEST_CASE("jacobi Q") {
  // n = 1, TypeA, alpha = beta = 0: Q = (1/2)(ahat(0) P_0 + 3 ahat(1) P_1) = (1 + 3x)/2.
  KernelInstance K(FamilyParams::jacobi(0.0, 0.0), typeA(), 1);
  for (double x : {-1.0, -0.3, 0.25, 1.0}) CHECK(jacobi_Q(K, x) == doctest::Approx((1.0 + 3.0 * x) / 2.0).epsilon(1e-12));
  for (auto ab : {std::pair{0.0, 0.0}, std::pair{2.0, 0.5}, std::pair{0.5, 2.0}}) {
    KernelInstance L(FamilyParams::jacobi(ab.first, ab.second), typeA(), 32);
    const double top = jacobi_Q(L, 1.0);
    for (double x : {-0.9, 0.0, 0.6, 0.99}) {
      CHECK(std::abs(jacobi_Q(L, x) - jacobi_kernel(L, x, 1.0)) <= 1e-8 * std::abs(top));
    }
  }
}

TEST_CASE("summation by parts") {
  const auto& a = *typeA();
  CHECK(verify_summation_by_parts(a, 0.0, 0.0, 64, 3, 0.5) < 1e-7);
  for (auto ab : {std::pair{0.0, 0.0}, std::pair{2.0, 0.5}, std::pair{-0.5, 1.5}}) {
    for (int n : {32, 64}) {
      for (int k = 1; k <= 3; ++k) {
        for (double x : {-0.7, 0.2, 0.95}) CHECK(verify_summation_by_parts(a, ab.first, ab.second, n, k, x) < 1e-7);
      }
    }
    const double first = summation_by_parts_first(a, ab.first, ab.second, 64, 0.3);
    const double ladder = summation_by_parts_sum(summation_by_parts_state(a, ab.first, ab.second, 64, 1), 0.3);
    CHECK(first == doctest::Approx(ladder).epsilon(1e-9).scale(1.0));
  }
  const auto s = summation_by_parts_state(a, 0.0, 0.0, 64, 2);
  for (int j = 0; j <= 64 / 2 - 2; ++j) CHECK(s.A[j] == 0.0);
}

TEST_CASE("sphere kernel") {
  for (int d : {2, 3}) {
    const double lam = (d - 1) / 2.0;
    KernelInstance S(FamilyParams::sphere(d), typeA(), 16);
    KernelInstance Q(FamilyParams::jacobi(lam - 0.5, lam - 0.5), typeA(), 16);
    const double c = sphere_jacobi_constant(d);
    const double top = std::abs(sphere_kernel(S, 1.0));
    for (int i = 0; i <= 40; ++i) {
      const double t = -1.0 + i / 20.0;
      CHECK(std::abs(sphere_kernel(S, t) - c * jacobi_Q(Q, t)) <= 1e-8 * top);
    }
  }
  // Reproducing on S^2 for zonal Legendre harmonics through a product rule.
  const int n = 4;
  KernelInstance S(FamilyParams::sphere(2), typeA(), n);
  const auto lat = gauss_rule(WeightId::jacobi(0.0, 0.0), 12);
  const int nphi = 24;
  const double xi[3] = {0.3, -0.5, std::sqrt(1.0 - 0.34)};
  for (int l = 0; l <= 3; ++l) {
    double acc = 0.0;
    for (int i = 0; i < lat.m; ++i) {
      const double z = lat.nodes[i];
      const double r = std::sqrt(1.0 - z * z);
      for (int k = 0; k < nphi; ++k) {
        const double ph = 2 * pi * k / nphi;
        const double eta[3] = {r * std::cos(ph), r * std::sin(ph), z};
        const double dot = xi[0] * eta[0] + xi[1] * eta[1] + xi[2] * eta[2];
        acc += lat.weights[i] * (2 * pi / nphi) * sphere_kernel(S, std::clamp(dot, -1.0, 1.0)) *
               jacobi_all({0.0, 0.0}, l, z)[l];
      }
    }
    const double expect = (*typeA())(static_cast<double>(l) / n) * jacobi_all({0.0, 0.0}, l, xi[2])[l];
    CHECK(acc == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("ball kernel") {
  // x = y = 0: (1/vol) sum_j ahat(j/n) (j + l)/l <C_j^l(u)>, mu = 1/2, d = 2, l = 1,
  // where <.> averages over (1 - u^2)^{-1/2} du (Gauss-Chebyshev).
  const int n = 8;
  KernelInstance B(FamilyParams::ball(0.5, 2), typeA(), n);
  const int N = 64;
  double ref = 0.0;
  for (int j = 0; j < 2 * n; ++j) {
    double avg = 0.0;
    for (int i = 1; i <= N; ++i) {
      const double u = std::cos((2.0 * i - 1.0) * pi / (2.0 * N));
      double u0 = 1.0;
      double u1 = 2.0 * u;
      double uj = j == 0 ? 1.0 : u1;
      for (int k = 2; k <= j; ++k) {
        uj = 2.0 * u * u1 - u0;
        u0 = u1;
        u1 = uj;
      }
      avg += uj / N;
    }
    ref += (*typeA())(static_cast<double>(j) / n) * (j + 1.0) * avg;
  }
  ref /= ball_volume(0.5, 2);
  CHECK(B(Point{0.0, 0.0}, Point{0.0, 0.0}) == doctest::Approx(ref).epsilon(1e-9));
  CHECK(ball_volume(0.5, 2) == doctest::Approx(pi).epsilon(1e-14));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  for (int i = 0; i < 5; ++i) {
    const Point x{U(rng), U(rng)};
    const Point y{U(rng), U(rng)};
    CHECK(B(x, y) == doctest::Approx(B(y, x)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("simplex kernel") {
  // d = 1, kappa = (1/2, 1/2): weight 1 on [0, 1]. Orthonormal polynomials by
  // Gram-Schmidt of monomials under a 20-point Gauss-Legendre rule.
  const int n = 4;
  KernelInstance S(FamilyParams::simplex({0.5, 0.5}), typeA(), n);
  const auto g = gauss_rule(WeightId::jacobi(0.0, 0.0), 20);
  std::vector<double> y(20), w(20);
  for (int i = 0; i < 20; ++i) {
    y[i] = (g.nodes[i] + 1.0) / 2.0;
    w[i] = g.weights[i] / 2.0;
  }
  std::vector<std::vector<double>> p;  // coefficient vectors
  auto eval = [](const std::vector<double>& c, double t) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    return v;
  };
  for (int k = 0; k <= 3; ++k) {
    std::vector<double> c(k + 1, 0.0);
    c[k] = 1.0;
    for (const auto& q : p) {
      double ip = 0.0;
      for (int i = 0; i < 20; ++i) ip += w[i] * eval(c, y[i]) * eval(q, y[i]);
      for (std::size_t m = 0; m < q.size(); ++m) c[m] -= ip * q[m];
    }
    double nn = 0.0;
    for (int i = 0; i < 20; ++i) nn += w[i] * eval(c, y[i]) * eval(c, y[i]);
    for (double& v : c) v /= std::sqrt(nn);
    p.push_back(c);
  }
  for (double x : {0.2, 0.65}) {
    for (int k = 0; k <= 3; ++k) {
      double s = 0.0;
      for (int i = 0; i < 20; ++i) s += w[i] * S(Point{x}, Point{y[i]}) * eval(p[k], y[i]);
      CHECK(s == doctest::Approx((*typeA())(static_cast<double>(k) / n) * eval(p[k], x)).epsilon(1e-9).scale(1.0));
    }
  }
  KernelInstance S2(FamilyParams::simplex({0.5, 0.5, 0.5}), typeA(), 8);
  CHECK(S2(Point{0.3, 0.2}, Point{0.1, 0.5}) == doctest::Approx(S2(Point{0.1, 0.5}, Point{0.3, 0.2})).epsilon(1e-10));
}

TEST_CASE("laguerre K kernel") {
  const auto& a = *typeA();
  const int n = 8;
  const double t = 1.7;
  std::vector<double> L(2 * n + 1);
  laguerre_scaled_values(0.0 + 0 + 1, 2 * n, t, L.data());
  double ref = 0.0;
  for (int m = 0; m <= 2 * n; ++m) ref += (a((m + 1.0) / n) - a(static_cast<double>(m) / n)) * L[m];
  CHECK(laguerre_K_kernel({0.0}, 1, n, 0, a, t) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
}

TEST_CASE("tensor blocks") {
  const Point x{1.0, -1.0};
  const Point y{1.0, 1.0};
  for (int m = 0; m <= 40; ++m) {
    const double sgn = m % 2 ? -1.0 : 1.0;
    CHECK(std::abs(tensor2d_block(TensorVariant::LegLeg, m, x, y) - (1.0 + sgn) / 8.0) < 1e-10);
    CHECK(std::abs(tensor2d_block(TensorVariant::ChebCheb, m, x, y) - (m == 0) / (pi * pi)) < 1e-10);
    CHECK(std::abs(tensor2d_block(TensorVariant::ChebLeg, m, x, y) - sgn / (2 * pi)) < 1e-10);
  }
  CHECK(std::abs(tensor2d_kernel(TensorVariant::ChebCheb, *typeA(), 64, x, y) - 1 / (pi * pi)) < 1e-10);
}

TEST_CASE("distance and weight factor") {
  CHECK(distance(FamilyParams::chebyshev(), {1.0}, {-1.0}) == doctest::Approx(pi));
  CHECK(distance(FamilyParams::jacobi(1.0, 2.0), {0.3}, {0.3}) == 0.0);
  CHECK(distance(FamilyParams::sphere(2), {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}) == 0.0);
  CHECK(weight_factor(FamilyParams::jacobi(-0.5, -0.5), 16, {0.3}) == doctest::Approx(1.0));
  CHECK(weight_factor(FamilyParams::ball(1.5, 2), 4, {0.0, 0.0}) == doctest::Approx(std::pow(1.25, 3.0)));
  CHECK(weight_factor(FamilyParams::laguerre({0.0}), 4, {0.0}) == doctest::Approx(0.5));
  // |sqrt(x_j) - sqrt(y_j)| <= rho(x, y) on T^2
  const auto p = FamilyParams::simplex({0.5, 0.5, 0.5});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double a = U(rng), b = U(rng), c = U(rng), e = U(rng);
    if (a + b > 1) { a = 1 - a; b = 1 - b; }
    if (c + e > 1) { c = 1 - c; e = 1 - e; }
    const double r = distance(p, {a, b}, {c, e});
    CHECK(std::abs(std::sqrt(a) - std::sqrt(c)) <= r + 1e-12);
    CHECK(std::abs(std::sqrt(b) - std::sqrt(e)) <= r + 1e-12);
  }
}

TEST_CASE("family params") {
  const auto p = family_params_from_json(to_json(FamilyParams::jacobi(2.0, 0.5)));
  CHECK(p.family == Family::Jacobi);
  CHECK(p.alpha == 2.0);
  CHECK(p.beta == 0.5);
  CHECK_THROWS_AS(family_from_string("bessel"), InvalidArgument);
  CHECK_THROWS_AS(KernelInstance(FamilyParams::jacobi(-2.0, 0.0), typeA(), 8), InvalidArgument);
  CHECK_THROWS_AS(KernelInstance(FamilyParams::chebyshev(), typeA(), 0), InvalidArgument);
}
