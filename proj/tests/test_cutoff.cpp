#include <doctest.h>

#include <cmath>
#include <memory>

#include "nloc/cutoff.hpp"
#include "nloc/error.hpp"

using namespace nloc;

namespace {

const CutoffFunction& cutoff(CutoffKind kind, double eps = 1.0) {
  static std::shared_ptr<CutoffFunction> cache[2][2];
  auto& slot = cache[kind == CutoffKind::TypeC][eps < 1.0];
  if (!slot) {
    CutoffSpec s;
    s.kind = kind;
    s.epsilon = eps;
    slot = std::make_shared<CutoffFunction>(assemble_cutoff(s));
  }
  return *slot;
}

}  // namespace

TEST_CASE("delta sequence") {
  const auto d = build_delta_sequence(1.0, 1, 4096);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 1.0);
  // mpmath: 1 / (2 ln(2)^2), 1 / (3 ln(3)^2)
  CHECK(d[2] == doctest::Approx(1.04068449050280389).epsilon(1e-14));
  CHECK(d[3] == doctest::Approx(0.27617848323007434).epsilon(1e-14));
  double sum = 0.0;
  for (double v : d) sum += v;
  CHECK(sum <= 4.0);

  const auto h = build_delta_sequence(0.5, 1, 64);
  CHECK(h[2] == doctest::Approx(0.86642667132840870).epsilon(1e-14));
  CHECK_THROWS_AS(build_delta_sequence(0.0, 1, 64), InvalidArgument);
}

TEST_CASE("bump against brute-force convolution") {
  // Density of a sum of uniforms on [-delta_j, delta_j], j = 0..4, by the
  // inclusion-exclusion formula in 30-digit arithmetic.
  const auto b1 = build_bump_from_deltas(build_delta_sequence(1.0, 1, 4), 1.0, 1, 1 << 14);
  CHECK(b1.value(0.0) == doctest::Approx(0.366183048085104665).epsilon(1e-8));
  CHECK(b1.value(0.5) == doctest::Approx(0.336154734715217076).epsilon(1e-8));
  CHECK(b1.value(1.7) == doctest::Approx(0.109813572364027434).epsilon(1e-8));
  CHECK(b1.support == doctest::Approx(3.44694853504572874).epsilon(1e-14));

  const auto b2 = build_bump_from_deltas(build_delta_sequence(0.5, 1, 4), 0.5, 1, 1 << 14);
  CHECK(b2.value(0.0) == doctest::Approx(0.386538728756447518).epsilon(1e-8));
  CHECK(b2.value(1.7) == doctest::Approx(0.100722818037370313).epsilon(1e-8));

  CHECK(std::abs(b1.value(b1.support + 0.01)) < 1e-10);
  CHECK(b1.cdf(-b1.support - 0.01) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(b1.cdf(b1.support + 0.01) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(b1.total_mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("automatic truncation order") {
  CHECK(auto_truncation_order(1.0, 1) == 4096);
  CHECK(auto_truncation_order(0.5, 1) == 16384);
}

TEST_CASE("type a cutoff") {
  const auto& a = cutoff(CutoffKind::TypeA);
  CHECK(a(0.7) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a(2.0) == 0.0);
  CHECK(a(2.5) == 0.0);
  for (int i = 0; i <= 400; ++i) {
    const double v = a(2.0 * i / 400.0);
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(check_partition_of_unity(a, 1.0, 100.0), InvalidArgument);
}

TEST_CASE("type c cutoff") {
  for (double eps : {1.0, 0.5}) {
    const auto& c = cutoff(CutoffKind::TypeC, eps);
    CHECK(c(0.49) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c(2.01) == 0.0);
    CHECK(c(1.3) * c(1.3) + c(0.65) * c(0.65) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(check_partition_of_unity(c, 1.0, 100.0) < 1e-8);
  }
  // At t = 2^m only ahat(1) and ahat(1/2) can be nonzero.
  const auto& c = cutoff(CutoffKind::TypeC);
  int nonzero = 0;
  for (int nu = 0; nu < 20; ++nu) nonzero += std::abs(c(std::ldexp(8.0, -nu))) > 0.0;
  CHECK(nonzero <= 2);
}

TEST_CASE("derivative norms") {
  const auto& a = cutoff(CutoffKind::TypeA);
  const auto d = estimate_derivative_norms(a, 6);
  CHECK(d[0].spectral == doctest::Approx(1.0).epsilon(1e-9));
  // ahat(t) = H(scale (1.5 - t)) so ||ahat'|| = scale * max h.
  CHECK(d[1].spectral == doctest::Approx(a.scale * a.bump->peak()).epsilon(1e-6));
  CHECK(d[3].spectral <= 88.0 * std::pow(88.0, 3) * 27.0 * std::pow(std::log(3.0), 6));
  for (int k = 1; k <= 6; ++k) CHECK(d[static_cast<std::size_t>(k)].spectral <= derivative_bound(1.0, k));
  // ahat^(k)(1) = 0
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(a.exact_derivative(k, 1.0)) < 1e-8 * d[static_cast<std::size_t>(k)].spectral);
}

TEST_CASE("spec round trip and validation") {
  CutoffSpec s;
  s.kind = CutoffKind::TypeC;
  s.epsilon = 0.5;
  const auto back = cutoff_spec_from_json(to_json(s));
  CHECK(back.kind == CutoffKind::TypeC);
  CHECK(back.epsilon == 0.5);
  CHECK(cutoff_kind_from_string("typeA") == CutoffKind::TypeA);
  CHECK_THROWS_AS(cutoff_kind_from_string("d"), InvalidArgument);
  s.epsilon = 1.5;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}
