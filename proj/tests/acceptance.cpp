// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nloc/cutoff.hpp"
#include "nloc/decay.hpp"
#include "nloc/kernels.hpp"
#include "nloc/needlets.hpp"
#include "nloc/orthopoly.hpp"
#include "nloc/quadrature.hpp"

using namespace nloc;

namespace {

constexpr double pi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::shared_ptr<const CutoffFunction> build(CutoffKind kind, double eps = 1.0) {
  CutoffSpec s;
  s.kind = kind;
  s.epsilon = eps;
  return std::make_shared<const CutoffFunction>(assemble_cutoff(s));
}

std::shared_ptr<const CutoffFunction> typeA() {
  static const auto c = build(CutoffKind::TypeA);
  return c;
}

std::shared_ptr<const CutoffFunction> typeC() {
  static const auto c = build(CutoffKind::TypeC);
  return c;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Cutoff validity.
Outcome cutoff_validity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  double partition = 0.0;
  for (double eps : {0.5, 1.0}) {
    for (auto kind : {CutoffKind::TypeA, CutoffKind::TypeC}) {
      const auto c = build(kind, eps);
      const int N = 40001;
      for (int i = 0; i < N; ++i) {
        const double t = 2.5 * i / (N - 1);
        const double v = (*c)(t);
        worst = std::max({worst, -v, v - 1.0});
        if (t >= 2.0 || (kind == CutoffKind::TypeC && t <= 0.5)) worst = std::max(worst, std::abs(v));
        if (kind == CutoffKind::TypeA && t <= 1.0) worst = std::max(worst, std::abs(v - 1.0));
        if (kind == CutoffKind::TypeC && t >= 1.0 && t <= 2.0) {
          const double w = (*c)(t / 2.0);
          worst = std::max(worst, std::abs(v * v + w * w - 1.0));
        }
      }
      if (kind == CutoffKind::TypeC) partition = std::max(partition, check_partition_of_unity(*c, 1.0, 1e4));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && partition < 1e-8 && secs < 10.0,
          "max deviation " + fmt("%.2e", worst) + ", partition " + fmt("%.2e", partition) + ", " +
              fmt("%.1f", secs) + " s"};
}

// 2. Derivative bound, k = 1..6 at eps = 1.
Outcome derivative_bound_check() {
  double worst = 0.0;
  for (const auto& c : {typeA(), typeC()}) {
    for (const auto& d : estimate_derivative_norms(*c, 6)) {
      if (d.k == 0) continue;
      double est = d.spectral;
      if (d.reliable) est = std::max(est, d.finite_difference);
      worst = std::max(worst, est / derivative_bound(1.0, d.k));
    }
  }
  return {worst <= 1.0, "max estimate/bound " + fmt("%.3e", worst)};
}

// 3. Exact kernel identities.
Outcome kernel_identities() {
  const auto t0 = Clock::now();
  const auto& A = typeA();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  KernelInstance T(FamilyParams::trig(), A, 32);
  KernelInstance C(FamilyParams::chebyshev(), A, 32);
  double cheb = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = U(rng);
    const double y = U(rng);
    const double th = std::acos(x);
    const double ph = std::acos(y);
    cheb = std::max(cheb, std::abs(C(x, y) - (trig_kernel(T, th - ph) + trig_kernel(T, th + ph)) / pi));
  }

  // Pointwise against the sup norm (the kernel has near-cancelling zeros)
  // and the coefficient ratio itself.
  double ratio = 0.0;
  for (int d : {2, 3, 4}) {
    const double lam = (d - 1) / 2.0;
    KernelInstance S(FamilyParams::sphere(d), A, 32);
    KernelInstance Q(FamilyParams::jacobi(lam - 0.5, lam - 0.5), A, 32);
    const double c = sphere_jacobi_constant(d);
    const double top = std::abs(sphere_kernel(S, 1.0));
    for (int i = 0; i < 50; ++i) {
      const double t = U(rng);
      ratio = std::max(ratio, std::abs(sphere_kernel(S, t) - c * jacobi_Q(Q, t)) / top);
    }
    const auto& a = S.series();
    const auto& b = Q.series();
    const double r0 = a[0] / b[0];
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (b[j] != 0.0) ratio = std::max(ratio, std::abs(a[j] / b[j] / r0 - 1.0));
    }
  }

  double sbp = 0.0;
  for (auto ab : {std::pair{0.0, 0.0}, std::pair{2.0, 0.5}, std::pair{-0.5, 1.5}}) {
    for (int n : {32, 64}) {
      for (int k = 1; k <= 3; ++k) {
        for (int i = 0; i < 10; ++i) sbp = std::max(sbp, verify_summation_by_parts(*A, ab.first, ab.second, n, k, U(rng)));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {cheb < 1e-10 && ratio < 1e-8 && sbp < 1e-7 && secs < 30.0,
          "chebyshev " + fmt("%.2e", cheb) + ", sphere ratio " + fmt("%.2e", ratio) + ", summation by parts " +
              fmt("%.2e", sbp) + ", " + fmt("%.1f", secs) + " s"};
}

// 4. Reproducing projection.
Outcome reproducing() {
  const int n = 32;
  std::mt19937_64 rng(42);
  double worst = 0.0;
  struct Case {
    FamilyParams p;
    WeightId w;
    double lo, hi;
  };
  const std::vector<Case> cases{
      {FamilyParams::chebyshev(), WeightId::jacobi(-0.5, -0.5), -1.0, 1.0},
      {FamilyParams::jacobi(0.0, 0.0), WeightId::jacobi(0.0, 0.0), -1.0, 1.0},
      {FamilyParams::jacobi(2.0, 0.5), WeightId::jacobi(2.0, 0.5), -1.0, 1.0},
      {FamilyParams::hermite(1), WeightId::hermite(), -5.0, 5.0},
      {FamilyParams::laguerre({0.0}), WeightId::laguerre(0.0), 0.0, 6.0},
      {FamilyParams::laguerre({2.0}), WeightId::laguerre(2.0), 0.0, 6.0},
  };
  for (const auto& cs : cases) {
    // Exact for L(x, .) phi_m: degree < 4n.
    const auto r = gauss_rule(cs.w, 2 * n + 8);
    std::vector<double> y(r.nodes.size()), w(r.nodes.size());
    std::vector<std::vector<double>> phi;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = r.nodes[i];
      w[i] = r.weights[i];
      if (cs.w.kind == WeightKind::Hermite) w[i] = r.scaled_weights[i];
      if (cs.w.kind == WeightKind::Laguerre) {
        w[i] = r.scaled_weights[i] * std::pow(r.nodes[i], cs.w.alpha) / 2.0;
        y[i] = std::sqrt(r.nodes[i]);
      }
      phi.push_back(basis_values(cs.p, 2 * n - 1, y[i]));
    }
    std::uniform_real_distribution<double> U(cs.lo, cs.hi);
    for (const auto& cut : {typeA(), typeC()}) {
      KernelInstance K(cs.p, cut, n);
      for (int t = 0; t < 20; ++t) {
        const double x = U(rng);
        const auto bx = basis_values(cs.p, 2 * n - 1, x);
        std::vector<double> kx(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) kx[i] = K(x, y[i]);
        for (int m = 0; m < 2 * n; ++m) {
          double s = 0.0;
          for (std::size_t i = 0; i < y.size(); ++i) s += w[i] * kx[i] * phi[i][static_cast<std::size_t>(m)];
          worst = std::max(worst, std::abs(s - (*cut)(static_cast<double>(m) / n) * bx[static_cast<std::size_t>(m)]));
        }
      }
    }
  }
  return {worst < 1e-8, "max error " + fmt("%.2e", worst)};
}

// 5. Tight-frame Parseval and round trip.
Outcome parseval() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  double defect = 0.0;
  double round = 0.0;
  struct Case {
    FamilyParams p;
    int J;
  };
  for (const auto& cs : {Case{FamilyParams::jacobi(0.0, 0.0), 5}, Case{FamilyParams::jacobi(2.0, 0.5), 5},
                         Case{FamilyParams::hermite(1), 4}, Case{FamilyParams::laguerre({0.0}), 4}}) {
    const auto S = build_needlet_system(cs.p, typeC(), cs.J);
    std::uniform_int_distribution<int> deg(0, S.capacity);
    double lo = -1.0;
    double hi = 1.0;
    if (cs.p.family == Family::Hermite) {
      hi = std::sqrt(2.0 * S.capacity + 1.0);
      lo = -hi;
    } else if (cs.p.family == Family::Laguerre) {
      lo = 0.0;
      hi = std::sqrt(4.0 * S.capacity + 2.0);
    }
    std::uniform_real_distribution<double> U(lo, hi);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> f(static_cast<std::size_t>(deg(rng)) + 1);
      for (auto& v : f) v = g(rng);
      defect = std::max(defect, parseval_check(S, f));
      const auto C = analyze(S, f);
      double err = 0.0;
      double mag = 0.0;
      for (int k = 0; k < 50; ++k) {
        const double x = U(rng);
        const auto b = S.basis(static_cast<int>(f.size()) - 1, x);
        double fx = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) fx += f[i] * b[i];
        err = std::max(err, std::abs(synthesize(S, C, x) - fx));
        mag = std::max(mag, std::abs(fx));
      }
      round = std::max(round, err / mag);
    }
  }
  const double secs = seconds_since(t0);
  return {defect < 1e-8 && round < 1e-7 && secs < 120.0,
          "Parseval defect " + fmt("%.2e", defect) + ", round trip " + fmt("%.2e", round) + ", " + fmt("%.1f", secs) +
              " s"};
}

// 6. Polynomial localization with sigma = 4.
Outcome polynomial_localization() {
  FitOptions opt;
  opt.form = BoundForm::Polynomial;
  opt.sigma = 4.0;
  std::string detail;
  bool ok = true;
  for (const auto& p : {FamilyParams::chebyshev(), FamilyParams::jacobi(0.0, 0.0)}) {
    EnvelopePlan plan;
    plan.weighted = p.family == Family::Jacobi;
    double lo = 1e300;
    double hi = 0.0;
    for (int n : {64, 128, 256}) {
      const double c = fit_bound(measure_envelope(KernelInstance(p, typeA(), n), plan), opt).c;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    ok = ok && hi / lo < 3.0;
    detail += (detail.empty() ? "" : ", ") + to_string(p.family) + " c in [" + fmt("%.0f", lo) + ", " + fmt("%.0f", hi) + "]";
  }
  return {ok, detail};
}

// 7. Sub-exponential localization and cutoff comparison.
Outcome subexponential_localization() {
  FitOptions opt;
  std::string detail;
  bool ok = true;
  for (const auto& p : {FamilyParams::chebyshev(), FamilyParams::jacobi(0.0, 0.0), FamilyParams::hermite(1),
                        FamilyParams::laguerre({0.0})}) {
    EnvelopePlan plan;
    plan.weighted = p.family == Family::Jacobi || p.family == Family::Laguerre;
    const auto E = measure_envelope(KernelInstance(p, typeA(), 128), plan);
    const auto f = fit_bound(E, opt);
    ok = ok && f.success() && f.c_rate > 0.0 && E.empty_bins() == 0;
    detail += to_string(p.family) + " rate " + fmt("%.3f", f.c_rate) + ", ";
  }
  CutoffSpec rough = typeA()->spec;
  const auto R = std::make_shared<const CutoffFunction>(assemble_cutoff(rough_control_spec(rough)));
  const auto rows = compare_cutoffs(FamilyParams::chebyshev(), 256, {{"special", typeA()}, {"rough", R}},
                                    EnvelopePlan{}, opt);
  ok = ok && rows[0].fit.c_rate > rows[1].fit.c_rate;
  detail += "special " + fmt("%.3f", rows[0].fit.c_rate) + " vs rough " + fmt("%.3f", rows[1].fit.c_rate);
  return {ok, detail};
}

// 8. Tensor-product counterexamples.
Outcome counterexamples() {
  const std::vector<int> ns{32, 64, 128, 256};
  const auto a = counterexample_suite(*typeA(), ns);
  const auto c = counterexample_suite(*typeC(), ns);
  const bool ok = a.block_error < 1e-10 && a.legleg_bounded && a.chebcheb_error < 1e-10 && c.slice_bounded &&
                  c.block_error < 1e-10;
  const auto& last = c.rows.back();
  return {ok, "blocks " + fmt("%.2e", a.block_error) + ", chebcheb " + fmt("%.2e", a.chebcheb_error) +
                  ", F'(1)/n^2 " + fmt("%.6f", last.slice_derivative / (double(last.n) * last.n)) + " vs " +
                  fmt("%.6f", last.slice_derivative_predicted / (double(last.n) * last.n))};
}

// 9. Hermite and Laguerre tail constants.
Outcome tails() {
  const auto h = hermite_tail_fit(typeA(), {16, 32, 64});
  bool ok = h.spread < 2.0;
  for (double c : h.c2) ok = ok && c > 0.0;
  const auto l = check_laguerre_bound(2.0, std::vector<int>{5, 10, 20, 40});
  ok = ok && l.spread < 2.0;
  return {ok, "hermite c'' spread " + fmt("%.3f", h.spread) + ", laguerre constant spread " + fmt("%.3f", l.spread)};
}

// 10. Wavelet.
Outcome wavelet() {
  const auto W = build_wavelet(*typeC());
  const auto f = fit_bound(W.envelope, FitOptions{});
  return {W.plancherel_defect() < 1e-8 && std::abs(W.mean) < 1e-8 && f.success(),
          "Plancherel " + fmt("%.2e", W.plancherel_defect()) + ", mean " + fmt("%.2e", W.mean) + ", rate " +
              fmt("%.3f", f.c_rate)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"cutoff validity", cutoff_validity},
      {"derivative bound", derivative_bound_check},
      {"exact kernel identities", kernel_identities},
      {"reproducing projection", reproducing},
      {"tight-frame Parseval", parseval},
      {"polynomial localization", polynomial_localization},
      {"sub-exponential localization", subexponential_localization},
      {"tensor counterexamples", counterexamples},
      {"tail bounds", tails},
      {"wavelet", wavelet},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
