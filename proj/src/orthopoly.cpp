#include "nloc/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nloc/error.hpp"

namespace nloc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// Tanh-sinh rule on [0, 1]; tolerates integrable endpoint singularities.
template <class F>
double tanh_sinh01(F&& f) {
  const double h = 1.0 / 64.0;
  double acc = 0.0;
  for (int k = -400; k <= 400; ++k) {
    const double s = h * k;
    const double u = kPi / 2.0 * std::sinh(s);
    const double x = 0.5 * (1.0 + std::tanh(u));
    const double w = 0.5 * kPi / 2.0 * std::cosh(s) / (std::cosh(u) * std::cosh(u));
    if (x <= 0.0 || x >= 1.0 || w < 1e-300) continue;
    acc += w * f(x);
  }
  return acc * h;
}

double weight_integral(double a, double b) {
  // Split at 0 and map (1 -/+ t)^{a or b} onto a bounded integrand.
  auto half = [](double p, double q) {
    const double e = 1.0 / (p + 1.0);
    return tanh_sinh01([&](double u) { return std::pow(2.0 - std::pow(u, e), q); }) / (p + 1.0);
  };
  return half(a, b) + half(b, a);
}

double clamp_unit(double x) {
  require(std::abs(x) <= 1.0 + 1e-12, "argument outside [-1, 1]");
  return std::clamp(x, -1.0, 1.0);
}

}  // namespace

void JacobiParams::validate() const {
  require(alpha > -1.0 && beta > -1.0, "Jacobi parameters must exceed -1");
}

void jacobi_values(double a, double b, int n_max, double x, double* out) {
  out[0] = 1.0;
  if (n_max == 0) return;
  out[1] = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
  const double ab = a + b;
  const double a2b2 = (a - b) * (a + b);
  for (int n = 1; n < n_max; ++n) {
    const double nn = n;
    const double s = 2.0 * nn + ab;
    const double c1 = 2.0 * (nn + 1.0) * (nn + ab + 1.0) * s;
    const double c2 = (s + 1.0) * a2b2;
    const double c3 = s * (s + 1.0) * (s + 2.0);
    const double c4 = 2.0 * (nn + a) * (nn + b) * (s + 2.0);
    out[n + 1] = ((c2 + c3 * x) * out[n] - c4 * out[n - 1]) / c1;
  }
}

OrthoValueTable jacobi_all(JacobiParams p, int n_max, double x) {
  p.validate();
  require(n_max >= 0, "n_max must be >= 0");
  x = clamp_unit(x);
  OrthoValueTable t{"jacobi", {p.alpha, p.beta}, n_max, x, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  jacobi_values(p.alpha, p.beta, n_max, x, t.values.data());
  return t;
}

JacobiNorm jacobi_norm_checked(JacobiParams p, int n) {
  p.validate();
  require(n >= 0, "degree must be >= 0");
  const double a = p.alpha;
  const double b = p.beta;
  const double s = a + b + 1.0;
  if (n == 0 && std::abs(s) < 1e-10) return {weight_integral(a, b), true};
  const double nn = n;
  // Signs of (2n+s) and Gamma(n+s) agree, so magnitudes suffice.
  const double lg = s * std::log(2.0) - std::log(std::abs(2.0 * nn + s)) +
                    std::lgamma(nn + a + 1.0) + std::lgamma(nn + b + 1.0) -
                    std::lgamma(nn + 1.0) - std::lgamma(nn + s);
  return {std::exp(lg), false};
}

double jacobi_norm(JacobiParams p, int n) { return jacobi_norm_checked(p, n).value; }

void gegenbauer_values(double lambda, int n_max, double t, double* out) {
  const double a = lambda - 0.5;
  jacobi_values(a, a, n_max, t, out);
  const double base = std::lgamma(lambda + 0.5) - std::lgamma(2.0 * lambda);
  for (int n = 0; n <= n_max; ++n) {
    const double nn = n;
    out[n] *= std::exp(base + std::lgamma(nn + 2.0 * lambda) - std::lgamma(nn + lambda + 0.5));
  }
}

OrthoValueTable gegenbauer_all(double lambda, int n_max, double t) {
  require(lambda > 0.0, "Gegenbauer parameter must be positive");
  require(n_max >= 0, "n_max must be >= 0");
  t = clamp_unit(t);
  OrthoValueTable r{"gegenbauer", {lambda}, n_max, t, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  gegenbauer_values(lambda, n_max, t, r.values.data());
  return r;
}

void hermite_fn_values(int n_max, double t, double* out) {
  // Run the recurrence without the Gaussian, carrying it as a log scale.
  double log_scale = -0.5 * t * t;
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25);
  out[0] = cur * std::exp(log_scale);
  for (int n = 0; n < n_max; ++n) {
    const double nn = n;
    double next = t * std::sqrt(2.0 / (nn + 1.0)) * cur - std::sqrt(nn / (nn + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
    out[n + 1] = cur * std::exp(log_scale);
  }
}

OrthoValueTable hermite_fn_all(int n_max, double t) {
  require(n_max >= 0, "n_max must be >= 0");
  OrthoValueTable r{"hermite", {}, n_max, t, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  hermite_fn_values(n_max, t, r.values.data());
  return r;
}

namespace {

// Orthonormal Laguerre polynomials l_n(x) under x^alpha e^{-x}, multiplied
// by exp(log_pref); the exponential is tracked as a log scale.
void orthonormal_laguerre(double alpha, int n_max, double x, double log_pref, double* out) {
  double log_scale = log_pref - 0.5 * std::lgamma(alpha + 1.0);
  double prev = 0.0;
  double cur = 1.0;
  out[0] = std::exp(log_scale);
  for (int n = 0; n < n_max; ++n) {
    const double nn = n;
    const double next = ((2.0 * nn + 1.0 + alpha - x) * cur - std::sqrt(nn * (nn + alpha)) * prev) /
                        std::sqrt((nn + 1.0) * (nn + alpha + 1.0));
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
    out[n + 1] = cur * std::exp(log_scale);
  }
}

}  // namespace

void laguerre_fn_values(double alpha, int n_max, double t, LaguerreKind which, double* out) {
  switch (which) {
    case LaguerreKind::F:
      orthonormal_laguerre(alpha, n_max, t * t, 0.5 * std::log(2.0) - 0.5 * t * t, out);
      return;
    case LaguerreKind::L:
      if (t == 0.0 && alpha > 0.0) break;
      orthonormal_laguerre(alpha, n_max, t, -0.5 * t + (alpha > 0.0 ? 0.5 * alpha * std::log(t) : 0.0), out);
      return;
    case LaguerreKind::M:
      if (t == 0.0) break;
      orthonormal_laguerre(alpha, n_max, t * t,
                           0.5 * std::log(2.0 * t) - 0.5 * t * t + alpha * std::log(t), out);
      return;
  }
  std::fill(out, out + n_max + 1, 0.0);
}

OrthoValueTable laguerre_fn_all(double alpha, int n_max, double t, LaguerreKind which) {
  require(alpha >= 0.0, "Laguerre parameter must be >= 0");
  require(t >= 0.0, "Laguerre argument must be >= 0");
  require(n_max >= 0, "n_max must be >= 0");
  const char* tag = which == LaguerreKind::F ? "laguerre_F" : which == LaguerreKind::L ? "laguerre_L" : "laguerre_M";
  OrthoValueTable r{tag, {alpha}, n_max, t, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  laguerre_fn_values(alpha, n_max, t, which, r.values.data());
  return r;
}

void laguerre_scaled_values(double alpha, int n_max, double t, double* out) {
  orthonormal_laguerre(alpha, n_max, t, -0.5 * t, out);
  for (int n = 0; n <= n_max; ++n) {
    const double nn = n;
    out[n] *= std::exp(0.5 * (std::lgamma(nn + alpha + 1.0) - std::lgamma(nn + 1.0)));
  }
}

LaguerreBoundReport check_laguerre_bound(double alpha, const std::vector<int>& n_values) {
  require(alpha >= -0.5, "Laguerre bound requires alpha >= -1/2");
  require(!n_values.empty(), "no degrees requested");
  LaguerreBoundReport rep;
  rep.alpha = alpha;
  std::vector<double> buf;
  for (int n : n_values) {
    require(n >= 1 && alpha <= n, "Laguerre bound requires 1 <= n and alpha <= n");
    buf.resize(static_cast<std::size_t>(n) + 1);
    const double big_n = 4.0 * n + 2.0 * alpha + 2.0;
    const double t_hi = 3.0 * big_n;
    auto ratio = [&](double t) {
      laguerre_scaled_values(alpha, n, t, buf.data());
      return std::abs(buf[static_cast<std::size_t>(n)]) /
             (std::pow(2.0, alpha) * std::pow(n / t, alpha / 2.0));
    };
    constexpr int kPoints = 20000;
    const double lo = std::log(1e-12 * t_hi);
    const double hi = std::log(t_hi);
    double best = 0.0;
    double arg = 0.0;
    int best_i = 0;
    for (int i = 0; i <= kPoints; ++i) {
      const double t = std::exp(lo + (hi - lo) * i / kPoints);
      const double r = ratio(t);
      if (r > best) {
        best = r;
        arg = t;
        best_i = i;
      }
    }
    // Golden-section refinement around the best grid point.
    double a = lo + (hi - lo) * std::max(0, best_i - 1) / kPoints;
    double b = lo + (hi - lo) * std::min(kPoints, best_i + 1) / kPoints;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
      const double c = b - g * (b - a);
      const double d = a + g * (b - a);
      if (ratio(std::exp(c)) > ratio(std::exp(d))) {
        b = d;
      } else {
        a = c;
      }
    }
    const double tr = std::exp(0.5 * (a + b));
    const double rr = ratio(tr);
    if (rr > best) {
      best = rr;
      arg = tr;
    }
    rep.n.push_back(n);
    rep.c.push_back(best);
    rep.argmax.push_back(arg);
  }
  const auto [mn, mx] = std::minmax_element(rep.c.begin(), rep.c.end());
  rep.spread = *mx / *mn;
  rep.grows = rep.c.back() > 2.0 * *mn;
  return rep;
}

LaguerreBoundReport check_laguerre_bound(double alpha, int n_max) {
  std::vector<int> ns;
  for (int n = std::max(1, static_cast<int>(std::ceil(alpha))); n <= n_max; ++n) ns.push_back(n);
  return check_laguerre_bound(alpha, ns);
}

}  // namespace nloc
