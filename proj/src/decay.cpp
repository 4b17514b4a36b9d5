#include "nloc/decay.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "nloc/error.hpp"
#include "nloc/orthopoly.hpp"

namespace nloc {

namespace {

constexpr double kPi = std::numbers::pi;

struct FamilyScaling {
  double scale;
  double lead;
  double rho_max;
};

FamilyScaling family_scaling(const FamilyParams& p, int n) {
  const double nn = n;
  switch (p.family) {
    case Family::Trig:
    case Family::Chebyshev:
    case Family::Jacobi:
      return {nn, nn, kPi};
    case Family::Sphere:
    case Family::Ball:
      return {nn, std::pow(nn, p.d), kPi};
    case Family::Simplex:
      return {nn, std::pow(nn, p.d), kPi / 2.0};
    case Family::Hermite:
      return {std::sqrt(nn), std::pow(nn, p.d / 2.0), 2.0 * std::sqrt(8.0 * nn + 2.0)};
    case Family::Laguerre: {
      double a = 0.0;
      for (double v : p.alphas) a += v;
      return {std::sqrt(nn), std::pow(nn, p.d / 2.0), std::sqrt(12.0 * nn + 3.0 * a + 3.0)};
    }
    default:
      return {nn, nn * nn, kPi};
  }
}

std::vector<EnvelopeBin> make_bins(double rho_max, int bins) {
  require(bins >= 1 && rho_max > 0.0, "envelope needs at least one bin and rho_max > 0");
  std::vector<EnvelopeBin> out(static_cast<std::size_t>(bins));
  const double w = rho_max / bins;
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].rho_lo = b * w;
    out[static_cast<std::size_t>(b)].rho_hi = (b + 1) * w;
  }
  return out;
}

void add_sample(std::vector<EnvelopeBin>& bins, double rho_max, double rho, double value) {
  if (rho < 0.0 || rho > rho_max) return;
  const int nb = static_cast<int>(bins.size());
  const int b = std::min(nb - 1, static_cast<int>(rho / rho_max * nb));
  auto& bin = bins[static_cast<std::size_t>(b)];
  ++bin.pairs;
  if (bin.pairs == 1 || value > bin.max_abs) {
    bin.max_abs = value;
    bin.rho_at_max = rho;
  }
}

// Anchor coordinate range and point map for the one-variable families.
struct LineGeometry {
  double lo;
  double hi;
  std::function<Point(double)> point;
};

LineGeometry line_geometry(const FamilyParams& p, double rho_max) {
  switch (p.family) {
    case Family::Trig:
      return {0.0, kPi, [](double u) { return Point{u}; }};
    case Family::Chebyshev:
    case Family::Jacobi:
      return {0.0, kPi, [](double u) { return Point{std::cos(u)}; }};
    case Family::Hermite:
      return {-rho_max / 2.0, rho_max / 2.0, [](double u) { return Point{u}; }};
    default:
      return {0.0, rho_max, [](double u) { return Point{u}; }};
  }
}

Point random_point(const FamilyParams& p, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> G(0.0, 1.0);
  const auto dim = static_cast<std::size_t>(p.point_dim());
  Point x(dim);
  switch (p.family) {
    case Family::Sphere: {
      double s = 0.0;
      do {
        s = 0.0;
        for (double& c : x) {
          c = G(rng);
          s += c * c;
        }
      } while (s == 0.0);
      for (double& c : x) c /= std::sqrt(s);
      return x;
    }
    case Family::Ball: {
      double s = 0.0;
      do {
        s = 0.0;
        for (double& c : x) {
          c = 2.0 * U(rng) - 1.0;
          s += c * c;
        }
      } while (s > 1.0);
      return x;
    }
    case Family::Simplex: {
      std::exponential_distribution<double> E(1.0);
      std::vector<double> e(dim + 1);
      double s = 0.0;
      for (double& v : e) {
        v = E(rng);
        s += v;
      }
      for (std::size_t i = 0; i < dim; ++i) x[i] = e[i] / s;
      return x;
    }
    case Family::Hermite:
      for (double& c : x) c = radius * (2.0 * U(rng) - 1.0);
      return x;
    case Family::Laguerre:
      for (double& c : x) c = radius * U(rng);
      return x;
    default:
      for (double& c : x) c = 2.0 * U(rng) - 1.0;
      return x;
  }
}

double weight_of(const KernelInstance& K, const Point& x) {
  return std::sqrt(weight_factor(K.params(), K.n(), x));
}

double log_profile(double u, double epsilon, int log_depth) {
  double l = std::log(std::numbers::e + u);
  double acc = 1.0;
  for (int i = 1; i < log_depth; ++i) {
    acc *= l;
    l = std::log(std::numbers::e + l);
  }
  return acc * std::pow(l, 1.0 + epsilon);
}

}  // namespace

int DecayEnvelope::empty_bins() const {
  return static_cast<int>(std::count_if(bins.begin(), bins.end(), [](const EnvelopeBin& b) { return b.pairs == 0; }));
}

DecayEnvelope measure_envelope(const KernelInstance& K, const EnvelopePlan& plan) {
  const auto& p = K.params();
  const FamilyScaling fs = family_scaling(p, K.n());
  const double rho_max = plan.rho_max > 0.0 ? plan.rho_max : fs.rho_max;
  DecayEnvelope E;
  E.n = K.n();
  E.family = to_string(p.family);
  E.weighted = plan.weighted;
  E.scale = fs.scale;
  E.lead = fs.lead;
  E.bins = make_bins(rho_max, plan.bins);

  if (p.is_univariate()) {
    require(plan.anchors >= 1 && plan.offsets_per_bin >= 1, "plan needs anchors and offsets");
    const LineGeometry g = line_geometry(p, rho_max);
    const double w = rho_max / plan.bins;
    for (int i = 0; i <= plan.anchors; ++i) {
      const double u = g.lo + (g.hi - g.lo) * i / plan.anchors;
      const Point x = g.point(u);
      const double wx = plan.weighted ? weight_of(K, x) : 1.0;
      for (int b = 0; b < plan.bins; ++b) {
        for (int k = 0; k < plan.offsets_per_bin; ++k) {
          const double delta = (b + static_cast<double>(k) / plan.offsets_per_bin) * w;
          double v = u + delta;
          if (v > g.hi) v = u - delta;
          if (v < g.lo) continue;
          const Point y = g.point(v);
          double value = std::abs(K(x, y));
          if (plan.weighted) value *= wx * weight_of(K, y);
          add_sample(E.bins, rho_max, delta, value);
        }
      }
    }
    return E;
  }

  std::mt19937_64 rng(plan.seed);
  const long target = static_cast<long>(plan.pairs_per_bin);
  const long max_attempts = 40L * plan.bins * target;
  const double radius = p.family == Family::Hermite ? rho_max / 2.0 : rho_max;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  long filled = 0;
  for (long attempt = 0; attempt < max_attempts && filled < plan.bins; ++attempt) {
    const Point x = random_point(p, radius, rng);
    Point y;
    double rho = 0.0;
    if (p.family == Family::Sphere) {
      // Exact stratification: pick the distance, then a direction.
      rho = U(rng) * rho_max;
      Point t = random_point(p, radius, rng);
      double proj = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) proj += t[i] * x[i];
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        t[i] -= proj * x[i];
        s += t[i] * t[i];
      }
      if (s < 1e-20) continue;
      y.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::cos(rho) * x[i] + std::sin(rho) * t[i] / std::sqrt(s);
    } else {
      y = random_point(p, radius, rng);
      rho = distance(p, x, y);
    }
    if (rho > rho_max) continue;
    const int b = std::min(plan.bins - 1, static_cast<int>(rho / rho_max * plan.bins));
    if (E.bins[static_cast<std::size_t>(b)].pairs >= target) continue;
    double value = std::abs(K(x, y));
    if (plan.weighted) value *= weight_of(K, x) * weight_of(K, y);
    add_sample(E.bins, rho_max, rho, value);
    if (E.bins[static_cast<std::size_t>(b)].pairs == target) ++filled;
  }
  return E;
}

DecayEnvelope envelope_from_samples(const std::vector<double>& rho, const std::vector<double>& value,
                                    double rho_max, int bins) {
  require(rho.size() == value.size(), "sample vectors differ in length");
  DecayEnvelope E;
  E.bins = make_bins(rho_max, bins);
  for (std::size_t i = 0; i < rho.size(); ++i) add_sample(E.bins, rho_max, rho[i], std::abs(value[i]));
  return E;
}

double subexp_shape(double u, double rate, double epsilon, int log_depth) {
  return std::exp(-rate * u / log_profile(u, epsilon, log_depth));
}

BoundFit fit_bound(const DecayEnvelope& E, const FitOptions& opt) {
  BoundFit fit;
  fit.form = opt.form;
  fit.epsilon = opt.epsilon;
  fit.log_depth = opt.log_depth;
  fit.sigma = opt.form == BoundForm::Polynomial ? opt.sigma : 0.0;
  double c0 = 0.0;
  for (const auto& b : E.bins) c0 = std::max(c0, b.max_abs / E.lead);
  if (c0 == 0.0) {
    fit.c_rate = opt.form == BoundForm::SubExponential ? opt.rate_hi : 0.0;
    return fit;
  }
  auto shape = [&](const EnvelopeBin& b, double rate) {
    const double u = E.scale * b.rho_at_max;
    if (opt.form == BoundForm::Polynomial) return std::pow(1.0 + u, -opt.sigma);
    return subexp_shape(u, rate, opt.epsilon, opt.log_depth);
  };
  auto needed = [&](double rate) {
    double c = 0.0;
    for (const auto& b : E.bins) {
      if (b.pairs == 0) continue;
      c = std::max(c, b.max_abs / (E.lead * shape(b, rate)));
    }
    return c;
  };
  auto violations = [&](double rate) {
    int v = 0;
    for (const auto& b : E.bins) {
      if (b.pairs > 0 && b.max_abs > opt.cap * c0 * E.lead * shape(b, rate)) ++v;
    }
    return v;
  };
  if (opt.form == BoundForm::Polynomial) {
    fit.c = needed(0.0);
    return fit;
  }
  if (opt.fixed_rate >= 0.0) {
    fit.c_rate = opt.fixed_rate;
    fit.c = needed(opt.fixed_rate);
    fit.violations = violations(opt.fixed_rate);
    return fit;
  }
  // The needed constant grows with the rate, so scan upward.
  const double ratio = opt.rate_points > 1 ? std::pow(opt.rate_hi / opt.rate_lo, 1.0 / (opt.rate_points - 1)) : 1.0;
  double rate = opt.rate_lo;
  for (int i = 0; i < opt.rate_points; ++i, rate *= ratio) {
    const double c = needed(rate);
    if (c > opt.cap * c0) break;
    fit.c_rate = rate;
    fit.c = c;
  }
  if (fit.c_rate == 0.0) {
    fit.c = c0;
    fit.violations = violations(opt.rate_lo);
  }
  return fit;
}

CutoffSpec rough_control_spec(CutoffSpec spec) {
  spec.profile = DeltaProfile::Constant;
  return spec;
}

std::vector<CutoffComparisonRow> compare_cutoffs(const FamilyParams& family, int n,
                                                 const std::vector<NamedCutoff>& cutoffs,
                                                 const EnvelopePlan& plan, const FitOptions& opt) {
  require(cutoffs.size() >= 2, "comparison needs at least two cutoffs");
  std::vector<CutoffComparisonRow> rows;
  for (const auto& c : cutoffs) {
    const KernelInstance K(family, c.cutoff, n);
    rows.push_back({c.name, fit_bound(measure_envelope(K, plan), opt)});
  }
  return rows;
}

Wavelet build_wavelet(const CutoffFunction& cutoff, double dx) {
  require(cutoff.is_band_pass(), "wavelet requires a TypeC cutoff");
  require(dx > 0.0 && dx < 0.375, "wavelet spacing must lie in (0, 0.375)");
  Wavelet w;
  w.epsilon = cutoff.spec.epsilon;
  w.dx = dx;
  const double dt = cutoff.dt();
  const double omega = 4.0 * kPi / 3.0;
  // Contiguous sample window covering the support; the phase rotation
  // below relies on equal spacing.
  std::vector<double> t;
  std::vector<double> a;
  double a2 = 0.0;
  std::size_t first = cutoff.samples.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < cutoff.samples.size(); ++i) {
    const double v = cutoff.samples[i];
    a2 += v * v;
    if (v != 0.0) {
      first = std::min(first, i);
      last = i;
    }
  }
  for (std::size_t i = first; i <= last; ++i) {
    t.push_back(cutoff.grid_t(i));
    a.push_back(cutoff.samples[i]);
  }
  // Endpoint samples vanish, so the plain sum is the trapezoid rule.
  w.norm2_fourier = 4.0 / 3.0 * a2 * dt;

  // psi(1/2 + k dx) for k >= 0 via a re-anchored phase rotation.
  auto psi_at = [&](long k) {
    const double y = k * dx;
    const std::complex<double> step = std::polar(1.0, omega * y * dt);
    std::complex<double> z;
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i % 128 == 0) {
        z = std::polar(1.0, omega * y * t[i]);
      } else {
        z *= step;
      }
      acc += a[i] * z.real();
    }
    return 4.0 / 3.0 * acc * dt;
  };
  std::vector<double> half;  // k = 0, 1, ...
  long K = static_cast<long>(std::ceil(16.0 / dx));
  constexpr long kMax = 1L << 16;
  while (true) {
    for (long k = static_cast<long>(half.size()); k <= K; ++k) half.push_back(psi_at(k));
    double peak = 0.0;
    for (double v : half) peak = std::max(peak, std::abs(v));
    double edge = 0.0;
    for (long k = K - K / 20; k <= K; ++k) edge = std::max(edge, std::abs(half[static_cast<std::size_t>(k)]));
    w.peak = peak;
    if (edge < 1e-12 * peak) break;
    if (2 * K > kMax) throw ConstructionError("wavelet grid too narrow: boundary samples exceed 1e-12 of peak");
    K *= 2;
  }
  w.x.reserve(static_cast<std::size_t>(2 * K + 1));
  for (long k = -K; k <= K; ++k) {
    w.x.push_back(0.5 + k * dx);
    w.psi.push_back(half[static_cast<std::size_t>(std::abs(k))]);
  }
  for (double v : w.psi) {
    w.norm2 += v * v * dx;
    w.mean += v * dx;
  }
  std::vector<double> rho(half.size());
  for (std::size_t k = 0; k < half.size(); ++k) rho[k] = static_cast<double>(k) * dx;
  w.envelope = envelope_from_samples(rho, half, K * dx, 128);
  w.envelope.family = "wavelet";
  return w;
}

bool bounded_sequence(const std::vector<double>& v, double floor) {
  if (v.size() < 2) return true;
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) prev = std::max(prev, std::abs(v[i]));
  return std::abs(v.back()) <= 2.0 * prev + floor;
}

namespace {

// F'(1) for the slice F(x1) = L_n((x1, -1), (1, 1)) from its Chebyshev
// coefficients, read off by a cosine transform at Chebyshev points.
double slice_derivative(const CutoffFunction& cutoff, int n) {
  const int N = 2 * n;
  std::vector<double> f(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    const double x = std::cos(kPi * (k + 0.5) / N);
    f[static_cast<std::size_t>(k)] = tensor2d_kernel(TensorVariant::ChebCheb, cutoff, n, {x, -1.0}, {1.0, 1.0});
  }
  double deriv = 0.0;
  for (int j = 0; j < N; ++j) {
    double c = 0.0;
    // cos(j pi (k + 1/2) / N) by rotation, re-anchored each 64 steps
    const std::complex<double> step = std::polar(1.0, kPi * j / N);
    std::complex<double> z;
    for (int k = 0; k < N; ++k) {
      if (k % 64 == 0) {
        z = std::polar(1.0, kPi * j * (k + 0.5) / N);
      } else {
        z *= step;
      }
      c += f[static_cast<std::size_t>(k)] * z.real();
    }
    c *= 2.0 / N;
    if (j == 0) c *= 0.5;
    deriv += c * static_cast<double>(j) * j;  // T_j'(1) = j^2
  }
  return deriv;
}

}  // namespace

CounterexampleReport counterexample_suite(const CutoffFunction& cutoff, const std::vector<int>& n_list) {
  require(!n_list.empty(), "n_list must be nonempty");
  CounterexampleReport rep;
  rep.cutoff_kind = to_string(cutoff.spec.kind);
  rep.integral = cutoff.moment(0);
  rep.first_moment = cutoff.moment(1);
  rep.ahat0 = cutoff(0.0);
  const Point a{1.0, -1.0};
  const Point b{1.0, 1.0};
  for (int m = 0; m <= 40; ++m) {
    const double sign = m % 2 ? -1.0 : 1.0;
    rep.block_error = std::max({rep.block_error,
                                std::abs(tensor2d_block(TensorVariant::LegLeg, m, a, b) - (1.0 + sign) / 8.0),
                                std::abs(tensor2d_block(TensorVariant::ChebCheb, m, a, b) - (m == 0) / (kPi * kPi)),
                                std::abs(tensor2d_block(TensorVariant::ChebLeg, m, a, b) - sign / (2.0 * kPi))});
  }
  std::vector<double> leg_res;
  std::vector<double> mix_res;
  std::vector<double> slice_res;
  for (int n : n_list) {
    require(n >= 1, "n must be >= 1");
    CounterexampleRow r;
    r.n = n;
    r.legleg = tensor2d_kernel(TensorVariant::LegLeg, cutoff, n, a, b);
    r.legleg_predicted = n / 8.0 * rep.integral + rep.ahat0 / 8.0;
    r.chebcheb = tensor2d_kernel(TensorVariant::ChebCheb, cutoff, n, a, b);
    r.chebcheb_predicted = rep.ahat0 / (kPi * kPi);
    r.chebleg = tensor2d_kernel(TensorVariant::ChebLeg, cutoff, n, a, b);
    r.chebleg_predicted = rep.ahat0 / (4.0 * kPi);
    leg_res.push_back((r.legleg - r.legleg_predicted) * n);
    mix_res.push_back((r.chebleg - r.chebleg_predicted) * n);
    rep.chebcheb_error = std::max(rep.chebcheb_error, std::abs(r.chebcheb - r.chebcheb_predicted));
    if (cutoff.is_band_pass()) {
      r.slice_derivative = slice_derivative(cutoff, n);
      r.slice_derivative_predicted = 2.0 * n * n / (kPi * kPi) * rep.first_moment;
      const double deg = 2.0 * n - 1.0;
      r.slice_sup_lower = std::abs(r.slice_derivative) / (deg * deg);
      slice_res.push_back((r.slice_derivative - r.slice_derivative_predicted) / n);
    }
    rep.rows.push_back(r);
  }
  // Block sums cancel terms of size up to m, so rounding in the kernel value
  // grows like eps (2n)^3 and in residual * n like eps (2n)^3 n.
  const double top = 2.0 * *std::max_element(n_list.begin(), n_list.end());
  const double floor = std::max(1e-9, 1e-16 * top * top * top * (top / 2.0));
  rep.legleg_bounded = bounded_sequence(leg_res, floor);
  rep.chebleg_bounded = bounded_sequence(mix_res, floor);
  rep.slice_bounded = cutoff.is_band_pass() && bounded_sequence(slice_res, floor);
  return rep;
}

HermiteTailFit hermite_tail_fit(std::shared_ptr<const CutoffFunction> cutoff, const std::vector<int>& n_list) {
  require(cutoff != nullptr && !n_list.empty(), "tail fit needs a cutoff and degrees");
  HermiteTailFit fit;
  for (int n : n_list) {
    require(n >= 1, "n must be >= 1");
    const int top = 2 * n - 1;
    std::vector<double> a(static_cast<std::size_t>(top) + 1);
    for (int k = 0; k <= top; ++k) a[static_cast<std::size_t>(k)] = (*cutoff)(static_cast<double>(k) / n);
    const double x0 = std::sqrt(8.0 * n + 2.0);
    constexpr int kX = 200;
    constexpr int kY = 801;
    std::vector<std::vector<double>> hy(kY, std::vector<double>(a.size()));
    for (int i = 0; i < kY; ++i) hermite_fn_values(top, -2.0 * x0 + 4.0 * x0 * i / (kY - 1), hy[static_cast<std::size_t>(i)].data());
    std::vector<double> hx(a.size());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kX; ++i) {
      const double x = x0 * (1.0 + static_cast<double>(i) / kX);
      hermite_fn_values(top, x, hx.data());
      double mx = 0.0;
      for (const auto& row : hy) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * hx[k] * row[k];
        mx = std::max(mx, std::abs(s));
      }
      if (mx == 0.0) continue;  // underflow imposes nothing
      best = std::min(best, -std::log(mx) / (x * x));
    }
    fit.n.push_back(n);
    fit.c2.push_back(best);
  }
  const auto [mn, mx] = std::minmax_element(fit.c2.begin(), fit.c2.end());
  fit.spread = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
  return fit;
}

void write_envelope_csv(const std::vector<DecayEnvelope>& envelopes, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << "rho,max_abs,n,family,weighted\n";
  char buf[128];
  for (const auto& E : envelopes) {
    for (const auto& b : E.bins) {
      if (b.pairs == 0) continue;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,", b.center(), b.max_abs, E.n);
      out << buf << E.family << ',' << (E.weighted ? 1 : 0) << '\n';
    }
  }
}

nlohmann::json to_json(const BoundFit& fit) {
  nlohmann::json j;
  j["form"] = fit.form == BoundForm::Polynomial ? "polynomial" : "subexponential";
  j["epsilon"] = fit.epsilon;
  j["sigma"] = fit.sigma;
  j["c"] = fit.c;
  j["c_rate"] = fit.c_rate;
  j["violations"] = fit.violations;
  return j;
}

nlohmann::json to_json(const CounterexampleReport& rep) {
  nlohmann::json j;
  j["cutoff"] = rep.cutoff_kind;
  j["integral"] = rep.integral;
  j["first_moment"] = rep.first_moment;
  j["ahat0"] = rep.ahat0;
  j["block_error"] = rep.block_error;
  j["chebcheb_error"] = rep.chebcheb_error;
  j["legleg_bounded"] = rep.legleg_bounded;
  j["chebleg_bounded"] = rep.chebleg_bounded;
  j["slice_bounded"] = rep.slice_bounded;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json o;
    o["n"] = r.n;
    o["legleg"] = r.legleg;
    o["legleg_predicted"] = r.legleg_predicted;
    o["chebcheb"] = r.chebcheb;
    o["chebcheb_predicted"] = r.chebcheb_predicted;
    o["chebleg"] = r.chebleg;
    o["chebleg_predicted"] = r.chebleg_predicted;
    if (r.slice_derivative != 0.0) {
      o["slice_derivative"] = r.slice_derivative;
      o["slice_derivative_predicted"] = r.slice_derivative_predicted;
      o["slice_sup_lower"] = r.slice_sup_lower;
    }
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

}  // namespace nloc
