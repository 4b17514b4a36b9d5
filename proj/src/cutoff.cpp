#include "nloc/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "nloc/error.hpp"

namespace nloc {

namespace {

constexpr double kPi = std::numbers::pi;

// Calls f(m, cos(m theta), sin(m theta)) for m = 1..M. The rotation is
// re-seeded periodically so the phase error stays at round-off level.
template <class F>
void for_each_harmonic(double theta, std::size_t M, F&& f) {
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double c = 1.0;
  double s = 0.0;
  for (std::size_t m = 1; m <= M; ++m) {
    if (m % 64 == 0) {
      c = std::cos(static_cast<double>(m) * theta);
      s = std::sin(static_cast<double>(m) * theta);
    } else {
      const double cn = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = cn;
    }
    f(m, c, s);
  }
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// log of a decreasing majorant of |sinc(x)|.
double log_sinc_majorant(double x) {
  x = std::abs(x);
  if (x < kPi) {
    const double gauss = -x * x / 6.0;
    return x > 1.0 ? std::min(gauss, -std::log(x)) : gauss;
  }
  return -std::log(x);
}

double iterated_log(double x, int depth) {
  for (int i = 0; i < depth; ++i) x = std::log(x);
  return x;
}

double delta_at(double epsilon, int log_depth, long j) {
  if (j <= 1) return 1.0;
  const double x = static_cast<double>(j);
  if (log_depth == 1) return 1.0 / (x * std::pow(std::log(x), 1.0 + epsilon));
  // every iterated logarithm must exceed 1
  if (iterated_log(x, log_depth) <= 1.0) return 1.0;
  double prod = x;
  double l = x;
  for (int i = 1; i < log_depth; ++i) {
    l = std::log(l);
    prod *= l;
  }
  prod *= std::pow(std::log(l), 1.0 + epsilon);
  return 1.0 / prod;
}

}  // namespace

std::string to_string(CutoffKind kind) {
  switch (kind) {
    case CutoffKind::TypeA: return "a";
    case CutoffKind::TypeB: return "b";
    case CutoffKind::TypeC: return "c";
  }
  return "?";
}

CutoffKind cutoff_kind_from_string(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (t.rfind("type", 0) == 0) t = t.substr(4);
  if (t == "a") return CutoffKind::TypeA;
  if (t == "b") return CutoffKind::TypeB;
  if (t == "c") return CutoffKind::TypeC;
  throw InvalidArgument("unknown cutoff kind '" + s + "'");
}

void CutoffSpec::validate() const {
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(log_depth >= 1, "log_depth must be >= 1");
  require(m_max == 0 || m_max >= 8, "m_max must be >= 8 (or 0 for auto)");
  require(grid_points >= 4096, "grid must have at least 4096 points");
}

nlohmann::json to_json(const CutoffSpec& spec) {
  nlohmann::json j;
  j["kind"] = to_string(spec.kind);
  j["epsilon"] = spec.epsilon;
  j["log_depth"] = spec.log_depth;
  j["m_max"] = spec.m_max;
  j["grid"] = spec.grid_points;
  j["delta"] = spec.profile == DeltaProfile::Constant ? "constant" : "standard";
  return j;
}

CutoffSpec cutoff_spec_from_json(const nlohmann::json& j) {
  CutoffSpec s;
  if (j.contains("kind")) s.kind = cutoff_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("epsilon")) s.epsilon = j.at("epsilon").get<double>();
  if (j.contains("log_depth")) s.log_depth = j.at("log_depth").get<int>();
  if (j.contains("m_max")) s.m_max = j.at("m_max").get<int>();
  if (j.contains("grid")) s.grid_points = j.at("grid").get<int>();
  if (j.contains("delta")) {
    const auto p = j.at("delta").get<std::string>();
    if (p == "constant") {
      s.profile = DeltaProfile::Constant;
    } else if (p == "standard") {
      s.profile = DeltaProfile::Standard;
    } else {
      throw InvalidArgument("unknown delta profile '" + p + "'");
    }
  }
  s.validate();
  return s;
}

std::vector<double> build_delta_sequence(double epsilon, int log_depth,
                                         int m_max) {
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(log_depth >= 1, "log_depth must be >= 1");
  require(m_max >= 2, "m_max must be >= 2");
  std::vector<double> d(static_cast<std::size_t>(m_max) + 1);
  for (long j = 0; j <= m_max; ++j) d[static_cast<std::size_t>(j)] = delta_at(epsilon, log_depth, j);
  return d;
}

double truncation_change_estimate(double epsilon, int log_depth, int m) {
  // Appending factors multiplies hhat by exp(-xi^2 dS2 / 6 + ...), which
  // moves H by dS2/6 * h'. With delta_0 = delta_1 = 1, |h'| <= 1/4, and
  // the sine in the band-pass assembly adds a factor pi/2.
  double s2 = 0.0;
  for (long j = static_cast<long>(m) + 1; j <= 2L * m; ++j) {
    const double d = delta_at(epsilon, log_depth, j);
    s2 += d * d;
  }
  return kPi / 2.0 * 0.25 * s2 / 6.0;
}

int auto_truncation_order(double epsilon, int log_depth) {
  for (int m = 64; m <= (1 << 22); m *= 2) {
    if (truncation_change_estimate(epsilon, log_depth, m) < 4e-9) return m;
  }
  throw ConstructionError("no truncation order below 2^22 meets the tolerance");
}

double BumpFunction::value(double t) const {
  const double theta = kPi * t / half_period;
  double acc = 0.0;
  for_each_harmonic(theta, xi.size() - 1, [&](std::size_t m, double c, double) {
    acc += hhat[m] * c;
  });
  return (1.0 + 2.0 * acc) / (2.0 * half_period);
}

std::vector<double> BumpFunction::derivatives(int k_max, double t) const {
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
  const double theta = kPi * t / half_period;
  std::vector<double> acc(out.size(), 0.0);
  for_each_harmonic(theta, xi.size() - 1, [&](std::size_t m, double c, double s) {
    // d^k/dt^k cos(xi t) = xi^k cos(xi t + k pi / 2)
    const double cyc[4] = {c, -s, -c, s};
    double p = hhat[m];
    for (int k = 0; k <= k_max; ++k) {
      acc[static_cast<std::size_t>(k)] += p * cyc[k & 3];
      p *= xi[m];
    }
  });
  for (int k = 0; k <= k_max; ++k) {
    out[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)] / half_period;
  }
  out[0] += 1.0 / (2.0 * half_period);
  return out;
}

double BumpFunction::derivative(int k, double t) const {
  return derivatives(k, t)[static_cast<std::size_t>(k)];
}

double BumpFunction::cdf(double t) const {
  if (t <= -support) return 0.0;
  if (t >= support) return 1.0;
  const double theta = kPi * t / half_period;
  double acc = 0.0;
  for_each_harmonic(theta, xi.size() - 1, [&](std::size_t m, double, double s) {
    acc += hhat[m] / xi[m] * s;
  });
  const double v = 0.5 + t / (2.0 * half_period) + acc / half_period;
  return std::clamp(v, 0.0, 1.0);
}

double BumpFunction::peak() const {
  return *std::max_element(samples.begin(), samples.end());
}

BumpFunction build_bump_from_deltas(std::vector<double> delta, double epsilon,
                                    int log_depth, int grid_points,
                                    double window_factor) {
  require(delta.size() >= 3, "at least three convolution factors required");
  require(window_factor > 0.0, "window factor must be positive");
  BumpFunction b;
  b.epsilon = epsilon;
  b.log_depth = log_depth;
  b.delta = std::move(delta);
  for (double d : b.delta) b.support += d;
  b.half_period = window_factor * b.support;

  // Mode cutoff: the majorant of |hhat(xi)| xi^11 drops below 1e-18.
  auto log_envelope = [&](double x) {
    double acc = 11.0 * std::log1p(x);
    for (double d : b.delta) acc += log_sinc_majorant(d * x);
    return acc;
  };
  const double target = std::log(1e-18);
  double hi = 1.0;
  while (log_envelope(hi) > target && hi < 1e9) hi *= 2.0;
  double lo = hi / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_envelope(mid) > target ? lo : hi) = mid;
  }
  const double xi_max = hi;
  constexpr std::size_t kMaxModes = std::size_t{1} << 17;
  const auto modes = std::min<std::size_t>(
      kMaxModes, static_cast<std::size_t>(std::ceil(xi_max * b.half_period / kPi)) + 1);

  // Narrow factors enter through the log-sinc series of their power sums.
  std::vector<double> direct;
  double s2 = 0.0, s4 = 0.0, s6 = 0.0;
  for (double d : b.delta) {
    if (d * xi_max >= 0.05) {
      direct.push_back(d);
    } else {
      const double d2 = d * d;
      s2 += d2;
      s4 += d2 * d2;
      s6 += d2 * d2 * d2;
    }
  }
  b.xi.resize(modes + 1);
  b.hhat.resize(modes + 1);
  for (std::size_t m = 0; m <= modes; ++m) {
    const double x = kPi * static_cast<double>(m) / b.half_period;
    const double x2 = x * x;
    double p = std::exp(-x2 * s2 / 6.0 - x2 * x2 * s4 / 180.0 - x2 * x2 * x2 * s6 / 2835.0);
    for (double d : direct) p *= sinc(d * x);
    b.xi[m] = x;
    b.hhat[m] = p;
  }

  const int n = std::clamp(grid_points / 4, 1024, 4096) + 1;
  b.grid.resize(static_cast<std::size_t>(n));
  b.samples.resize(static_cast<std::size_t>(n));
  const double dx = 2.0 * b.half_period / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double t = -b.half_period + dx * i;
    b.grid[static_cast<std::size_t>(i)] = t;
    b.samples[static_cast<std::size_t>(i)] = b.value(t);
  }
  double mass = 0.0;
  for (int i = 0; i + 1 < n; ++i) mass += b.samples[static_cast<std::size_t>(i)];
  b.total_mass = mass * dx;

  const double pk = b.peak();
  if (std::abs(b.samples.front()) > 1e-12 * pk || std::abs(b.samples.back()) > 1e-12 * pk) {
    throw ConstructionError("grid too coarse to resolve the bump support");
  }
  return b;
}

BumpFunction build_bump(const CutoffSpec& spec, double window_factor) {
  require(spec.epsilon > 0.0 && spec.epsilon <= 1.0, "epsilon must lie in (0, 1]");
  const int m = spec.m_max > 0 ? spec.m_max : auto_truncation_order(spec.epsilon, spec.log_depth);
  auto d = build_delta_sequence(spec.epsilon, spec.log_depth, m);
  if (spec.profile == DeltaProfile::Constant) {
    double s = 0.0;
    for (double v : d) s += v;
    std::fill(d.begin(), d.end(), s / static_cast<double>(d.size()));
  }
  return build_bump_from_deltas(std::move(d), spec.epsilon, spec.log_depth,
                                spec.grid_points, window_factor);
}

namespace {

// ahat^{(k)} for k = 0..k_max at t, through the bump series.
std::vector<double> cutoff_derivatives(const CutoffFunction& f, int k_max, double t) {
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
  const BumpFunction& b = *f.bump;
  const double kappa = f.scale;
  if (f.spec.kind == CutoffKind::TypeA) {
    if (t >= 2.0) return out;
    const double x = kappa * (1.5 - t);
    if (x >= b.support) {
      out[0] = 1.0;
      return out;
    }
    if (x <= -b.support) return out;
    out[0] = b.cdf(x);
    if (k_max == 0) return out;
    const auto h = b.derivatives(k_max - 1, x);
    double c = -kappa;
    for (int k = 1; k <= k_max; ++k) {
      out[static_cast<std::size_t>(k)] = c * h[static_cast<std::size_t>(k - 1)];
      c *= -kappa;
    }
    return out;
  }

  double s = 0.0;
  double chain = 0.0;
  if (t >= 0.5 && t <= 1.0) {
    s = 2.0 * t - 1.5;
    chain = 2.0;
  } else if (t > 1.0 && t <= 2.0) {
    s = 1.5 - t;
    chain = -1.0;
  } else {
    return out;
  }
  const double x = kappa * s;
  if (x <= -b.support) return out;
  if (x >= b.support) {
    out[0] = 1.0;
    return out;
  }
  // g = (pi/2) H(kappa s); phi = sin g = Im e^{ig}.
  const double g = kPi / 2.0 * b.cdf(x);
  std::vector<double> gd(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (k_max > 0) {
    const auto h = b.derivatives(k_max - 1, x);
    double p = kappa;
    for (int m = 1; m <= k_max; ++m) {
      gd[static_cast<std::size_t>(m)] = kPi / 2.0 * p * h[static_cast<std::size_t>(m - 1)];
      p *= kappa;
    }
  }
  // D_{n+1} = sum_i C(n,i) D_{n-i} (i g^{(i+1)}), with y^{(n)} = y D_n.
  using cd = std::complex<double>;
  std::vector<cd> D(static_cast<std::size_t>(k_max) + 1);
  D[0] = 1.0;
  for (int n = 0; n < k_max; ++n) {
    cd acc = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= n; ++i) {
      acc += binom * D[static_cast<std::size_t>(n - i)] * cd(0.0, gd[static_cast<std::size_t>(i + 1)]);
      binom = binom * (n - i) / (i + 1);
    }
    D[static_cast<std::size_t>(n + 1)] = acc;
  }
  const cd y = std::polar(1.0, g);
  double c = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    out[static_cast<std::size_t>(k)] = c * (y * D[static_cast<std::size_t>(k)]).imag();
    c *= chain;
  }
  return out;
}

}  // namespace

double CutoffFunction::sample(long i) const {
  const long n = static_cast<long>(samples.size());
  if (i < 0) i = -i;
  if (i >= n) return 0.0;
  return samples[static_cast<std::size_t>(i)];
}

double CutoffFunction::operator()(double t) const {
  t = std::abs(t);
  if (t >= 2.0) return 0.0;
  const double u = t / dt();
  const long i = static_cast<long>(std::floor(u));
  const int deg = interpolation_degree;
  const long i0 = i - (deg - 1) / 2;
  const double p = u - static_cast<double>(i0);
  double acc = 0.0;
  for (int k = 0; k <= deg; ++k) {
    double w = 1.0;
    for (int l = 0; l <= deg; ++l) {
      if (l != k) w *= (p - l) / static_cast<double>(k - l);
    }
    acc += w * sample(i0 + k);
  }
  return acc;
}

double CutoffFunction::exact(double t) const {
  return cutoff_derivatives(*this, 0, std::abs(t))[0];
}

double CutoffFunction::exact_derivative(int k, double t) const {
  return cutoff_derivatives(*this, k, t)[static_cast<std::size_t>(k)];
}

double CutoffFunction::moment(int p) const {
  require(p == 0 || p == 1, "moment order must be 0 or 1");
  const double h = dt();
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = (i == 0 || i + 1 == samples.size()) ? 0.5 : 1.0;
    acc += w * std::pow(grid_t(i), p) * samples[i];
  }
  acc *= h;
  // The only nonvanishing Euler-Maclaurin term comes from t * ahat(0).
  if (p == 1) acc += h * h / 12.0 * samples.front();
  return acc;
}

CutoffFunction assemble_cutoff(const CutoffSpec& spec_in) {
  spec_in.validate();
  CutoffFunction f;
  f.spec = spec_in;
  if (f.spec.m_max == 0) f.spec.m_max = auto_truncation_order(f.spec.epsilon, f.spec.log_depth);
  auto bump = std::make_shared<BumpFunction>(build_bump(f.spec));
  // h_eps must live in [-1/2, 1/2]; 8/eps does so whenever sum delta <= 4/eps.
  f.scale = 8.0 / f.spec.epsilon;
  if (bump->support * 2.0 > f.scale) f.scale = 2.0 * bump->support;
  f.bump = std::move(bump);
  f.samples.resize(static_cast<std::size_t>(f.spec.grid_points));
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    f.samples[i] = cutoff_derivatives(f, 0, f.grid_t(i))[0];
  }
  return f;
}

double derivative_bound(double epsilon, int k, double c_tilde) {
  const double kk = static_cast<double>(k);
  return c_tilde * std::pow(c_tilde / epsilon, kk) * std::pow(kk, kk) *
         std::pow(std::log(std::max(kk, 3.0)), kk * (1.0 + epsilon));
}

std::vector<DerivativeNorm> estimate_derivative_norms(const CutoffFunction& f,
                                                      int k_max) {
  require(k_max >= 0 && k_max <= 10, "derivative order must lie in [0, 10]");
  std::vector<DerivativeNorm> out(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) out[static_cast<std::size_t>(k)].k = k;

  const std::size_t n = f.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = cutoff_derivatives(f, k_max, f.grid_t(i));
    for (int k = 0; k <= k_max; ++k) {
      auto& e = out[static_cast<std::size_t>(k)];
      e.spectral = std::max(e.spectral, std::abs(d[static_cast<std::size_t>(k)]));
    }
  }
  out[0].finite_difference = *std::max_element(f.samples.begin(), f.samples.end());
  out[0].reliable = true;

  // Central differences over strides 2, 4, ...; keep the stride whose value
  // is most stable under doubling.
  const double h0 = f.dt();
  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> binom(static_cast<std::size_t>(k) + 1, 1.0);
    for (int i = 1; i <= k; ++i) binom[static_cast<std::size_t>(i)] = binom[static_cast<std::size_t>(i - 1)] * (k - i + 1) / i;
    std::vector<double> est;
    for (long s = 2; s <= 1024; s *= 2) {
      const double h = static_cast<double>(s) * h0;
      double best = 0.0;
      for (long i = 0; i < static_cast<long>(n); ++i) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) {
          const long off = (static_cast<long>(k) * s) / 2 - static_cast<long>(j) * s;
          const double sign = (j & 1) ? -1.0 : 1.0;
          acc += sign * binom[static_cast<std::size_t>(j)] * f.sample(i + off);
        }
        best = std::max(best, std::abs(acc));
      }
      est.push_back(best / std::pow(h, k));
    }
    std::size_t pick = 0;
    double spread = INFINITY;
    for (std::size_t j = 0; j + 1 < est.size(); ++j) {
      const double r = std::abs(est[j] - est[j + 1]) / std::max(est[j + 1], 1e-300);
      if (r < spread) {
        spread = r;
        pick = j;
      }
    }
    auto& e = out[static_cast<std::size_t>(k)];
    e.finite_difference = est[pick];
    e.reliable = std::abs(e.finite_difference - e.spectral) <= 0.05 * e.spectral;
  }
  return out;
}

double check_partition_of_unity(const CutoffFunction& f, double t_lo,
                                double t_hi) {
  require(f.is_band_pass(), "partition check requires TypeC");
  require(t_lo >= 1.0 && t_hi >= t_lo, "partition check needs 1 <= t_lo <= t_hi");
  auto deviation = [&](double t) {
    const int top = static_cast<int>(std::floor(std::log2(t))) + 2;
    double acc = 0.0;
    for (int nu = std::max(0, top - 3); nu <= top; ++nu) {
      const double a = f(std::ldexp(t, -nu));
      acc += a * a;
    }
    return std::abs(acc - 1.0);
  };
  constexpr int kPerOctave = 4096;
  const double octaves = std::log2(t_hi / t_lo);
  const long count = std::max<long>(2, static_cast<long>(std::ceil(octaves * kPerOctave)) + 1);
  double worst = 0.0;
  for (long i = 0; i < count; ++i) {
    const double t = t_lo * std::exp2(octaves * static_cast<double>(i) / static_cast<double>(count - 1));
    worst = std::max(worst, deviation(t));
  }
  for (double t = std::exp2(std::ceil(std::log2(t_lo))); t <= t_hi; t *= 2.0) {
    worst = std::max(worst, deviation(t));
  }
  return worst;
}

void write_cutoff_csv(const CutoffFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << "t,ahat\n";
  char buf[64];
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid_t(i), f.samples[i]);
    out << buf;
  }
}

}  // namespace nloc
