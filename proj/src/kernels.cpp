#include "nloc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nloc/error.hpp"
#include "nloc/orthopoly.hpp"
#include "nloc/quadrature.hpp"

namespace nloc {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp_cos(double v) {
  require(std::abs(v) <= 1.0 + 1e-12, "cosine argument outside [-1, 1]");
  return std::clamp(v, -1.0, 1.0);
}

// Coefficients of Q_n^{a,b} = sum_j q_j P_j^{(a,b)}, i.e. of L_n(., 1).
std::vector<double> q_coefficients(double a, double b, const std::vector<double>& ahat) {
  const double s = a + b;
  const double log_cstar = -(s + 1.0) * std::log(2.0) - std::lgamma(a + 1.0);
  std::vector<double> q(ahat.size());
  for (std::size_t j = 0; j < ahat.size(); ++j) {
    const double jj = static_cast<double>(j);
    // (2j+s+1) Gamma(j+s+1) = (2j+s+1)/(j+s+1) Gamma(j+s+2); the ratio is 1 at j = 0.
    const double ratio = j == 0 ? 1.0 : (2.0 * jj + s + 1.0) / (jj + s + 1.0);
    q[j] = ahat[j] * ratio * std::exp(log_cstar + std::lgamma(jj + s + 2.0) - std::lgamma(jj + b + 1.0));
  }
  return q;
}

// C_j^lambda = G_j P_j^{(lambda-1/2, lambda-1/2)}.
double gegenbauer_factor(double lambda, int j) {
  const double jj = j;
  return std::exp(std::lgamma(lambda + 0.5) - std::lgamma(2.0 * lambda) + std::lgamma(jj + 2.0 * lambda) -
                  std::lgamma(jj + lambda + 0.5));
}

double jacobi_series(double a, double b, const std::vector<double>& c, double x) {
  if (c.empty()) return 0.0;
  std::vector<double> p(c.size());
  jacobi_values(a, b, static_cast<int>(c.size()) - 1, x, p.data());
  double acc = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) acc += c[j] * p[j];
  return acc;
}

void chebyshev_normalized(int n_max, double x, double* out) {
  double tm = 1.0;
  double t = x;
  out[0] = std::sqrt(1.0 / kPi);
  const double s = std::sqrt(2.0 / kPi);
  for (int k = 1; k <= n_max; ++k) {
    out[k] = s * t;
    const double tn = 2.0 * x * t - tm;
    tm = t;
    t = tn;
  }
}

void legendre_normalized(int n_max, double x, double* out) {
  jacobi_values(0.0, 0.0, n_max, x, out);
  for (int k = 0; k <= n_max; ++k) out[k] *= std::sqrt(k + 0.5);
}

// Coefficient of z^j in prod_i (sum_k u_i[k] z^k), j < len.
std::vector<double> convolve_all(const std::vector<std::vector<double>>& u, std::size_t len) {
  std::vector<double> acc(u[0].begin(), u[0].begin() + static_cast<long>(len));
  for (std::size_t i = 1; i < u.size(); ++i) {
    std::vector<double> next(len, 0.0);
    for (std::size_t a = 0; a < len; ++a) {
      if (acc[a] == 0.0) continue;
      for (std::size_t b = 0; a + b < len; ++b) next[a + b] += acc[a] * u[i][b];
    }
    acc = std::move(next);
  }
  return acc;
}

// Normalized Gauss-Jacobi(p, p) rule on [-1, 1] with unit mass; p = -1 is
// the two-point limit at +-1.
struct UnitRule {
  std::vector<double> x;
  std::vector<double> w;
};

UnitRule unit_rule(double p, int m) {
  if (p <= -1.0) return {{-1.0, 1.0}, {0.5, 0.5}};
  const auto r = gauss_rule(WeightId::jacobi(p, p), m);
  const double mass = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
  UnitRule u{r.nodes, r.weights};
  for (double& w : u.w) w /= mass;
  return u;
}

template <class Eval>
double adaptive_doubling(int m0, Eval&& eval) {
  double prev = eval(m0);
  for (int m = 2 * m0; m <= 64 * m0; m *= 2) {
    const double cur = eval(m);
    if (std::abs(cur - prev) <= 1e-9 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw ConstructionError("auxiliary quadrature did not stabilize");
}

double norm2(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double dot(const Point& x, const Point& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void check_dim(const FamilyParams& p, const Point& x) {
  require(static_cast<int>(x.size()) == p.point_dim(), "point has the wrong number of coordinates");
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Trig: return "trig";
    case Family::Chebyshev: return "chebyshev";
    case Family::Jacobi: return "jacobi";
    case Family::Sphere: return "sphere";
    case Family::Ball: return "ball";
    case Family::Simplex: return "simplex";
    case Family::Hermite: return "hermite";
    case Family::Laguerre: return "laguerre";
    case Family::TensorLegendre2D: return "legleg";
    case Family::TensorChebyshev2D: return "chebcheb";
    case Family::MixedChebLegendre2D: return "chebleg";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  for (Family f : {Family::Trig, Family::Chebyshev, Family::Jacobi, Family::Sphere, Family::Ball,
                   Family::Simplex, Family::Hermite, Family::Laguerre, Family::TensorLegendre2D,
                   Family::TensorChebyshev2D, Family::MixedChebLegendre2D}) {
    if (to_string(f) == s) return f;
  }
  throw InvalidArgument("unknown family '" + s + "'");
}

void FamilyParams::validate() const {
  switch (family) {
    case Family::Jacobi:
      require(alpha > -1.0 && beta > -1.0, "Jacobi parameters must exceed -1");
      break;
    case Family::Sphere:
      require(d >= 2, "sphere dimension must be >= 2");
      break;
    case Family::Ball:
      require(mu > 0.0, "ball parameter mu must be positive");
      require(d >= 1, "ball dimension must be >= 1");
      break;
    case Family::Simplex:
      require(d == 1 || d == 2, "simplex kernels support d in {1, 2}");
      require(static_cast<int>(kappa.size()) == d + 1, "simplex needs d + 1 kappa entries");
      for (double k : kappa) require(k >= 0.0, "simplex kappa entries must be >= 0");
      break;
    case Family::Hermite:
      require(d >= 1 && d <= 3, "Hermite kernels support d in {1, 2, 3}");
      break;
    case Family::Laguerre:
      require(d >= 1 && d <= 2, "Laguerre kernels support d in {1, 2}");
      require(static_cast<int>(alphas.size()) == d, "Laguerre needs d alpha entries");
      for (double a : alphas) require(a >= 0.0, "Laguerre alpha entries must be >= 0");
      break;
    default:
      break;
  }
}

int FamilyParams::point_dim() const {
  switch (family) {
    case Family::Trig:
    case Family::Chebyshev:
    case Family::Jacobi:
      return 1;
    case Family::Sphere:
      return d + 1;
    case Family::Ball:
    case Family::Simplex:
    case Family::Hermite:
    case Family::Laguerre:
      return d;
    default:
      return 2;
  }
}

nlohmann::json to_json(const FamilyParams& p) {
  nlohmann::json j;
  j["family"] = to_string(p.family);
  switch (p.family) {
    case Family::Jacobi:
      j["alpha"] = p.alpha;
      j["beta"] = p.beta;
      break;
    case Family::Sphere:
    case Family::Hermite:
      j["d"] = p.d;
      break;
    case Family::Ball:
      j["mu"] = p.mu;
      j["d"] = p.d;
      break;
    case Family::Simplex:
      j["kappa"] = p.kappa;
      break;
    case Family::Laguerre:
      j["alpha"] = p.alphas;
      break;
    default:
      break;
  }
  return j;
}

FamilyParams family_params_from_json(const nlohmann::json& j) {
  FamilyParams p;
  p.family = family_from_string(j.at("family").get<std::string>());
  p.d = j.value("d", 1);
  switch (p.family) {
    case Family::Jacobi:
      p.alpha = j.value("alpha", 0.0);
      p.beta = j.value("beta", 0.0);
      break;
    case Family::Sphere:
      p.d = j.value("d", 2);
      break;
    case Family::Ball:
      p.mu = j.value("mu", 0.5);
      break;
    case Family::Simplex:
      p.kappa = j.value("kappa", std::vector<double>{0.5, 0.5});
      p.d = static_cast<int>(p.kappa.size()) - 1;
      break;
    case Family::Laguerre:
      if (j.contains("alpha") && j.at("alpha").is_array()) {
        p.alphas = j.at("alpha").get<std::vector<double>>();
      } else {
        p.alphas.assign(static_cast<std::size_t>(p.d), j.value("alpha", 0.0));
      }
      p.d = static_cast<int>(p.alphas.size());
      break;
    default:
      break;
  }
  p.validate();
  return p;
}

KernelInstance::KernelInstance(FamilyParams params, std::shared_ptr<const CutoffFunction> cutoff, int n)
    : params_(std::move(params)), cutoff_(std::move(cutoff)), n_(n) {
  params_.validate();
  require(cutoff_ != nullptr, "kernel needs a cutoff");
  require(n_ >= 1, "kernel level n must be >= 1");
  ahat_.resize(static_cast<std::size_t>(2 * n_));
  for (int j = 0; j < 2 * n_; ++j) ahat_[static_cast<std::size_t>(j)] = (*cutoff_)(static_cast<double>(j) / n_);

  switch (params_.family) {
    case Family::Jacobi: {
      inv_norm_.resize(ahat_.size());
      for (std::size_t j = 0; j < ahat_.size(); ++j) {
        inv_norm_[j] = 1.0 / jacobi_norm({params_.alpha, params_.beta}, static_cast<int>(j));
      }
      series_ = q_coefficients(params_.alpha, params_.beta, ahat_);
      break;
    }
    case Family::Sphere: {
      const double lambda = (params_.d - 1) / 2.0;
      series_.resize(ahat_.size());
      const double area = sphere_area(params_.d);
      for (std::size_t j = 0; j < ahat_.size(); ++j) {
        series_[j] = ahat_[j] * (static_cast<double>(j) + lambda) / (lambda * area) *
                     gegenbauer_factor(lambda, static_cast<int>(j));
      }
      break;
    }
    case Family::Ball: {
      const double lambda = params_.mu + (params_.d - 1) / 2.0;
      series_.resize(ahat_.size());
      for (std::size_t j = 0; j < ahat_.size(); ++j) {
        series_[j] = ahat_[j] * (static_cast<double>(j) + lambda) / lambda *
                     gegenbauer_factor(lambda, static_cast<int>(j));
      }
      series_scale_ = 1.0 / ball_volume(params_.mu, params_.d);
      break;
    }
    case Family::Simplex: {
      double lambda = (params_.d - 1) / 2.0;
      for (double k : params_.kappa) lambda += k;
      // (2j+lambda)/lambda C_{2j}^lambda(z) = K(lambda) * [Q-term](2z^2 - 1)
      const double k_lambda = std::exp(std::lgamma(0.5) + std::lgamma(lambda + 0.5) +
                                       lambda * std::log(2.0) - std::lgamma(lambda + 1.0));
      series_ = q_coefficients(lambda - 0.5, -0.5, ahat_);
      for (double& c : series_) c *= k_lambda;
      series_scale_ = 1.0 / simplex_volume(params_.kappa);
      break;
    }
    default:
      break;
  }
}

double KernelInstance::operator()(const Point& x, const Point& y) const {
  check_dim(params_, x);
  check_dim(params_, y);
  switch (params_.family) {
    case Family::Trig:
      return trig_kernel(*this, x[0] - y[0]);
    case Family::Chebyshev:
      return chebyshev_kernel(*this, x[0], y[0]);
    case Family::Jacobi:
      return jacobi_kernel(*this, x[0], y[0]);
    case Family::Sphere:
      return sphere_kernel(*this, dot(x, y));
    case Family::Ball:
      return ball_kernel(*this, x, y);
    case Family::Simplex:
      return simplex_kernel(*this, x, y);
    case Family::Hermite:
      return hermite_kernel(*this, x, y);
    case Family::Laguerre:
      return laguerre_kernel(*this, x, y);
    case Family::TensorLegendre2D:
      return tensor2d_kernel(TensorVariant::LegLeg, *cutoff_, n_, x, y);
    case Family::TensorChebyshev2D:
      return tensor2d_kernel(TensorVariant::ChebCheb, *cutoff_, n_, x, y);
    case Family::MixedChebLegendre2D:
      return tensor2d_kernel(TensorVariant::ChebLeg, *cutoff_, n_, x, y);
  }
  return 0.0;
}

double trig_kernel(const KernelInstance& K, double theta) {
  const auto& a = K.coefficients();
  double acc = 0.5 * a[0];
  for (std::size_t j = 1; j < a.size(); ++j) acc += a[j] * std::cos(static_cast<double>(j) * theta);
  return acc;
}

double chebyshev_kernel(const KernelInstance& K, double x, double y) {
  x = clamp_cos(x);
  y = clamp_cos(y);
  const auto& a = K.coefficients();
  const int top = static_cast<int>(a.size()) - 1;
  std::vector<double> tx(a.size());
  std::vector<double> ty(a.size());
  chebyshev_normalized(top, x, tx.data());
  chebyshev_normalized(top, y, ty.data());
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * tx[j] * ty[j];
  return acc;
}

double jacobi_kernel(const KernelInstance& K, double x, double y) {
  require(K.params().family == Family::Jacobi, "jacobi_kernel needs a Jacobi instance");
  x = clamp_cos(x);
  y = clamp_cos(y);
  const auto& a = K.coefficients();
  const int top = static_cast<int>(a.size()) - 1;
  std::vector<double> px(a.size());
  std::vector<double> py(a.size());
  jacobi_values(K.params().alpha, K.params().beta, top, x, px.data());
  jacobi_values(K.params().alpha, K.params().beta, top, y, py.data());
  const auto& inv = K.inverse_norms();
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * inv[j] * px[j] * py[j];
  return acc;
}

double jacobi_Q(const KernelInstance& K, double x) {
  require(K.params().family == Family::Jacobi, "jacobi_Q needs a Jacobi instance");
  return jacobi_series(K.params().alpha, K.params().beta, K.series_, clamp_cos(x));
}

SummationByPartsState summation_by_parts_state(const CutoffFunction& cutoff, double alpha, double beta,
                                               int n, int k) {
  require(alpha > -1.0 && beta > -1.0, "Jacobi parameters must exceed -1");
  require(n >= 4 && k >= 1 && 4 * k <= n, "summation by parts needs 1 <= k <= n/4");
  const double s = alpha + beta;
  const int len = 2 * n + k + 2;
  std::vector<double> a(static_cast<std::size_t>(len) + 1);
  for (int t = 0; t <= len; ++t) a[static_cast<std::size_t>(t)] = cutoff(static_cast<double>(t) / n);
  std::vector<double> A(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) A[static_cast<std::size_t>(t)] = a[static_cast<std::size_t>(t)] - a[static_cast<std::size_t>(t + 1)];
  for (int kk = 1; kk < k; ++kk) {
    std::vector<double> next(A.size() - 1);
    for (std::size_t t = 0; t < next.size(); ++t) {
      const double tt = static_cast<double>(t);
      next[t] = A[t] / (2.0 * tt + s + kk + 1.0) - A[t + 1] / (2.0 * tt + s + kk + 3.0);
    }
    A = std::move(next);
  }
  A.resize(static_cast<std::size_t>(2 * n) + 1);
  return {alpha, beta, n, k, std::move(A)};
}

double summation_by_parts_sum(const SummationByPartsState& st, double x) {
  x = clamp_cos(x);
  const double s = st.alpha + st.beta;
  const double log_cstar = -(s + 1.0) * std::log(2.0) - std::lgamma(st.alpha + 1.0);
  std::vector<double> c(st.A.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double jj = static_cast<double>(j);
    c[j] = st.A[j] * std::exp(log_cstar + std::lgamma(jj + s + st.k + 1.0) - std::lgamma(jj + st.beta + 1.0));
  }
  return jacobi_series(st.alpha + st.k, st.beta, c, x);
}

double summation_by_parts_first(const CutoffFunction& cutoff, double alpha, double beta, int n, double x) {
  x = clamp_cos(x);
  const double s = alpha + beta;
  const double log_cstar = -(s + 1.0) * std::log(2.0) - std::lgamma(alpha + 1.0);
  std::vector<double> c(static_cast<std::size_t>(2 * n) + 1);
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double jj = static_cast<double>(j);
    const double diff = cutoff(jj / n) - cutoff((jj + 1.0) / n);
    c[j] = diff * std::exp(log_cstar + std::lgamma(jj + s + 2.0) - std::lgamma(jj + beta + 1.0));
  }
  return jacobi_series(alpha + 1.0, beta, c, x);
}

double verify_summation_by_parts(const CutoffFunction& cutoff, double alpha, double beta, int n, int k,
                                 double x) {
  const auto st = summation_by_parts_state(cutoff, alpha, beta, n, k);
  auto shared = std::make_shared<CutoffFunction>(cutoff);
  const KernelInstance K(FamilyParams::jacobi(alpha, beta), shared, n);
  const double q = jacobi_Q(K, x);
  return std::abs(summation_by_parts_sum(st, x) - q) / std::max(1.0, std::abs(q));
}

double sphere_area(int d) {
  return 2.0 * std::pow(kPi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0);
}

double sphere_jacobi_constant(int d) {
  require(d >= 2, "sphere dimension must be >= 2");
  const double lambda = (d - 1) / 2.0;
  return std::exp(2.0 * std::lgamma(lambda + 0.5) + 2.0 * lambda * std::log(2.0) - std::lgamma(2.0 * lambda)) /
         (2.0 * lambda * sphere_area(d));
}

double sphere_kernel(const KernelInstance& K, double cosine) {
  require(K.params().family == Family::Sphere, "sphere_kernel needs a sphere instance");
  const double a = (K.params().d - 2) / 2.0;
  return jacobi_series(a, a, K.series_, clamp_cos(cosine));
}

double ball_volume(double mu, int d) {
  return std::exp(d / 2.0 * std::log(kPi) + std::lgamma(mu + 0.5) - std::lgamma(mu + 0.5 + d / 2.0));
}

double ball_kernel(const KernelInstance& K, const Point& x, const Point& y) {
  const auto& p = K.params();
  require(p.family == Family::Ball, "ball_kernel needs a ball instance");
  check_dim(p, x);
  check_dim(p, y);
  const double nx = norm2(x);
  const double ny = norm2(y);
  require(nx <= 1.0 + 1e-12 && ny <= 1.0 + 1e-12, "ball points must have norm <= 1");
  const double ab = std::sqrt(std::max(0.0, 1.0 - nx)) * std::sqrt(std::max(0.0, 1.0 - ny));
  const double inner = dot(x, y);
  const double a = p.mu + (p.d - 1) / 2.0 - 0.5;
  auto Q = [&](double t) { return jacobi_series(a, a, K.series_, std::clamp(t, -1.0, 1.0)); };
  if (ab == 0.0) return K.series_scale_ * Q(inner);
  const double value = adaptive_doubling(K.n() + 16, [&](int m) {
    const UnitRule r = unit_rule(p.mu - 1.0, m);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * Q(inner + r.x[i] * ab);
    return acc;
  });
  return K.series_scale_ * value;
}

double simplex_volume(const std::vector<double>& kappa) {
  double s = 0.0;
  double acc = 0.0;
  for (double k : kappa) {
    acc += std::lgamma(k + 0.5);
    s += k;
  }
  const double d = static_cast<double>(kappa.size()) - 1.0;
  return std::exp(acc - std::lgamma(s + (d + 1.0) / 2.0));
}

double simplex_kernel(const KernelInstance& K, const Point& x, const Point& y) {
  const auto& p = K.params();
  require(p.family == Family::Simplex, "simplex_kernel needs a simplex instance");
  check_dim(p, x);
  check_dim(p, y);
  auto barycentric = [](const Point& v) {
    Point b = v;
    double s = 0.0;
    for (double c : v) {
      require(c >= -1e-12, "simplex coordinates must be >= 0");
      s += c;
    }
    require(s <= 1.0 + 1e-12, "simplex coordinates must sum to <= 1");
    b.push_back(std::max(0.0, 1.0 - s));
    return b;
  };
  const Point bx = barycentric(x);
  const Point by = barycentric(y);
  std::vector<double> root(bx.size());
  for (std::size_t i = 0; i < bx.size(); ++i) root[i] = std::sqrt(std::max(0.0, bx[i]) * std::max(0.0, by[i]));
  double lambda = (p.d - 1) / 2.0;
  for (double k : p.kappa) lambda += k;
  auto G = [&](double z) {
    return jacobi_series(lambda - 0.5, -0.5, K.series_, std::clamp(2.0 * z * z - 1.0, -1.0, 1.0));
  };
  const double value = adaptive_doubling(K.n() + 16, [&](int m) {
    std::vector<UnitRule> rules;
    for (double k : p.kappa) rules.push_back(unit_rule(k > 0.0 ? k - 1.0 : -1.0, m));
    double acc = 0.0;
    // Odometer over the tensor grid.
    std::vector<std::size_t> idx(rules.size(), 0);
    while (true) {
      double z = 0.0;
      double w = 1.0;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        z += root[i] * rules[i].x[idx[i]];
        w *= rules[i].w[idx[i]];
      }
      acc += w * G(z);
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == rules[i].x.size()) idx[i++] = 0;
      if (i == idx.size()) break;
    }
    return acc;
  });
  return K.series_scale_ * value;
}

double hermite_kernel(const KernelInstance& K, const Point& x, const Point& y) {
  const auto& p = K.params();
  require(p.family == Family::Hermite, "hermite_kernel needs a Hermite instance");
  check_dim(p, x);
  check_dim(p, y);
  const auto& a = K.coefficients();
  const int top = static_cast<int>(a.size()) - 1;
  std::vector<std::vector<double>> u(static_cast<std::size_t>(p.d), std::vector<double>(a.size()));
  std::vector<double> hx(a.size());
  std::vector<double> hy(a.size());
  for (int i = 0; i < p.d; ++i) {
    hermite_fn_values(top, x[static_cast<std::size_t>(i)], hx.data());
    hermite_fn_values(top, y[static_cast<std::size_t>(i)], hy.data());
    for (std::size_t k = 0; k < a.size(); ++k) u[static_cast<std::size_t>(i)][k] = hx[k] * hy[k];
  }
  const auto blocks = convolve_all(u, a.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * blocks[j];
  return acc;
}

double laguerre_kernel(const KernelInstance& K, const Point& x, const Point& y) {
  const auto& p = K.params();
  require(p.family == Family::Laguerre, "laguerre_kernel needs a Laguerre instance");
  check_dim(p, x);
  check_dim(p, y);
  const auto& a = K.coefficients();
  const int top = static_cast<int>(a.size()) - 1;
  std::vector<std::vector<double>> u(static_cast<std::size_t>(p.d), std::vector<double>(a.size()));
  std::vector<double> fx(a.size());
  std::vector<double> fy(a.size());
  for (int i = 0; i < p.d; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    require(x[ii] >= 0.0 && y[ii] >= 0.0, "Laguerre coordinates must be >= 0");
    laguerre_fn_values(p.alphas[ii], top, x[ii], LaguerreKind::F, fx.data());
    laguerre_fn_values(p.alphas[ii], top, y[ii], LaguerreKind::F, fy.data());
    for (std::size_t k = 0; k < a.size(); ++k) u[ii][k] = fx[k] * fy[k];
  }
  const auto blocks = convolve_all(u, a.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * blocks[j];
  return acc;
}

double laguerre_K_kernel(const std::vector<double>& alpha, int d, int n, int k, const CutoffFunction& cutoff,
                         double t) {
  require(static_cast<int>(alpha.size()) == d, "alpha must have d entries");
  require(n >= 1 && k >= 0 && 4 * k <= n, "laguerre_K_kernel needs 0 <= k <= n/4");
  require(t >= 0.0, "argument must be >= 0");
  double abs_alpha = 0.0;
  for (double a : alpha) abs_alpha += a;
  const int len = 2 * n + k + 2;
  std::vector<double> diff(static_cast<std::size_t>(len));
  for (int m = 0; m < len; ++m) diff[static_cast<std::size_t>(m)] = cutoff(static_cast<double>(m) / n);
  for (int order = 0; order <= k; ++order) {
    for (std::size_t m = 0; m + 1 < diff.size(); ++m) diff[m] = diff[m + 1] - diff[m];
    diff.pop_back();
  }
  const int top = 2 * n - 1;
  std::vector<double> L(static_cast<std::size_t>(top) + 1);
  laguerre_scaled_values(abs_alpha + k + d, top, t, L.data());
  double acc = 0.0;
  for (int m = 0; m <= top; ++m) acc += diff[static_cast<std::size_t>(m)] * L[static_cast<std::size_t>(m)];
  return acc;
}

std::string to_string(TensorVariant v) {
  switch (v) {
    case TensorVariant::LegLeg: return "legleg";
    case TensorVariant::ChebCheb: return "chebcheb";
    case TensorVariant::ChebLeg: return "chebleg";
  }
  return "?";
}

TensorVariant tensor_variant_from_string(const std::string& s) {
  for (auto v : {TensorVariant::LegLeg, TensorVariant::ChebCheb, TensorVariant::ChebLeg}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidArgument("unknown tensor variant '" + s + "'");
}

Family tensor_family(TensorVariant v) {
  switch (v) {
    case TensorVariant::LegLeg: return Family::TensorLegendre2D;
    case TensorVariant::ChebCheb: return Family::TensorChebyshev2D;
    case TensorVariant::ChebLeg: return Family::MixedChebLegendre2D;
  }
  return Family::TensorLegendre2D;
}

namespace {

std::vector<double> tensor_blocks(TensorVariant v, int top, const Point& x, const Point& y) {
  require(x.size() == 2 && y.size() == 2, "tensor kernels take 2-vectors");
  for (double c : {x[0], x[1], y[0], y[1]}) require(std::abs(c) <= 1.0 + 1e-12, "coordinates must lie in [-1, 1]");
  const auto len = static_cast<std::size_t>(top) + 1;
  std::vector<std::vector<double>> u(2, std::vector<double>(len));
  std::vector<double> bx(len);
  std::vector<double> by(len);
  for (int i = 0; i < 2; ++i) {
    const bool cheb = v == TensorVariant::ChebCheb || (v == TensorVariant::ChebLeg && i == 0);
    const double xi = std::clamp(x[static_cast<std::size_t>(i)], -1.0, 1.0);
    const double yi = std::clamp(y[static_cast<std::size_t>(i)], -1.0, 1.0);
    if (cheb) {
      chebyshev_normalized(top, xi, bx.data());
      chebyshev_normalized(top, yi, by.data());
    } else {
      legendre_normalized(top, xi, bx.data());
      legendre_normalized(top, yi, by.data());
    }
    for (std::size_t k = 0; k < len; ++k) u[static_cast<std::size_t>(i)][k] = bx[k] * by[k];
  }
  return convolve_all(u, len);
}

}  // namespace

double tensor2d_block(TensorVariant v, int m, const Point& x, const Point& y) {
  require(m >= 0, "block degree must be >= 0");
  return tensor_blocks(v, m, x, y)[static_cast<std::size_t>(m)];
}

double tensor2d_kernel(TensorVariant v, const CutoffFunction& cutoff, int n, const Point& x, const Point& y) {
  require(n >= 1, "kernel level n must be >= 1");
  const auto blocks = tensor_blocks(v, 2 * n - 1, x, y);
  double acc = 0.0;
  for (std::size_t m = 0; m < blocks.size(); ++m) acc += cutoff(static_cast<double>(m) / n) * blocks[m];
  return acc;
}

double distance(const FamilyParams& p, const Point& x, const Point& y) {
  check_dim(p, x);
  check_dim(p, y);
  switch (p.family) {
    case Family::Trig: {
      const double d = std::remainder(x[0] - y[0], 2.0 * kPi);
      return std::abs(d);
    }
    case Family::Chebyshev:
    case Family::Jacobi:
      return std::abs(std::acos(clamp_cos(x[0])) - std::acos(clamp_cos(y[0])));
    case Family::Sphere:
      return std::acos(clamp_cos(dot(x, y)));
    case Family::Ball: {
      const double r = std::sqrt(std::max(0.0, 1.0 - norm2(x))) * std::sqrt(std::max(0.0, 1.0 - norm2(y)));
      return std::acos(clamp_cos(dot(x, y) + r));
    }
    case Family::Simplex: {
      double s = 0.0;
      double sx = 0.0;
      double sy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::sqrt(std::max(0.0, x[i] * y[i]));
        sx += x[i];
        sy += y[i];
      }
      s += std::sqrt(std::max(0.0, (1.0 - sx) * (1.0 - sy)));
      return std::acos(clamp_cos(s));
    }
    case Family::Hermite:
    case Family::Laguerre: {
      double m = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
      return m;
    }
    default: {
      double m = 0.0;
      for (std::size_t i = 0; i < 2; ++i) {
        m = std::max(m, std::abs(std::acos(clamp_cos(x[i])) - std::acos(clamp_cos(y[i]))));
      }
      return m;
    }
  }
}

double weight_factor(const FamilyParams& p, int n, const Point& x) {
  check_dim(p, x);
  require(n >= 1, "n must be >= 1");
  const double nn = n;
  switch (p.family) {
    case Family::Jacobi: {
      const double e = 1.0 / (nn * nn);
      return std::pow(1.0 - x[0] + e, p.alpha + 0.5) * std::pow(1.0 + x[0] + e, p.beta + 0.5);
    }
    case Family::Ball:
      return std::pow(std::sqrt(std::max(0.0, 1.0 - norm2(x))) + 1.0 / nn, 2.0 * p.mu);
    case Family::Simplex: {
      double acc = 1.0;
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        acc *= std::pow(x[i] + 1.0 / (nn * nn), p.kappa[i]);
        s += x[i];
      }
      return acc * std::pow(std::max(0.0, 1.0 - s) + 1.0 / (nn * nn), p.kappa.back());
    }
    case Family::Laguerre: {
      double acc = 1.0;
      for (std::size_t i = 0; i < x.size(); ++i) acc *= std::pow(x[i] + 1.0 / std::sqrt(nn), 2.0 * p.alphas[i] + 1.0);
      return acc;
    }
    case Family::TensorLegendre2D: {
      const double e = 1.0 / (nn * nn);
      double acc = 1.0;
      for (double c : x) acc *= std::sqrt((1.0 - c + e) * (1.0 + c + e));
      return acc;
    }
    default:
      return 1.0;
  }
}

std::vector<double> basis_values(const FamilyParams& p, int n_max, double x) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  switch (p.family) {
    case Family::Chebyshev:
      chebyshev_normalized(n_max, clamp_cos(x), out.data());
      break;
    case Family::Jacobi: {
      jacobi_values(p.alpha, p.beta, n_max, clamp_cos(x), out.data());
      for (int j = 0; j <= n_max; ++j) out[static_cast<std::size_t>(j)] /= std::sqrt(jacobi_norm({p.alpha, p.beta}, j));
      break;
    }
    case Family::Hermite:
      require(p.d == 1, "basis_values needs d = 1");
      hermite_fn_values(n_max, x, out.data());
      break;
    case Family::Laguerre:
      require(p.d == 1, "basis_values needs d = 1");
      require(x >= 0.0, "Laguerre argument must be >= 0");
      laguerre_fn_values(p.alphas[0], n_max, x, LaguerreKind::F, out.data());
      break;
    default:
      throw InvalidArgument("basis_values supports Chebyshev, Jacobi, Hermite and Laguerre");
  }
  return out;
}

}  // namespace nloc
