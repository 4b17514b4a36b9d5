#include "nloc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "nloc/error.hpp"

namespace nloc {

namespace {

// Monic recurrence p_{k+1} = (t - a_k) p_k - b_k p_{k-1}.
struct Recurrence {
  std::vector<double> a;
  std::vector<double> b;  // b[0] unused
};

Recurrence recurrence(const WeightId& w, int m) {
  Recurrence r;
  r.a.resize(static_cast<std::size_t>(m));
  r.b.assign(static_cast<std::size_t>(m), 0.0);
  for (int n = 0; n < m; ++n) {
    const double nn = n;
    const auto i = static_cast<std::size_t>(n);
    switch (w.kind) {
      case WeightKind::Hermite:
        r.a[i] = 0.0;
        if (n > 0) r.b[i] = nn / 2.0;
        break;
      case WeightKind::Laguerre:
        r.a[i] = 2.0 * nn + w.alpha + 1.0;
        if (n > 0) r.b[i] = nn * (nn + w.alpha);
        break;
      case WeightKind::Jacobi: {
        const double al = w.alpha;
        const double be = w.beta;
        const double s = al + be;
        if (n == 0) {
          r.a[i] = (be - al) / (s + 2.0);
        } else {
          r.a[i] = (be * be - al * al) / ((2.0 * nn + s) * (2.0 * nn + s + 2.0));
        }
        if (n == 1) {
          r.b[i] = 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
        } else if (n > 1) {
          const double d = 2.0 * nn + s;
          r.b[i] = 4.0 * nn * (nn + al) * (nn + be) * (nn + s) / (d * d * (d + 1.0) * (d - 1.0));
        }
        break;
      }
    }
  }
  return r;
}

// log of 1 / sum_k ptilde_k(t)^2 with the orthonormal recurrence.
double log_christoffel(const Recurrence& r, double mu0, double t) {
  const std::size_t m = r.a.size();
  double prev = 0.0;
  double cur = 1.0;
  double log_scale = -0.5 * std::log(mu0);
  double sum = 1.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double next = ((t - r.a[k]) * cur - (k > 0 ? std::sqrt(r.b[k]) * prev : 0.0)) / std::sqrt(r.b[k + 1]);
    prev = cur;
    cur = next;
    sum += cur * cur;
    if (std::abs(cur) > 1e100) {
      cur *= 1e-100;
      prev *= 1e-100;
      sum *= 1e-200;
      log_scale += 100.0 * std::log(10.0);
    }
  }
  return -(std::log(sum) + 2.0 * log_scale);
}

}  // namespace

void WeightId::validate() const {
  switch (kind) {
    case WeightKind::Jacobi:
      require(alpha > -1.0 && beta > -1.0, "Jacobi parameters must exceed -1");
      break;
    case WeightKind::Laguerre:
      require(alpha > -1.0, "Laguerre parameter must exceed -1");
      break;
    case WeightKind::Hermite:
      break;
  }
}

double WeightId::log_weight(double t) const {
  switch (kind) {
    case WeightKind::Jacobi:
      return alpha * std::log1p(-t) + beta * std::log1p(t);
    case WeightKind::Hermite:
      return -t * t;
    case WeightKind::Laguerre:
      return alpha * std::log(t) - t;
  }
  return 0.0;
}

double WeightId::operator()(double t) const { return std::exp(log_weight(t)); }

double WeightId::zeroth_moment() const {
  switch (kind) {
    case WeightKind::Jacobi: {
      const double s = alpha + beta;
      return std::exp((s + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                      std::lgamma(beta + 1.0) - std::lgamma(s + 2.0));
    }
    case WeightKind::Hermite:
      return std::sqrt(std::numbers::pi);
    case WeightKind::Laguerre:
      return std::tgamma(alpha + 1.0);
  }
  return 0.0;
}

std::string WeightId::name() const {
  switch (kind) {
    case WeightKind::Jacobi: return "jacobi";
    case WeightKind::Hermite: return "hermite";
    case WeightKind::Laguerre: return "laguerre";
  }
  return "?";
}

QuadratureRule gauss_rule(const WeightId& w, int m) {
  w.validate();
  require(m >= 1, "node count must be >= 1");
  const Recurrence rec = recurrence(w, m);
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max(m - 1, 0));
  for (int i = 0; i < m; ++i) diag[i] = rec.a[static_cast<std::size_t>(i)];
  for (int i = 1; i < m; ++i) sub[i - 1] = std::sqrt(rec.b[static_cast<std::size_t>(i)]);

  QuadratureRule rule;
  rule.weight = w;
  rule.m = m;
  rule.exactness = 2 * m - 1;
  const double mu0 = w.zeroth_moment();
  if (m == 1) {
    rule.nodes = {diag[0]};
    rule.weights = {mu0};
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw ConstructionError("tridiagonal eigen-solver did not converge");
    rule.nodes.resize(static_cast<std::size_t>(m));
    rule.weights.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
      const double v = es.eigenvectors()(0, i);
      rule.weights[static_cast<std::size_t>(i)] = mu0 * v * v;
    }
  }
  rule.eigen_weights = rule.weights;
  // Eigenvector components carry absolute, not relative, accuracy; the
  // Christoffel form of the same weights keeps tiny tail weights exact.
  rule.scaled_weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double lw = log_christoffel(rec, mu0, rule.nodes[k]);
    rule.weights[k] = std::exp(lw);
    rule.scaled_weights[k] = std::exp(lw - w.log_weight(rule.nodes[k]));
  }
  // Tail weights of large unbounded rules may underflow; the scaled form
  // stays representable.
  for (std::size_t k = 0; k < rule.weights.size(); ++k) {
    if (!(rule.weights[k] >= 0.0) || !(rule.scaled_weights[k] > 0.0)) {
      throw ConstructionError("non-positive quadrature weight");
    }
  }
  return rule;
}

double monomial_moment(const WeightId& w, int k) {
  require(k >= 0, "moment order must be >= 0");
  switch (w.kind) {
    case WeightKind::Hermite:
      return (k % 2) ? 0.0 : std::tgamma((k + 1.0) / 2.0);
    case WeightKind::Laguerre:
      return std::exp(std::lgamma(k + w.alpha + 1.0));
    case WeightKind::Jacobi: {
      // Integrating d/dt [t^j (1-t)^{a+1} (1+t)^{b+1}] gives
      // (j + a + b + 2) mu_{j+1} = j mu_{j-1} + (b - a) mu_j.
      double prev = 0.0;
      double cur = w.zeroth_moment();
      for (int j = 0; j < k; ++j) {
        const double next = (j * prev + (w.beta - w.alpha) * cur) / (j + w.alpha + w.beta + 2.0);
        prev = cur;
        cur = next;
      }
      return cur;
    }
  }
  return 0.0;
}

double verify_exactness(const QuadratureRule& rule, int degree) {
  require(degree >= 0 && degree <= rule.exactness, "requested degree exceeds rule exactness");
  double worst = 0.0;
  for (int k = 0; k <= degree; ++k) {
    double sum = 0.0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = rule.weights[i] * std::pow(rule.nodes[i], k);
      sum += v;
      abs_sum += std::abs(v);
    }
    const double exact = monomial_moment(rule.weight, k);
    worst = std::max(worst, std::abs(sum - exact) / std::max(std::abs(exact), abs_sum));
  }
  return worst;
}

nlohmann::json describe(const QuadratureRule& rule) {
  nlohmann::json j;
  j["weight"] = rule.weight.name();
  nlohmann::json p = nlohmann::json::object();
  if (rule.weight.kind != WeightKind::Hermite) p["alpha"] = rule.weight.alpha;
  if (rule.weight.kind == WeightKind::Jacobi) p["beta"] = rule.weight.beta;
  j["params"] = p;
  j["m"] = rule.m;
  return j;
}

WeightId weight_from_json(const nlohmann::json& j) {
  const auto name = j.at("weight").get<std::string>();
  const auto p = j.value("params", nlohmann::json::object());
  WeightId w;
  if (name == "jacobi") {
    w = WeightId::jacobi(p.value("alpha", 0.0), p.value("beta", 0.0));
  } else if (name == "hermite") {
    w = WeightId::hermite();
  } else if (name == "laguerre") {
    w = WeightId::laguerre(p.value("alpha", 0.0));
  } else {
    throw InvalidArgument("unknown weight '" + name + "'");
  }
  w.validate();
  return w;
}

void write_quadrature_csv(const QuadratureRule& rule, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << "node,weight\n";
  char buf[64];
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rule.nodes[i], rule.weights[i]);
    out << buf;
  }
}

}  // namespace nloc
