#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace nloc {

enum class WeightKind { Jacobi, Hermite, Laguerre };

/// Jacobi: (1-t)^alpha (1+t)^beta on [-1, 1]; Hermite: e^{-t^2} on R;
/// Laguerre: t^alpha e^{-t} on (0, inf).
struct WeightId {
  WeightKind kind = WeightKind::Jacobi;
  double alpha = 0.0;
  double beta = 0.0;

  static WeightId jacobi(double a, double b) { return {WeightKind::Jacobi, a, b}; }
  static WeightId hermite() { return {WeightKind::Hermite, 0.0, 0.0}; }
  static WeightId laguerre(double a) { return {WeightKind::Laguerre, a, 0.0}; }

  void validate() const;
  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double log_weight(double t) const;
  [[nodiscard]] double zeroth_moment() const;
  [[nodiscard]] std::string name() const;
};

struct QuadratureRule {
  WeightId weight;
  int m = 0;
  std::vector<double> nodes;    ///< increasing
  std::vector<double> weights;  ///< positive
  /// weights[i] / weight(nodes[i]), evaluated without forming the ratio.
  std::vector<double> scaled_weights;
  /// mu_0 v_{0i}^2 from the eigenvectors; agrees with weights where the
  /// latter are not tiny.
  std::vector<double> eigen_weights;
  int exactness = 0;  ///< 2m - 1
};

/// Gauss rule via the eigen-decomposition of the Jacobi matrix.
QuadratureRule gauss_rule(const WeightId& w, int m);

/// Closed-form monomial moment of the weight.
double monomial_moment(const WeightId& w, int k);

/// Max relative error of the rule on t^k, k = 0..degree.
double verify_exactness(const QuadratureRule& rule, int degree);

nlohmann::json describe(const QuadratureRule& rule);
WeightId weight_from_json(const nlohmann::json& j);
void write_quadrature_csv(const QuadratureRule& rule, const std::string& path);

}  // namespace nloc
