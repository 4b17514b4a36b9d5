#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nloc/cutoff.hpp"

namespace nloc {

enum class Family {
  Trig,
  Chebyshev,
  Jacobi,
  Sphere,
  Ball,
  Simplex,
  Hermite,
  Laguerre,
  TensorLegendre2D,
  TensorChebyshev2D,
  MixedChebLegendre2D,
};

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct FamilyParams {
  Family family = Family::Chebyshev;
  double alpha = 0.0;  ///< Jacobi
  double beta = 0.0;   ///< Jacobi
  int d = 1;           ///< Sphere S^d, Ball B^d, Simplex T^d, Hermite/Laguerre R^d
  double mu = 0.5;     ///< Ball
  std::vector<double> kappa;  ///< Simplex, d + 1 entries
  std::vector<double> alphas; ///< Laguerre, d entries

  static FamilyParams of(Family f) { FamilyParams p; p.family = f; return p; }
  static FamilyParams trig() { return of(Family::Trig); }
  static FamilyParams chebyshev() { return of(Family::Chebyshev); }
  static FamilyParams jacobi(double a, double b) { FamilyParams p = of(Family::Jacobi); p.alpha = a; p.beta = b; return p; }
  static FamilyParams sphere(int d) { FamilyParams p = of(Family::Sphere); p.d = d; return p; }
  static FamilyParams ball(double mu, int d) { FamilyParams p = of(Family::Ball); p.mu = mu; p.d = d; return p; }
  static FamilyParams simplex(std::vector<double> kappa) {
    FamilyParams p = of(Family::Simplex);
    p.d = static_cast<int>(kappa.size()) - 1;
    p.kappa = std::move(kappa);
    return p;
  }
  static FamilyParams hermite(int d) { FamilyParams p = of(Family::Hermite); p.d = d; return p; }
  static FamilyParams laguerre(std::vector<double> alphas) {
    FamilyParams p = of(Family::Laguerre);
    p.d = static_cast<int>(alphas.size());
    p.alphas = std::move(alphas);
    return p;
  }
  static FamilyParams tensor(Family f) { return of(f); }

  void validate() const;
  /// Number of coordinates of a domain point.
  [[nodiscard]] int point_dim() const;
  /// Points are one real coordinate.
  [[nodiscard]] bool is_univariate() const { return point_dim() == 1; }
};

nlohmann::json to_json(const FamilyParams& p);
FamilyParams family_params_from_json(const nlohmann::json& j);

using Point = std::vector<double>;

/// L_n(x, y) = sum_j ahat(j/n) P_j(x, y) for one orthogonal system.
class KernelInstance {
 public:
  KernelInstance(FamilyParams params, std::shared_ptr<const CutoffFunction> cutoff, int n);

  [[nodiscard]] const FamilyParams& params() const { return params_; }
  [[nodiscard]] const CutoffFunction& cutoff() const { return *cutoff_; }
  [[nodiscard]] std::shared_ptr<const CutoffFunction> cutoff_ptr() const { return cutoff_; }
  [[nodiscard]] int n() const { return n_; }
  /// ahat(j/n) for j = 0..2n-1.
  [[nodiscard]] const std::vector<double>& coefficients() const { return ahat_; }

  [[nodiscard]] double operator()(const Point& x, const Point& y) const;
  /// Univariate shorthand.
  [[nodiscard]] double operator()(double x, double y) const { return (*this)(Point{x}, Point{y}); }

  /// Jacobi-expansion coefficients used by Q-type sums.
  [[nodiscard]] const std::vector<double>& series() const { return series_; }
  [[nodiscard]] const std::vector<double>& inverse_norms() const { return inv_norm_; }

 private:
  FamilyParams params_;
  std::shared_ptr<const CutoffFunction> cutoff_;
  int n_;
  std::vector<double> ahat_;
  std::vector<double> inv_norm_;
  std::vector<double> series_;
  double series_scale_ = 1.0;

  friend double sphere_kernel(const KernelInstance&, double);
  friend double ball_kernel(const KernelInstance&, const Point&, const Point&);
  friend double simplex_kernel(const KernelInstance&, const Point&, const Point&);
  friend double jacobi_Q(const KernelInstance&, double);
};

/// F_n(theta) = ahat(0)/2 + sum_{j>=1} ahat(j/n) cos(j theta).
double trig_kernel(const KernelInstance& K, double theta);
double chebyshev_kernel(const KernelInstance& K, double x, double y);
double jacobi_kernel(const KernelInstance& K, double x, double y);
/// L_n(x, 1) through the Gamma-ratio form.
double jacobi_Q(const KernelInstance& K, double x);

struct SummationByPartsState {
  double alpha = 0.0;
  double beta = 0.0;
  int n = 0;
  int k = 0;
  std::vector<double> A;  ///< A_k(j), j = 0..2n
};

SummationByPartsState summation_by_parts_state(const CutoffFunction& cutoff, double alpha,
                                               double beta, int n, int k);
/// c* sum_j A_k(j) Gamma(j+alpha+k+beta+1)/Gamma(j+beta+1) P_j^{(alpha+k,beta)}(x).
double summation_by_parts_sum(const SummationByPartsState& s, double x);
/// The single Abel transform written with first differences of ahat.
double summation_by_parts_first(const CutoffFunction& cutoff, double alpha, double beta,
                                int n, double x);
/// |ladder sum - jacobi_Q| / max(1, |jacobi_Q|).
double verify_summation_by_parts(const CutoffFunction& cutoff, double alpha, double beta,
                                 int n, int k, double x);

double sphere_kernel(const KernelInstance& K, double cosine);
/// Constant c(d) with sphere_kernel = c(d) Q_n^{lambda-1/2, lambda-1/2}.
double sphere_jacobi_constant(int d);
/// Surface area of S^d.
double sphere_area(int d);

double ball_kernel(const KernelInstance& K, const Point& x, const Point& y);
/// Integral of (1 - |x|^2)^{mu - 1/2} over B^d.
double ball_volume(double mu, int d);

double simplex_kernel(const KernelInstance& K, const Point& x, const Point& y);
/// Integral of prod x_i^{kappa_i - 1/2} over T^d.
double simplex_volume(const std::vector<double>& kappa);

double hermite_kernel(const KernelInstance& K, const Point& x, const Point& y);
double laguerre_kernel(const KernelInstance& K, const Point& x, const Point& y);

/// sum_m Delta^{k+1} ahat(m/n) L_m^{|alpha|+k+d}(t) e^{-t/2}.
double laguerre_K_kernel(const std::vector<double>& alpha, int d, int n, int k,
                         const CutoffFunction& cutoff, double t);

enum class TensorVariant { LegLeg, ChebCheb, ChebLeg };
std::string to_string(TensorVariant v);
TensorVariant tensor_variant_from_string(const std::string& s);
Family tensor_family(TensorVariant v);

/// Diagonal-degree block sum_{nu1+nu2=m} of normalized products.
double tensor2d_block(TensorVariant v, int m, const Point& x, const Point& y);
double tensor2d_kernel(TensorVariant v, const CutoffFunction& cutoff, int n, const Point& x,
                       const Point& y);

/// Geodesic-type distance of the family.
double distance(const FamilyParams& p, const Point& x, const Point& y);
/// Normalization factor W(n; x) of the family.
double weight_factor(const FamilyParams& p, int n, const Point& x);

/// Normalized one-variable basis functions phi_0..phi_{n_max} at x for
/// the univariate families (orthonormal under the family measure).
std::vector<double> basis_values(const FamilyParams& p, int n_max, double x);

}  // namespace nloc
