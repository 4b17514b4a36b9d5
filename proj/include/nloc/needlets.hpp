#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nloc/cutoff.hpp"
#include "nloc/decay.hpp"
#include "nloc/kernels.hpp"

namespace nloc {

struct NeedletLevel {
  int j = 0;
  double n_j = 0.0;             ///< 2^{j-1}, or 4^{j-1} for Hermite/Laguerre; 0 at level 0
  std::vector<double> nodes;    ///< X_j
  std::vector<double> weights;  ///< c_xi
  int exactness = 0;            ///< polynomial degree integrated exactly by the rule
  /// Coefficient of phi_nu phi_nu in L_j, nu = 0..spectrum.size()-1.
  std::vector<double> spectrum;
  /// phi_nu(xi), row-major (node, nu).
  std::vector<double> node_basis;

  [[nodiscard]] int top() const { return static_cast<int>(spectrum.size()) - 1; }
  [[nodiscard]] double basis(std::size_t node, int nu) const {
    return node_basis[node * spectrum.size() + static_cast<std::size_t>(nu)];
  }
};

/// Tight frame for the interval (Jacobi, Chebyshev), the line (Hermite,
/// d = 1) or the half-line (Laguerre, d = 1).
class NeedletSystem {
 public:
  FamilyParams params;
  std::shared_ptr<const CutoffFunction> cutoff;
  int J_max = 0;
  /// Largest degree nu with sum_j spectrum_j(nu)^2 = 1.
  int capacity = 0;
  double partition_deviation = 0.0;
  std::vector<NeedletLevel> levels;

  /// Orthonormal basis phi_0..phi_{n_max} at x.
  [[nodiscard]] std::vector<double> basis(int n_max, double x) const;
  [[nodiscard]] double level_kernel(int j, double x, double y) const;
  /// psi_xi(x) = c_xi^{1/2} L_j(xi, x).
  [[nodiscard]] double psi(int j, std::size_t node, double x) const;
  [[nodiscard]] int spectrum_top() const;
  [[nodiscard]] bool dilation_is_quadratic() const {
    return params.family == Family::Hermite || params.family == Family::Laguerre;
  }
};

/// Level coefficients: ahat(nu / 2^{j-1}) for the interval and
/// ahat(sqrt(nu) / 2^{j-1}) for Hermite and Laguerre.
NeedletSystem build_needlet_system(const FamilyParams& params, std::shared_ptr<const CutoffFunction> cutoff,
                                   int J_max);

struct FrameCoefficients {
  std::vector<std::vector<double>> levels;
  /// Integration metadata for function-handle input.
  bool fallback = false;
  int quadrature_nodes = 0;
};

/// f = sum_nu f_nu phi_nu with f.size() - 1 <= capacity.
FrameCoefficients analyze(const NeedletSystem& S, const std::vector<double>& spectral);
/// band_limit < 0 marks f as not known to be band-limited; the fallback rule
/// is then used and recorded.
FrameCoefficients analyze(const NeedletSystem& S, const std::function<double(double)>& f, int band_limit = -1);

double synthesize(const NeedletSystem& S, const FrameCoefficients& C, double x);

/// |sum |<f, psi>|^2 - ||f||^2| / ||f||^2 with ||f||^2 from the family rule.
double parseval_check(const NeedletSystem& S, const std::vector<double>& spectral);

/// Projection of f onto phi_0..phi_{n_max} by a Gauss rule with m nodes.
std::vector<double> project(const NeedletSystem& S, const std::function<double(double)>& f, int n_max, int m);

/// |psi_xi(x)| against rho(x, xi).
DecayEnvelope needlet_decay_profile(const NeedletSystem& S, int j, std::size_t node, int bins = 64,
                                    int samples = 4096);

nlohmann::json frame_to_json(const NeedletSystem& S);
void write_coefficients_csv(const NeedletSystem& S, const FrameCoefficients& C, const std::string& path);

}  // namespace nloc
