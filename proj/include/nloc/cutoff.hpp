#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace nloc {

enum class CutoffKind { TypeA, TypeB, TypeC };

/// How the convolution widths are chosen.
enum class DeltaProfile {
  Standard,  ///< 1/(j (ln j)^{1+eps}) and its multi-log analogues
  Constant,  ///< m_max+1 equal widths with the same total as Standard
};

struct CutoffSpec {
  CutoffKind kind = CutoffKind::TypeA;
  double epsilon = 1.0;
  int log_depth = 1;
  /// Number of convolution factors beyond delta_0. Zero selects the
  /// smallest power of two whose doubling perturbs the cutoff below 1e-8.
  int m_max = 0;
  int grid_points = 1 << 14;
  DeltaProfile profile = DeltaProfile::Standard;

  void validate() const;
};

std::string to_string(CutoffKind kind);
CutoffKind cutoff_kind_from_string(const std::string& s);

nlohmann::json to_json(const CutoffSpec& spec);
CutoffSpec cutoff_spec_from_json(const nlohmann::json& j);

/// (delta_0, ..., delta_{m_max}) with delta_0 = delta_1 = 1.
std::vector<double> build_delta_sequence(double epsilon, int log_depth,
                                         int m_max);

/// First-order bound on the sup-norm change of the cutoff when the
/// factors m+1..2m are appended.
double truncation_change_estimate(double epsilon, int log_depth, int m);

/// Smallest power of two m >= 64 with truncation_change_estimate below
/// 4e-9.
int auto_truncation_order(double epsilon, int log_depth);

/// Iterated convolution of normalized indicators of [-delta_j, delta_j],
/// represented exactly as a cosine series on the period [-L, L].
class BumpFunction {
 public:
  double epsilon = 1.0;
  int log_depth = 1;
  std::vector<double> delta;
  double support = 0.0;     ///< sum of delta_j
  double half_period = 0.0; ///< L
  std::vector<double> xi;   ///< xi_m = pi m / L, m = 0..M
  std::vector<double> hhat; ///< Fourier transform at xi_m
  std::vector<double> grid;    ///< sample abscissae on [-L, L]
  std::vector<double> samples; ///< h at grid
  double total_mass = 0.0;

  [[nodiscard]] double value(double t) const;
  /// k-th derivative of h.
  [[nodiscard]] double derivative(int k, double t) const;
  /// h, h', ..., h^{(k_max)} at t.
  [[nodiscard]] std::vector<double> derivatives(int k_max, double t) const;
  /// H(t) = integral of h over (-inf, t].
  [[nodiscard]] double cdf(double t) const;
  [[nodiscard]] double peak() const;
};

BumpFunction build_bump(const CutoffSpec& spec, double window_factor = 1.25);

/// Build directly from an explicit width sequence.
BumpFunction build_bump_from_deltas(std::vector<double> delta, double epsilon,
                                    int log_depth, int grid_points,
                                    double window_factor = 1.25);

class CutoffFunction {
 public:
  CutoffSpec spec;  ///< m_max resolved
  double scale = 8.0;  ///< h_eps(t) = scale * h(scale * t)
  std::vector<double> samples;  ///< ahat at t_i = 2 i / (N - 1)
  int interpolation_degree = 5;
  std::shared_ptr<const BumpFunction> bump;

  /// ahat(|t|); zero beyond 2.
  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double dt() const {
    return 2.0 / static_cast<double>(samples.size() - 1);
  }
  [[nodiscard]] double grid_t(std::size_t i) const {
    return 2.0 * static_cast<double>(i) / static_cast<double>(samples.size() - 1);
  }
  /// Sample with the natural continuation outside [0, 2].
  [[nodiscard]] double sample(long i) const;
  /// Exact evaluation through the bump series (no interpolation).
  [[nodiscard]] double exact(double t) const;
  /// k-th derivative through the bump series.
  [[nodiscard]] double exact_derivative(int k, double t) const;
  /// Integral of t^p ahat(t) over [0, 2], p in {0, 1}.
  [[nodiscard]] double moment(int p) const;
  [[nodiscard]] bool is_band_pass() const { return spec.kind != CutoffKind::TypeA; }
};

CutoffFunction assemble_cutoff(const CutoffSpec& spec);

struct DerivativeNorm {
  int k = 0;
  double spectral = 0.0;
  double finite_difference = 0.0;
  bool reliable = false;
};

std::vector<DerivativeNorm> estimate_derivative_norms(const CutoffFunction& f,
                                                      int k_max);

/// 88 (88/eps)^k k^k (ln max(k, 3))^{k (1 + eps)}.
double derivative_bound(double epsilon, int k, double c_tilde = 88.0);

/// max |sum_nu ahat(2^{-nu} t)^2 - 1| over a dense grid of [t_lo, t_hi].
double check_partition_of_unity(const CutoffFunction& f, double t_lo,
                                double t_hi);

void write_cutoff_csv(const CutoffFunction& f, const std::string& path);

}  // namespace nloc
