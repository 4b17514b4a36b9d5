#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nloc/cutoff.hpp"
#include "nloc/kernels.hpp"

namespace nloc {

struct EnvelopeBin {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  double max_abs = 0.0;
  double rho_at_max = 0.0;  ///< distance of the pair attaining max_abs
  long pairs = 0;

  [[nodiscard]] double center() const { return 0.5 * (rho_lo + rho_hi); }
};

struct DecayEnvelope {
  int n = 0;
  std::string family;
  bool weighted = false;
  /// Bounds are shaped in scale * rho and led by lead.
  double scale = 1.0;
  double lead = 1.0;
  std::vector<EnvelopeBin> bins;

  [[nodiscard]] int empty_bins() const;
};

/// Sampling plan. One-dimensional families use a nested tensor grid of
/// anchor points and distance offsets; the others use seeded random pairs
/// stratified by distance.
struct EnvelopePlan {
  int bins = 128;
  int anchors = 256;
  int offsets_per_bin = 2;
  int pairs_per_bin = 200;  ///< target for random stratified sampling
  double rho_max = 0.0;     ///< 0 selects the family default
  bool weighted = false;
  std::uint64_t seed = 42;
};

DecayEnvelope measure_envelope(const KernelInstance& K, const EnvelopePlan& plan);

/// Bin (rho, |value|) samples on [0, rho_max].
DecayEnvelope envelope_from_samples(const std::vector<double>& rho, const std::vector<double>& value,
                                    double rho_max, int bins);

enum class BoundForm { Polynomial, SubExponential };

struct BoundFit {
  BoundForm form = BoundForm::SubExponential;
  double epsilon = 1.0;
  int log_depth = 1;
  double sigma = 0.0;   ///< polynomial exponent
  double c = 0.0;       ///< leading constant
  double c_rate = 0.0;  ///< rate constant of the sub-exponential form
  int violations = 0;
  [[nodiscard]] bool success() const {
    return violations == 0 && (form == BoundForm::Polynomial || c_rate > 0.0);
  }
};

struct FitOptions {
  BoundForm form = BoundForm::SubExponential;
  double epsilon = 1.0;
  int log_depth = 1;
  double sigma = 4.0;
  /// A rate is honored when its leading constant is at most cap times the
  /// rate-free constant max E / lead.
  double cap = 4.0;
  double rate_lo = 0.01;
  double rate_hi = 10.0;
  int rate_points = 61;
  /// Evaluate at this rate instead of searching (negative = search).
  double fixed_rate = -1.0;
};

/// n exp(-r u / L(u)) shape without the lead factor, u = scale * rho, where
/// L(u) = [ln(e + u)]^{1+eps} (or the iterated-log product for depth > 1).
double subexp_shape(double u, double rate, double epsilon, int log_depth);

BoundFit fit_bound(const DecayEnvelope& E, const FitOptions& opt);

struct NamedCutoff {
  std::string name;
  std::shared_ptr<const CutoffFunction> cutoff;
};

struct CutoffComparisonRow {
  std::string name;
  BoundFit fit;
};

std::vector<CutoffComparisonRow> compare_cutoffs(const FamilyParams& family, int n,
                                                 const std::vector<NamedCutoff>& cutoffs,
                                                 const EnvelopePlan& plan, const FitOptions& opt);

/// Same spec, widths replaced by m_max + 1 equal entries of the same total.
CutoffSpec rough_control_spec(CutoffSpec spec);

struct Wavelet {
  double epsilon = 1.0;
  double dx = 0.25;
  std::vector<double> x;  ///< symmetric about 1/2
  std::vector<double> psi;
  double norm2 = 0.0;        ///< sum |psi|^2 dx
  double norm2_fourier = 0.0; ///< (1/2pi) int |psi_hat|^2
  double mean = 0.0;         ///< sum psi dx
  double peak = 0.0;
  DecayEnvelope envelope;    ///< |psi| against |x - 1/2|

  [[nodiscard]] double plancherel_defect() const {
    return std::abs(norm2 - norm2_fourier) / norm2_fourier;
  }
};

/// psi(x) = (4/3) int ahat(t) cos((4 pi / 3) t (x - 1/2)) dt from a TypeC cutoff.
Wavelet build_wavelet(const CutoffFunction& cutoff, double dx = 0.25);

struct CounterexampleRow {
  int n = 0;
  double legleg = 0.0;
  double legleg_predicted = 0.0;
  double chebcheb = 0.0;
  double chebcheb_predicted = 0.0;
  double chebleg = 0.0;
  double chebleg_predicted = 0.0;
  /// ChebCheb slice derivative; only for band-pass cutoffs.
  double slice_derivative = 0.0;
  double slice_derivative_predicted = 0.0;
  double slice_sup_lower = 0.0;  ///< Markov lower bound for sup |F_n|
};

struct CounterexampleReport {
  std::string cutoff_kind;
  double integral = 0.0;        ///< int ahat
  double first_moment = 0.0;    ///< int t ahat
  double ahat0 = 0.0;
  std::vector<CounterexampleRow> rows;
  double block_error = 0.0;     ///< worst block identity error, m <= 40
  bool legleg_bounded = false;  ///< residual * n bounded
  bool chebleg_bounded = false;
  bool slice_bounded = false;   ///< residual / n bounded (band-pass only)
  double chebcheb_error = 0.0;  ///< worst |value - ahat(0)/pi^2|
};

/// |last| <= 2 max |earlier| + floor.
bool bounded_sequence(const std::vector<double>& v, double floor = 1e-9);

CounterexampleReport counterexample_suite(const CutoffFunction& cutoff, const std::vector<int>& n_list);

struct HermiteTailFit {
  std::vector<int> n;
  std::vector<double> c2;  ///< fitted c'' with c = 1
  double spread = 0.0;
};

/// For |x| >= sqrt(8n + 2): c''_n = min_x -ln(max_y |L_n(x, y)|) / x^2.
HermiteTailFit hermite_tail_fit(std::shared_ptr<const CutoffFunction> cutoff, const std::vector<int>& n_list);

void write_envelope_csv(const std::vector<DecayEnvelope>& envelopes, const std::string& path);
nlohmann::json to_json(const BoundFit& fit);
nlohmann::json to_json(const CounterexampleReport& rep);

}  // namespace nloc
