#include "nloc/needlets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "nloc/error.hpp"
#include "nloc/quadrature.hpp"

namespace nloc {

namespace {

struct FamilyRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int exactness = 0;
};

// Gauss rule for the family measure: exact on phi_a phi_b for a + b <= 2m - 1.
FamilyRule family_rule(const FamilyParams& p, int m) {
  FamilyRule r;
  QuadratureRule q;
  switch (p.family) {
    case Family::Chebyshev:
      q = gauss_rule(WeightId::jacobi(-0.5, -0.5), m);
      r.nodes = q.nodes;
      r.weights = q.weights;
      break;
    case Family::Jacobi:
      q = gauss_rule(WeightId::jacobi(p.alpha, p.beta), m);
      r.nodes = q.nodes;
      r.weights = q.weights;
      break;
    case Family::Hermite:
      q = gauss_rule(WeightId::hermite(), m);
      r.nodes = q.nodes;
      r.weights = q.scaled_weights;
      break;
    case Family::Laguerre: {
      // t^{2a+1} dt with t = sqrt(s) becomes s^a ds / 2; F_n carries e^{-s/2}.
      const double a = p.alphas[0];
      q = gauss_rule(WeightId::laguerre(a), m);
      for (int i = 0; i < m; ++i) {
        const double s = q.nodes[static_cast<std::size_t>(i)];
        r.nodes.push_back(std::sqrt(s));
        r.weights.push_back(q.scaled_weights[static_cast<std::size_t>(i)] * std::pow(s, a) / 2.0);
      }
      break;
    }
    default:
      throw InvalidArgument("needlet systems support chebyshev, jacobi, hermite and laguerre (d = 1)");
  }
  r.exactness = q.exactness;
  return r;
}

void check_family(const FamilyParams& p) {
  p.validate();
  const bool ok = p.family == Family::Chebyshev || p.family == Family::Jacobi ||
                  ((p.family == Family::Hermite || p.family == Family::Laguerre) && p.d == 1);
  require(ok, "needlet systems support chebyshev, jacobi, hermite and laguerre (d = 1)");
}

}  // namespace

std::vector<double> NeedletSystem::basis(int n_max, double x) const { return basis_values(params, n_max, x); }

int NeedletSystem::spectrum_top() const {
  int top = 0;
  for (const auto& l : levels) top = std::max(top, l.top());
  return top;
}

double NeedletSystem::level_kernel(int j, double x, double y) const {
  require(j >= 0 && j < static_cast<int>(levels.size()), "level out of range");
  const auto& l = levels[static_cast<std::size_t>(j)];
  const auto bx = basis(l.top(), x);
  const auto by = basis(l.top(), y);
  double acc = 0.0;
  for (int nu = 0; nu <= l.top(); ++nu) {
    const auto k = static_cast<std::size_t>(nu);
    acc += l.spectrum[k] * bx[k] * by[k];
  }
  return acc;
}

double NeedletSystem::psi(int j, std::size_t node, double x) const {
  require(j >= 0 && j < static_cast<int>(levels.size()), "level out of range");
  const auto& l = levels[static_cast<std::size_t>(j)];
  require(node < l.nodes.size(), "node index out of range");
  const auto bx = basis(l.top(), x);
  double acc = 0.0;
  for (int nu = 0; nu <= l.top(); ++nu) acc += l.spectrum[static_cast<std::size_t>(nu)] * l.basis(node, nu) * bx[static_cast<std::size_t>(nu)];
  return std::sqrt(l.weights[node]) * acc;
}

NeedletSystem build_needlet_system(const FamilyParams& params, std::shared_ptr<const CutoffFunction> cutoff,
                                   int J_max) {
  check_family(params);
  require(cutoff != nullptr, "needlet system needs a cutoff");
  require(cutoff->spec.kind != CutoffKind::TypeA, "needlet systems require a TypeC cutoff");
  NeedletSystem S;
  S.params = params;
  S.cutoff = std::move(cutoff);
  S.J_max = J_max;
  const bool quad = S.dilation_is_quadratic();
  // Node counts grow like 4^j on the line and half-line.
  require(J_max >= 0 && J_max <= (quad ? 5 : 7), quad ? "J_max must lie in [0, 5]" : "J_max must lie in [0, 7]");
  const double span = J_max == 0 ? 1.0 : std::ldexp(1.0, J_max - 1);
  S.capacity = J_max == 0 ? 0 : static_cast<int>(quad ? span * span : span);
  S.partition_deviation = check_partition_of_unity(*S.cutoff, 1.0, std::max(2.0, span));
  if (!(S.partition_deviation < 1e-8)) throw ConstructionError("cutoff fails the partition of unity");

  for (int j = 0; j <= J_max; ++j) {
    NeedletLevel l;
    l.j = j;
    if (j == 0) {
      l.spectrum = {1.0};
    } else {
      const double half = std::ldexp(1.0, j - 1);
      l.n_j = quad ? half * half : half;
      const int size = quad ? 1 << (2 * j) : 1 << j;  // support of ahat ends at 2
      l.spectrum.resize(static_cast<std::size_t>(size));
      for (int nu = 0; nu < size; ++nu) {
        const double t = quad ? std::sqrt(static_cast<double>(nu)) / half : nu / half;
        l.spectrum[static_cast<std::size_t>(nu)] = (*S.cutoff)(t);
      }
    }
    // Products of two level-j band functions have degree <= 2 top.
    const int m = std::max(1, quad ? (j == 0 ? 1 : 1 << (2 * j)) : 1 << j);
    const FamilyRule r = family_rule(params, m);
    l.nodes = r.nodes;
    l.weights = r.weights;
    l.exactness = r.exactness;
    require(l.exactness >= 2 * l.top(), "level rule is not exact on products of band functions");
    l.node_basis.reserve(l.nodes.size() * l.spectrum.size());
    for (double x : l.nodes) {
      const auto b = basis_values(params, l.top(), x);
      l.node_basis.insert(l.node_basis.end(), b.begin(), b.end());
    }
    S.levels.push_back(std::move(l));
  }
  return S;
}

FrameCoefficients analyze(const NeedletSystem& S, const std::vector<double>& spectral) {
  require(!spectral.empty(), "spectral input must be nonempty");
  if (static_cast<int>(spectral.size()) - 1 > S.capacity) {
    throw InvalidArgument("band limit " + std::to_string(spectral.size() - 1) + " exceeds system capacity " +
                          std::to_string(S.capacity));
  }
  FrameCoefficients C;
  for (const auto& l : S.levels) {
    const int top = std::min(l.top(), static_cast<int>(spectral.size()) - 1);
    std::vector<double> coef(l.nodes.size(), 0.0);
    for (std::size_t i = 0; i < l.nodes.size(); ++i) {
      double acc = 0.0;
      for (int nu = 0; nu <= top; ++nu) {
        const auto k = static_cast<std::size_t>(nu);
        acc += l.spectrum[k] * spectral[k] * l.basis(i, nu);
      }
      coef[i] = std::sqrt(l.weights[i]) * acc;
    }
    C.levels.push_back(std::move(coef));
  }
  return C;
}

std::vector<double> project(const NeedletSystem& S, const std::function<double(double)>& f, int n_max, int m) {
  require(n_max >= 0 && m >= 1, "projection needs n_max >= 0 and m >= 1");
  const FamilyRule r = family_rule(S.params, m);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double fx = f(r.nodes[i]);
    const auto b = basis_values(S.params, n_max, r.nodes[i]);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += r.weights[i] * fx * b[k];
  }
  return out;
}

FrameCoefficients analyze(const NeedletSystem& S, const std::function<double(double)>& f, int band_limit) {
  if (band_limit > S.capacity) {
    throw InvalidArgument("band limit " + std::to_string(band_limit) + " exceeds system capacity " +
                          std::to_string(S.capacity));
  }
  const int top = S.spectrum_top();
  const bool fallback = band_limit < 0;
  // Exact on f * phi_nu for nu <= top when deg f <= band_limit.
  const int m = fallback ? std::max(256, 2 * (top + 1)) : (band_limit + top) / 2 + 1;
  std::vector<double> spectral = project(S, f, top, m);
  // Components above the capacity are not reproduced by the frame.
  spectral.resize(static_cast<std::size_t>(std::max(S.capacity, 0)) + 1);
  FrameCoefficients C = analyze(S, spectral);
  C.fallback = fallback;
  C.quadrature_nodes = m;
  return C;
}

double synthesize(const NeedletSystem& S, const FrameCoefficients& C, double x) {
  require(C.levels.size() == S.levels.size(), "coefficients come from an incompatible system");
  const auto bx = S.basis(S.spectrum_top(), x);
  double acc = 0.0;
  for (std::size_t j = 0; j < S.levels.size(); ++j) {
    const auto& l = S.levels[j];
    require(C.levels[j].size() == l.nodes.size(), "coefficients come from an incompatible system");
    std::vector<double> sx(l.spectrum.size());
    for (std::size_t k = 0; k < sx.size(); ++k) sx[k] = l.spectrum[k] * bx[k];
    for (std::size_t i = 0; i < l.nodes.size(); ++i) {
      if (C.levels[j][i] == 0.0) continue;
      double psi = 0.0;
      for (std::size_t k = 0; k < sx.size(); ++k) psi += sx[k] * l.node_basis[i * sx.size() + k];
      acc += C.levels[j][i] * std::sqrt(l.weights[i]) * psi;
    }
  }
  return acc;
}

double parseval_check(const NeedletSystem& S, const std::vector<double>& spectral) {
  const FrameCoefficients C = analyze(S, spectral);
  double frame = 0.0;
  for (const auto& lv : C.levels) {
    for (double c : lv) frame += c * c;
  }
  // ||f||^2 by a rule exact on f^2.
  const int deg = static_cast<int>(spectral.size()) - 1;
  const FamilyRule r = family_rule(S.params, deg + 1);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const auto b = basis_values(S.params, deg, r.nodes[i]);
    double fx = 0.0;
    for (std::size_t k = 0; k < spectral.size(); ++k) fx += spectral[k] * b[k];
    norm2 += r.weights[i] * fx * fx;
  }
  require(norm2 > 0.0, "parseval check needs a nonzero function");
  return std::abs(frame - norm2) / norm2;
}

DecayEnvelope needlet_decay_profile(const NeedletSystem& S, int j, std::size_t node, int bins, int samples) {
  require(j >= 0 && j < static_cast<int>(S.levels.size()), "level out of range");
  const auto& l = S.levels[static_cast<std::size_t>(j)];
  require(node < l.nodes.size(), "node index out of range");
  require(samples >= 2, "profile needs at least two samples");
  const double xi = l.nodes[node];
  const double scale = std::ldexp(1.0, j);
  std::vector<double> rho;
  std::vector<double> val;
  double rho_max = 0.0;
  if (S.dilation_is_quadratic()) {
    const double R = 2.0 * std::sqrt(8.0 * scale * scale + 2.0);
    const double lo = S.params.family == Family::Laguerre ? 0.0 : -R;
    for (int i = 0; i < samples; ++i) {
      const double x = lo + (R - lo) * i / (samples - 1);
      rho.push_back(std::abs(x - xi));
      val.push_back(S.psi(j, node, x));
    }
    rho_max = std::max(std::abs(R - xi), std::abs(lo - xi));
  } else {
    const double th = std::acos(std::clamp(xi, -1.0, 1.0));
    for (int i = 0; i < samples; ++i) {
      const double t = std::numbers::pi * i / (samples - 1);
      rho.push_back(std::abs(t - th));
      val.push_back(S.psi(j, node, std::cos(t)));
    }
    rho_max = std::numbers::pi;
  }
  DecayEnvelope E = envelope_from_samples(rho, val, rho_max, bins);
  E.n = static_cast<int>(scale);
  E.family = to_string(S.params.family) + "-needlet";
  E.scale = scale;
  E.lead = std::sqrt(scale);
  return E;
}

nlohmann::json frame_to_json(const NeedletSystem& S) {
  nlohmann::json j;
  j["family"] = to_string(S.params.family);
  j["params"] = to_json(S.params);
  j["J_max"] = S.J_max;
  j["capacity"] = S.capacity;
  j["partition_deviation"] = S.partition_deviation;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : S.levels) {
    nlohmann::json o;
    o["j"] = l.j;
    o["n_j"] = l.n_j;
    o["nodes"] = l.nodes;
    o["weights"] = l.weights;
    levels.push_back(o);
  }
  j["levels"] = levels;
  return j;
}

void write_coefficients_csv(const NeedletSystem& S, const FrameCoefficients& C, const std::string& path) {
  require(C.levels.size() == S.levels.size(), "coefficients come from an incompatible system");
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << "level,node_index,node_coord,coeff\n";
  char buf[128];
  for (std::size_t j = 0; j < C.levels.size(); ++j) {
    for (std::size_t i = 0; i < C.levels[j].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", j, i, S.levels[j].nodes[i], C.levels[j][i]);
      out << buf;
    }
  }
}

}  // namespace nloc
