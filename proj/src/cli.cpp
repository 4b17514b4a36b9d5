#include "nloc/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nloc/cutoff.hpp"
#include "nloc/decay.hpp"
#include "nloc/error.hpp"
#include "nloc/kernels.hpp"
#include "nloc/needlets.hpp"
#include "nloc/orthopoly.hpp"
#include "nloc/quadrature.hpp"

namespace nloc::cli {

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 42;
  double epsilon = 1.0;
  int log_depth = 1;
  int m_max = 0;
  int n = 64;
  std::string family = "chebyshev";
  double tolerance = -1.0;  // < 0: module default
  std::string type = "a";
  std::string variant = "all";
  std::string cutoff;
  double alpha = 0.0;
  double beta = 0.0;
  double mu = 0.5;
  int d = 1;
  std::vector<double> kappa;
  std::string weight = "jacobi";
  int m = 10;
  int J_max = 5;
  int trials = 20;
  int points = 65;
  std::string x;
  std::string y;
  std::string form = "subexp";
  double sigma = 4.0;
  bool weighted = false;

  json family_json;  // from --config, overrides the flag-built family
  json cutoff_json;
};

// Fill options the command line left unset from the --config file.
void merge_config(CLI::App* sub, Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw InvalidArgument("cannot read config " + o.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  auto given = [&](const char* flag) {
    const auto* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  auto take = [&](const char* key, const char* flag, auto& dst) {
    if (j.contains(key) && !given(flag)) j.at(key).get_to(dst);
  };
  take("out", "--out", o.out);
  take("seed", "--seed", o.seed);
  take("epsilon", "--epsilon", o.epsilon);
  take("log_depth", "--log-depth", o.log_depth);
  take("n", "--n", o.n);
  take("tolerance", "--tolerance", o.tolerance);
  take("type", "--type", o.type);
  take("variant", "--variant", o.variant);
  take("weight", "--weight", o.weight);
  take("m", "--m", o.m);
  take("J_max", "--J", o.J_max);
  take("trials", "--trials", o.trials);
  take("points", "--points", o.points);
  take("sigma", "--sigma", o.sigma);
  take("form", "--form", o.form);
  take("alpha", "--alpha", o.alpha);
  take("beta", "--beta", o.beta);
  if (j.contains("family")) {
    if (j.at("family").is_object()) {
      if (!given("--family")) o.family_json = j.at("family");
    } else {
      take("family", "--family", o.family);
    }
  }
  if (j.contains("cutoff")) {
    if (j.at("cutoff").is_object()) {
      o.cutoff_json = j.at("cutoff");
    } else {
      take("cutoff", "--cutoff", o.cutoff);
    }
  }
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config; flags given explicitly take precedence");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "sampling seed");
  sub->add_option("--epsilon", o.epsilon, "cutoff epsilon in (0, 1]");
  sub->add_option("--log-depth", o.log_depth, "iterated-log depth of the cutoff");
  sub->add_option("--m-max", o.m_max, "convolution factors (0 = automatic)");
  sub->add_option("--n", o.n, "kernel level n");
  sub->add_option("--family", o.family, "trig|chebyshev|jacobi|sphere|ball|simplex|hermite|laguerre");
  sub->add_option("--tolerance", o.tolerance, "verification tolerance override");
  sub->add_option("--type", o.type, "cutoff type a|b|c");
  sub->add_option("--cutoff", o.cutoff, "cutoff type for decay subcommands (typeA|typeB|typeC)");
  sub->add_option("--alpha", o.alpha, "Jacobi alpha or Laguerre alpha");
  sub->add_option("--beta", o.beta, "Jacobi beta");
  sub->add_option("--mu", o.mu, "ball parameter");
  sub->add_option("--d", o.d, "dimension");
  sub->add_option("--kappa", o.kappa, "simplex parameters")->delimiter(',');
}

CutoffSpec cutoff_spec(const Options& o, const std::string& kind) {
  CutoffSpec s;
  if (o.cutoff_json.is_object()) {
    s = cutoff_spec_from_json(o.cutoff_json);
  } else {
    s.kind = cutoff_kind_from_string(o.type);
    s.epsilon = o.epsilon;
    s.log_depth = o.log_depth;
    s.m_max = o.m_max;
  }
  if (!kind.empty()) s.kind = cutoff_kind_from_string(kind);
  s.validate();
  return s;
}

std::shared_ptr<const CutoffFunction> make_cutoff(const Options& o, const std::string& kind = "") {
  return std::make_shared<CutoffFunction>(assemble_cutoff(cutoff_spec(o, kind)));
}

FamilyParams family_params(const Options& o) {
  if (o.family_json.is_object()) return family_params_from_json(o.family_json);
  json j;
  j["family"] = o.family;
  j["alpha"] = o.alpha;
  j["beta"] = o.beta;
  j["mu"] = o.mu;
  j["d"] = o.d;
  const Family f = family_from_string(o.family);
  if (f == Family::Sphere && o.d < 2) j["d"] = 2;
  if (f == Family::Ball && o.d < 2) j["d"] = 2;
  if (f == Family::Simplex) j["kappa"] = o.kappa.empty() ? std::vector<double>(static_cast<std::size_t>(o.d) + 1, 0.5) : o.kappa;
  return family_params_from_json(j);
}

std::filesystem::path out_dir(const Options& o) {
  std::filesystem::path p(o.out);
  std::filesystem::create_directories(p);
  return p;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

Point parse_point(const std::string& s) {
  Point p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      p.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InvalidArgument("malformed point '" + s + "'");
    }
  }
  require(!p.empty(), "empty point");
  return p;
}

double tol_or(const Options& o, double def) { return o.tolerance >= 0.0 ? o.tolerance : def; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

// ---- cutoff ----

int cutoff_build(const Options& o) {
  const auto C = make_cutoff(o);
  const auto dir = out_dir(o);
  write_cutoff_csv(*C, (dir / "cutoff.csv").string());
  json j = to_json(C->spec);
  j["scale"] = C->scale;
  j["samples"] = C->samples.size();
  write_json(dir / "cutoff.json", j);
  std::cout << "cutoff type " << to_string(C->spec.kind) << " epsilon " << C->spec.epsilon << " m_max "
            << C->spec.m_max << " samples " << C->samples.size() << " -> " << (dir / "cutoff.csv").string() << '\n';
  return kOk;
}

int cutoff_check(const Options& o) {
  const auto C = make_cutoff(o);
  const double tol = tol_or(o, 1e-8);
  double support = 0.0;
  double range = 0.0;
  double plateau = 0.0;
  double identity = 0.0;
  const int N = 20001;
  for (int i = 0; i < N; ++i) {
    const double t = 2.5 * i / (N - 1);
    const double v = (*C)(t);
    range = std::max({range, -v, v - 1.0});
    const bool outside = t >= 2.0 || (C->is_band_pass() && t <= 0.5);
    if (outside) support = std::max(support, std::abs(v));
    if (C->spec.kind == CutoffKind::TypeA && t <= 1.0) plateau = std::max(plateau, std::abs(v - 1.0));
    if (C->spec.kind == CutoffKind::TypeC && t >= 1.0 && t <= 2.0) {
      const double w = (*C)(t / 2.0);
      identity = std::max(identity, std::abs(v * v + w * w - 1.0));
    }
  }
  const double partition = C->is_band_pass() ? check_partition_of_unity(*C, 1.0, 1e4) : 0.0;
  bool derivative_ok = true;
  for (const auto& dn : estimate_derivative_norms(*C, 6)) {
    if (dn.spectral > derivative_bound(C->spec.epsilon, dn.k)) derivative_ok = false;
  }
  const bool ok = support <= tol && range <= tol && plateau <= tol && identity <= tol && partition < tol && derivative_ok;
  std::cout << "cutoff check type " << to_string(C->spec.kind) << " epsilon " << C->spec.epsilon
            << " support " << fmt(support) << " range " << fmt(range) << " plateau " << fmt(plateau)
            << " identity " << fmt(identity) << " partition_deviation " << fmt(partition) << " derivative_bound "
            << (derivative_ok ? "ok" : "violated") << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFail;
}

// ---- kernel ----

int kernel_eval(const Options& o) {
  require(!o.x.empty() && !o.y.empty(), "kernel eval needs --x and --y");
  const FamilyParams p = family_params(o);
  KernelInstance K(p, make_cutoff(o), o.n);
  const Point x = parse_point(o.x);
  const Point y = parse_point(o.y);
  const double v = K(x, y);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::cout << "kernel " << to_string(p.family) << " n " << o.n << " value " << buf << " rho "
            << fmt(distance(p, x, y)) << '\n';
  return kOk;
}

int kernel_grid(const Options& o) {
  const FamilyParams p = family_params(o);
  require(p.is_univariate(), "kernel grid supports one-dimensional families");
  require(o.points >= 2, "grid needs at least two points");
  KernelInstance K(p, make_cutoff(o), o.n);
  std::vector<double> g(static_cast<std::size_t>(o.points));
  double lo = 0.0;
  double hi = 0.0;
  switch (p.family) {
    case Family::Trig: lo = -std::numbers::pi; hi = std::numbers::pi; break;
    case Family::Hermite: hi = std::sqrt(8.0 * o.n + 2.0); lo = -hi; break;
    case Family::Laguerre: hi = std::sqrt(12.0 * o.n + 3.0 * std::abs(p.alphas[0]) + 3.0); break;
    default: lo = 0.0; hi = std::numbers::pi; break;  // angle, x = cos(theta)
  }
  const bool angular = p.family == Family::Chebyshev || p.family == Family::Jacobi;
  for (int i = 0; i < o.points; ++i) {
    const double u = lo + (hi - lo) * i / (o.points - 1);
    g[static_cast<std::size_t>(i)] = angular ? std::cos(u) : u;
  }
  const auto dir = out_dir(o);
  const auto path = dir / "kernel_grid.csv";
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << "x,y,value\n";
  char buf[96];
  for (double x : g) {
    for (double y : g) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, y, K(x, y));
      out << buf;
    }
  }
  std::cout << "kernel grid " << to_string(p.family) << " n " << o.n << " points " << o.points << " -> "
            << path.string() << '\n';
  return kOk;
}

// ---- quad ----

WeightId weight_id(const Options& o) {
  json j;
  j["weight"] = o.weight;
  j["params"] = {{"alpha", o.alpha}, {"beta", o.beta}};
  return weight_from_json(j);
}

int quad_build(const Options& o) {
  const auto rule = gauss_rule(weight_id(o), o.m);
  const auto dir = out_dir(o);
  write_quadrature_csv(rule, (dir / "quadrature.csv").string());
  write_json(dir / "quadrature.json", describe(rule));
  std::cout << "quad " << rule.weight.name() << " m " << rule.m << " exactness " << rule.exactness << " -> "
            << (dir / "quadrature.csv").string() << '\n';
  return kOk;
}

int quad_verify(const Options& o) {
  const auto rule = gauss_rule(weight_id(o), o.m);
  const double err = verify_exactness(rule, rule.exactness);
  const bool ok = err < tol_or(o, 1e-12);
  std::cout << "quad verify " << rule.weight.name() << " m " << rule.m << " degree " << rule.exactness
            << " max_rel_error " << fmt(err) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFail;
}

// ---- needlet ----

NeedletSystem needlet_system(const Options& o) {
  Options oc = o;
  if (o.cutoff.empty() && !o.cutoff_json.is_object()) oc.type = "c";
  return build_needlet_system(family_params(oc), make_cutoff(oc, o.cutoff), o.J_max);
}

std::vector<std::vector<double>> random_inputs(const NeedletSystem& S, const Options& o) {
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> deg(0, S.capacity);
  std::vector<std::vector<double>> out;
  for (int t = 0; t < o.trials; ++t) {
    std::vector<double> f(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& v : f) v = g(rng);
    out.push_back(std::move(f));
  }
  return out;
}

int needlet_build(const Options& o) {
  const auto S = needlet_system(o);
  const auto dir = out_dir(o);
  write_json(dir / "frame.json", frame_to_json(S));
  std::size_t nodes = 0;
  for (const auto& l : S.levels) nodes += l.nodes.size();
  std::cout << "needlet " << to_string(S.params.family) << " J_max " << S.J_max << " capacity " << S.capacity
            << " nodes " << nodes << " partition_deviation " << fmt(S.partition_deviation) << " -> "
            << (dir / "frame.json").string() << '\n';
  return kOk;
}

int needlet_parseval(const Options& o) {
  const auto S = needlet_system(o);
  double worst = 0.0;
  for (const auto& f : random_inputs(S, o)) worst = std::max(worst, parseval_check(S, f));
  const bool ok = worst < tol_or(o, 1e-8);
  std::cout << "needlet parseval " << to_string(S.params.family) << " J_max " << S.J_max << " trials " << o.trials
            << " max_defect " << fmt(worst) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFail;
}

int needlet_roundtrip(const Options& o) {
  const auto S = needlet_system(o);
  const auto inputs = random_inputs(S, o);
  std::mt19937_64 rng(o.seed + 1);
  double lo = -1.0;
  double hi = 1.0;
  if (S.params.family == Family::Hermite) {
    hi = std::sqrt(2.0 * S.capacity + 1.0);
    lo = -hi;
  } else if (S.params.family == Family::Laguerre) {
    lo = 0.0;
    hi = std::sqrt(4.0 * S.capacity + 2.0 * S.params.alphas[0] + 2.0);
  }
  std::uniform_real_distribution<double> U(lo, hi);
  double worst = 0.0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const auto& f = inputs[t];
    const auto C = analyze(S, f);
    if (t == 0) write_coefficients_csv(S, C, (out_dir(o) / "coefficients.csv").string());
    for (int k = 0; k < 50; ++k) {
      const double x = U(rng);
      const auto b = S.basis(static_cast<int>(f.size()) - 1, x);
      double fx = 0.0;
      double mag = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        fx += f[i] * b[i];
        mag += std::abs(f[i] * b[i]);
      }
      worst = std::max(worst, std::abs(synthesize(S, C, x) - fx) / std::max(mag, 1e-300));
    }
  }
  const bool ok = worst < tol_or(o, 1e-7);
  std::cout << "needlet roundtrip " << to_string(S.params.family) << " J_max " << S.J_max << " trials " << o.trials
            << " max_rel_error " << fmt(worst) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFail;
}

// ---- decay ----

std::string decay_kind(const Options& o, const char* def) { return o.cutoff.empty() ? std::string(def) : o.cutoff; }

EnvelopePlan plan_for(const Options& o, const FamilyParams& p) {
  EnvelopePlan plan;
  plan.seed = o.seed;
  plan.weighted = o.weighted || p.family == Family::Laguerre;
  return plan;
}

FitOptions fit_options(const Options& o) {
  FitOptions f;
  require(o.form == "subexp" || o.form == "poly", "--form must be subexp or poly");
  f.form = o.form == "poly" ? BoundForm::Polynomial : BoundForm::SubExponential;
  f.epsilon = o.epsilon;
  f.log_depth = o.log_depth;
  f.sigma = o.sigma;
  return f;
}

int decay_envelope(const Options& o) {
  const FamilyParams p = family_params(o);
  KernelInstance K(p, make_cutoff(o, decay_kind(o, "a")), o.n);
  const auto E = measure_envelope(K, plan_for(o, p));
  const auto path = out_dir(o) / "envelope.csv";
  write_envelope_csv({E}, path.string());
  std::cout << "decay envelope " << E.family << " n " << E.n << " bins " << E.bins.size() << " empty "
            << E.empty_bins() << " -> " << path.string() << '\n';
  return kOk;
}

int decay_fit(const Options& o) {
  const FamilyParams p = family_params(o);
  KernelInstance K(p, make_cutoff(o, decay_kind(o, "a")), o.n);
  const auto E = measure_envelope(K, plan_for(o, p));
  const auto fit = fit_bound(E, fit_options(o));
  const auto dir = out_dir(o);
  write_envelope_csv({E}, (dir / "envelope.csv").string());
  write_json(dir / "fit.json", to_json(fit));
  std::cout << "decay fit " << E.family << " n " << E.n << " form " << o.form << " c " << fmt(fit.c) << " c_rate "
            << fmt(fit.c_rate) << " violations " << fit.violations << (fit.success() ? " PASS" : " FAIL") << '\n';
  return fit.success() ? kOk : kFail;
}

int decay_compare(const Options& o) {
  const FamilyParams p = family_params(o);
  const CutoffSpec special = cutoff_spec(o, decay_kind(o, "a"));
  const auto A = std::make_shared<CutoffFunction>(assemble_cutoff(special));
  const auto R = std::make_shared<CutoffFunction>(assemble_cutoff(rough_control_spec(special)));
  const auto rows = compare_cutoffs(p, o.n, {{"special", A}, {"rough", R}}, plan_for(o, p), fit_options(o));
  json j = json::array();
  for (const auto& r : rows) {
    json e = to_json(r.fit);
    e["name"] = r.name;
    j.push_back(e);
  }
  write_json(out_dir(o) / "compare.json", j);
  const bool ok = rows[0].fit.c_rate > rows[1].fit.c_rate;
  std::cout << "decay compare " << to_string(p.family) << " n " << o.n << " special c_rate " << fmt(rows[0].fit.c_rate)
            << " rough c_rate " << fmt(rows[1].fit.c_rate) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFail;
}

int decay_wavelet(const Options& o) {
  const auto C = make_cutoff(o, decay_kind(o, "c"));
  const auto W = build_wavelet(*C);
  FitOptions fo = fit_options(o);
  fo.form = BoundForm::SubExponential;
  const auto fit = fit_bound(W.envelope, fo);
  const auto dir = out_dir(o);
  {
    std::ofstream out(dir / "wavelet.csv");
    if (!out) throw InvalidArgument("cannot open wavelet.csv for writing");
    out << "x,psi\n";
    char buf[96];
    for (std::size_t i = 0; i < W.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", W.x[i], W.psi[i]);
      out << buf;
    }
  }
  json j;
  j["plancherel_defect"] = W.plancherel_defect();
  j["mean"] = W.mean;
  j["peak"] = W.peak;
  j["fit"] = to_json(fit);
  write_json(dir / "wavelet.json", j);
  const double tol = tol_or(o, 1e-8);
  const bool ok = W.plancherel_defect() < tol && std::abs(W.mean) < tol && fit.success();
  std::cout << "decay wavelet epsilon " << C->spec.epsilon << " plancherel " << fmt(W.plancherel_defect()) << " mean "
            << fmt(W.mean) << " c_rate " << fmt(fit.c_rate) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFail;
}

int decay_counterexample(const Options& o) {
  const auto C = make_cutoff(o, decay_kind(o, "a"));
  require(o.variant == "all" || o.variant == "legleg" || o.variant == "chebcheb" || o.variant == "chebleg",
          "--variant must be legleg, chebcheb, chebleg or all");
  const auto rep = counterexample_suite(*C, {32, 64, 128, 256});
  write_json(out_dir(o) / "counterexample.json", to_json(rep));
  const double tol = tol_or(o, 1e-10);
  bool ok = rep.block_error < tol;
  const auto& last = rep.rows.back();
  const bool all = o.variant == "all";
  if (all || o.variant == "legleg") {
    ok = ok && rep.legleg_bounded;
    std::cout << "legleg n " << last.n << " value " << fmt(last.legleg) << " predicted " << fmt(last.legleg_predicted)
              << " residual*n bounded " << (rep.legleg_bounded ? "yes" : "no") << '\n';
  }
  if (all || o.variant == "chebcheb") {
    ok = ok && rep.chebcheb_error < tol;
    std::cout << "chebcheb n " << last.n << " value " << fmt(last.chebcheb) << " predicted "
              << fmt(last.chebcheb_predicted) << " max_error " << fmt(rep.chebcheb_error)
              << (rep.chebcheb_error < tol ? " match" : " mismatch") << '\n';
    if (C->is_band_pass()) {
      ok = ok && rep.slice_bounded;
      std::cout << "chebcheb slice n " << last.n << " F'(1) " << fmt(last.slice_derivative) << " predicted "
                << fmt(last.slice_derivative_predicted) << " residual/n bounded " << (rep.slice_bounded ? "yes" : "no")
                << '\n';
    }
  }
  if (all || o.variant == "chebleg") {
    ok = ok && rep.chebleg_bounded;
    std::cout << "chebleg n " << last.n << " value " << fmt(last.chebleg) << " predicted "
              << fmt(last.chebleg_predicted) << " residual*n bounded " << (rep.chebleg_bounded ? "yes" : "no") << '\n';
  }
  std::cout << "decay counterexample cutoff " << to_string(C->spec.kind) << " block_error " << fmt(rep.block_error)
            << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFail;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Localized kernels, needlet frames and decay measurements", "nloc"};
  app.require_subcommand(1);
  Options o;

  struct Leaf {
    CLI::App* app;
    int (*fn)(const Options&);
  };
  std::vector<Leaf> leaves;
  auto group = [&](const char* name, const char* help) {
    auto* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  };
  auto leaf = [&](CLI::App* g, const char* name, const char* help, int (*fn)(const Options&)) {
    auto* s = g->add_subcommand(name, help);
    add_common(s, o);
    leaves.push_back({s, fn});
    return s;
  };

  auto* cutoff = group("cutoff", "build or check cutoff functions");
  leaf(cutoff, "build", "sample the cutoff to cutoff.csv", cutoff_build);
  leaf(cutoff, "check", "verify support, range, identities and the derivative bound", cutoff_check);

  auto* kernel = group("kernel", "evaluate kernels");
  auto* keval = leaf(kernel, "eval", "evaluate L_n(x, y)", kernel_eval);
  keval->add_option("--x", o.x, "comma-separated point")->required();
  keval->add_option("--y", o.y, "comma-separated point")->required();
  auto* kgrid = leaf(kernel, "grid", "tabulate L_n on a grid", kernel_grid);
  kgrid->add_option("--points", o.points, "grid points per axis");

  auto* quad = group("quad", "Gauss rules");
  for (auto* s : {leaf(quad, "build", "write nodes and weights", quad_build),
                  leaf(quad, "verify", "check monomial exactness", quad_verify)}) {
    s->add_option("--weight", o.weight, "jacobi|hermite|laguerre");
    s->add_option("--m", o.m, "number of nodes");
  }

  auto* needlet = group("needlet", "tight needlet frames");
  for (auto* s : {leaf(needlet, "build", "write the frame to frame.json", needlet_build),
                  leaf(needlet, "parseval", "Parseval defect over random band-limited inputs", needlet_parseval),
                  leaf(needlet, "roundtrip", "analysis/synthesis round trip", needlet_roundtrip)}) {
    s->add_option("--J", o.J_max, "top level J_max");
    s->add_option("--trials", o.trials, "random inputs");
  }

  auto* decay = group("decay", "decay envelopes and bound fits");
  for (auto* s : {leaf(decay, "envelope", "measure the decay envelope", decay_envelope),
                  leaf(decay, "fit", "fit a localization bound", decay_fit),
                  leaf(decay, "compare", "compare the cutoff with a rough control", decay_compare),
                  leaf(decay, "wavelet", "build the band-limited wavelet", decay_wavelet),
                  leaf(decay, "counterexample", "tensor-product counterexamples", decay_counterexample)}) {
    s->add_option("--variant", o.variant, "legleg|chebcheb|chebleg|all");
    s->add_option("--form", o.form, "subexp|poly");
    s->add_option("--sigma", o.sigma, "polynomial exponent");
    s->add_flag("--weighted", o.weighted, "divide by the weight factor");
  }

  if (argc <= 1) {
    std::cout << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (const auto& l : leaves) {
    if (!l.app->parsed()) continue;
    try {
      merge_config(l.app, o);
      return l.fn(o);
    } catch (const InvalidArgument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const ConstructionError& e) {
      std::cerr << "construction failed: " << e.what() << '\n';
      return kFail;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kFail;
    }
  }
  std::cout << app.help();
  return kUsage;
}

}  // namespace nloc::cli
