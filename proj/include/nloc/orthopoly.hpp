#pragma once

#include <string>
#include <vector>

namespace nloc {

struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const;
};

struct OrthoValueTable {
  std::string family;
  std::vector<double> params;
  int n_max = 0;
  double x = 0.0;
  std::vector<double> values;  ///< v_0 .. v_{n_max}

  [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
  [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// P_0..P_{n_max} in the normalization P_n(1) = binom(n + alpha, n).
OrthoValueTable jacobi_all(JacobiParams p, int n_max, double x);

/// Unchecked variant writing n_max + 1 values into out.
void jacobi_values(double alpha, double beta, int n_max, double x, double* out);

struct JacobiNorm {
  double value = 0.0;
  bool fallback = false;  ///< computed by direct integration of the weight
};

/// Squared L2 norm of P_n under (1-t)^alpha (1+t)^beta.
JacobiNorm jacobi_norm_checked(JacobiParams p, int n);
double jacobi_norm(JacobiParams p, int n);

/// C_n^lambda from the Jacobi values with lambda - 1/2 parameters.
OrthoValueTable gegenbauer_all(double lambda, int n_max, double t);
void gegenbauer_values(double lambda, int n_max, double t, double* out);

/// L2(R)-normalized Hermite functions.
OrthoValueTable hermite_fn_all(int n_max, double t);
void hermite_fn_values(int n_max, double t, double* out);

enum class LaguerreKind {
  F,  ///< orthonormal on (0, inf) with t^{2 alpha + 1} dt
  L,  ///< orthonormal on (0, inf) with dt, argument t
  M,  ///< orthonormal on (0, inf) with dt, argument t^2
};

OrthoValueTable laguerre_fn_all(double alpha, int n_max, double t,
                                LaguerreKind which);
void laguerre_fn_values(double alpha, int n_max, double t, LaguerreKind which,
                        double* out);

/// L_n^alpha(t) e^{-t/2} in the classical normalization, n = 0..n_max.
/// Valid for alpha > -1.
void laguerre_scaled_values(double alpha, int n_max, double t, double* out);

struct LaguerreBoundReport {
  double alpha = 0.0;
  std::vector<int> n;
  std::vector<double> c;       ///< smallest constant per n
  std::vector<double> argmax;  ///< t attaining it
  double spread = 0.0;         ///< max c / min c
  bool grows = false;          ///< c(n) increases by more than 2x
};

/// Smallest c with |L_n^alpha(t)| e^{-t/2} <= c 2^alpha (n/t)^{alpha/2}
/// over t in (0, 3(4n + 2 alpha + 2)).
LaguerreBoundReport check_laguerre_bound(double alpha, const std::vector<int>& n_values);
LaguerreBoundReport check_laguerre_bound(double alpha, int n_max);

}  // namespace nloc
