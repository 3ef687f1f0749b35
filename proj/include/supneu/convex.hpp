// Nonlinearities f with primitive F and convex conjugate F*. Two kinds:
// exact power laws f(t) = t^(p-1), and strictly increasing tabulated data
// with trapezoid primitives and bisection inversion. F and F* are even.
#pragma once

#include <string>
#include <vector>

namespace supneu {

enum class NonlinKind { Power, Tabulated };

struct Nonlinearity {
  NonlinKind kind = NonlinKind::Power;
  double p = 0;         // growth exponent, > 2
  double mu = 0;        // superquadratic constant, > 2
  double ell = 0;       // doubling factor, > 1
  double growth_C = 1;  // constant in the growth bound |f| <= C(1+|t|^(p-1))

  // Tabulated data (empty for Power). t_nodes starts at 0 with f = 0.
  std::vector<double> t_nodes;
  std::vector<double> f_nodes;
  std::vector<double> F_nodes;  // cached cumulative trapezoid primitive
};

// Power law; mu = p, ell = 2^(1/(p-1)) (the equality case of the doubling
// condition), growth_C = 1. Throws std::invalid_argument unless p > 2.
Nonlinearity make_power(double p);

// Tabulated from node arrays; both columns strictly increasing, first node
// (0, 0) prepended when missing. Constants are caller-supplied.
Nonlinearity make_tabulated(std::vector<double> t, std::vector<double> f,
                            double p, double mu, double ell, double growth_C);
// Two-column whitespace-separated text file: t f(t) per line, '#' comments.
Nonlinearity load_tabulated(const std::string& path, double p, double mu,
                            double ell, double growth_C);

// f(t) for t >= 0; tabulated data extends linearly past the last node.
// Throws std::domain_error for t < 0.
double eval_f(const Nonlinearity& nl, double t);
// Primitive F(t) = int_0^|t| f, even in t.
double eval_F(const Nonlinearity& nl, double t);
// Inverse of f on [0, f_max]; bisection to 1e-12 for tabulated data.
// Throws std::domain_error outside the invertible range.
double f_inverse(const Nonlinearity& nl, double s);
// Conjugate F*(s) = |s| f^{-1}(|s|) - F(f^{-1}(|s|)), even in s.
double eval_Fstar(const Nonlinearity& nl, double s);
// (F*)'(s) = sign(s) f^{-1}(|s|); odd, continuous, zero at zero.
double eval_Fstar_prime(const Nonlinearity& nl, double s);

struct AssumptionReport {
  bool monotone_f = false;    // f strictly increasing on samples
  bool growth = false;        // f(t) <= C (1 + t^(p-1))
  bool superquadratic = false;  // t f(t) >= mu F(t)
  bool doubling_F = false;    // 2 ell F(t) <= F(ell t)
  bool doubling_Fstar = false;  // F*(2s)/F*(s) bounded across samples
  double slack_monotone = 0;  // worst consecutive increment of f
  double slack_growth = 0;    // min of C(1+t^(p-1)) - f(t)
  double slack_superquadratic = 0;  // min of t f(t) - mu F(t)
  double slack_doubling_F = 0;      // min of F(ell t) - 2 ell F(t)
  double doubling_L = 0;      // measured sup of F*(2s)/F*(s)
  int samples = 0;

  bool all() const {
    return monotone_f && growth && superquadratic && doubling_F && doubling_Fstar;
  }
};

// Samples the structural inequalities on a positive range (tabulated: the
// table range; power: (0, 10]); slacks are absolute, flags allow 1e-12 of
// floating-point leeway on the non-strict inequalities.
AssumptionReport check_assumptions(const Nonlinearity& nl, int samples);

}  // namespace supneu
