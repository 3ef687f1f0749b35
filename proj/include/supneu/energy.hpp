// Problem data and the dual energy I(u) = psi(u) - phi(u) on the monotone
// cone, where phi integrates a F(u) and psi integrates a F*(A u / a). Off the
// cone psi is +infinity, carried as an empty optional rather than a float.
#pragma once

#include <optional>

#include "supneu/cone.hpp"
#include "supneu/convex.hpp"
#include "supneu/elliptic.hpp"

namespace supneu {

struct Problem {
  GridPtr grid;
  GridFunction a;   // weight; cone member with strictly positive minimum
  Nonlinearity nl;
  double eps = 0;
  WeightedOperator op;
  double cone_tol = 1e-9;  // membership tolerance used by the energies
};

// Validates the weight (cone membership, min a > 0) and the growth exponent
// against the critical threshold 2m/(m-2) unless explicitly overridden.
// Throws std::invalid_argument on violation.
Problem make_problem(GridPtr grid, GridFunction a, Nonlinearity nl, double eps,
                     bool allow_supercritical = false, double cone_tol = 1e-9);

struct EnergyReport {
  double phi = 0;
  std::optional<double> psi;  // empty encodes +infinity (off-cone)
  std::optional<double> I;    // psi - phi when finite
  double consistency_gap = 0; // NaN when u is off-cone
  ConeReport cone;
};

double eval_phi(const Problem& pb, const GridFunction& u);
std::optional<double> eval_psi(const Problem& pb, const GridFunction& u);
EnergyReport eval_I(const Problem& pb, const GridFunction& u);

// Pointwise a f(u); maps cone functions to nonnegative functions.
GridFunction dphi(const Problem& pb, const GridFunction& u);

// ||(F*)'(A u / a) - u||_{L2,w} / max(||u||_{L2,w}, 1): zero exactly at
// points where the primal and dual representations agree.
double consistency_gap(const Problem& pb, const GridFunction& u);

}  // namespace supneu
