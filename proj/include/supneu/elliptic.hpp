// The reduced linear operator A = -div_w(grad)/w + id in divergence form on
// the cell-centered grid, with zero-flux boundaries and the eps-shifted
// separable weight. Symmetric positive definite in the weighted L2 pairing;
// solved matrix-free by conjugate gradients in that pairing.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "supneu/domain.hpp"

namespace supneu {

struct WeightedOperator {
  GridPtr grid;
  double eps = 0;
  // Separable weight factors: (t + eps)^(n_k - 1) at centers and at the
  // faces above each cell (face i sits between cells i and i+1).
  std::vector<std::vector<double>> center_factor;
  std::vector<std::vector<double>> face_factor;
  std::vector<double> cell_w;  // flattened product weight for inner products

  // Default iteration cap: 50 * total^(1/m).
  int default_max_iter() const;
};

WeightedOperator make_operator(GridPtr grid, double eps);

void apply_A(const WeightedOperator& op, const GridFunction& g, GridFunction& out);
GridFunction apply_A(const WeightedOperator& op, const GridFunction& g);

struct CGStats {
  int iterations = 0;
  double relative_residual = 0;
};

struct SolveError : std::runtime_error {
  double relative_residual;
  SolveError(const std::string& what, double r)
      : std::runtime_error(what), relative_residual(r) {}
};

// Conjugate gradients for A v = h in the weighted pairing. tol is relative to
// ||h||; max_iter <= 0 selects the default cap. Optional warm start x0.
// Throws SolveError when the cap is exhausted.
GridFunction solve_A(const WeightedOperator& op, const GridFunction& h,
                     double tol, int max_iter = 0, CGStats* stats = nullptr,
                     const GridFunction* x0 = nullptr);

struct LinearResidual {
  double absolute = 0;
  double relative = 0;  // absolute / max(||h||, tiny)
};

LinearResidual residual_linear(const WeightedOperator& op, const GridFunction& v,
                               const GridFunction& h);

}  // namespace supneu
