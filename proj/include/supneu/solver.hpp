// Two routes to positive monotone solutions of A u = a f(u): a normalized
// fixed-point iteration exploiting power-law homogeneity, and a mountain-pass
// style descent that starts from the maximizer of the energy along the
// segment to a large constant and relaxes the consistency residual.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supneu/energy.hpp"

namespace supneu {

enum class SolveMethod { FixedPoint, MountainPass };

struct SolverConfig {
  SolveMethod method = SolveMethod::FixedPoint;
  double tol_residual = 1e-8;  // relative strong residual target
  double tol_step = 1e-12;     // iterate stagnation threshold (sup norm)
  int max_outer = 200;
  double linear_tol = 1e-10;   // CG relative tolerance
  int linear_max_iter = 0;     // 0 = operator default cap
  int path_samples = 33;       // mountain pass: segment sampling
  double descent_step = 1.0;   // mountain pass: initial Armijo step
  std::uint64_t seed = 0;      // seeds the initial-guess perturbation
};

struct SolveReport {
  GridFunction u;
  bool converged = false;
  int outer_iterations = 0;
  std::vector<double> residual_history;        // strong residual per iteration
  std::vector<double> energy_history;          // I at the iterate per iteration
  std::vector<double> cone_violation_history;  // pre-projection violation
  double lambda = 0;      // fixed-point scaling factor (NaN for mountain pass)
  double wall_time = 0;   // seconds; excluded from emitted files
  bool is_constant = false;
  double final_residual = 0;
  double consistency = 0;
  std::string message;
};

// ||A u - a f(u)||_{L2,w} / max(||a f(u)||_{L2,w}, 1).
double strong_residual(const Problem& pb, const GridFunction& u);

// Normalized inverse iteration for power laws: repeatedly solve
// A v = a f(u_hat), project onto the cone, renormalize in the sup norm, and
// undo the normalization through the power homogeneity at the end.
// Power kind only (throws std::invalid_argument otherwise); throws
// SolveError on degenerate collapse of the normalization.
SolveReport fixed_point_solve(const Problem& pb, const SolverConfig& cfg);

// Mountain-pass search: bracket the energy sign change along the segment to
// e = sup a + 1 (doubling the endpoint at most 40 times, else a setup error),
// locate the path maximizer, then run damped consistency-residual steps with
// cone projection, re-maximizing the energy along the ray through the iterate
// each step so the descent stays on the mountain ridge. Armijo backtracking
// on I; accepts general nonlinearities.
SolveReport mountain_pass_solve(const Problem& pb, const SolverConfig& cfg);

}  // namespace supneu
