// Verification battery: structural inequalities of the convex pair, the
// corner-cube domination enjoyed by monotone functions, boundedness of the
// embedding ratio, monotonicity preservation of the linear solve, and a
// manufactured-solution convergence study.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "supneu/convex.hpp"
#include "supneu/domain.hpp"

namespace supneu {

struct CheckResult {
  std::string name;
  bool pass = false;
  double slack = 0;       // worst margin; negative means violated
  std::int64_t samples = 0;
  std::string property;   // the inequality or identity being measured
  std::string detail;     // worst offenders, measured constants
};

struct VerificationSuiteReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool overall() const;
};

// Cone element built from normalized cumulative sums of |Gaussian| increments
// per axis (tensor sum), scaled to unit sup norm. Always a cone member.
GridFunction random_cone_function(GridPtr grid, std::mt19937_64& rng);

// For monotone g >= 0: the plain Lq norm over each of the 2^m half-open
// corner cubes is dominated by the norm over the top corner (1/2,1)^m.
// Requires every cell count even. Slack: min over cubes of (top - cube).
CheckResult cube_decomposition_check(const GridFunction& g, double q);

// Max of ||g||_Lq (plain) / ||g||_Ym over random cone samples, on the given
// grid and once-refined; passes when refinement grows the max by <= 10%.
CheckResult embedding_ratio_scan(GridPtr grid, double q, int samples,
                                 std::uint64_t seed);

// Random smooth monotone right-hand sides (nonnegative polynomial terms);
// solves on the given grid and once-refined, measuring the worst cone
// violation of the output relative to sup|h|.
CheckResult monotone_solve_check(const RevolutionSpec& spec,
                                 std::vector<int> cells, int trials,
                                 std::uint64_t seed);

// Fenchel--Young inequality and its equality case at s = f(t), biconjugacy
// on [-10,10] by nested bracketed maximization, the superquadratic pairing
// bounds on F and F*, and the measured doubling constant of F*.
CheckResult convex_identity_suite(const Nonlinearity& nl, int samples = 10000,
                                  std::uint64_t seed = 12345);

VerificationSuiteReport run_suite(const Nonlinearity& nl,
                                  const RevolutionSpec& spec,
                                  std::vector<int> cells, std::uint64_t seed);

struct ManufacturedStudy {
  std::vector<int> resolutions;
  std::vector<double> sup_errors;   // against the closed-form solution
  std::vector<double> orders;       // log2 ratios of consecutive errors
  bool pass = false;                // all orders within [1.7, 2.3]
};

// n=(3): v(t) = 3t^2 - 2t^3 + 18 solves A v = 24t + 3t^2 - 2t^3 with natural
// boundary fluxes; measures the discrete solve against it.
ManufacturedStudy manufactured_convergence_study(std::vector<int> resolutions);

}  // namespace supneu
