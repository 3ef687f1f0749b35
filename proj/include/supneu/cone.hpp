// The monotone cone: grid functions that are nonnegative and nondecreasing
// along every axis. Membership test, exact L2 projection (cyclic Dykstra with
// pool-adjacent-violators sweeps), and a backward-window mollifier.
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "supneu/domain.hpp"

namespace supneu {

struct ConeReport {
  bool member = false;
  double min_value = 0;   // smallest cell value
  double worst_slope = 0; // most negative forward difference quotient
  std::vector<int> violating_axes;  // axes with slope below -tol
};

// member iff min_value >= -tol and worst_slope >= -tol.
ConeReport in_cone(const GridFunction& g, double tol);

// In-place L2 projection of a sequence onto nondecreasing sequences
// (pool-adjacent-violators, unit weights).
void pava_nondecreasing(std::span<double> y);

struct ProjectionError : std::runtime_error {
  double gap;
  ProjectionError(const std::string& what, double gap_)
      : std::runtime_error(what), gap(gap_) {}
};

// Euclidean (unweighted L2) projection onto the cone. Dykstra cycles run the
// axis sweeps in order, then clamping at 0; stops when the cycle-to-cycle
// change and the residual cone violation drop below 1e-10, errors out after
// max_cycles carrying the remaining gap. In-cone inputs return unchanged.
GridFunction project_cone(const GridFunction& g, int max_cycles = 1000);

// Backward-window average: each value becomes the mean of the cell values in
// the index box [i_k - window, i_k] per axis, with the function extended by 0
// below index 0. Requires window >= 0 and g in the cone (tol 0); output stays
// in the cone and never exceeds the input. window = 0 is the identity.
GridFunction mollify(const GridFunction& g, int window);

}  // namespace supneu
