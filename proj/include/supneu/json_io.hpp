#pragma once

// JSON views of the report types. Values that can be infinite or undefined
// (psi, I, lambda, consistency) serialize as null. Timing fields are kept
// out of the JSON so that repeated runs produce byte-identical files.

#include <cmath>

#include "json.hpp"

#include "supneu/cone.hpp"
#include "supneu/convex.hpp"
#include "supneu/energy.hpp"
#include "supneu/solver.hpp"
#include "supneu/verify.hpp"

namespace supneu {

inline nlohmann::json finite_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline void to_json(nlohmann::json& j, const ConeReport& r) {
  j = nlohmann::json{{"member", r.member},
                     {"min_value", finite_or_null(r.min_value)},
                     {"worst_slope", finite_or_null(r.worst_slope)},
                     {"violating_axes", r.violating_axes}};
}

inline void to_json(nlohmann::json& j, const AssumptionReport& r) {
  j = nlohmann::json{{"monotone_f", r.monotone_f},
                     {"growth", r.growth},
                     {"superquadratic", r.superquadratic},
                     {"doubling_F", r.doubling_F},
                     {"doubling_Fstar", r.doubling_Fstar},
                     {"slack_monotone", finite_or_null(r.slack_monotone)},
                     {"slack_growth", finite_or_null(r.slack_growth)},
                     {"slack_superquadratic", finite_or_null(r.slack_superquadratic)},
                     {"doubling_L", finite_or_null(r.doubling_L)},
                     {"samples", r.samples},
                     {"all", r.all()}};
}

inline void to_json(nlohmann::json& j, const EnergyReport& r) {
  j = nlohmann::json{{"phi", finite_or_null(r.phi)},
                     {"psi", r.psi ? finite_or_null(*r.psi) : nlohmann::json(nullptr)},
                     {"I", r.I ? finite_or_null(*r.I) : nlohmann::json(nullptr)},
                     {"consistency_gap", finite_or_null(r.consistency_gap)},
                     {"cone", r.cone}};
}

inline void to_json(nlohmann::json& j, const SolveReport& r) {
  j = nlohmann::json{{"converged", r.converged},
                     {"outer_iterations", r.outer_iterations},
                     {"final_residual", finite_or_null(r.final_residual)},
                     {"consistency", finite_or_null(r.consistency)},
                     {"lambda", finite_or_null(r.lambda)},
                     {"is_constant", r.is_constant},
                     {"message", r.message}};
}

inline void to_json(nlohmann::json& j, const CheckResult& r) {
  j = nlohmann::json{{"name", r.name},
                     {"pass", r.pass},
                     {"slack", finite_or_null(r.slack)},
                     {"samples", r.samples},
                     {"property", r.property},
                     {"detail", r.detail}};
}

inline void to_json(nlohmann::json& j, const VerificationSuiteReport& r) {
  j = nlohmann::json{{"seed", r.seed},
                     {"checks", r.checks},
                     {"overall", r.overall()}};
}

inline void to_json(nlohmann::json& j, const ManufacturedStudy& r) {
  j = nlohmann::json{{"resolutions", r.resolutions},
                     {"sup_errors", r.sup_errors},
                     {"orders", r.orders},
                     {"pass", r.pass}};
}

}  // namespace supneu
