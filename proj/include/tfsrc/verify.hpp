#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfsrc/adjoint.hpp"

namespace tfsrc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick self-check of the numerical core: weight identities, the discrete
/// energy inequality, Mittag-Leffler values, temporal convergence against the
/// exact constant-source solution, the adjoint identity and the gradient
/// against central finite differences.
std::vector<CheckResult> run_verification(std::uint64_t seed = 7);

CheckResult check_weight_identities();
CheckResult check_mittag_leffler();
CheckResult check_energy_inequality(std::uint64_t seed);
CheckResult check_temporal_convergence();
/// Also reports the measured adjoint gap through `tol_adj`.
CheckResult check_adjoint_identity(std::uint64_t seed, double& tol_adj,
                                   AdjointScheme scheme = AdjointScheme::transposed);
CheckResult check_gradient_fd(std::uint64_t seed, double tol_adj,
                              AdjointScheme scheme = AdjointScheme::transposed);
/// The mirrored adjoint is only consistent up to O(tau); its gap must shrink as M grows.
CheckResult check_mirrored_gap_refinement(std::uint64_t seed);

}  // namespace tfsrc
