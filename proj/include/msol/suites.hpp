#pragma once

#include <string>

#include "msol/config.hpp"
#include "msol/report.hpp"

namespace msol {

/// Sigma pairs, kappa, c_k, a_k and Psi with their quadrature errors.
VerificationReport constants_report(const RunConfig& config);

/// Psi and whether it vanishes; a vanishing Psi is informational.
VerificationReport psi_report(const RunConfig& config);

/// L(d_j W) and L(Lambda W) at quasi-random points of the ball, L W =
/// -(4/3) W^{7/3}, the boosted kernel, and the kappa_l checks.
VerificationReport kernel_report(const RunConfig& config);

VerificationReport interaction_report(const RunConfig& config);
/// One verify_geometry_bounds block per alpha, delta re-derived as alpha/4.
VerificationReport geometry_report(const RunConfig& config);
VerificationReport energy_report(const RunConfig& config);
VerificationReport channel_report(const RunConfig& config);
VerificationReport modulation_report(const RunConfig& config);

/// Dispatch by suite name; throws a config error for unknown names.
VerificationReport run_suite(const std::string& name, const RunConfig& config);

}  // namespace msol
