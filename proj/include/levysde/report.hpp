#pragma once

#include <iosfwd>
#include <string>

#include "levysde/avar.hpp"
#include "levysde/gqmle.hpp"
#include "levysde/residual.hpp"

namespace levysde {

// JSON documents written by the CLI. Matrices are row-major nested arrays.

/// {theta_hat, objective, converged, iterations, neg_jacobian}
std::string fit_to_json(const GqmleFit& fit);

/// Reads theta_hat back from a fit document.
Vector theta_from_fit_json(const std::string& text);

/// {kappa_hat, zeta_hat, b_hat}
std::string residual_summary_json(const Vector& kappa_hat, const Vector& zeta_hat,
                                  const Matrix& b_hat);

/// {theta_hat, nu_hat, sigma_hat: {s11, s12, s22}, gamma_hat, joint_cov, ci, nh, n, h}
std::string joint_fit_to_json(const JointFit& fit);

/// Header "j,delta", one residual per row with 17 significant digits.
void write_residuals_csv(std::ostream& out, const ResidualSet& res);

} // namespace levysde
