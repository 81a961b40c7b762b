#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "levysde/models.hpp"
#include "levysde/simulate.hpp"

namespace levysde {

/// Vector-valued moment fitting function phi with its derivative.
///
/// Evaluation writes into caller-provided storage of length dim so the hot
/// loops over residuals do not allocate.
struct MomentFunction {
    using Kernel = std::function<void(double, std::span<double>)>;

    int dim = 0;
    Kernel value_into;
    Kernel derivative_into;
    std::vector<std::string> labels;
    /// False for test-only functions (z^2, z^3) that do not vanish fast
    /// enough at the origin; inference refuses them.
    bool admissible = true;

    Vector value(double z) const;
    Vector derivative(double z) const;
};

/// phi_k(z) = cos(u_k z) - 1.
MomentFunction builtin_phi_cos(std::vector<double> us);

/// phi(z) = z^power for power in {2, 3}; flagged non-admissible.
MomentFunction test_phi_power(int power);

struct ResidualSet {
    std::vector<double> residuals;
    double h = 0.0;
    Vector theta_used;

    std::size_t n() const { return residuals.size(); }
};

/// delta_j = (X_j - X_{j-1} - h a(X_{j-1}, alpha)) / c(X_{j-1}, gamma).
ResidualSet euler_residuals(const CoefficientModel& model, const ObservationSeries& obs,
                            const Vector& theta);

/// (1/(nh)) sum_j phi(delta_j).
Vector moment_estimate(const ResidualSet& res, const MomentFunction& phi);

/// (1/(nh)) sum_j delta_j phi'(delta_j).
Vector zeta_estimate(const ResidualSet& res, const MomentFunction& phi);

/// (1/n) sum_j d_gamma c(X_{j-1}, gamma) / c(X_{j-1}, gamma).
Vector mean_log_scale_gradient(const CoefficientModel& model, const ObservationSeries& obs,
                               const Vector& theta);

/// -zeta_estimate (x) mean_log_scale_gradient, a q x p_gamma matrix.
Matrix bias_matrix(const ResidualSet& res, const CoefficientModel& model,
                   const ObservationSeries& obs, const Vector& theta, const MomentFunction& phi);

} // namespace levysde
