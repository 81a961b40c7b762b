#pragma once

#include <cstdint>
#include <optional>

#include "levysde/models.hpp"
#include "levysde/simulate.hpp"

namespace levysde {

/// Gaussian quasi-likelihood estimating functions at one parameter value.
struct EstimatingFunctionValue {
    Vector g_alpha;
    Vector g_gamma;
    /// Norm of the summed absolute contributions; the natural roundoff scale
    /// against which a root is judged.
    double scale = 0.0;

    Vector stacked() const;
    double norm() const { return stacked().norm(); }
};

EstimatingFunctionValue estimating_function(const CoefficientModel& model,
                                            const ObservationSeries& obs, const Vector& theta);

/// Analytic derivative of (G^alpha, G^gamma) with respect to theta, laid out
/// as [[dG^a/da, dG^a/dg], [dG^g/da, dG^g/dg]].
Matrix estimating_function_jacobian(const CoefficientModel& model, const ObservationSeries& obs,
                                    const Vector& theta);

struct GqmleOptions {
    double tol = 1e-10;
    int max_iterations = 200;
    int multistart = 8;
    /// Defaults to the midpoint of the parameter box.
    std::optional<Vector> initial;
    std::uint64_t multistart_seed = 0x9e3779b97f4a7c15ULL;
    unsigned workers = 1;
};

struct GqmleFit {
    Vector theta_hat;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
    Matrix neg_jacobian_at_fit;
    bool on_boundary = false;
};

/// argmin over the closed box of |(G^alpha, G^gamma)|. Damped, box-projected
/// Newton from the initial point; multistart simplex descent plus Newton
/// polish if that stalls. Throws NoProgressError when n < p.
GqmleFit fit_gqmle(const CoefficientModel& model, const ObservationSeries& obs,
                   const GqmleOptions& options = {});

} // namespace levysde
