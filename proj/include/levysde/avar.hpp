#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levysde/gqmle.hpp"
#include "levysde/residual.hpp"

namespace levysde {

/// Plug-in estimate of the asymptotic covariance of
/// sqrt(nh) * (moment estimating function, G^alpha, G^gamma).
struct SigmaHat {
    Matrix s11; // q x q
    Matrix s12; // q x p
    Matrix s22; // p x p

    /// [[s11, s12], [s12^T, s22]], symmetrized.
    Matrix full() const;
};

/// [[I_q, -B], [0, -dG(theta_hat)]] with B = [0_{q x p_alpha} | b_hat].
struct GammaHat {
    Matrix matrix;
    int q = 0;
    int p = 0;
};

struct ConfidenceInterval {
    std::string name;
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
};

/// Joint estimate of (nu_0(phi), theta) with its sqrt(nh)-scale covariance.
/// Coordinates are ordered moment functionals first, then alpha, then gamma.
struct JointFit {
    Vector theta_hat;
    Vector nu_hat;
    Matrix b_hat;
    SigmaHat sigma_hat;
    GammaHat gamma_hat;
    Matrix joint_cov;
    std::vector<ConfidenceInterval> ci;
    std::vector<std::string> names;
    double nh = 0.0;
    std::size_t n = 0;
    double h = 0.0;
    GqmleFit gqmle;

    Vector estimate() const;
};

SigmaHat sigma_hat(const CoefficientModel& model, const ObservationSeries& obs,
                   const Vector& theta_hat, const ResidualSet& res, const MomentFunction& phi);

/// jacobian_at_fit is dG(theta_hat) itself; the block stored is its negative.
GammaHat gamma_hat(const Matrix& jacobian_at_fit, const Matrix& b_hat);

/// Gamma^-1 Sigma Gamma^-T. Throws SingularGammaError past condition number 1e12.
Matrix joint_covariance(const SigmaHat& sigma, const GammaHat& gamma);

/// Sigma^{-1/2} Gamma (u_hat, v_hat) via the symmetric eigendecomposition.
Vector studentize(const Vector& u_hat, const Vector& v_hat, const SigmaHat& sigma,
                  const GammaHat& gamma);

/// Wald intervals estimate +- z_{(1+level)/2} sqrt(joint_cov_ii / nh).
std::vector<ConfidenceInterval> confidence_intervals(const JointFit& fit, double level);

double normal_quantile(double p);

struct DeltaMethodResult {
    Vector xi_hat;
    Vector theta_hat;
    Matrix cov;
};

using JointTransform = std::function<Vector(const Vector& nu, const Vector& theta)>;
using JointTransformJacobian = std::function<Matrix(const Vector& nu, const Vector& theta)>;

/// Propagates the joint fit through F(nu, theta) = (xi, theta).
DeltaMethodResult delta_method(const JointTransform& transform,
                               const JointTransformJacobian& jacobian, const JointFit& fit);

struct InferenceOptions {
    GqmleOptions gqmle;
    double level = 0.95;
};

/// Fit, residuals, bias matrix, Sigma, Gamma, covariance and intervals.
JointFit infer(const CoefficientModel& model, const ObservationSeries& obs,
               const MomentFunction& phi, const InferenceOptions& options = {});

/// The (u_hat, v_hat) pivot at known true values.
Vector studentized_statistic(const JointFit& fit, const Vector& nu_true, const Vector& theta_true);

} // namespace levysde
