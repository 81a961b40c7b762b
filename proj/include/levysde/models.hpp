#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace levysde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box of admissible parameter values.
struct ParamDomain {
    Vector lower;
    Vector upper;

    ParamDomain() = default;
    ParamDomain(Vector lo, Vector hi);

    Eigen::Index size() const { return lower.size(); }
    bool contains(const Vector& v) const;
    bool on_boundary(const Vector& v, double rel_tol = 1e-9) const;
    Vector clamp(const Vector& v) const;
    Vector midpoint() const { return 0.5 * (lower + upper); }
};

/// Parametric coefficient pair for dX = a(X, alpha) dt + c(X-, gamma) dJ.
///
/// The full parameter vector is theta = (alpha, gamma) with alpha occupying
/// the first p_alpha coordinates. Instances are immutable once built and may
/// be shared between threads.
struct CoefficientModel {
    using Scalar = std::function<double(double, const Vector&)>;
    using Gradient = std::function<Vector(double, const Vector&)>;
    using Hessian = std::function<Matrix(double, const Vector&)>;

    std::string name;
    int p_alpha = 0;
    int p_gamma = 0;
    ParamDomain domain_alpha;
    ParamDomain domain_gamma;

    Scalar drift;
    Scalar scale;
    Gradient drift_dalpha;
    Hessian drift_d2alpha;
    Gradient scale_dgamma;
    Hessian scale_d2gamma;

    int p() const { return p_alpha + p_gamma; }

    Vector alpha(const Vector& theta) const { return theta.head(p_alpha); }
    Vector gamma(const Vector& theta) const { return theta.tail(p_gamma); }
    Vector join(const Vector& alpha, const Vector& gamma) const;

    ParamDomain domain() const;

    /// Throws DimensionError on a size mismatch and DomainError outside the box.
    void check_theta(const Vector& theta) const;
};

inline constexpr double kScaleFloor = 1e-12;

/// a(x, alpha) / c(x, gamma).
double eval_eta(const CoefficientModel& model, double x, const Vector& theta);

/// d_alpha a(x, alpha) * c(x, gamma)^-2.
Vector eval_big_m(const CoefficientModel& model, double x, const Vector& theta);

/// a = -alpha x, c = -gamma / (1 + x^2).
CoefficientModel builtin_cmodel();

/// a = -alpha x, c = gamma. Closed-form GQMLE, used as an oracle.
CoefficientModel builtin_ou_const_scale();

/// Looks up "cmodel" or "ou-const-scale"; throws DomainError otherwise.
CoefficientModel model_by_name(std::string_view name);

std::vector<std::string> builtin_model_names();

} // namespace levysde
