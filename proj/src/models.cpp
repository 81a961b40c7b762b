#include "levysde/models.hpp"

#include <cmath>
#include <sstream>

#include "levysde/errors.hpp"

namespace levysde {

ParamDomain::ParamDomain(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size()) {
        throw DimensionError("ParamDomain: bound vectors differ in length");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i])) {
            throw DomainError("ParamDomain: lower bound must be below upper bound");
        }
    }
}

bool ParamDomain::contains(const Vector& v) const
{
    if (v.size() != size()) return false;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v[i] >= lower[i] && v[i] <= upper[i])) return false;
    }
    return true;
}

bool ParamDomain::on_boundary(const Vector& v, double rel_tol) const
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double width = upper[i] - lower[i];
        if (v[i] - lower[i] <= rel_tol * width || upper[i] - v[i] <= rel_tol * width) {
            return true;
        }
    }
    return false;
}

Vector ParamDomain::clamp(const Vector& v) const
{
    return v.cwiseMax(lower).cwiseMin(upper);
}

Vector CoefficientModel::join(const Vector& a, const Vector& g) const
{
    Vector theta(p());
    theta << a, g;
    return theta;
}

ParamDomain CoefficientModel::domain() const
{
    return ParamDomain(join(domain_alpha.lower, domain_gamma.lower),
                       join(domain_alpha.upper, domain_gamma.upper));
}

void CoefficientModel::check_theta(const Vector& theta) const
{
    if (theta.size() != p()) {
        std::ostringstream os;
        os << "model '" << name << "' expects " << p() << " parameters, got " << theta.size();
        throw DimensionError(os.str());
    }
    if (!domain_alpha.contains(alpha(theta)) || !domain_gamma.contains(gamma(theta))) {
        std::ostringstream os;
        os << "parameter (" << theta.transpose() << ") outside the domain of model '" << name << "'";
        throw DomainError(os.str());
    }
}

namespace {

double checked_scale(const CoefficientModel& model, double x, const Vector& theta)
{
    const double c = model.scale(x, model.gamma(theta));
    if (!(std::abs(c) >= kScaleFloor)) {
        std::ostringstream os;
        os << "scale coefficient vanishes at x=" << x;
        throw SingularScaleError(os.str());
    }
    return c;
}

Vector scalar_vec(double v)
{
    return Vector::Constant(1, v);
}

Matrix zero_11()
{
    return Matrix::Zero(1, 1);
}

} // namespace

double eval_eta(const CoefficientModel& model, double x, const Vector& theta)
{
    model.check_theta(theta);
    const double c = checked_scale(model, x, theta);
    return model.drift(x, model.alpha(theta)) / c;
}

Vector eval_big_m(const CoefficientModel& model, double x, const Vector& theta)
{
    model.check_theta(theta);
    const double c = checked_scale(model, x, theta);
    return model.drift_dalpha(x, model.alpha(theta)) / (c * c);
}

CoefficientModel builtin_cmodel()
{
    CoefficientModel m;
    m.name = "cmodel";
    m.p_alpha = 1;
    m.p_gamma = 1;
    m.domain_alpha = ParamDomain(scalar_vec(0.01), scalar_vec(5.0));
    m.domain_gamma = ParamDomain(scalar_vec(0.01), scalar_vec(5.0));
    m.drift = [](double x, const Vector& a) { return -a[0] * x; };
    m.scale = [](double x, const Vector& g) { return -g[0] / (1.0 + x * x); };
    m.drift_dalpha = [](double x, const Vector&) { return scalar_vec(-x); };
    m.drift_d2alpha = [](double, const Vector&) { return zero_11(); };
    m.scale_dgamma = [](double x, const Vector&) { return scalar_vec(-1.0 / (1.0 + x * x)); };
    m.scale_d2gamma = [](double, const Vector&) { return zero_11(); };
    return m;
}

CoefficientModel builtin_ou_const_scale()
{
    CoefficientModel m;
    m.name = "ou-const-scale";
    m.p_alpha = 1;
    m.p_gamma = 1;
    m.domain_alpha = ParamDomain(scalar_vec(0.01), scalar_vec(5.0));
    m.domain_gamma = ParamDomain(scalar_vec(0.01), scalar_vec(5.0));
    m.drift = [](double x, const Vector& a) { return -a[0] * x; };
    m.scale = [](double, const Vector& g) { return g[0]; };
    m.drift_dalpha = [](double x, const Vector&) { return scalar_vec(-x); };
    m.drift_d2alpha = [](double, const Vector&) { return zero_11(); };
    m.scale_dgamma = [](double, const Vector&) { return scalar_vec(1.0); };
    m.scale_d2gamma = [](double, const Vector&) { return zero_11(); };
    return m;
}

CoefficientModel model_by_name(std::string_view name)
{
    if (name == "cmodel") return builtin_cmodel();
    if (name == "ou-const-scale") return builtin_ou_const_scale();
    throw DomainError("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> builtin_model_names()
{
    return {"cmodel", "ou-const-scale"};
}

} // namespace levysde
