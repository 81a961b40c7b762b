#include "levysde/residual.hpp"

#include <cmath>
#include <sstream>

#include "levysde/errors.hpp"
#include "summation.hpp"

namespace levysde {

Vector MomentFunction::value(double z) const
{
    Vector out(dim);
    value_into(z, std::span<double>(out.data(), static_cast<std::size_t>(dim)));
    return out;
}

Vector MomentFunction::derivative(double z) const
{
    Vector out(dim);
    derivative_into(z, std::span<double>(out.data(), static_cast<std::size_t>(dim)));
    return out;
}

MomentFunction builtin_phi_cos(std::vector<double> us)
{
    if (us.empty()) throw DimensionError("cosine moment function needs at least one u");
    MomentFunction phi;
    phi.dim = static_cast<int>(us.size());
    for (double u : us) {
        std::ostringstream os;
        os << "kappa(" << u << ")";
        phi.labels.push_back(os.str());
    }
    phi.value_into = [us](double z, std::span<double> out) {
        for (std::size_t k = 0; k < us.size(); ++k) {
            // cos(x) - 1 = -2 sin^2(x / 2), exact near the origin
            const double s = std::sin(0.5 * us[k] * z);
            out[k] = -2.0 * s * s;
        }
    };
    phi.derivative_into = [us](double z, std::span<double> out) {
        for (std::size_t k = 0; k < us.size(); ++k) out[k] = -us[k] * std::sin(us[k] * z);
    };
    return phi;
}

MomentFunction test_phi_power(int power)
{
    if (power != 2 && power != 3) throw DomainError("test moment function supports z^2 and z^3");
    MomentFunction phi;
    phi.dim = 1;
    phi.admissible = false;
    phi.labels = {power == 2 ? "z^2" : "z^3"};
    phi.value_into = [power](double z, std::span<double> out) {
        out[0] = power == 2 ? z * z : z * z * z;
    };
    phi.derivative_into = [power](double z, std::span<double> out) {
        out[0] = power == 2 ? 2.0 * z : 3.0 * z * z;
    };
    return phi;
}

ResidualSet euler_residuals(const CoefficientModel& model, const ObservationSeries& obs,
                            const Vector& theta)
{
    model.check_theta(theta);
    const Vector alpha = model.alpha(theta);
    const Vector gamma = model.gamma(theta);
    const auto x = obs.values();
    const double h = obs.h();

    ResidualSet res;
    res.h = h;
    res.theta_used = theta;
    res.residuals.resize(obs.n());
    for (std::size_t j = 1; j <= obs.n(); ++j) {
        const double c = model.scale(x[j - 1], gamma);
        if (!(std::abs(c) >= kScaleFloor)) {
            std::ostringstream os;
            os << "scale coefficient vanishes at observation " << j;
            throw SingularScaleError(os.str());
        }
        const double r = (x[j] - x[j - 1] - h * model.drift(x[j - 1], alpha)) / c;
        if (!std::isfinite(r)) throw NonFiniteState("non-finite Euler residual");
        res.residuals[j - 1] = r;
    }
    return res;
}

namespace {

template <typename Kernel>
Vector scaled_mean(const ResidualSet& res, int dim, Kernel&& kernel)
{
    if (res.residuals.empty()) throw DomainError("residual set is empty");
    const auto q = static_cast<std::size_t>(dim);
    detail::CompensatedSums sums(q);
    std::vector<double> buf(q);
    for (double d : res.residuals) {
        kernel(d, std::span<double>(buf));
        for (std::size_t k = 0; k < q; ++k) sums.add(k, buf[k]);
    }
    const double norm = 1.0 / (static_cast<double>(res.n()) * res.h);
    Vector out(dim);
    for (std::size_t k = 0; k < q; ++k) out[static_cast<Eigen::Index>(k)] = norm * sums.value(k);
    return out;
}

} // namespace

Vector moment_estimate(const ResidualSet& res, const MomentFunction& phi)
{
    return scaled_mean(res, phi.dim, phi.value_into);
}

Vector zeta_estimate(const ResidualSet& res, const MomentFunction& phi)
{
    return scaled_mean(res, phi.dim, [&](double d, std::span<double> out) {
        phi.derivative_into(d, out);
        for (auto& v : out) v *= d;
    });
}

Vector mean_log_scale_gradient(const CoefficientModel& model, const ObservationSeries& obs,
                               const Vector& theta)
{
    const Vector gamma = model.gamma(theta);
    const auto x = obs.values();
    Vector acc = Vector::Zero(model.p_gamma);
    for (std::size_t j = 1; j <= obs.n(); ++j) {
        const double c = model.scale(x[j - 1], gamma);
        if (!(std::abs(c) >= kScaleFloor)) throw SingularScaleError("scale coefficient vanishes");
        acc += model.scale_dgamma(x[j - 1], gamma) / c;
    }
    return acc / static_cast<double>(obs.n());
}

Matrix bias_matrix(const ResidualSet& res, const CoefficientModel& model,
                   const ObservationSeries& obs, const Vector& theta, const MomentFunction& phi)
{
    if (res.n() != obs.n()) throw DimensionError("residuals and observations disagree in length");
    const Vector zeta = zeta_estimate(res, phi);
    const Vector ratio = mean_log_scale_gradient(model, obs, theta);
    return -zeta * ratio.transpose();
}

} // namespace levysde
