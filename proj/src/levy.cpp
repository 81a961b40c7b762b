#include "levysde/levy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "levysde/errors.hpp"

namespace levysde {

LevyDriver LevyDriver::nig(double delta)
{
    if (!(delta > 0.0)) throw DomainError("NIG driver needs delta > 0");
    return {DriverKind::nig, delta};
}

LevyDriver LevyDriver::compound_poisson_normal(double rate)
{
    if (!(rate > 0.0)) throw DomainError("compound Poisson driver needs rate > 0");
    return {DriverKind::compound_poisson_normal, rate};
}

double LevyDriver::sample_increment(double span, RandomStream& rng) const
{
    switch (kind) {
    case DriverKind::nig: {
        // Normal variance mixture: W ~ IG(mean = span, shape = (delta * span)^2).
        const double shape = (parameter * span) * (parameter * span);
        const double w = sample_inverse_gaussian(span, shape, rng);
        return std::sqrt(w) * rng.normal();
    }
    case DriverKind::compound_poisson_normal: {
        const auto jumps = rng.poisson(parameter * span);
        if (jumps == 0) return 0.0;
        return std::sqrt(static_cast<double>(jumps) / parameter) * rng.normal();
    }
    }
    return 0.0;
}

double LevyDriver::cumulant(double u) const
{
    switch (kind) {
    case DriverKind::nig:
        return nig_cumulant(parameter, u);
    case DriverKind::compound_poisson_normal:
        return parameter * std::expm1(-0.5 * u * u / parameter);
    }
    return 0.0;
}

double LevyDriver::levy_moment(int q) const
{
    switch (kind) {
    case DriverKind::nig:
        return nig_levy_moment(parameter, q);
    case DriverKind::compound_poisson_normal:
        switch (q) {
        case 2: return 1.0;
        case 3: return 0.0;
        case 4: return 3.0 / parameter;
        default: break;
        }
        throw UnsupportedMoment("only q in {2, 3, 4} is available");
    }
    return 0.0;
}

std::string LevyDriver::describe() const
{
    std::ostringstream os;
    if (kind == DriverKind::nig) {
        os << "nig(delta=" << parameter << ")";
    } else {
        os << "cpn(rate=" << parameter << ")";
    }
    return os.str();
}

double sample_inverse_gaussian(double mean, double shape, RandomStream& rng)
{
    const double nu = rng.normal();
    const double y = nu * nu;
    const double r = mean * y / (2.0 * shape);
    // 1 + r - sqrt(r^2 + 2r) rewritten without cancellation.
    const double x = mean / (1.0 + r + std::sqrt(r * r + 2.0 * r));
    if (rng.uniform() * (mean + x) <= mean) return x;
    return mean * mean / x;
}

double nig_cumulant(double delta, double u)
{
    // delta^2 - delta sqrt(delta^2 + u^2) = -delta u^2 / (delta + sqrt(delta^2 + u^2))
    return -delta * u * u / (delta + std::hypot(delta, u));
}

double nig_levy_moment(double delta, int q)
{
    switch (q) {
    case 2: return 1.0;
    case 3: return 0.0;
    case 4: return 3.0 / (delta * delta);
    default: break;
    }
    throw UnsupportedMoment("only q in {2, 3, 4} is available");
}

double nig_phi_variance(double delta, double u)
{
    // (cos(uz) - 1)^2 = -2 (cos(uz) - 1) + (cos(2uz) - 1) / 2
    return -2.0 * nig_cumulant(delta, u) + 0.5 * nig_cumulant(delta, 2.0 * u);
}

double nig_levy_density(double delta, double z)
{
    if (z == 0.0) throw OriginError("NIG Levy density is singular at the origin");
    const double az = std::abs(z);
    return delta * delta / std::numbers::pi * boost::math::cyl_bessel_k(1, delta * az) / az;
}

double nig_levy_integral(double delta, const std::function<double(double)>& f)
{
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [&](double z) {
        return (f(z) + f(-z)) * nig_levy_density(delta, z);
    };
    constexpr double lo = 1e-8;
    constexpr double hi = 60.0;
    // Split where the density changes character so the adaptive rule sees
    // smooth pieces.
    const double knots[] = {lo, 1e-4, 1e-2, 0.5, 2.0, 8.0, 20.0, hi};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(knots); ++i) {
        total += gauss_kronrod<double, 31>::integrate(integrand, knots[i], knots[i + 1], 15, 1e-13);
    }
    return total;
}

double nig_delta_from_cumulant(double kappa, double u)
{
    const double denom = u * u + 2.0 * kappa;
    if (!(kappa < 0.0) || !(denom > 0.0)) {
        throw DomainError("cumulant value outside the NIG range (-u^2/2, 0)");
    }
    return -kappa / std::sqrt(denom);
}

double nig_delta_from_cumulant_derivative(double kappa, double u)
{
    const double denom = u * u + 2.0 * kappa;
    if (!(kappa < 0.0) || !(denom > 0.0)) {
        throw DomainError("cumulant value outside the NIG range (-u^2/2, 0)");
    }
    return -(u * u + kappa) / (denom * std::sqrt(denom));
}

} // namespace levysde
