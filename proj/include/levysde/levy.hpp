#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace levysde {

/// Seeded pseudo-random source. Each worker owns one; never shared.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::uint64_t poisson(double mean)
    {
        std::poisson_distribution<std::uint64_t> dist(mean);
        return dist(engine_);
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

enum class DriverKind { nig, compound_poisson_normal };

/// Centered, unit-variance pure-jump Levy driver.
///
/// nig: J_t ~ NIG(delta, 0, delta * t, 0), cumulant delta * (delta - sqrt(delta^2 + u^2)).
/// compound_poisson_normal: jumps at the given rate with N(0, 1 / rate) sizes.
struct LevyDriver {
    DriverKind kind = DriverKind::nig;
    double parameter = 1.0;

    static LevyDriver nig(double delta);
    static LevyDriver compound_poisson_normal(double rate);

    /// One exact-law increment over a time span.
    double sample_increment(double span, RandomStream& rng) const;

    /// log E exp(iu J_1), real because both drivers are symmetric.
    double cumulant(double u) const;

    /// Integral of z^q against the Levy measure, q in {2, 3, 4}.
    double levy_moment(int q) const;

    std::string describe() const;
};

/// Inverse-Gaussian variate by transformation with rejection.
double sample_inverse_gaussian(double mean, double shape, RandomStream& rng);

/// delta * (delta - sqrt(delta^2 + u^2)).
double nig_cumulant(double delta, double u);

/// Integral of z^q nu_0(dz) for the unit-variance NIG measure, q in {2, 3, 4}.
double nig_levy_moment(double delta, int q);

/// Integral of (cos(u z) - 1)^2 nu_0(dz), the asymptotic variance of the
/// cosine moment estimator.
double nig_phi_variance(double delta, double u);

/// (delta^2 / pi) K_1(delta |z|) / |z|. Throws OriginError at z = 0.
double nig_levy_density(double delta, double z);

/// Integral of f(z) nu_0(dz) by adaptive Gauss-Kronrod over 1e-8 < |z| < 60.
/// f must vanish to second order at the origin.
double nig_levy_integral(double delta, const std::function<double(double)>& f);

/// Recovers delta from kappa = nig_cumulant(delta, u); kappa in (-u^2/2, 0).
double nig_delta_from_cumulant(double kappa, double u);

/// d delta / d kappa of nig_delta_from_cumulant.
double nig_delta_from_cumulant_derivative(double kappa, double u);

} // namespace levysde
