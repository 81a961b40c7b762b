#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "levysde/errors.hpp"
#include "levysde/levy.hpp"
#include "oracles.hpp"

using namespace levysde;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

template <typename Draw>
Moments sample_moments(std::size_t n, Draw&& draw)
{
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = draw();
        sum += v;
        sum2 += v * v;
    }
    const double m = sum / static_cast<double>(n);
    return {m, (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)};
}

} // namespace

TEST(Levy, NigIncrementIsCentered)
{
    RandomStream rng(101);
    const auto driver = LevyDriver::nig(10.0);
    const auto m = sample_moments(1'000'000, [&] { return driver.sample_increment(1.0, rng); });
    EXPECT_NEAR(m.mean, 0.0, 0.004);
}

TEST(Levy, NigIncrementVarianceEqualsSpan)
{
    // Var(J_t^2) = t * 3/delta^2 + 2 t^2, so 6e6 draws put 1% beyond 3 standard errors.
    RandomStream rng(102);
    const auto driver = LevyDriver::nig(1.0);
    const auto m = sample_moments(6'000'000, [&] { return driver.sample_increment(0.05, rng); });
    EXPECT_NEAR(m.var, 0.05, 0.01 * 0.05);
}

TEST(Levy, CompoundPoissonVariance)
{
    RandomStream rng(103);
    const auto driver = LevyDriver::compound_poisson_normal(1.0);
    const auto m = sample_moments(1'000'000, [&] { return driver.sample_increment(2.0, rng); });
    EXPECT_NEAR(m.var, 2.0, 0.02 * 2.0);
    EXPECT_NEAR(m.mean, 0.0, 3.0 * std::sqrt(2.0 / 1e6));
}

TEST(Levy, InverseGaussianDegenerateShape)
{
    RandomStream rng(104);
    const auto m = sample_moments(1000, [&] { return sample_inverse_gaussian(1.0, 1e12, rng); });
    EXPECT_LT(std::sqrt(m.var), 1e-5);
    EXPECT_NEAR(m.mean, 1.0, 1e-5);
}

TEST(Levy, InverseGaussianMoments)
{
    RandomStream rng(105);
    bool positive = true;
    const auto m = sample_moments(1'000'000, [&] {
        const double w = sample_inverse_gaussian(2.0, 8.0, rng);
        positive = positive && w > 0.0;
        return w;
    });
    EXPECT_TRUE(positive);
    EXPECT_NEAR(m.mean, 2.0, 0.003 * 2.0);
    EXPECT_NEAR(m.var, 1.0, 0.02); // mean^3 / shape
}

TEST(Levy, CumulantValues)
{
    EXPECT_NEAR(nig_cumulant(1.0, 1.0), -0.4142, 5e-5);
    EXPECT_NEAR(nig_cumulant(5.0, 5.0), -10.3553, 5e-5);
    EXPECT_DOUBLE_EQ(nig_cumulant(3.0, 0.0), 0.0);
    // True values printed in the simulation tables.
    EXPECT_NEAR(nig_cumulant(1.0, 3.0), -2.1623, 5e-5);
    EXPECT_NEAR(nig_cumulant(1.0, 5.0), -4.0990, 5e-5);
    EXPECT_NEAR(nig_cumulant(5.0, 1.0), -0.4951, 5e-5);
    EXPECT_NEAR(nig_cumulant(5.0, 3.0), -4.1548, 5e-5);
    EXPECT_NEAR(nig_cumulant(10.0, 1.0), -0.4988, 5e-5);
    EXPECT_NEAR(nig_cumulant(10.0, 3.0), -4.4031, 5e-5);
    EXPECT_NEAR(nig_cumulant(10.0, 5.0), -11.8034, 5e-5);
}

TEST(Levy, CumulantCurvatureIsUnitVariance)
{
    for (double delta : {1.0, 5.0, 10.0}) {
        const double step = 1e-4;
        const double second =
            (nig_cumulant(delta, step) - 2.0 * nig_cumulant(delta, 0.0) + nig_cumulant(delta, -step)) /
            (step * step);
        EXPECT_NEAR(second, -1.0, 1e-6) << "delta=" << delta;
    }
}

TEST(Levy, LevyMoments)
{
    EXPECT_DOUBLE_EQ(nig_levy_moment(10.0, 4), 0.03);
    EXPECT_DOUBLE_EQ(nig_levy_moment(5.0, 3), 0.0);
    EXPECT_DOUBLE_EQ(nig_levy_moment(2.0, 2), 1.0);
    EXPECT_THROW(nig_levy_moment(2.0, 5), UnsupportedMoment);
    EXPECT_THROW(nig_levy_moment(2.0, 1), UnsupportedMoment);
}

TEST(Levy, PhiVariance)
{
    EXPECT_NEAR(nig_phi_variance(1.0, 1.0), 0.21039, 5e-6);
    EXPECT_DOUBLE_EQ(nig_phi_variance(4.0, 0.0), 0.0);
    EXPECT_GT(nig_phi_variance(1.0, 3.0), nig_phi_variance(1.0, 1.0));
    // Quadrature cross-check of the half-angle closed form.
    for (double delta : {1.0, 10.0}) {
        for (double u : {1.0, 3.0}) {
            const double quad = nig_levy_integral(delta, [u](double z) {
                const double v = std::cos(u * z) - 1.0;
                return v * v;
            });
            EXPECT_NEAR(nig_phi_variance(delta, u), quad, 1e-4) << delta << " " << u;
        }
    }
}

TEST(Levy, DensityIsEvenAndRejectsOrigin)
{
    for (double z : {1e-6, 0.01, 0.3, 1.0, 4.5, 20.0}) {
        EXPECT_DOUBLE_EQ(nig_levy_density(2.0, z), nig_levy_density(2.0, -z));
        EXPECT_GE(nig_levy_density(2.0, z), 0.0);
    }
    EXPECT_THROW(nig_levy_density(1.0, 0.0), OriginError);
}

TEST(Levy, QuadratureReproducesCumulant)
{
    for (double delta : {1.0, 5.0, 10.0}) {
        for (double u : {1.0, 3.0, 5.0}) {
            const double quad =
                nig_levy_integral(delta, [u](double z) { return std::cos(u * z) - 1.0; });
            EXPECT_NEAR(quad, nig_cumulant(delta, u), 1e-4) << "delta=" << delta << " u=" << u;
        }
    }
}

TEST(Levy, QuadratureReproducesMoments)
{
    for (double delta : {1.0, 5.0, 10.0}) {
        EXPECT_NEAR(nig_levy_integral(delta, [](double z) { return z * z * z * z; }),
                    nig_levy_moment(delta, 4), 1e-5);
        EXPECT_NEAR(nig_levy_integral(delta, [](double z) { return z * z; }), 1.0, 1e-5);
    }
}

TEST(Levy, EmpiricalCharacteristicFunction)
{
    const auto driver = LevyDriver::nig(1.0);
    RandomStream rng(106);
    constexpr std::size_t n = 1'000'000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = driver.sample_increment(1.0, rng);
    for (double u : {1.0, 3.0, 5.0}) {
        const auto m = sample_moments(n, [&, i = std::size_t{0}]() mutable { return std::cos(u * draws[i++]); });
        const double se = std::sqrt(m.var / static_cast<double>(n));
        EXPECT_NEAR(m.mean, std::exp(nig_cumulant(1.0, u)), 3.0 * se) << "u=" << u;
    }
}

// (1/h) E|J_h|^4 -> int z^4 nu_0(dz) as h -> 0; exactly int z^4 nu_0 + 3h.
// Uses the conditional moment E[J_h^4 | W] = 3 W^2 of the normal-variance
// mixture: the raw fourth power has a relative standard error near 15% at
// h = 0.002 even with 1e6 draws.
TEST(Levy, SmallTimeFourthMomentConvergence)
{
    const double delta = 2.0;
    const double target = nig_levy_moment(delta, 4);
    double previous_gap = std::numeric_limits<double>::infinity();
    for (double h : {0.05, 0.01, 0.002}) {
        RandomStream rng(107);
        const auto n = static_cast<std::size_t>(4e4 / h);
        const auto m = sample_moments(n, [&] {
            const double w = sample_inverse_gaussian(h, (delta * h) * (delta * h), rng);
            return 3.0 * w * w / h;
        });
        const double gap = std::abs(m.mean - target) / target;
        EXPECT_LT(gap, previous_gap) << "h=" << h;
        previous_gap = gap;
    }
    EXPECT_LT(previous_gap, 0.05);

    // Direct draws through the public sampler agree at the coarse step.
    const auto driver = LevyDriver::nig(delta);
    RandomStream rng(108);
    const double h = 0.05;
    const auto m = sample_moments(2'000'000, [&] {
        const double j = driver.sample_increment(h, rng);
        return j * j * j * j / h;
    });
    EXPECT_NEAR(m.mean, target + 3.0 * h, 3.0 * std::sqrt(m.var / 2e6));
}

TEST(Levy, CompoundPoissonCumulant)
{
    const auto driver = LevyDriver::compound_poisson_normal(2.0);
    EXPECT_NEAR(driver.cumulant(1.0), 2.0 * (std::exp(-0.25) - 1.0), 1e-15);
    EXPECT_DOUBLE_EQ(driver.levy_moment(4), 1.5);
    EXPECT_THROW(LevyDriver::compound_poisson_normal(0.0), DomainError);
    EXPECT_THROW(LevyDriver::nig(-1.0), DomainError);
}

TEST(Levy, DeltaFromCumulantInvertsByBisection)
{
    for (double delta : {0.5, 1.0, 5.0, 10.0}) {
        for (double u : {1.0, 3.0}) {
            const double kappa = nig_cumulant(delta, u);
            const double by_bisection =
                oracle::bisection([&](double d) { return nig_cumulant(d, u) - kappa; }, 1e-6, 1e3);
            EXPECT_NEAR(nig_delta_from_cumulant(kappa, u), by_bisection, 1e-9 * delta);
            EXPECT_NEAR(nig_delta_from_cumulant(kappa, u), delta, 1e-10 * delta);
            const double fd = oracle::central_difference(
                [u](double k) { return nig_delta_from_cumulant(k, u); }, kappa, 1e-7 * std::abs(kappa));
            EXPECT_NEAR(nig_delta_from_cumulant_derivative(kappa, u), fd,
                        1e-5 * std::abs(fd));
        }
    }
    EXPECT_THROW(nig_delta_from_cumulant(0.1, 1.0), DomainError);
    EXPECT_THROW(nig_delta_from_cumulant(-0.6, 1.0), DomainError);
}
