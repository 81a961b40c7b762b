#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "levysde/errors.hpp"
#include "levysde/models.hpp"
#include "oracles.hpp"

using namespace levysde;

namespace {

Vector theta(double a, double g)
{
    Vector t(2);
    t << a, g;
    return t;
}

CoefficientModel constant_model(double a, double c)
{
    CoefficientModel m = builtin_ou_const_scale();
    m.name = "const";
    m.drift = [a](double, const Vector&) { return a; };
    m.scale = [c](double, const Vector&) { return c; };
    return m;
}

} // namespace

TEST(Models, EtaExamples)
{
    const auto m = builtin_cmodel();
    EXPECT_DOUBLE_EQ(eval_eta(m, 0.0, theta(0.5, 0.2)), 0.0);
    EXPECT_NEAR(eval_eta(m, 1.0, theta(0.5, 0.2)), 5.0, 1e-12);
    EXPECT_DOUBLE_EQ(eval_eta(constant_model(1.0, 2.0), 3.7, theta(1.0, 1.0)), 0.5);
}

TEST(Models, BigMExamples)
{
    const auto m = builtin_cmodel();
    EXPECT_NEAR(eval_big_m(m, 2.0, theta(0.5, 0.2))[0], -1250.0, 1e-9);
    EXPECT_DOUBLE_EQ(eval_big_m(m, 0.0, theta(0.5, 0.2))[0], 0.0);

    auto unit = builtin_ou_const_scale();
    unit.drift = [](double x, const Vector& a) { return a[0] * x; };
    unit.drift_dalpha = [](double x, const Vector&) { return Vector::Constant(1, x); };
    EXPECT_DOUBLE_EQ(eval_big_m(unit, 3.0, theta(0.7, 1.0))[0], 3.0);
}

TEST(Models, Errors)
{
    const auto m = builtin_cmodel();
    EXPECT_THROW(eval_eta(m, 0.0, theta(6.0, 0.2)), DomainError);
    EXPECT_THROW(eval_eta(m, 0.0, Vector::Constant(1, 0.5)), DimensionError);
    EXPECT_THROW(eval_eta(constant_model(1.0, 0.0), 0.0, theta(1.0, 1.0)), SingularScaleError);
    EXPECT_THROW(eval_big_m(constant_model(1.0, 1e-13), 0.0, theta(1.0, 1.0)), SingularScaleError);
    EXPECT_THROW(model_by_name("heston"), DomainError);
    EXPECT_THROW(ParamDomain(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0)), DomainError);
}

TEST(Models, CmodelCoefficients)
{
    const auto m = builtin_cmodel();
    EXPECT_DOUBLE_EQ(m.drift(2.0, Vector::Constant(1, 0.5)), -1.0);
    EXPECT_DOUBLE_EQ(m.scale(0.0, Vector::Constant(1, 0.2)), -0.2);
    EXPECT_DOUBLE_EQ(m.scale_dgamma(1.0, Vector::Constant(1, 0.2))[0], -0.5);
    EXPECT_EQ(m.p_alpha, 1);
    EXPECT_EQ(m.p_gamma, 1);
    EXPECT_TRUE(m.domain().contains(theta(0.5, 0.2)));
    EXPECT_DOUBLE_EQ(m.domain_alpha.lower[0], 0.01);
    EXPECT_DOUBLE_EQ(m.domain_gamma.upper[0], 5.0);
}

// Analytic parameter derivatives against central differences at random points.
TEST(Models, DerivativesMatchFiniteDifferences)
{
    std::mt19937_64 rng(11);
    for (const auto& name : builtin_model_names()) {
        const auto m = model_by_name(name);
        const auto box = m.domain();
        std::uniform_real_distribution<double> ux(-3.0, 3.0);
        std::uniform_real_distribution<double> ua(box.lower[0] + 0.01, box.upper[0] - 0.01);
        std::uniform_real_distribution<double> ug(box.lower[1] + 0.01, box.upper[1] - 0.01);
        for (int i = 0; i < 100; ++i) {
            const double x = ux(rng);
            const double a = ua(rng);
            const double g = ug(rng);
            const double step = 1e-5;
            auto drift = [&](double v) { return m.drift(x, Vector::Constant(1, v)); };
            auto scale = [&](double v) { return m.scale(x, Vector::Constant(1, v)); };
            auto ddrift = [&](double v) { return m.drift_dalpha(x, Vector::Constant(1, v))[0]; };
            auto dscale = [&](double v) { return m.scale_dgamma(x, Vector::Constant(1, v))[0]; };

            const double da = m.drift_dalpha(x, Vector::Constant(1, a))[0];
            const double dc = m.scale_dgamma(x, Vector::Constant(1, g))[0];
            const double d2a = m.drift_d2alpha(x, Vector::Constant(1, a))(0, 0);
            const double d2c = m.scale_d2gamma(x, Vector::Constant(1, g))(0, 0);
            EXPECT_NEAR(oracle::central_difference(drift, a, step), da, 1e-6 * (1.0 + std::abs(da)));
            EXPECT_NEAR(oracle::central_difference(scale, g, step), dc, 1e-6 * (1.0 + std::abs(dc)));
            EXPECT_NEAR(oracle::central_difference(ddrift, a, step), d2a, 1e-6 * (1.0 + std::abs(d2a)));
            EXPECT_NEAR(oracle::central_difference(dscale, g, step), d2c, 1e-6 * (1.0 + std::abs(d2c)));
        }
    }
}

TEST(Models, CmodelPolynomialGrowth)
{
    const auto m = builtin_cmodel();
    const double gamma_min = m.domain_gamma.lower[0];
    for (double x = -50.0; x <= 50.0; x += 0.25) {
        for (double g : {gamma_min, 0.2, 1.0, 5.0}) {
            const Vector gv = Vector::Constant(1, g);
            EXPECT_LE(std::abs(m.scale_dgamma(x, gv)[0]), 1.0);
            EXPECT_LE(std::abs(1.0 / m.scale(x, gv)), (1.0 + x * x) / gamma_min * (1.0 + 1e-12));
        }
    }
}
