#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "levysde/errors.hpp"
#include "levysde/levy.hpp"
#include "levysde/simulate.hpp"
#include "oracles.hpp"

using namespace levysde;

namespace {

Vector theta(double a, double g)
{
    Vector t(2);
    t << a, g;
    return t;
}

SimulationPlan cmodel_plan(std::size_t n, double h, std::uint64_t seed)
{
    SimulationPlan plan;
    plan.model = builtin_cmodel();
    plan.theta0 = theta(0.5, 0.2);
    plan.driver = LevyDriver::nig(10.0);
    plan.n = n;
    plan.h = h;
    plan.seed = seed;
    return plan;
}

CoefficientModel with_coefficients(double (*a)(double), double c)
{
    CoefficientModel m = builtin_ou_const_scale();
    m.name = "custom";
    m.drift = [a](double x, const Vector&) { return a(x); };
    m.scale = [c](double, const Vector&) { return c; };
    return m;
}

} // namespace

TEST(Simulate, OdeLimitWithoutNoise)
{
    SimulationPlan plan;
    plan.model = builtin_ou_const_scale();
    plan.model.scale = [](double, const Vector&) { return 0.0; };
    plan.theta0 = theta(0.7, 1.0);
    plan.n = 100;
    plan.h = 0.01;
    plan.fine_factor = 100;
    plan.x0 = 2.0;
    const auto s = simulate_path(plan);
    EXPECT_NEAR(s[plan.n] / (2.0 * std::exp(-0.7)), 1.0, 1e-3);
    EXPECT_DOUBLE_EQ(s.x0(), 2.0);
}

TEST(Simulate, IdentityCoefficientsReproduceDriver)
{
    for (auto driver : {LevyDriver::nig(1.0), LevyDriver::compound_poisson_normal(3.0)}) {
        SimulationPlan plan;
        plan.model = with_coefficients([](double) { return 0.0; }, 1.0);
        plan.theta0 = theta(1.0, 1.0);
        plan.driver = driver;
        plan.n = 500;
        plan.h = 0.02;
        plan.fine_factor = 4;
        plan.seed = 5;
        const auto path = simulate_path_with_driver(plan);
        ASSERT_EQ(path.driver_increments.size(), plan.n);
        // Re-add the fine increments in the same order to get bitwise equality.
        RandomStream rng(plan.seed);
        double x = 0.0;
        for (std::size_t j = 0; j < plan.n; ++j) {
            const double before = x;
            for (int k = 0; k < plan.fine_factor; ++k) x += driver.sample_increment(plan.h / 4, rng);
            EXPECT_EQ(path.series[j + 1], x);
            EXPECT_NEAR(path.series[j + 1] - path.series[j], path.driver_increments[j],
                        1e-13 * (1.0 + std::abs(before)));
        }
    }
}

TEST(Simulate, DeterministicReplay)
{
    const auto a = simulate_path(cmodel_plan(2000, 0.01, 42));
    const auto b = simulate_path(cmodel_plan(2000, 0.01, 42));
    const auto c = simulate_path(cmodel_plan(2000, 0.01, 43));
    EXPECT_TRUE(a == b);
    EXPECT_FALSE(a == c);
    EXPECT_EQ(a.values().size(), 2001u);
}

TEST(Simulate, SubsamplingConsistency)
{
    auto coarse = cmodel_plan(300, 0.05, 9);
    coarse.fine_factor = 5;
    auto fine = cmodel_plan(1500, 0.01, 9);
    fine.fine_factor = 1;
    const auto c = simulate_path(coarse);
    const auto f = simulate_path(fine);
    for (std::size_t j = 0; j <= coarse.n; ++j) EXPECT_EQ(c[j], f[5 * j]) << "j=" << j;
}

// Per-path averages have heavy-tailed spread (rms near 0.04 at T = 100), so
// the centering bound applies to the average over seeds.
TEST(Simulate, LongRunCentering)
{
    std::vector<double> averages;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = simulate_path(cmodel_plan(10'000, 0.01, seed));
        const auto v = s.values();
        const double avg = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - avg) * (x - avg);
        EXPECT_TRUE(std::isfinite(var));
        averages.push_back(avg);
    }
    const double grand = oracle::mean(averages);
    EXPECT_GT(grand, -0.1);
    EXPECT_LT(grand, 0.1);
    EXPECT_LT(std::abs(grand), 3.0 * oracle::sd(averages) / std::sqrt(10.0));
}

TEST(Simulate, RejectsInvalidPlans)
{
    auto plan = cmodel_plan(10, 0.01, 1);
    plan.theta0 = theta(7.0, 0.2);
    EXPECT_THROW(simulate_path(plan), DomainError);
    plan = cmodel_plan(10, 0.01, 1);
    plan.fine_factor = 0;
    EXPECT_THROW(simulate_path(plan), DomainError);
    plan = cmodel_plan(0, 0.01, 1);
    EXPECT_THROW(simulate_path(plan), DomainError);
}

TEST(Simulate, ExplosionIsReported)
{
    SimulationPlan plan;
    plan.model = with_coefficients([](double x) { return x * x * x; }, 1.0);
    plan.theta0 = theta(1.0, 1.0);
    plan.n = 1000;
    plan.h = 0.1;
    plan.x0 = 10.0;
    try {
        simulate_path(plan);
        FAIL() << "expected NonFiniteState";
    } catch (const NonFiniteState& e) {
        EXPECT_NE(std::string(e.what()).find("index"), std::string::npos);
    }
}

TEST(SimulateDriver, Centering)
{
    const auto inc = simulate_driver_path(LevyDriver::nig(1.0), 1'000'000, 0.05, 3);
    EXPECT_EQ(inc.size(), 1'000'000u);
    EXPECT_NEAR(oracle::mean(inc), 0.0, 3.0 * std::sqrt(0.05 / 1e6));
}

TEST(SimulateDriver, CumulativeVarianceGrowsLinearly)
{
    // Terminal value J_{nh} over 2000 paths: variance nh = 10.
    std::vector<double> terminal;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const auto inc = simulate_driver_path(LevyDriver::nig(2.0), 1000, 0.01, seed);
        terminal.push_back(std::accumulate(inc.begin(), inc.end(), 0.0));
    }
    // Sample variance of 2000 near-normal draws: relative sd about sqrt(2/2000).
    EXPECT_NEAR(oracle::variance(terminal), 10.0, 10.0 * 4.0 * std::sqrt(2.0 / 2000.0));
}

TEST(SimulateDriver, CosineFunctionalMatchesCumulant)
{
    const double h = 0.01;
    const auto inc = simulate_driver_path(LevyDriver::nig(1.0), 1'000'000, h, 4);
    double sum = 0.0;
    for (double z : inc) sum += std::cos(z) - 1.0;
    const double nh = h * static_cast<double>(inc.size());
    EXPECT_NEAR(sum / nh, -0.4142, 3.0 * std::sqrt(0.21039 / 1e4));
}

TEST(Serialization, CsvRoundTrip)
{
    const auto s = simulate_path(cmodel_plan(100, 0.01, 11));
    std::stringstream buf;
    write_csv(buf, s);
    const std::string text = buf.str();
    EXPECT_EQ(text.rfind("t,x\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 102);
    const auto back = read_csv(buf);
    EXPECT_EQ(back.values().size(), s.values().size());
    for (std::size_t j = 0; j <= s.n(); ++j) EXPECT_EQ(back[j], s[j]);
    EXPECT_NEAR(back.h(), 0.01, 1e-15);
}

TEST(Serialization, BinaryRoundTripIsExact)
{
    const auto s = simulate_path(cmodel_plan(257, 0.003, 12));
    std::stringstream buf;
    write_binary(buf, s);
    const std::string bytes = buf.str();
    EXPECT_EQ(bytes.substr(0, 5), "LSDE1");
    EXPECT_EQ(bytes.size(), 5u + 8u * (2u + 258u));
    const auto back = read_binary(buf);
    EXPECT_TRUE(back == s);
}

TEST(Serialization, FilesAndFormatErrors)
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto s = simulate_path(cmodel_plan(50, 0.02, 13));
    const auto csv = (dir / "levysde_test_series.csv").string();
    const auto bin = (dir / "levysde_test_series.bin").string();
    save_series(csv, s);
    save_series(bin, s, true);
    EXPECT_TRUE(load_series(bin) == s);
    EXPECT_EQ(load_series(csv).values().size(), 51u);
    std::remove(csv.c_str());
    std::remove(bin.c_str());

    std::stringstream bad_header("time,x\n0,1\n1,2\n");
    EXPECT_THROW(read_csv(bad_header), FormatError);
    std::stringstream uneven("t,x\n0,1\n1,2\n3,4\n");
    EXPECT_THROW(read_csv(uneven), FormatError);
    std::stringstream truncated("LSDE1abc");
    EXPECT_THROW(read_binary(truncated), FormatError);
    EXPECT_THROW(load_series((dir / "levysde_missing_file.csv").string()), FormatError);
}
