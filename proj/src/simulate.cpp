#include "levysde/simulate.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "levysde/errors.hpp"

namespace levysde {

ObservationSeries::ObservationSeries(double h, std::vector<double> values)
    : h_(h), values_(std::move(values))
{
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw DomainError("observation step must be positive");
    if (values_.size() < 2) throw DomainError("an observation series needs at least two points");
}

namespace {

void check_plan(const SimulationPlan& plan)
{
    if (plan.n < 1) throw DomainError("simulation needs n >= 1");
    if (!(plan.h > 0.0)) throw DomainError("simulation needs h > 0");
    if (plan.fine_factor < 1) throw DomainError("fine_factor must be at least 1");
    plan.model.check_theta(plan.theta0);
}

} // namespace

SimulatedPath simulate_path_with_driver(const SimulationPlan& plan)
{
    check_plan(plan);
    const auto& model = plan.model;
    const Vector alpha = model.alpha(plan.theta0);
    const Vector gamma = model.gamma(plan.theta0);
    const double dt = plan.h / plan.fine_factor;

    RandomStream rng(plan.seed);
    std::vector<double> values(plan.n + 1);
    std::vector<double> increments(plan.n);
    double x = plan.x0;
    values[0] = x;
    for (std::size_t j = 0; j < plan.n; ++j) {
        double block = 0.0;
        for (int k = 0; k < plan.fine_factor; ++k) {
            const double dj = plan.driver.sample_increment(dt, rng);
            x += model.drift(x, alpha) * dt + model.scale(x, gamma) * dj;
            block += dj;
        }
        if (!std::isfinite(x)) {
            std::ostringstream os;
            os << "simulated state became non-finite at observation index " << j + 1;
            throw NonFiniteState(os.str());
        }
        values[j + 1] = x;
        increments[j] = block;
    }
    return {ObservationSeries(plan.h, std::move(values)), std::move(increments)};
}

ObservationSeries simulate_path(const SimulationPlan& plan)
{
    return simulate_path_with_driver(plan).series;
}

std::vector<double> simulate_driver_path(const LevyDriver& driver, std::size_t n, double h,
                                         std::uint64_t seed)
{
    if (n < 1) throw DomainError("driver path needs n >= 1");
    if (!(h > 0.0)) throw DomainError("driver path needs h > 0");
    RandomStream rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = driver.sample_increment(h, rng);
    return out;
}

void write_csv(std::ostream& out, const ObservationSeries& series)
{
    out << "t,x\n";
    char buf[64];
    const auto values = series.values();
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double t = static_cast<double>(j) * series.h();
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, values[j]);
        out << buf;
    }
}

ObservationSeries read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty series file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,x") throw FormatError("series CSV must start with header 't,x'");

    std::vector<double> ts;
    std::vector<double> xs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw FormatError("series CSV line " + std::to_string(lineno) + " lacks a comma");
        }
        char* end = nullptr;
        const double t = std::strtod(line.c_str(), &end);
        if (end != line.c_str() + comma) {
            throw FormatError("bad time value on line " + std::to_string(lineno));
        }
        const char* xs_begin = line.c_str() + comma + 1;
        const double x = std::strtod(xs_begin, &end);
        if (end == xs_begin) throw FormatError("bad state value on line " + std::to_string(lineno));
        ts.push_back(t);
        xs.push_back(x);
    }
    if (xs.size() < 2) throw FormatError("series CSV needs at least two rows");
    const double h = ts[1] - ts[0];
    if (!(h > 0.0)) throw FormatError("series times must be increasing");
    for (std::size_t j = 2; j < ts.size(); ++j) {
        const double expected = ts[0] + static_cast<double>(j) * h;
        if (std::abs(ts[j] - expected) > 1e-6 * std::max(1.0, std::abs(expected))) {
            throw FormatError("series times are not equally spaced (row " + std::to_string(j) + ")");
        }
    }
    return ObservationSeries(h, std::move(xs));
}

namespace {

constexpr char kMagic[5] = {'L', 'S', 'D', 'E', '1'};

void put_f64(std::ostream& out, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64(std::istream& in)
{
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("truncated binary series");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

void write_binary(std::ostream& out, const ObservationSeries& series)
{
    out.write(kMagic, sizeof kMagic);
    put_f64(out, series.h());
    put_f64(out, static_cast<double>(series.n()));
    for (double v : series.values()) put_f64(out, v);
}

ObservationSeries read_binary(std::istream& in)
{
    char magic[5];
    if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
        throw FormatError("missing LSDE1 magic bytes");
    }
    const double h = get_f64(in);
    const double n_real = get_f64(in);
    if (!(n_real >= 1.0) || n_real != std::floor(n_real) || n_real > 9.0e15) {
        throw FormatError("invalid observation count in binary series");
    }
    std::vector<double> values(static_cast<std::size_t>(n_real) + 1);
    for (auto& v : values) v = get_f64(in);
    return ObservationSeries(h, std::move(values));
}

ObservationSeries load_series(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open series file '" + path + "'");
    char head[5] = {};
    in.read(head, 5);
    const bool binary = in.gcount() == 5 && std::memcmp(head, kMagic, 5) == 0;
    in.clear();
    in.seekg(0);
    return binary ? read_binary(in) : read_csv(in);
}

void save_series(const std::string& path, const ObservationSeries& series, bool binary)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write series file '" + path + "'");
    if (binary) {
        write_binary(out, series);
    } else {
        write_csv(out, series);
    }
}

} // namespace levysde
