#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "levysde/levy.hpp"
#include "levysde/models.hpp"

namespace levysde {

/// Equally spaced sample X_{t_0}, ..., X_{t_n} with t_j = j h.
class ObservationSeries {
public:
    ObservationSeries(double h, std::vector<double> values);

    double h() const { return h_; }
    std::size_t n() const { return values_.size() - 1; }
    double x0() const { return values_.front(); }
    double horizon() const { return h_ * static_cast<double>(n()); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }

    friend bool operator==(const ObservationSeries&, const ObservationSeries&) = default;

private:
    double h_;
    std::vector<double> values_;
};

struct SimulationPlan {
    CoefficientModel model;
    Vector theta0;
    LevyDriver driver;
    std::size_t n = 1;
    double h = 0.01;
    int fine_factor = 10;
    double x0 = 0.0;
    std::uint64_t seed = 0;
};

/// Observed path together with the driver increments over each observation
/// interval (the sum of the fine-grid increments inside it).
struct SimulatedPath {
    ObservationSeries series;
    std::vector<double> driver_increments;
};

/// Fine-grid Euler-Maruyama with left-endpoint coefficients, subsampled
/// every fine_factor steps. Throws NonFiniteState if the state blows up.
ObservationSeries simulate_path(const SimulationPlan& plan);
SimulatedPath simulate_path_with_driver(const SimulationPlan& plan);

/// n i.i.d. driver increments of span h.
std::vector<double> simulate_driver_path(const LevyDriver& driver, std::size_t n, double h,
                                         std::uint64_t seed);

// Serialization. CSV has header "t,x" with 17 significant digits; the binary
// layout is "LSDE1" followed by little-endian float64 h, n, values.
void write_csv(std::ostream& out, const ObservationSeries& series);
ObservationSeries read_csv(std::istream& in);
void write_binary(std::ostream& out, const ObservationSeries& series);
ObservationSeries read_binary(std::istream& in);

/// Reads either format, detected by the magic bytes.
ObservationSeries load_series(const std::string& path);
void save_series(const std::string& path, const ObservationSeries& series, bool binary = false);

} // namespace levysde
