#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levysde/avar.hpp"
#include "levysde/levy.hpp"
#include "levysde/models.hpp"

namespace levysde {

struct GridPoint {
    double T = 0.0;
    double h = 0.0;

    std::size_t n() const;
};

struct ExperimentConfig {
    std::string model = "cmodel";
    Vector theta0;
    LevyDriver driver = LevyDriver::nig(1.0);
    std::vector<GridPoint> grid;
    std::vector<double> us = {1.0, 3.0, 5.0};
    int replications = 200;
    std::uint64_t base_seed = 1;
    int fine_factor = 10;
    double ci_level = 0.95;
    unsigned workers = 1;
    double x0 = 0.0;

    /// Throws ConfigError on an inconsistent setting.
    void validate() const;
};

struct ReplicationRecord {
    std::size_t rep_index = 0;
    std::uint64_t seed = 0;
    GridPoint point;
    bool converged = false;
    Vector theta_hat;
    Vector kappa_hat;
    /// Sigma^{-1/2} Gamma (u_hat, v_hat) at the true values.
    Vector studentized;
    /// Whether each Wald interval contains the true value, in joint order.
    std::vector<bool> covered;
    std::string failure;
};

struct SummaryRow {
    GridPoint point;
    std::size_t n = 0;
    std::size_t replications = 0;
    std::size_t failures = 0;
    std::vector<double> mean;
    std::vector<double> sd;
};

struct FailureNote {
    GridPoint point;
    std::size_t rep_index = 0;
    std::string reason;
};

/// Columns are alpha, gamma, then one per u.
struct SummaryTable {
    std::vector<std::string> columns;
    std::vector<SummaryRow> rows;
    std::vector<FailureNote> failures;
};

struct StudyResult {
    SummaryTable table;
    std::vector<ReplicationRecord> records;
};

/// True nu_0(phi) for the configured driver, one entry per u.
Vector true_functionals(const ExperimentConfig& config);

/// One simulate -> fit -> infer unit with seed base_seed + rep_index. Never
/// throws for estimation problems; they end up in the failure field.
ReplicationRecord run_replication(const ExperimentConfig& config, const GridPoint& point,
                                  std::size_t rep_index);

/// Mean and sample standard deviation over converged records, which must all
/// share one grid point.
SummaryRow summarize(const std::vector<ReplicationRecord>& records, const GridPoint& point);

std::vector<std::string> table_columns(const ExperimentConfig& config);

/// Runs every grid point; throws StudyFailedError when more than 20% of any
/// row's replications fail.
StudyResult run_study(const ExperimentConfig& config);

enum class TableFormat { csv, markdown, json };

std::string emit_table(const SummaryTable& table, TableFormat format);
std::string emit_records_csv(const std::vector<ReplicationRecord>& records,
                             const std::vector<std::string>& columns);

/// Human-readable study plan used by --dry-run.
std::string describe_plan(const ExperimentConfig& config);

} // namespace levysde
