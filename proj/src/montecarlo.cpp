#include "levysde/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "levysde/errors.hpp"
#include "levysde/parallel.hpp"

namespace levysde {

std::size_t GridPoint::n() const
{
    return static_cast<std::size_t>(std::llround(T / h));
}

void ExperimentConfig::validate() const
{
    CoefficientModel m;
    try {
        m = model_by_name(model);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (theta0.size() != m.p()) throw ConfigError("theta0 must have one entry per parameter");
    if (!m.domain().contains(theta0)) throw ConfigError("theta0 lies outside the parameter domain");
    if (grid.empty()) throw ConfigError("grid must list at least one [T, h] pair");
    for (const auto& g : grid) {
        if (!(g.T > 0.0) || !(g.h > 0.0)) throw ConfigError("grid entries need T > 0 and h > 0");
        const auto n = g.n();
        if (n < 1 || std::abs(static_cast<double>(n) * g.h - g.T) >= 1e-9) {
            throw ConfigError("grid T must be an integer multiple of h");
        }
    }
    if (us.empty()) throw ConfigError("u must list at least one frequency");
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (fine_factor < 1) throw ConfigError("fine_factor must be at least 1");
    if (!(ci_level > 0.0 && ci_level < 1.0)) throw ConfigError("ci_level must lie in (0, 1)");
}

Vector true_functionals(const ExperimentConfig& config)
{
    Vector out(static_cast<Eigen::Index>(config.us.size()));
    for (std::size_t k = 0; k < config.us.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = config.driver.cumulant(config.us[k]);
    }
    return out;
}

ReplicationRecord run_replication(const ExperimentConfig& config, const GridPoint& point,
                                  std::size_t rep_index)
{
    ReplicationRecord rec;
    rec.rep_index = rep_index;
    rec.seed = config.base_seed + rep_index;
    rec.point = point;
    try {
        SimulationPlan plan;
        plan.model = model_by_name(config.model);
        plan.theta0 = config.theta0;
        plan.driver = config.driver;
        plan.n = point.n();
        plan.h = point.h;
        plan.fine_factor = config.fine_factor;
        plan.x0 = config.x0;
        plan.seed = rec.seed;
        const ObservationSeries obs = simulate_path(plan);

        InferenceOptions opts;
        opts.level = config.ci_level;
        const auto phi = builtin_phi_cos(config.us);
        const JointFit fit = infer(plan.model, obs, phi, opts);
        rec.theta_hat = fit.theta_hat;
        rec.kappa_hat = fit.nu_hat;
        rec.converged = fit.gqmle.converged;
        if (!rec.converged) {
            rec.failure = fit.gqmle.on_boundary ? "fit on the domain boundary" : "fit did not converge";
            return rec;
        }
        Vector truth(fit.nu_hat.size() + fit.theta_hat.size());
        truth << true_functionals(config), config.theta0;
        for (std::size_t i = 0; i < fit.ci.size(); ++i) {
            const double t = truth[static_cast<Eigen::Index>(i)];
            rec.covered.push_back(fit.ci[i].lower <= t && t <= fit.ci[i].upper);
        }
        rec.studentized = studentized_statistic(fit, true_functionals(config), config.theta0);
    } catch (const std::exception& e) {
        rec.converged = false;
        rec.failure = e.what();
    }
    return rec;
}

std::vector<std::string> table_columns(const ExperimentConfig& config)
{
    const auto model = model_by_name(config.model);
    std::vector<std::string> cols;
    for (int k = 0; k < model.p_alpha; ++k) {
        cols.push_back(model.p_alpha == 1 ? "alpha" : "alpha" + std::to_string(k + 1));
    }
    for (int k = 0; k < model.p_gamma; ++k) {
        cols.push_back(model.p_gamma == 1 ? "gamma" : "gamma" + std::to_string(k + 1));
    }
    for (const auto& label : builtin_phi_cos(config.us).labels) cols.push_back(label);
    return cols;
}

namespace {

std::vector<double> record_values(const ReplicationRecord& rec)
{
    std::vector<double> v(rec.theta_hat.data(), rec.theta_hat.data() + rec.theta_hat.size());
    v.insert(v.end(), rec.kappa_hat.data(), rec.kappa_hat.data() + rec.kappa_hat.size());
    return v;
}

} // namespace

SummaryRow summarize(const std::vector<ReplicationRecord>& records, const GridPoint& point)
{
    SummaryRow row;
    row.point = point;
    row.n = point.n();
    row.replications = records.size();
    std::vector<std::vector<double>> ok;
    for (const auto& rec : records) {
        if (rec.converged) {
            ok.push_back(record_values(rec));
        } else {
            ++row.failures;
        }
    }
    if (ok.empty()) return row;
    const std::size_t cols = ok.front().size();
    row.mean.assign(cols, 0.0);
    row.sd.assign(cols, 0.0);
    const double count = static_cast<double>(ok.size());
    for (std::size_t c = 0; c < cols; ++c) {
        // Two passes on values shifted by the first one, so identical inputs
        // give an sd of exactly zero.
        const double shift = ok.front()[c];
        double sum = 0.0;
        for (const auto& v : ok) sum += v[c] - shift;
        const double mean_shifted = sum / count;
        double ss = 0.0;
        for (const auto& v : ok) {
            const double d = (v[c] - shift) - mean_shifted;
            ss += d * d;
        }
        row.mean[c] = shift + mean_shifted;
        row.sd[c] = ok.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    }
    return row;
}

StudyResult run_study(const ExperimentConfig& config)
{
    config.validate();
    StudyResult result;
    result.table.columns = table_columns(config);
    const auto reps = static_cast<std::size_t>(config.replications);
    for (const auto& point : config.grid) {
        std::vector<ReplicationRecord> records(reps);
        parallel_for(reps, std::max(1u, config.workers),
                     [&](std::size_t i) { records[i] = run_replication(config, point, i); });
        std::sort(records.begin(), records.end(),
                  [](const auto& a, const auto& b) { return a.rep_index < b.rep_index; });
        SummaryRow row = summarize(records, point);
        for (const auto& rec : records) {
            if (!rec.converged) result.table.failures.push_back({point, rec.rep_index, rec.failure});
        }
        if (static_cast<double>(row.failures) > 0.2 * static_cast<double>(reps)) {
            std::ostringstream os;
            os << row.failures << " of " << reps << " replications failed at (T=" << point.T
               << ", h=" << point.h << ")";
            throw StudyFailedError(os.str());
        }
        result.table.rows.push_back(std::move(row));
        result.records.insert(result.records.end(), std::make_move_iterator(records.begin()),
                              std::make_move_iterator(records.end()));
    }
    return result;
}

namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt4(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_short(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

std::string emit_table(const SummaryTable& table, TableFormat format)
{
    std::ostringstream os;
    switch (format) {
    case TableFormat::csv: {
        os << "T,h,n,replications,failures";
        for (const auto& c : table.columns) os << ',' << c << "_mean," << c << "_sd";
        os << '\n';
        for (const auto& row : table.rows) {
            os << fmt17(row.point.T) << ',' << fmt17(row.point.h) << ',' << row.n << ','
               << row.replications << ',' << row.failures;
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                const bool have = c < row.mean.size();
                os << ',' << (have ? fmt17(row.mean[c]) : "nan") << ','
                   << (have ? fmt17(row.sd[c]) : "nan");
            }
            os << '\n';
        }
        break;
    }
    case TableFormat::markdown: {
        os << "| T | h |";
        for (const auto& c : table.columns) os << ' ' << c << " |";
        os << "\n|---|---|";
        for (std::size_t c = 0; c < table.columns.size(); ++c) os << "---|";
        os << '\n';
        for (const auto& row : table.rows) {
            os << "| " << fmt_short(row.point.T) << " | " << fmt_short(row.point.h) << " |";
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                os << ' ' << (c < row.mean.size() ? fmt4(row.mean[c]) : "n/a") << " |";
            }
            os << "\n|  |  |";
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                os << " (" << (c < row.sd.size() ? fmt4(row.sd[c]) : "n/a") << ") |";
            }
            os << '\n';
        }
        break;
    }
    case TableFormat::json: {
        nlohmann::ordered_json j;
        j["columns"] = table.columns;
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json r;
            r["T"] = row.point.T;
            r["h"] = row.point.h;
            r["n"] = row.n;
            r["replications"] = row.replications;
            r["failures"] = row.failures;
            r["mean"] = row.mean;
            r["sd"] = row.sd;
            j["rows"].push_back(r);
        }
        j["failures"] = nlohmann::ordered_json::array();
        for (const auto& f : table.failures) {
            j["failures"].push_back(
                {{"T", f.point.T}, {"h", f.point.h}, {"rep_index", f.rep_index}, {"reason", f.reason}});
        }
        os << j.dump(2) << '\n';
        break;
    }
    }
    return os.str();
}

std::string emit_records_csv(const std::vector<ReplicationRecord>& records,
                             const std::vector<std::string>& columns)
{
    std::ostringstream os;
    os << "T,h,rep_index,seed,converged";
    for (const auto& c : columns) os << ',' << c;
    os << ",failure\n";
    for (const auto& rec : records) {
        os << fmt17(rec.point.T) << ',' << fmt17(rec.point.h) << ',' << rec.rep_index << ','
           << rec.seed << ',' << (rec.converged ? 1 : 0);
        const auto values = record_values(rec);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            os << ',' << (c < values.size() ? fmt17(values[c]) : "");
        }
        std::string reason = rec.failure;
        std::replace(reason.begin(), reason.end(), ',', ';');
        std::replace(reason.begin(), reason.end(), '\n', ' ');
        os << ',' << reason << '\n';
    }
    return os.str();
}

std::string describe_plan(const ExperimentConfig& config)
{
    config.validate();
    std::ostringstream os;
    os << "model: " << config.model << "\n";
    os << "theta0: [";
    for (Eigen::Index i = 0; i < config.theta0.size(); ++i) {
        os << (i ? ", " : "") << config.theta0[i];
    }
    os << "]\n";
    os << "driver: " << config.driver.describe() << "\n";
    os << "u: [";
    for (std::size_t i = 0; i < config.us.size(); ++i) os << (i ? ", " : "") << config.us[i];
    os << "]\n";
    os << "replications: " << config.replications << ", base_seed: " << config.base_seed
       << ", fine_factor: " << config.fine_factor << ", ci_level: " << config.ci_level
       << ", workers: " << config.workers << "\n";
    for (const auto& g : config.grid) {
        os << "  (T=" << g.T << ", h=" << g.h << ") n=" << g.n() << " seeds " << config.base_seed
           << ".." << config.base_seed + static_cast<std::uint64_t>(config.replications) - 1 << "\n";
    }
    return os.str();
}

} // namespace levysde
