// levysde command-line front end: simulate, estimate, residuals, infer, study.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levysde/avar.hpp"
#include "levysde/config.hpp"
#include "levysde/errors.hpp"
#include "levysde/gqmle.hpp"
#include "levysde/montecarlo.hpp"
#include "levysde/parallel.hpp"
#include "levysde/report.hpp"
#include "levysde/residual.hpp"
#include "levysde/simulate.hpp"

namespace {

using namespace levysde;

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

/// Usage problems detected after parsing (bad flag combinations).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Vector to_vector(const std::vector<double>& xs)
{
    return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << text;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

MomentFunction make_phi(const std::string& kind, const std::vector<double>& us)
{
    if (kind == "cos") return builtin_phi_cos(us);
    if (kind == "z2") return test_phi_power(2);
    if (kind == "z3") return test_phi_power(3);
    throw UsageError("unknown --phi '" + kind + "'");
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::string model = "cmodel";
    std::vector<double> alpha;
    std::vector<double> gamma;
    std::string driver = "nig";
    double delta = 1.0;
    double rate = 1.0;
    double T = 0.0;
    double h = 0.0;
    int fine_factor = 10;
    double x0 = 0.0;
    std::uint64_t seed = 0;
    std::string output;
    bool binary = false;
};

void add_simulate(CLI::App& app, SimulateArgs& a)
{
    auto* sub = app.add_subcommand("simulate", "Simulate an observation series by fine-grid Euler");
    sub->add_option("--model", a.model, "Coefficient model (cmodel, ou-const-scale)")->capture_default_str();
    sub->add_option("--alpha", a.alpha, "Drift parameter(s), comma separated")->required()->delimiter(',');
    sub->add_option("--gamma", a.gamma, "Scale parameter(s), comma separated")->required()->delimiter(',');
    sub->add_option("--driver", a.driver, "Levy driver")
        ->check(CLI::IsMember({"nig", "cpn"}))
        ->capture_default_str();
    sub->add_option("--delta", a.delta, "NIG shape delta")->capture_default_str();
    sub->add_option("--rate", a.rate, "Compound Poisson jump rate")->capture_default_str();
    sub->add_option("--T", a.T, "Observation horizon")->required();
    sub->add_option("--h", a.h, "Observation step")->required();
    sub->add_option("--fine-factor", a.fine_factor, "Euler steps per observation step")->capture_default_str();
    sub->add_option("--x0", a.x0, "Initial state")->capture_default_str();
    sub->add_option("--seed", a.seed, "Random seed")->required();
    sub->add_option("-o,--output", a.output, "Output series path")->required();
    sub->add_flag("--binary", a.binary, "Write the LSDE1 binary format instead of CSV");
}

int run_simulate(const SimulateArgs& a)
{
    if (!(a.T > 0.0) || !(a.h > 0.0)) throw UsageError("--T and --h must be positive");
    const double steps = a.T / a.h;
    const auto n = static_cast<std::size_t>(std::llround(steps));
    if (n < 1 || std::abs(static_cast<double>(n) * a.h - a.T) >= 1e-9) {
        throw UsageError("--T must be an integer multiple of --h");
    }
    SimulationPlan plan;
    plan.model = model_by_name(a.model);
    plan.theta0 = plan.model.join(to_vector(a.alpha), to_vector(a.gamma));
    plan.driver = a.driver == "nig" ? LevyDriver::nig(a.delta) : LevyDriver::compound_poisson_normal(a.rate);
    plan.n = n;
    plan.h = a.h;
    plan.fine_factor = a.fine_factor;
    plan.x0 = a.x0;
    plan.seed = a.seed;
    save_series(a.output, simulate_path(plan), a.binary);
    return 0;
}

// estimate ------------------------------------------------------------------

struct EstimateArgs {
    std::string model = "cmodel";
    std::string input;
    double tol = 1e-10;
    int multistart = 8;
    std::string output;
};

void add_estimate(CLI::App& app, EstimateArgs& a)
{
    auto* sub = app.add_subcommand("estimate", "Fit the Gaussian quasi-likelihood estimator");
    sub->add_option("--model", a.model, "Coefficient model")->capture_default_str();
    sub->add_option("--input", a.input, "Series file (CSV or LSDE1)")->required();
    sub->add_option("--tol", a.tol, "Root tolerance")->capture_default_str();
    sub->add_option("--multistart", a.multistart, "Multistart count")->capture_default_str();
    sub->add_option("-o,--output", a.output, "Fit JSON path (stdout if omitted)");
}

GqmleOptions gqmle_options(double tol, int multistart)
{
    if (!(tol > 0.0)) throw UsageError("--tol must be positive");
    if (multistart < 1) throw UsageError("--multistart must be at least 1");
    GqmleOptions o;
    o.tol = tol;
    o.multistart = multistart;
    return o;
}

int run_estimate(const EstimateArgs& a)
{
    const auto opts = gqmle_options(a.tol, a.multistart);
    const auto model = model_by_name(a.model);
    const auto obs = load_series(a.input);
    const auto fit = fit_gqmle(model, obs, opts);
    write_text(a.output, fit_to_json(fit));
    if (!fit.converged) std::cerr << "warning: the fit did not converge to an interior root\n";
    return 0;
}

// residuals -----------------------------------------------------------------

struct ResidualsArgs {
    std::string model = "cmodel";
    std::string theta_from;
    std::string input;
    std::string phi = "cos";
    std::vector<double> us = {1.0, 3.0, 5.0};
    std::string output;
    std::string json;
};

void add_residuals(CLI::App& app, ResidualsArgs& a)
{
    auto* sub = app.add_subcommand("residuals", "Euler residuals and cumulant estimates at a fitted theta");
    sub->add_option("--model", a.model, "Coefficient model")->capture_default_str();
    sub->add_option("--theta-from", a.theta_from, "Fit JSON written by 'estimate'")->required();
    sub->add_option("--input", a.input, "Series file (CSV or LSDE1)")->required();
    sub->add_option("--phi", a.phi, "Moment function (cos; z2, z3 are test-only)")->capture_default_str();
    sub->add_option("--u", a.us, "Frequencies for cos, comma separated")->delimiter(',')->capture_default_str();
    sub->add_option("-o,--output", a.output, "Residual CSV path")->required();
    sub->add_option("--json", a.json, "Summary JSON path (stdout if omitted)");
}

int run_residuals(const ResidualsArgs& a)
{
    const auto phi = make_phi(a.phi, a.us);
    const auto model = model_by_name(a.model);
    const auto obs = load_series(a.input);
    const Vector theta = theta_from_fit_json(read_text(a.theta_from));
    const auto res = euler_residuals(model, obs, theta);
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + a.output + "'");
    write_residuals_csv(out, res);
    const Vector kappa = moment_estimate(res, phi);
    const Vector zeta = zeta_estimate(res, phi);
    const Matrix b = bias_matrix(res, model, obs, theta, phi);
    write_text(a.json, residual_summary_json(kappa, zeta, b));
    return 0;
}

// infer ---------------------------------------------------------------------

struct InferArgs {
    std::string model = "cmodel";
    std::string input;
    std::string phi = "cos";
    std::vector<double> us = {1.0, 3.0, 5.0};
    double level = 0.95;
    double tol = 1e-10;
    int multistart = 8;
    std::string output;
};

void add_infer(CLI::App& app, InferArgs& a)
{
    auto* sub = app.add_subcommand("infer", "Joint estimate, covariance and Wald intervals");
    sub->add_option("--model", a.model, "Coefficient model")->capture_default_str();
    sub->add_option("--input", a.input, "Series file (CSV or LSDE1)")->required();
    sub->add_option("--phi", a.phi, "Moment function")->capture_default_str();
    sub->add_option("--u", a.us, "Frequencies for cos, comma separated")->delimiter(',')->capture_default_str();
    sub->add_option("--level", a.level, "Confidence level")->capture_default_str();
    sub->add_option("--tol", a.tol, "Root tolerance")->capture_default_str();
    sub->add_option("--multistart", a.multistart, "Multistart count")->capture_default_str();
    sub->add_option("-o,--output", a.output, "Report JSON path (stdout if omitted)");
}

int run_infer(const InferArgs& a)
{
    if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
    InferenceOptions opts;
    opts.gqmle = gqmle_options(a.tol, a.multistart);
    opts.level = a.level;
    const auto phi = make_phi(a.phi, a.us);
    const auto model = model_by_name(a.model);
    const auto obs = load_series(a.input);
    const auto fit = infer(model, obs, phi, opts);
    if (!fit.gqmle.converged) {
        std::cerr << "error: estimation failed: "
                  << (fit.gqmle.on_boundary ? "fit on the domain boundary" : "no interior root found")
                  << " (|G| = " << fit.gqmle.objective << ")\n";
        return kRuntimeFailure;
    }
    write_text(a.output, joint_fit_to_json(fit));
    return 0;
}

// study ---------------------------------------------------------------------

struct StudyArgs {
    std::string config;
    std::string out_dir;
    bool dry_run = false;
    std::optional<unsigned> workers;
};

void add_study(CLI::App& app, StudyArgs& a)
{
    auto* sub = app.add_subcommand("study", "Run a replicated simulation study from a config file");
    sub->add_option("--config", a.config, "Study config (TOML subset)")->required();
    sub->add_option("--out-dir", a.out_dir, "Directory for table.{csv,md,json} and records.csv");
    sub->add_flag("--dry-run", a.dry_run, "Validate the config and print the plan only");
    sub->add_option("--workers", a.workers, "Override the worker count (0 = hardware threads)");
}

int run_study_cmd(const StudyArgs& a)
{
    auto cfg = load_experiment_config(a.config);
    if (a.workers) cfg.workers = *a.workers == 0 ? default_workers() : *a.workers;
    if (a.dry_run) {
        std::cout << describe_plan(cfg);
        return 0;
    }
    if (a.out_dir.empty()) throw UsageError("--out-dir is required unless --dry-run is given");
    cfg.validate();
    const auto result = run_study(cfg);
    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    write_text((dir / "table.csv").string(), emit_table(result.table, TableFormat::csv));
    write_text((dir / "table.md").string(), emit_table(result.table, TableFormat::markdown));
    write_text((dir / "table.json").string(), emit_table(result.table, TableFormat::json));
    write_text((dir / "records.csv").string(), emit_records_csv(result.records, result.table.columns));
    std::cout << emit_table(result.table, TableFormat::markdown);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Estimation and simulation for Levy-driven SDEs", "levysde"};
    // "--h" is the observation step, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.set_version_flag("--version", "levysde 0.1.0");

    SimulateArgs sim;
    EstimateArgs est;
    ResidualsArgs resid;
    InferArgs inf;
    StudyArgs study;
    add_simulate(app, sim);
    add_estimate(app, est);
    add_residuals(app, resid);
    add_infer(app, inf);
    add_study(app, study);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (app.got_subcommand("simulate")) return run_simulate(sim);
        if (app.got_subcommand("estimate")) return run_estimate(est);
        if (app.got_subcommand("residuals")) return run_residuals(resid);
        if (app.got_subcommand("infer")) return run_infer(inf);
        if (app.got_subcommand("study")) return run_study_cmd(study);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return kUsageError;
}
