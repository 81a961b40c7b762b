#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "levysde/avar.hpp"
#include "levysde/config.hpp"
#include "levysde/gqmle.hpp"
#include "levysde/levy.hpp"
#include "levysde/models.hpp"
#include "levysde/montecarlo.hpp"
#include "levysde/residual.hpp"
#include "levysde/simulate.hpp"

namespace py = pybind11;
using namespace levysde;

namespace {

ObservationSeries series_from(const std::vector<double>& values, double h)
{
    return ObservationSeries(h, values);
}

py::array_t<double> to_array(std::span<const double> v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

LevyDriver driver_from(const std::string& kind, double delta, double rate)
{
    if (kind == "nig") return LevyDriver::nig(delta);
    if (kind == "cpn") return LevyDriver::compound_poisson_normal(rate);
    throw py::value_error("driver must be 'nig' or 'cpn'");
}

py::dict fit_dict(const GqmleFit& fit)
{
    py::dict d;
    d["theta_hat"] = fit.theta_hat;
    d["objective"] = fit.objective;
    d["converged"] = fit.converged;
    d["iterations"] = fit.iterations;
    d["neg_jacobian"] = fit.neg_jacobian_at_fit;
    d["on_boundary"] = fit.on_boundary;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.attr("__version__") = "0.1.0";

    m.def("nig_cumulant", &nig_cumulant, py::arg("delta"), py::arg("u"));

    m.def(
        "simulate",
        [](const std::string& model, std::vector<double> alpha, std::vector<double> gamma, double T, double h,
           std::uint64_t seed, const std::string& driver, double delta, double rate, int fine_factor, double x0) {
            SimulationPlan plan;
            plan.model = model_by_name(model);
            plan.theta0 = Vector(static_cast<Eigen::Index>(alpha.size() + gamma.size()));
            for (std::size_t i = 0; i < alpha.size(); ++i) plan.theta0[static_cast<Eigen::Index>(i)] = alpha[i];
            for (std::size_t i = 0; i < gamma.size(); ++i) {
                plan.theta0[static_cast<Eigen::Index>(alpha.size() + i)] = gamma[i];
            }
            plan.driver = driver_from(driver, delta, rate);
            plan.h = h;
            plan.n = static_cast<std::size_t>(std::llround(T / h));
            plan.fine_factor = fine_factor;
            plan.x0 = x0;
            plan.seed = seed;
            std::optional<ObservationSeries> path;
            {
                py::gil_scoped_release release;
                path = simulate_path(plan);
            }
            return to_array(path->values());
        },
        py::arg("model"), py::arg("alpha"), py::arg("gamma"), py::arg("T"), py::arg("h"), py::arg("seed"),
        py::arg("driver") = "nig", py::arg("delta") = 1.0, py::arg("rate") = 10.0, py::arg("fine_factor") = 10,
        py::arg("x0") = 0.0, "Observed path X_0, ..., X_n on the grid t_j = j h.");

    m.def(
        "estimate",
        [](const std::vector<double>& values, double h, const std::string& model, double tol, int multistart) {
            GqmleOptions opts;
            opts.tol = tol;
            opts.multistart = multistart;
            const auto obs = series_from(values, h);
            const auto coef = model_by_name(model);
            GqmleFit fit;
            {
                py::gil_scoped_release release;
                fit = fit_gqmle(coef, obs, opts);
            }
            return fit_dict(fit);
        },
        py::arg("values"), py::arg("h"), py::arg("model") = "cmodel", py::arg("tol") = 1e-10,
        py::arg("multistart") = 8);

    m.def(
        "residuals",
        [](const std::vector<double>& values, double h, const Vector& theta, const std::string& model) {
            const auto res = euler_residuals(model_by_name(model), series_from(values, h), theta);
            return to_array(res.residuals);
        },
        py::arg("values"), py::arg("h"), py::arg("theta"), py::arg("model") = "cmodel");

    m.def(
        "infer",
        [](const std::vector<double>& values, double h, const std::string& model, std::vector<double> u,
           double level) {
            InferenceOptions opts;
            opts.level = level;
            const auto obs = series_from(values, h);
            const auto coef = model_by_name(model);
            const auto phi = builtin_phi_cos(std::move(u));
            std::optional<JointFit> fit;
            {
                py::gil_scoped_release release;
                fit = infer(coef, obs, phi, opts);
            }
            py::dict d;
            d["fit"] = fit_dict(fit->gqmle);
            d["theta_hat"] = fit->theta_hat;
            d["nu_hat"] = fit->nu_hat;
            d["b_hat"] = fit->b_hat;
            d["sigma_hat"] = fit->sigma_hat.full();
            d["gamma_hat"] = fit->gamma_hat.matrix;
            d["joint_cov"] = fit->joint_cov;
            d["names"] = fit->names;
            py::list ci;
            for (const auto& c : fit->ci) {
                py::dict e;
                e["name"] = c.name;
                e["estimate"] = c.estimate;
                e["lower"] = c.lower;
                e["upper"] = c.upper;
                e["level"] = c.level;
                ci.append(e);
            }
            d["ci"] = ci;
            d["nh"] = fit->nh;
            return d;
        },
        py::arg("values"), py::arg("h"), py::arg("model") = "cmodel",
        py::arg("u") = std::vector<double>{1.0, 3.0, 5.0}, py::arg("level") = 0.95);

    m.def(
        "run_study",
        [](const std::string& config_text, std::optional<unsigned> workers) {
            auto cfg = parse_experiment_config(config_text);
            if (workers) cfg.workers = *workers;
            cfg.validate();
            std::optional<StudyResult> study;
            {
                py::gil_scoped_release release;
                study = run_study(cfg);
            }
            py::dict d;
            d["csv"] = emit_table(study->table, TableFormat::csv);
            d["md"] = emit_table(study->table, TableFormat::markdown);
            d["json"] = emit_table(study->table, TableFormat::json);
            d["records_csv"] = emit_records_csv(study->records, study->table.columns);
            return d;
        },
        py::arg("config_text"), py::arg("workers") = py::none(),
        "Runs a Monte Carlo study from config text; returns the emitted tables.");
}
