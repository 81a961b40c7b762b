#include "levysde/report.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "levysde/errors.hpp"

namespace levysde {

namespace {

using json = nlohmann::ordered_json;

json to_json(const Vector& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::string fit_to_json(const GqmleFit& fit)
{
    json j;
    j["theta_hat"] = to_json(fit.theta_hat);
    j["objective"] = fit.objective;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["neg_jacobian"] = to_json(fit.neg_jacobian_at_fit);
    return j.dump(2) + "\n";
}

Vector theta_from_fit_json(const std::string& text)
{
    try {
        const auto j = json::parse(text);
        const auto values = j.at("theta_hat").get<std::vector<double>>();
        if (values.empty()) throw FormatError("theta_hat is empty");
        return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    } catch (const json::exception& e) {
        throw FormatError(std::string("cannot read theta_hat from fit JSON: ") + e.what());
    }
}

std::string residual_summary_json(const Vector& kappa_hat, const Vector& zeta_hat,
                                  const Matrix& b_hat)
{
    json j;
    j["kappa_hat"] = to_json(kappa_hat);
    j["zeta_hat"] = to_json(zeta_hat);
    j["b_hat"] = to_json(b_hat);
    return j.dump(2) + "\n";
}

std::string joint_fit_to_json(const JointFit& fit)
{
    json j;
    j["theta_hat"] = to_json(fit.theta_hat);
    j["nu_hat"] = to_json(fit.nu_hat);
    j["sigma_hat"] = {{"s11", to_json(fit.sigma_hat.s11)},
                      {"s12", to_json(fit.sigma_hat.s12)},
                      {"s22", to_json(fit.sigma_hat.s22)}};
    j["gamma_hat"] = to_json(fit.gamma_hat.matrix);
    j["joint_cov"] = to_json(fit.joint_cov);
    j["ci"] = json::array();
    for (const auto& ci : fit.ci) {
        j["ci"].push_back({{"name", ci.name}, {"lower", ci.lower}, {"upper", ci.upper}, {"level", ci.level}});
    }
    j["nh"] = fit.nh;
    j["n"] = fit.n;
    j["h"] = fit.h;
    return j.dump(2) + "\n";
}

void write_residuals_csv(std::ostream& out, const ResidualSet& res)
{
    out << "j,delta\n";
    char buf[48];
    for (std::size_t j = 0; j < res.residuals.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", j + 1, res.residuals[j]);
        out << buf;
    }
}

} // namespace levysde
