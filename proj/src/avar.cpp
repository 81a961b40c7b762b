#include "levysde/avar.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "levysde/errors.hpp"
#include "summation.hpp"

namespace levysde {

Matrix SigmaHat::full() const
{
    const auto q = s11.rows();
    const auto p = s22.rows();
    Matrix m(q + p, q + p);
    m.topLeftCorner(q, q) = s11;
    m.topRightCorner(q, p) = s12;
    m.bottomLeftCorner(p, q) = s12.transpose();
    m.bottomRightCorner(p, p) = s22;
    return 0.5 * (m + m.transpose());
}

Vector JointFit::estimate() const
{
    Vector v(nu_hat.size() + theta_hat.size());
    v << nu_hat, theta_hat;
    return v;
}

SigmaHat sigma_hat(const CoefficientModel& model, const ObservationSeries& obs,
                   const Vector& theta_hat, const ResidualSet& res, const MomentFunction& phi)
{
    if (res.n() != obs.n()) throw DimensionError("residuals and observations disagree in length");
    const int q = phi.dim;
    const int pa = model.p_alpha;
    const int pg = model.p_gamma;
    const std::size_t n = obs.n();
    const double nh = static_cast<double>(n) * obs.h();

    // Residual-only averages.
    Matrix phi2 = Matrix::Zero(q, q);
    Vector phi_d = Vector::Zero(q);
    Vector phi_d2 = Vector::Zero(q);
    detail::CompensatedSum d3;
    detail::CompensatedSum d4;
    Vector buf(q);
    for (double d : res.residuals) {
        phi.value_into(d, std::span<double>(buf.data(), static_cast<std::size_t>(q)));
        phi2.noalias() += buf * buf.transpose();
        phi_d += buf * d;
        phi_d2 += buf * (d * d);
        d3.add(d * d * d);
        d4.add(d * d * d * d);
    }
    phi2 /= nh;
    phi_d /= nh;
    phi_d2 *= 2.0 / nh;
    const double m3 = d3.value() / nh;
    const double m4 = d4.value() / nh;

    // Path averages of coefficient derivatives.
    const Vector alpha = model.alpha(theta_hat);
    const Vector gamma = model.gamma(theta_hat);
    const auto x = obs.values();
    Vector a_over_c = Vector::Zero(pa);
    Vector c_over_c = Vector::Zero(pg);
    Matrix aa = Matrix::Zero(pa, pa);
    Matrix gg = Matrix::Zero(pg, pg);
    Matrix ag = Matrix::Zero(pa, pg);
    for (std::size_t j = 1; j <= n; ++j) {
        const double c = model.scale(x[j - 1], gamma);
        if (!(std::abs(c) >= kScaleFloor)) throw SingularScaleError("scale coefficient vanishes");
        const Vector da = model.drift_dalpha(x[j - 1], alpha);
        const Vector dc = model.scale_dgamma(x[j - 1], gamma);
        a_over_c += da / c;
        c_over_c += dc / c;
        const double c2 = c * c;
        aa += da * da.transpose() / c2;
        gg += dc * dc.transpose() / c2;
        ag += da * dc.transpose() / c2;
    }
    const double inv_n = 1.0 / static_cast<double>(n);

    SigmaHat out;
    out.s11 = 0.5 * (phi2 + phi2.transpose());
    out.s12.resize(q, pa + pg);
    out.s12.leftCols(pa) = phi_d * (inv_n * a_over_c).transpose();
    out.s12.rightCols(pg) = phi_d2 * (inv_n * c_over_c).transpose();
    out.s22.resize(pa + pg, pa + pg);
    out.s22.topLeftCorner(pa, pa) = inv_n * aa;
    out.s22.bottomRightCorner(pg, pg) = (4.0 * inv_n * m4) * gg;
    out.s22.topRightCorner(pa, pg) = (2.0 * inv_n * m3) * ag;
    out.s22.bottomLeftCorner(pg, pa) = out.s22.topRightCorner(pa, pg).transpose();
    if (!out.s11.allFinite() || !out.s12.allFinite() || !out.s22.allFinite()) {
        throw NonFiniteState("non-finite entries in the Sigma estimate");
    }
    return out;
}

GammaHat gamma_hat(const Matrix& jacobian_at_fit, const Matrix& b_hat)
{
    if (jacobian_at_fit.rows() != jacobian_at_fit.cols()) {
        throw DimensionError("Jacobian must be square");
    }
    const auto p = jacobian_at_fit.rows();
    const auto q = b_hat.rows();
    const auto pg = b_hat.cols();
    if (q < 1 || pg < 1 || pg > p) throw DimensionError("bias matrix shape incompatible with the Jacobian");
    GammaHat g;
    g.q = static_cast<int>(q);
    g.p = static_cast<int>(p);
    g.matrix = Matrix::Zero(q + p, q + p);
    g.matrix.topLeftCorner(q, q).setIdentity();
    g.matrix.block(0, q + (p - pg), q, pg) = -b_hat;
    g.matrix.bottomRightCorner(p, p) = -jacobian_at_fit;
    return g;
}

namespace {

double condition_number(const Matrix& m)
{
    const Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv.minCoeff();
    return smin > 0.0 ? sv.maxCoeff() / smin : std::numeric_limits<double>::infinity();
}

} // namespace

Matrix joint_covariance(const SigmaHat& sigma, const GammaHat& gamma)
{
    const Matrix s = sigma.full();
    if (s.rows() != gamma.matrix.rows()) throw DimensionError("Sigma and Gamma differ in size");
    const double cond = condition_number(gamma.matrix);
    if (!(cond <= 1e12)) {
        std::ostringstream os;
        os << "Gamma is ill-conditioned (condition number " << cond << ")";
        throw SingularGammaError(os.str());
    }
    const Matrix inv = gamma.matrix.fullPivLu().inverse();
    const Matrix cov = inv * s * inv.transpose();
    return 0.5 * (cov + cov.transpose());
}

Vector studentize(const Vector& u_hat, const Vector& v_hat, const SigmaHat& sigma,
                  const GammaHat& gamma)
{
    const Matrix s = sigma.full();
    if (u_hat.size() + v_hat.size() != s.rows() || s.rows() != gamma.matrix.rows()) {
        throw DimensionError("studentize: inconsistent dimensions");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    const Vector& lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    if (!(lambda.minCoeff() > 1e-14 * lmax)) {
        throw NotPositiveDefiniteError("Sigma estimate is not positive definite");
    }
    const Matrix inv_root =
        eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    Vector stacked(s.rows());
    stacked << u_hat, v_hat;
    return inv_root * (gamma.matrix * stacked);
}

double normal_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::vector<ConfidenceInterval> confidence_intervals(const JointFit& fit, double level)
{
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
    if (!(fit.nh > 0.0)) throw DomainError("confidence intervals need nh > 0");
    const Vector est = fit.estimate();
    if (fit.joint_cov.rows() != est.size()) throw DimensionError("covariance does not match estimate");
    const double z = normal_quantile(0.5 * (1.0 + level));
    std::vector<ConfidenceInterval> out;
    out.reserve(static_cast<std::size_t>(est.size()));
    for (Eigen::Index i = 0; i < est.size(); ++i) {
        const double half = z * std::sqrt(std::max(0.0, fit.joint_cov(i, i)) / fit.nh);
        ConfidenceInterval ci;
        ci.name = static_cast<std::size_t>(i) < fit.names.size() ? fit.names[static_cast<std::size_t>(i)] : "";
        ci.estimate = est[i];
        ci.lower = est[i] - half;
        ci.upper = est[i] + half;
        ci.level = level;
        out.push_back(ci);
    }
    return out;
}

DeltaMethodResult delta_method(const JointTransform& transform,
                               const JointTransformJacobian& jacobian, const JointFit& fit)
{
    const auto q = fit.nu_hat.size();
    const auto p = fit.theta_hat.size();
    const Vector mapped = transform(fit.nu_hat, fit.theta_hat);
    const Matrix jac = jacobian(fit.nu_hat, fit.theta_hat);
    if (mapped.size() != q + p || jac.rows() != q + p || jac.cols() != q + p) {
        throw DimensionError("transform output must have q + p coordinates");
    }
    if (!(condition_number(jac) <= 1e12)) {
        throw SingularJacobianError("transform Jacobian is not invertible at the estimate");
    }
    DeltaMethodResult out;
    out.xi_hat = mapped.head(q);
    out.theta_hat = mapped.tail(p);
    const Matrix cov = jac * fit.joint_cov * jac.transpose();
    out.cov = 0.5 * (cov + cov.transpose());
    return out;
}

JointFit infer(const CoefficientModel& model, const ObservationSeries& obs,
               const MomentFunction& phi, const InferenceOptions& options)
{
    if (!phi.admissible) {
        throw DomainError("moment function is a test-only oracle and not admissible for inference");
    }
    JointFit fit;
    fit.gqmle = fit_gqmle(model, obs, options.gqmle);
    fit.theta_hat = fit.gqmle.theta_hat;
    const ResidualSet res = euler_residuals(model, obs, fit.theta_hat);
    fit.nu_hat = moment_estimate(res, phi);
    fit.b_hat = bias_matrix(res, model, obs, fit.theta_hat, phi);
    fit.sigma_hat = sigma_hat(model, obs, fit.theta_hat, res, phi);
    fit.gamma_hat = gamma_hat(-fit.gqmle.neg_jacobian_at_fit, fit.b_hat);
    fit.joint_cov = joint_covariance(fit.sigma_hat, fit.gamma_hat);
    fit.n = obs.n();
    fit.h = obs.h();
    fit.nh = static_cast<double>(obs.n()) * obs.h();
    fit.names = phi.labels;
    for (int k = 0; k < model.p_alpha; ++k) {
        fit.names.push_back(model.p_alpha == 1 ? "alpha" : "alpha" + std::to_string(k + 1));
    }
    for (int k = 0; k < model.p_gamma; ++k) {
        fit.names.push_back(model.p_gamma == 1 ? "gamma" : "gamma" + std::to_string(k + 1));
    }
    fit.ci = confidence_intervals(fit, options.level);
    return fit;
}

Vector studentized_statistic(const JointFit& fit, const Vector& nu_true, const Vector& theta_true)
{
    const double root_nh = std::sqrt(fit.nh);
    const Vector u_hat = root_nh * (fit.nu_hat - nu_true);
    const Vector v_hat = root_nh * (fit.theta_hat - theta_true);
    return studentize(u_hat, v_hat, fit.sigma_hat, fit.gamma_hat);
}

} // namespace levysde
