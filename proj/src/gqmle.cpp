#include "levysde/gqmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "levysde/errors.hpp"
#include "levysde/parallel.hpp"
#include "summation.hpp"

namespace levysde {

Vector EstimatingFunctionValue::stacked() const
{
    Vector out(g_alpha.size() + g_gamma.size());
    out << g_alpha, g_gamma;
    return out;
}

namespace {

double scale_or_throw(double c, std::size_t j)
{
    if (!(std::abs(c) >= kScaleFloor)) {
        std::ostringstream os;
        os << "scale coefficient vanishes at observation " << j;
        throw SingularScaleError(os.str());
    }
    return c;
}

void check_dimensions(const CoefficientModel& model, const Vector& theta)
{
    if (theta.size() != model.p()) {
        throw DimensionError("parameter vector length does not match the model");
    }
}

} // namespace

EstimatingFunctionValue estimating_function(const CoefficientModel& model,
                                            const ObservationSeries& obs, const Vector& theta)
{
    check_dimensions(model, theta);
    const Vector alpha = model.alpha(theta);
    const Vector gamma = model.gamma(theta);
    const auto pa = static_cast<std::size_t>(model.p_alpha);
    const auto pg = static_cast<std::size_t>(model.p_gamma);
    const double h = obs.h();
    const auto x = obs.values();
    const std::size_t n = obs.n();

    detail::CompensatedSums sums(pa + pg);
    std::vector<double> abs_sums(pa + pg, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        const double xp = x[j - 1];
        const double c = scale_or_throw(model.scale(xp, gamma), j);
        const double r = x[j] - x[j - 1] - h * model.drift(xp, alpha);
        const Vector da = model.drift_dalpha(xp, alpha);
        const Vector dc = model.scale_dgamma(xp, gamma);
        const double c2 = c * c;
        for (std::size_t k = 0; k < pa; ++k) {
            const double term = da[k] / c2 * r;
            sums.add(k, term);
            abs_sums[k] += std::abs(term);
        }
        // -d_gamma c^-2 = 2 c^-3 dc and d_gamma c^2 / c^2 = 2 dc / c
        for (std::size_t k = 0; k < pg; ++k) {
            const double t1 = 2.0 * dc[k] / (c2 * c) * r * r;
            const double t2 = -2.0 * h * dc[k] / c;
            sums.add(pa + k, t1);
            sums.add(pa + k, t2);
            abs_sums[pa + k] += std::abs(t1) + std::abs(t2);
        }
    }
    const double norm = 1.0 / (static_cast<double>(n) * h);
    EstimatingFunctionValue out;
    out.g_alpha.resize(model.p_alpha);
    out.g_gamma.resize(model.p_gamma);
    double scale2 = 0.0;
    for (std::size_t k = 0; k < pa; ++k) out.g_alpha[k] = norm * sums.value(k);
    for (std::size_t k = 0; k < pg; ++k) out.g_gamma[k] = norm * sums.value(pa + k);
    for (double s : abs_sums) scale2 += (norm * s) * (norm * s);
    out.scale = std::sqrt(scale2);
    for (Eigen::Index k = 0; k < out.g_alpha.size(); ++k) {
        if (!std::isfinite(out.g_alpha[k])) throw NonFiniteState("non-finite estimating function");
    }
    for (Eigen::Index k = 0; k < out.g_gamma.size(); ++k) {
        if (!std::isfinite(out.g_gamma[k])) throw NonFiniteState("non-finite estimating function");
    }
    return out;
}

Matrix estimating_function_jacobian(const CoefficientModel& model, const ObservationSeries& obs,
                                    const Vector& theta)
{
    check_dimensions(model, theta);
    const Vector alpha = model.alpha(theta);
    const Vector gamma = model.gamma(theta);
    const int pa = model.p_alpha;
    const int pg = model.p_gamma;
    const double h = obs.h();
    const auto x = obs.values();
    const std::size_t n = obs.n();

    Matrix aa = Matrix::Zero(pa, pa);
    Matrix ag = Matrix::Zero(pa, pg);
    Matrix ga = Matrix::Zero(pg, pa);
    Matrix gg = Matrix::Zero(pg, pg);
    for (std::size_t j = 1; j <= n; ++j) {
        const double xp = x[j - 1];
        const double c = scale_or_throw(model.scale(xp, gamma), j);
        const double r = x[j] - x[j - 1] - h * model.drift(xp, alpha);
        const Vector da = model.drift_dalpha(xp, alpha);
        const Matrix d2a = model.drift_d2alpha(xp, alpha);
        const Vector dc = model.scale_dgamma(xp, gamma);
        const Matrix d2c = model.scale_d2gamma(xp, gamma);
        const double c2 = c * c;
        const double c3 = c2 * c;
        const Vector d_inv_c2 = -2.0 / c3 * dc;
        const Matrix d2_inv_c2 = 6.0 / (c2 * c2) * dc * dc.transpose() - 2.0 / c3 * d2c;

        aa += d2a / c2 * r - h / c2 * da * da.transpose();
        ag += r * da * d_inv_c2.transpose();
        // Carries an extra factor h relative to the 1/(nh) normalization.
        ga += (2.0 * h * r) * d_inv_c2 * da.transpose();
        gg += -d2_inv_c2 * (r * r) + 2.0 * h / c2 * (dc * dc.transpose() - c * d2c);
    }
    const double norm = 1.0 / (static_cast<double>(n) * h);
    Matrix jac(pa + pg, pa + pg);
    jac.topLeftCorner(pa, pa) = norm * aa;
    jac.topRightCorner(pa, pg) = norm * ag;
    jac.bottomLeftCorner(pg, pa) = norm * ga;
    jac.bottomRightCorner(pg, pg) = norm * gg;
    return jac;
}

namespace {

struct Candidate {
    Vector theta;
    double objective = std::numeric_limits<double>::infinity();
    bool root = false;
    int iterations = 0;
};

bool better(const Candidate& a, const Candidate& b)
{
    if (a.objective != b.objective) return a.objective < b.objective;
    for (Eigen::Index i = 0; i < a.theta.size(); ++i) {
        if (a.theta[i] != b.theta[i]) return a.theta[i] < b.theta[i];
    }
    return false;
}

class Problem {
public:
    Problem(const CoefficientModel& model, const ObservationSeries& obs, const GqmleOptions& opt)
        : model_(model), obs_(obs), opt_(opt), box_(model.domain())
    {}

    const ParamDomain& box() const { return box_; }

    // |G|, or +inf where the estimating function cannot be evaluated.
    double objective(const Vector& theta, double* root_tol = nullptr) const
    {
        try {
            const auto g = estimating_function(model_, obs_, theta);
            if (root_tol) *root_tol = opt_.tol * (1.0 + g.scale);
            return g.norm();
        } catch (const SingularScaleError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const NonFiniteState&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    Candidate newton(Vector theta) const
    {
        Candidate cand;
        theta = box_.clamp(theta);
        double root_tol = 0.0;
        double f = objective(theta, &root_tol);
        int it = 0;
        for (; it < opt_.max_iterations; ++it) {
            if (f <= root_tol) {
                cand.root = true;
                break;
            }
            if (!std::isfinite(f)) break;
            const Vector g = estimating_function(model_, obs_, theta).stacked();
            const Matrix jac = estimating_function_jacobian(model_, obs_, theta);
            const Vector step = jac.completeOrthogonalDecomposition().solve(-g);
            if (!step.allFinite()) break;
            // Pinned against the box: the projected step goes nowhere.
            if ((box_.clamp(theta + step) - theta).norm() <= 1e-15 * (1.0 + theta.norm())) break;

            double lambda = 1.0;
            bool accepted = false;
            Vector trial;
            double f_trial = 0.0;
            double trial_tol = root_tol;
            while (lambda > 1e-10) {
                trial = box_.clamp(theta + lambda * step);
                f_trial = objective(trial, &trial_tol);
                if (f_trial * f_trial <= (1.0 - 1e-4 * lambda) * f * f) {
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted) break;
            const double moved = (trial - theta).norm();
            theta = trial;
            f = f_trial;
            root_tol = trial_tol;
            if (moved <= 1e-15 * (1.0 + theta.norm())) {
                ++it;
                cand.root = f <= root_tol;
                break;
            }
        }
        cand.theta = theta;
        cand.objective = f;
        cand.iterations = it;
        if (!cand.root) cand.root = f <= root_tol;
        return cand;
    }

    // Nelder-Mead on |G|^2 with points clamped into the box.
    Candidate simplex(const Vector& start) const
    {
        const Eigen::Index p = start.size();
        const Vector width = box_.upper - box_.lower;
        std::vector<Vector> pts(p + 1, box_.clamp(start));
        std::vector<double> vals(p + 1);
        for (Eigen::Index i = 0; i < p; ++i) {
            Vector v = pts[0];
            v[i] += (v[i] + 0.1 * width[i] <= box_.upper[i] ? 1.0 : -1.0) * 0.1 * width[i];
            pts[i + 1] = box_.clamp(v);
        }
        auto eval = [&](const Vector& v) {
            const double f = objective(box_.clamp(v));
            return f * f;
        };
        for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

        int it = 0;
        for (; it < opt_.max_iterations; ++it) {
            std::vector<std::size_t> order(pts.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second = order[order.size() - 2];
            if (std::abs(vals[worst] - vals[best]) <= 1e-14 * (1.0 + std::abs(vals[best]))) break;

            Vector centroid = Vector::Zero(p);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i != worst) centroid += pts[i];
            }
            centroid /= static_cast<double>(p);

            const Vector reflected = box_.clamp(centroid + (centroid - pts[worst]));
            const double fr = eval(reflected);
            if (fr < vals[best]) {
                const Vector expanded = box_.clamp(centroid + 2.0 * (centroid - pts[worst]));
                const double fe = eval(expanded);
                if (fe < fr) {
                    pts[worst] = expanded;
                    vals[worst] = fe;
                } else {
                    pts[worst] = reflected;
                    vals[worst] = fr;
                }
                continue;
            }
            if (fr < vals[second]) {
                pts[worst] = reflected;
                vals[worst] = fr;
                continue;
            }
            const Vector contracted = box_.clamp(centroid + 0.5 * (pts[worst] - centroid));
            const double fc = eval(contracted);
            if (fc < vals[worst]) {
                pts[worst] = contracted;
                vals[worst] = fc;
                continue;
            }
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i == best) continue;
                pts[i] = box_.clamp(pts[best] + 0.5 * (pts[i] - pts[best]));
                vals[i] = eval(pts[i]);
            }
        }
        const auto best_it = std::min_element(vals.begin(), vals.end());
        Candidate cand;
        cand.theta = pts[static_cast<std::size_t>(best_it - vals.begin())];
        cand.objective = std::sqrt(*best_it);
        cand.iterations = it;
        return cand;
    }

    std::vector<Vector> latin_hypercube(int count) const
    {
        std::mt19937_64 engine(opt_.multistart_seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const Eigen::Index p = box_.size();
        std::vector<Vector> pts(count, Vector(p));
        for (Eigen::Index d = 0; d < p; ++d) {
            std::vector<int> perm(count);
            for (int i = 0; i < count; ++i) perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), engine);
            for (int i = 0; i < count; ++i) {
                const double u = (perm[i] + unif(engine)) / count;
                const double lo = box_.lower[d];
                const double hi = box_.upper[d];
                // Positive coordinates (scales, rates) are stratified in log space.
                pts[i][d] = lo > 0.0 ? lo * std::pow(hi / lo, u) : lo + u * (hi - lo);
            }
        }
        return pts;
    }

private:
    const CoefficientModel& model_;
    const ObservationSeries& obs_;
    const GqmleOptions& opt_;
    ParamDomain box_;
};

} // namespace

GqmleFit fit_gqmle(const CoefficientModel& model, const ObservationSeries& obs,
                   const GqmleOptions& options)
{
    if (obs.n() < static_cast<std::size_t>(model.p())) {
        throw NoProgressError("too few increments to identify the parameters");
    }
    const Problem problem(model, obs, options);
    const Vector start = options.initial ? *options.initial : problem.box().midpoint();
    if (start.size() != model.p()) throw DimensionError("initial value has the wrong length");

    const auto interior_root = [&](const Candidate& c) {
        return c.root && !problem.box().on_boundary(c.theta);
    };
    // Interior roots beat everything else; ties break on objective, then theta.
    const auto preferred = [&](const Candidate& a, const Candidate& b) {
        const bool ra = interior_root(a);
        const bool rb = interior_root(b);
        if (ra != rb) return ra;
        return better(a, b);
    };

    Candidate best = problem.newton(start);
    int total_iterations = best.iterations;
    if (!interior_root(best) && options.multistart > 0) {
        const auto starts = problem.latin_hypercube(options.multistart);
        // Newton from every start first; the simplex pass only runs when no
        // start reaches an interior root.
        std::vector<Candidate> results(starts.size());
        parallel_for(starts.size(), options.workers,
                     [&](std::size_t i) { results[i] = problem.newton(starts[i]); });
        const bool any_root = std::any_of(results.begin(), results.end(), interior_root);
        if (!any_root) {
            parallel_for(starts.size(), options.workers, [&](std::size_t i) {
                const Candidate coarse = problem.simplex(starts[i]);
                Candidate polished = problem.newton(coarse.theta);
                polished.iterations += coarse.iterations + results[i].iterations;
                if (preferred(polished, results[i])) results[i] = std::move(polished);
            });
        }
        for (const auto& cand : results) {
            total_iterations += cand.iterations;
            if (preferred(cand, best)) best = cand;
        }
    }
    if (!std::isfinite(best.objective)) {
        throw NoProgressError("estimating function could not be evaluated anywhere in the domain");
    }

    GqmleFit fit;
    fit.theta_hat = best.theta;
    fit.objective = best.objective;
    fit.iterations = total_iterations;
    fit.on_boundary = problem.box().on_boundary(best.theta);
    fit.neg_jacobian_at_fit = -estimating_function_jacobian(model, obs, best.theta);
    const Eigen::JacobiSVD<Matrix> svd(fit.neg_jacobian_at_fit);
    const auto& sv = svd.singularValues();
    const bool well_posed = sv.minCoeff() > 1e-12 * sv.maxCoeff();
    fit.converged = best.root && !fit.on_boundary && well_posed;
    return fit;
}

} // namespace levysde
