#include "bidcurve/curvefit.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>

#include "bidcurve/errors.hpp"
#include "bidcurve/kernels.hpp"

namespace bidcurve::curvefit {

namespace {

struct Bounds {
    double lo, hi;
};

// Projection boxes keep every model evaluable at any admissible parameter
// vector, so the solver can never wander into overflow or a domain error.
constexpr Bounds kSigmoidBounds[3] = {{1e-6, 1e12}, {1e-6, 1e6}, {-50.0, 50.0}};
constexpr Bounds kPowerBounds[2] = {{1e-9, 1e15}, {1e-6, 1.0}};
constexpr Bounds kMmBounds[2] = {{1e-9, 1e15}, {1e-12, 1e6}};
constexpr Bounds kNegExpBounds[2] = {{1e-9, 1e15}, {1e-9, 1e6}};

void project(std::span<double> th, const Bounds* b) {
    for (std::size_t i = 0; i < th.size(); ++i) {
        th[i] = std::clamp(th[i], b[i].lo, b[i].hi);
    }
}

int param_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::Sigmoid: return 3;
        case ModelKind::Power:
        case ModelKind::MichaelisMenten:
        case ModelKind::NegExp: return 2;
        default: return 0;
    }
}

void check_params(ModelKind kind, std::span<const double> params) {
    const int want = param_count(kind);
    if (want == 0) throw InvalidParams("model kind has no parametric form");
    if (static_cast<int>(params.size()) != want) {
        throw InvalidParams("wrong parameter count for model");
    }
    for (double v : params) {
        if (!std::isfinite(v)) throw InvalidParams("non-finite model parameter");
    }
    if (kind == ModelKind::Sigmoid && (!(params[0] > 0.0) || !(params[1] > 0.0))) {
        throw InvalidParams("sigmoid scale and steepness must be positive");
    }
}

// Batch prediction for the parametric kinds. The sigmoid goes through the
// kernel layer; the two-parameter models are cheap scalar loops.
void eval_batch(ModelKind kind, std::span<const double> th,
                std::span<const double> xs, std::span<double> out) {
    switch (kind) {
        case ModelKind::Sigmoid:
            kernels::logistic_value(th[0], th[1], th[2], xs, out);
            return;
        case ModelKind::Power:
            for (std::size_t i = 0; i < xs.size(); ++i) out[i] = th[0] * std::pow(xs[i], th[1]);
            return;
        case ModelKind::MichaelisMenten:
            for (std::size_t i = 0; i < xs.size(); ++i) {
                out[i] = th[0] * xs[i] / (1.0 + th[1] * xs[i]);
            }
            return;
        case ModelKind::NegExp:
            for (std::size_t i = 0; i < xs.size(); ++i) {
                out[i] = th[0] * (1.0 - std::exp(-th[1] * xs[i]));
            }
            return;
        default:
            throw InvalidParams("model kind has no parametric form");
    }
}

// Row-major n x K Jacobian of a parametric model.
void jac_batch(ModelKind kind, std::span<const double> th,
               std::span<const double> xs, std::vector<double>& out) {
    const std::size_t n = xs.size();
    switch (kind) {
        case ModelKind::Sigmoid: {
            out.resize(n * 3);
            const double s = th[0], t = th[1], p = th[2];
            std::vector<double> value(n), slope(n);
            kernels::logistic_value(s, t, p, xs, value);
            kernels::logistic_slope(s, t, p, xs, slope);
            const double sig0 = kernels::sigmoid01(-p);
            const double dq_dp = s * sig0 * (1.0 - sig0);
            for (std::size_t i = 0; i < n; ++i) {
                out[3 * i + 0] = value[i] / s;
                out[3 * i + 1] = xs[i] * slope[i] / t;
                out[3 * i + 2] = dq_dp - slope[i] / t;
            }
            return;
        }
        case ModelKind::Power: {
            out.resize(n * 2);
            for (std::size_t i = 0; i < n; ++i) {
                const double xb = std::pow(xs[i], th[1]);
                out[2 * i + 0] = xb;
                out[2 * i + 1] = xs[i] > 0.0 ? th[0] * xb * std::log(xs[i]) : 0.0;
            }
            return;
        }
        case ModelKind::MichaelisMenten: {
            out.resize(n * 2);
            for (std::size_t i = 0; i < n; ++i) {
                const double d = 1.0 + th[1] * xs[i];
                out[2 * i + 0] = xs[i] / d;
                out[2 * i + 1] = -th[0] * xs[i] * xs[i] / (d * d);
            }
            return;
        }
        case ModelKind::NegExp: {
            out.resize(n * 2);
            for (std::size_t i = 0; i < n; ++i) {
                const double e = std::exp(-th[1] * xs[i]);
                out[2 * i + 0] = 1.0 - e;
                out[2 * i + 1] = th[0] * xs[i] * e;
            }
            return;
        }
        default:
            throw InvalidParams("model kind has no parametric form");
    }
}

// Solve A x = b for a K x K symmetric positive definite A (K <= 3) by
// Cholesky. Returns false when A is not numerically SPD.
bool spd_solve(int K, const double* A, const double* b, double* x) {
    double L[9] = {0};
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = A[i * K + j];
            for (int k = 0; k < j; ++k) sum -= L[i * K + k] * L[j * K + k];
            if (i == j) {
                if (!(sum > 0.0) || !std::isfinite(sum)) return false;
                L[i * K + i] = std::sqrt(sum);
            } else {
                L[i * K + j] = sum / L[j * K + j];
            }
        }
    }
    double y[3];
    for (int i = 0; i < K; ++i) {
        double sum = b[i];
        for (int k = 0; k < i; ++k) sum -= L[i * K + k] * y[k];
        y[i] = sum / L[i * K + i];
    }
    for (int i = K - 1; i >= 0; --i) {
        double sum = y[i];
        for (int k = i + 1; k < K; ++k) sum -= L[k * K + i] * x[k];
        x[i] = sum / L[i * K + i];
    }
    for (int i = 0; i < K; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

// Cost where the observed clicks first reach `frac` of their maximum,
// linearly interpolated, with a virtual origin point since every model here
// passes through (0, 0).
double crossing_cost(const std::vector<double>& xs, const std::vector<double>& ys,
                     double target) {
    double px = 0.0, py = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i] >= target) {
            if (ys[i] == py) return xs[i];
            const double frac = (target - py) / (ys[i] - py);
            return px + frac * (xs[i] - px);
        }
        px = xs[i];
        py = ys[i];
    }
    return xs.empty() ? 0.0 : xs.back();
}

void init_params(ModelKind kind, const std::vector<double>& xs,
                 const std::vector<double>& ys, std::span<double> th) {
    const double ymax = *std::max_element(ys.begin(), ys.end());
    switch (kind) {
        case ModelKind::Sigmoid: {
            const double x10 = crossing_cost(xs, ys, 0.10 * ymax);
            const double x90 = crossing_cost(xs, ys, 0.90 * ymax);
            const double xmid = crossing_cost(xs, ys, 0.50 * ymax);
            const double span = std::max(x90 - x10, 1e-3);
            th[0] = 1.05 * ymax;
            th[1] = 4.0 / span;
            th[2] = th[1] * xmid;
            return;
        }
        case ModelKind::Power: {
            // Least squares in log-log space over the usable points.
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int m = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (xs[i] > 0.0 && ys[i] > 0.0) {
                    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
                    sx += lx;
                    sy += ly;
                    sxx += lx * lx;
                    sxy += lx * ly;
                    ++m;
                }
            }
            const double var = m > 1 ? sxx - sx * sx / m : 0.0;
            if (m >= 2 && var > 0.0) {
                th[1] = (sxy - sx * sy / m) / var;
                th[0] = std::exp((sy - th[1] * sx) / m);
            } else {
                th[0] = ymax;
                th[1] = 0.5;
            }
            return;
        }
        case ModelKind::MichaelisMenten: {
            double slope = ymax;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (xs[i] > 0.0 && ys[i] > 0.0) {
                    slope = ys[i] / xs[i];
                    break;
                }
            }
            th[0] = slope;
            th[1] = slope / ymax;
            return;
        }
        case ModelKind::NegExp: {
            th[0] = 1.05 * ymax;
            th[1] = 1.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (xs[i] > 0.0 && ys[i] > 0.0) {
                    th[1] = -std::log(1.0 - ys[i] / th[0]) / xs[i];
                    break;
                }
            }
            return;
        }
        default:
            break;
    }
}

const Bounds* bounds_for(ModelKind kind) {
    switch (kind) {
        case ModelKind::Sigmoid: return kSigmoidBounds;
        case ModelKind::Power: return kPowerBounds;
        case ModelKind::MichaelisMenten: return kMmBounds;
        case ModelKind::NegExp: return kNegExpBounds;
        default: return nullptr;
    }
}

FitResult run_gauss_newton(ModelKind kind, const std::vector<double>& xs,
                           const std::vector<double>& ys, const FitConfig& cfg) {
    const int K = param_count(kind);
    const std::size_t n = xs.size();
    const Bounds* box = bounds_for(kind);

    std::vector<double> theta(K);
    init_params(kind, xs, ys, theta);
    project(theta, box);

    std::vector<double> pred(n), cand_pred(n), J;
    eval_batch(kind, theta, xs, pred);
    double sse = kernels::sum_squared_error(pred, ys);

    FitResult out;
    out.kind = kind;
    out.n_points = static_cast<int>(n);
    if (!std::isfinite(sse)) {
        // Bail out with the start point; the caller sees converged=false.
        out.params.assign(theta.begin(), theta.end());
        out.sse = sse;
        return out;
    }

    double lambda = cfg.damping0;
    std::vector<double> best = theta;
    double best_sse = sse;
    int iterations = 0;
    bool converged = false;

    while (iterations < cfg.max_iterations) {
        ++iterations;
        jac_batch(kind, theta, xs, J);

        // Normal equations (J^T J + lambda I) delta = J^T (y - pred).
        double JtJ[9] = {0}, Jtr[3] = {0}, delta[3] = {0};
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - pred[i];
            for (int a = 0; a < K; ++a) {
                Jtr[a] += J[i * K + a] * r;
                for (int b = 0; b <= a; ++b) JtJ[a * K + b] += J[i * K + a] * J[i * K + b];
            }
        }
        for (int a = 0; a < K; ++a) {
            for (int b = a + 1; b < K; ++b) JtJ[a * K + b] = JtJ[b * K + a];
            JtJ[a * K + a] += lambda;
        }

        if (!spd_solve(K, JtJ, Jtr, delta)) {
            lambda = std::min(lambda * 10.0, 1e12);
            continue;
        }

        std::vector<double> cand(theta);
        for (int a = 0; a < K; ++a) cand[a] += delta[a];
        project(cand, box);
        eval_batch(kind, cand, xs, cand_pred);
        const double cand_sse = kernels::sum_squared_error(cand_pred, ys);

        if (!std::isfinite(cand_sse) || cand_sse > sse) {
            lambda = std::min(lambda * 10.0, 1e12);
            continue;
        }

        const double rel = (sse - cand_sse) / std::max(sse, DBL_MIN);
        theta = cand;
        pred.swap(cand_pred);
        sse = cand_sse;
        if (sse < best_sse) {
            best = theta;
            best_sse = sse;
        }
        lambda = std::max(lambda * 0.5, 1e-15);
        if (rel <= cfg.xi) {
            converged = true;
            break;
        }
    }

    out.params = best;
    out.sse = best_sse;
    out.iterations = iterations;
    out.converged = converged;
    return out;
}

}  // namespace

double sigmoid_value(const SigmoidParams& sp, double x) {
    double y;
    kernels::logistic_value(sp.scale, sp.steepness, sp.shift, {&x, 1}, {&y, 1});
    return y;
}

double sigmoid_slope(const SigmoidParams& sp, double x) {
    double y;
    kernels::logistic_slope(sp.scale, sp.steepness, sp.shift, {&x, 1}, {&y, 1});
    return y;
}

double eval_model(ModelKind kind, std::span<const double> params, double x) {
    check_params(kind, params);
    double y;
    eval_batch(kind, params, {&x, 1}, {&y, 1});
    return y;
}

double eval_derivative(ModelKind kind, std::span<const double> params, double x) {
    check_params(kind, params);
    switch (kind) {
        case ModelKind::Sigmoid: {
            double y;
            kernels::logistic_slope(params[0], params[1], params[2], {&x, 1}, {&y, 1});
            return y;
        }
        case ModelKind::Power:
            return params[0] * params[1] * std::pow(x, params[1] - 1.0);
        case ModelKind::MichaelisMenten: {
            const double d = 1.0 + params[1] * x;
            return params[0] / (d * d);
        }
        case ModelKind::NegExp:
            return params[0] * params[1] * std::exp(-params[1] * x);
        default:
            throw InvalidParams("model kind has no parametric form");
    }
}

std::vector<std::array<double, 3>> jacobian(const SigmoidParams& sp,
                                            std::span<const double> xs) {
    if (!(sp.scale > 0.0) || !(sp.steepness > 0.0) || !std::isfinite(sp.shift)) {
        throw InvalidParams("sigmoid parameters out of domain");
    }
    const double arr[3] = {sp.scale, sp.steepness, sp.shift};
    std::vector<double> flat;
    jac_batch(ModelKind::Sigmoid, arr, xs, flat);
    std::vector<std::array<double, 3>> rows(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        rows[i] = {flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
    }
    return rows;
}

FitResult fit(ModelKind kind, const ClickCostCurve& curve, const FitConfig& cfg) {
    const auto& pts = curve.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i].ecpm_cost > pts[i + 1].ecpm_cost) {
            throw InvalidParams("click-cost curve must be sorted by cost");
        }
    }
    for (const ClickCostPoint& p : pts) {
        if (!(p.ecpm_cost >= 0.0) || !(p.clicks >= 0.0)) {
            throw InvalidParams("click-cost curve has a negative entry");
        }
    }

    if (kind == ModelKind::NearestNeighbor || kind == ModelKind::LinearInterp) {
        if (pts.empty()) throw TooFewPoints("baseline needs at least 1 point");
        FitResult out;
        out.kind = kind;
        out.data = pts;
        out.n_points = static_cast<int>(pts.size());
        out.converged = true;
        return out;
    }

    const int K = param_count(kind);
    if (static_cast<int>(pts.size()) < K + 1) {
        throw TooFewPoints("need at least " + std::to_string(K + 1) + " points, have " +
                           std::to_string(pts.size()));
    }

    std::vector<double> xs(pts.size()), ys(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        xs[i] = pts[i].ecpm_cost;
        ys[i] = pts[i].clicks;
    }
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    if (*xmin == *xmax) throw DegenerateData("all costs identical");
    if (*ymin == *ymax) throw DegenerateData("all click values identical");

    return run_gauss_newton(kind, xs, ys, cfg);
}

double predict_baseline(ModelKind kind, std::span<const ClickCostPoint> data, double x) {
    if (data.empty()) throw TooFewPoints("no stored points to predict from");
    if (kind == ModelKind::NearestNeighbor) {
        auto it = std::lower_bound(data.begin(), data.end(), x,
                                   [](const ClickCostPoint& p, double q) { return p.ecpm_cost < q; });
        if (it == data.begin()) return it->clicks;
        if (it == data.end()) return (it - 1)->clicks;
        const double d_hi = it->ecpm_cost - x;
        const double d_lo = x - (it - 1)->ecpm_cost;
        // Ties go to the lower cost.
        return d_lo <= d_hi ? (it - 1)->clicks : it->clicks;
    }
    if (kind == ModelKind::LinearInterp) {
        if (x < data.front().ecpm_cost || x > data.back().ecpm_cost) {
            throw OutOfRange("query cost outside the interpolation hull");
        }
        auto it = std::lower_bound(data.begin(), data.end(), x,
                                   [](const ClickCostPoint& p, double q) { return p.ecpm_cost < q; });
        if (it != data.end() && it->ecpm_cost == x) return it->clicks;
        const ClickCostPoint& hi = *it;
        const ClickCostPoint& lo = *(it - 1);
        const double frac = (x - lo.ecpm_cost) / (hi.ecpm_cost - lo.ecpm_cost);
        return lo.clicks + frac * (hi.clicks - lo.clicks);
    }
    throw InvalidParams("predict_baseline handles only the non-parametric kinds");
}

double predict(const FitResult& fit, double x) {
    if (fit.kind == ModelKind::NearestNeighbor || fit.kind == ModelKind::LinearInterp) {
        return predict_baseline(fit.kind, fit.data, x);
    }
    return eval_model(fit.kind, fit.params, x);
}

Money predict_spend(const FitResult& fit, double x, double ctr) {
    if (!(ctr > 0.0)) throw ZeroCtr("ctr must be positive for spend");
    const double scale = 1.0 / (1000.0 * ctr);
    if (fit.kind == ModelKind::NearestNeighbor || fit.kind == ModelKind::LinearInterp) {
        // Predict from the stored spend series rather than clicks * query
        // cost, so the neighbor's own realized spend is what comes back.
        std::vector<ClickCostPoint> spend(fit.data.size());
        for (std::size_t i = 0; i < fit.data.size(); ++i) {
            spend[i] = {fit.data[i].ecpm_cost, fit.data[i].clicks * fit.data[i].ecpm_cost * scale};
        }
        return predict_baseline(fit.kind, spend, x);
    }
    return predict(fit, x) * x * scale;
}

}  // namespace bidcurve::curvefit
