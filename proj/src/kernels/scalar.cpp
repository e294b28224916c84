#include "bidcurve/kernels.hpp"

#include <cassert>
#include <cmath>

namespace bidcurve::kernels {

double sigmoid01(double v) {
    // Evaluate with exp of a non-positive argument only, so neither branch
    // can overflow. For v >= 0: 1/(1+e^-v); for v < 0: e^v/(1+e^v).
    if (v >= 0.0) {
        const double e = std::exp(-v);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(v);
    return e / (1.0 + e);
}

namespace scalar {

void exp_batch(std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
}

void logistic_value(double s, double t, double p,
                    std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    // Subtract sigmas before scaling by s so h(0) is exactly zero no
    // matter how the compiler contracts the surrounding arithmetic.
    const double sig0 = sigmoid01(-p);
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = s * (sigmoid01(t * x[i] - p) - sig0);
    }
}

void logistic_slope(double s, double t, double p,
                    std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const double st = s * t;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // e/(1+e)^2 is symmetric under e -> 1/e, so the sign of v never
        // matters and exp never sees a positive argument.
        const double v = t * x[i] - p;
        const double e = std::exp(-std::fabs(v));
        const double d = 1.0 + e;
        y[i] = st * e / (d * d);
    }
}

double sum_squared_error(std::span<const double> pred, std::span<const double> obs) {
    assert(pred.size() == obs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - obs[i];
        acc += r * r;
    }
    return acc;
}

}  // namespace scalar
}  // namespace bidcurve::kernels
