#pragma once

#include <cstddef>
#include <span>

// Batch numeric kernels behind the curve models. Everything here is pure
// arithmetic on contiguous arrays: the hot loops of the project (dense
// cost-lattice scans, residual evaluation inside the fitter) all funnel
// through these four entry points.
//
// Two implementations exist: a scalar reference, and an AVX2+FMA variant
// using a vectorized exp. The active one is picked at load time from cpuid;
// tests can force either to check equivalence. Non-x86 builds get the
// scalar path only.

namespace bidcurve::kernels {

enum class Backend {
    Scalar,
    Avx2,
};

// True when the AVX2 variant is compiled in and the CPU supports it.
bool avx2_available();

Backend active_backend();

// Force a backend (test hook, not thread-safe). Requesting Avx2 on a machine
// without it keeps the scalar backend and returns false.
bool set_backend(Backend b);

// y[i] = exp(x[i]), with the usual overflow-to-inf / underflow-to-zero ends.
void exp_batch(std::span<const double> x, std::span<double> y);

// y[i] = s / (1 + exp(-(t*x[i] - p))) - s / (1 + exp(p)).
// The subtracted constant pins the curve through the origin.
void logistic_value(double s, double t, double p,
                    std::span<const double> x, std::span<double> y);

// y[i] = d/dx of the above = s * t * e / (1 + e)^2 with e = exp(-(t*x[i] - p)).
void logistic_slope(double s, double t, double p,
                    std::span<const double> x, std::span<double> y);

// Sum of (pred[i] - obs[i])^2. Spans must have equal length.
double sum_squared_error(std::span<const double> pred, std::span<const double> obs);

// The same four operations with the implementation pinned, used by the
// dispatcher and by the equivalence tests.
namespace scalar {
void exp_batch(std::span<const double> x, std::span<double> y);
void logistic_value(double s, double t, double p,
                    std::span<const double> x, std::span<double> y);
void logistic_slope(double s, double t, double p,
                    std::span<const double> x, std::span<double> y);
double sum_squared_error(std::span<const double> pred, std::span<const double> obs);
}  // namespace scalar

#if defined(BIDCURVE_BUILD_AVX2)
namespace avx2 {
void exp_batch(std::span<const double> x, std::span<double> y);
void logistic_value(double s, double t, double p,
                    std::span<const double> x, std::span<double> y);
void logistic_slope(double s, double t, double p,
                    std::span<const double> x, std::span<double> y);
double sum_squared_error(std::span<const double> pred, std::span<const double> obs);
}  // namespace avx2
#endif

// Scalar helpers shared by the model code. sigmoid01 is the standard
// logistic sigma(v) = 1/(1+exp(-v)) evaluated without overflow for any v.
double sigmoid01(double v);

}  // namespace bidcurve::kernels
