#include "bidcurve/kernels.hpp"

namespace bidcurve::kernels {

bool avx2_available() {
#if defined(BIDCURVE_BUILD_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
Backend& backend_slot() {
    static Backend b = avx2_available() ? Backend::Avx2 : Backend::Scalar;
    return b;
}
}  // namespace

Backend active_backend() { return backend_slot(); }

bool set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available()) return false;
    backend_slot() = b;
    return true;
}

void exp_batch(std::span<const double> x, std::span<double> y) {
#if defined(BIDCURVE_BUILD_AVX2)
    if (backend_slot() == Backend::Avx2) return avx2::exp_batch(x, y);
#endif
    scalar::exp_batch(x, y);
}

void logistic_value(double s, double t, double p,
                    std::span<const double> x, std::span<double> y) {
#if defined(BIDCURVE_BUILD_AVX2)
    if (backend_slot() == Backend::Avx2) return avx2::logistic_value(s, t, p, x, y);
#endif
    scalar::logistic_value(s, t, p, x, y);
}

void logistic_slope(double s, double t, double p,
                    std::span<const double> x, std::span<double> y) {
#if defined(BIDCURVE_BUILD_AVX2)
    if (backend_slot() == Backend::Avx2) return avx2::logistic_slope(s, t, p, x, y);
#endif
    scalar::logistic_slope(s, t, p, x, y);
}

double sum_squared_error(std::span<const double> pred, std::span<const double> obs) {
#if defined(BIDCURVE_BUILD_AVX2)
    if (backend_slot() == Backend::Avx2) return avx2::sum_squared_error(pred, obs);
#endif
    return scalar::sum_squared_error(pred, obs);
}

}  // namespace bidcurve::kernels
