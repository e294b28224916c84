#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "bidcurve/kernels.hpp"

using namespace bidcurve;

namespace {

// Straight-line reference for the logistic curve, independent of the
// kernel implementations.
double ref_value(double s, double t, double p, double x) {
    return s / (1.0 + std::exp(-(t * x - p))) - s / (1.0 + std::exp(p));
}

double ref_slope(double s, double t, double p, double x) {
    const double e = std::exp(-(t * x - p));
    return s * t * e / ((1.0 + e) * (1.0 + e));
}

double rel_diff(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

struct BackendGuard {
    kernels::Backend saved = kernels::active_backend();
    ~BackendGuard() { kernels::set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar exp_batch matches std::exp") {
    BackendGuard guard;
    kernels::set_backend(kernels::Backend::Scalar);
    std::vector<double> xs = {-700.0, -10.5, -1.0, 0.0, 1e-12, 0.5, 1.0, 20.0, 700.0};
    std::vector<double> ys(xs.size());
    kernels::exp_batch(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ys[i] == std::exp(xs[i]));
}

TEST_CASE("logistic closed-form values") {
    // s=1000, t=2, p=4: inflection at x=2, h(2) = 500 - 1000/(1+e^4),
    // h'(2) = s*t/4 = 500 exactly.
    std::vector<double> xs = {0.0, 2.0};
    std::vector<double> val(2), slope(2);
    kernels::logistic_value(1000.0, 2.0, 4.0, xs, val);
    kernels::logistic_slope(1000.0, 2.0, 4.0, xs, slope);
    CHECK(val[0] == 0.0);
    CHECK(val[1] == doctest::Approx(482.014).epsilon(1e-5));
    CHECK(rel_diff(val[1], ref_value(1000.0, 2.0, 4.0, 2.0)) < 1e-13);
    CHECK(slope[1] == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(rel_diff(slope[0], ref_slope(1000.0, 2.0, 4.0, 0.0)) < 1e-13);
}

TEST_CASE("logistic kernels stay finite and sane at extreme arguments") {
    std::vector<double> xs = {0.0, 1e-9, 1e6, 1e12};
    std::vector<double> val(xs.size()), slope(xs.size());
    kernels::logistic_value(1e12, 1e6, 50.0, xs, val);
    kernels::logistic_slope(1e12, 1e6, 50.0, xs, slope);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(std::isfinite(val[i]));
        CHECK(std::isfinite(slope[i]));
        CHECK(slope[i] >= 0.0);
    }
    // Far past the inflection the curve sits at its asymptote.
    const double asym = 1e12 * (1.0 - 1.0 / (1.0 + std::exp(50.0)));
    CHECK(val[3] == doctest::Approx(asym).epsilon(1e-12));
}

TEST_CASE("sum_squared_error exact small case") {
    std::vector<double> a = {1.0, 2.0, -3.0};
    std::vector<double> b = {0.0, 0.0, 0.0};
    CHECK(kernels::sum_squared_error(a, b) == 14.0);
    CHECK(kernels::sum_squared_error({}, {}) == 0.0);
}

TEST_CASE("avx2 exp_batch stays within a few ulp of std::exp") {
    if (!kernels::avx2_available()) {
        MESSAGE("avx2 not available, skipping");
        return;
    }
    BackendGuard guard;
    kernels::set_backend(kernels::Backend::Avx2);

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> wide(-690.0, 690.0);
    std::vector<double> xs(4097);
    for (double& x : xs) x = wide(rng);
    xs[0] = 0.0;
    xs[1] = 1.0;
    xs[2] = -708.0;
    xs[3] = 709.0;
    std::vector<double> ys(xs.size());
    kernels::exp_batch(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(rel_diff(ys[i], std::exp(xs[i])) < 1e-14);
    }

    // Saturation ends.
    std::vector<double> ends = {-800.0, 800.0, -746.0, 710.0};
    std::vector<double> out(4);
    kernels::exp_batch(ends, out);
    CHECK(out[0] == 0.0);
    CHECK(std::isinf(out[1]));
    CHECK(out[2] == 0.0);
    CHECK(std::isinf(out[3]));
}

TEST_CASE("avx2 backend matches scalar on all kernels") {
    if (!kernels::avx2_available()) {
        MESSAGE("avx2 not available, skipping");
        return;
    }
    BackendGuard guard;
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> ux(0.0, 50.0);
    std::uniform_real_distribution<double> us(1.0, 1e6);
    std::uniform_real_distribution<double> ut(0.05, 20.0);
    std::uniform_real_distribution<double> up(-50.0, 50.0);

    // Sizes straddle the 4-lane width so remainder handling gets exercised.
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7},
                          std::size_t{64}, std::size_t{257}}) {
        std::vector<double> xs(n);
        for (double& x : xs) x = ux(rng);
        const double s = us(rng), t = ut(rng), p = up(rng);

        std::vector<double> a(n), b(n);
        kernels::set_backend(kernels::Backend::Scalar);
        kernels::logistic_value(s, t, p, xs, a);
        kernels::set_backend(kernels::Backend::Avx2);
        kernels::logistic_value(s, t, p, xs, b);
        // The value is a difference of two sigmas scaled by s, so for
        // extreme shifts it cancels almost completely and a pure relative
        // bound on the tiny result would be meaningless. Compare against
        // the scale the arithmetic actually ran at.
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::fabs(a[i] - b[i]) < 1e-12 * (s + std::fabs(a[i])));

        kernels::set_backend(kernels::Backend::Scalar);
        kernels::logistic_slope(s, t, p, xs, a);
        kernels::set_backend(kernels::Backend::Avx2);
        kernels::logistic_slope(s, t, p, xs, b);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::fabs(a[i] - b[i]) < 1e-12 * (s * t + std::fabs(a[i])));

        std::vector<double> obs(n);
        for (double& o : obs) o = us(rng);
        kernels::set_backend(kernels::Backend::Scalar);
        const double sse_s = kernels::sum_squared_error(a, obs);
        kernels::set_backend(kernels::Backend::Avx2);
        const double sse_v = kernels::sum_squared_error(a, obs);
        CHECK(rel_diff(sse_s, sse_v) < 1e-12);
    }
}

TEST_CASE("avx2 result does not depend on array alignment of a value") {
    if (!kernels::avx2_available()) {
        MESSAGE("avx2 not available, skipping");
        return;
    }
    BackendGuard guard;
    kernels::set_backend(kernels::Backend::Avx2);
    // The same input must give bit-identical output whether it lands in a
    // full vector or in the remainder loop.
    std::vector<double> block = {0.25, 0.5, 0.75, 1.25, 1.25};
    std::vector<double> out(block.size());
    kernels::exp_batch(block, out);
    CHECK(out[3] == out[4]);

    std::vector<double> v(5), s(5);
    kernels::logistic_value(1000.0, 2.0, 4.0, block, v);
    kernels::logistic_slope(1000.0, 2.0, 4.0, block, s);
    CHECK(v[3] == v[4]);
    CHECK(s[3] == s[4]);

    // Random sweep of the same invariant. The value kernel's exact zero at
    // the origin relies on the remainder path reproducing vector lanes bit
    // for bit, so hammer that equivalence across the full exp range.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uv(-700.0, 700.0);
    for (int rep = 0; rep < 2000; ++rep) {
        const double val = uv(rng);
        std::vector<double> xs(5, val), ys(5);
        kernels::exp_batch(xs, ys);
        CHECK(std::memcmp(&ys[0], &ys[4], sizeof(double)) == 0);
    }
    std::uniform_real_distribution<double> ub(0.0, 10.0);
    for (int rep = 0; rep < 2000; ++rep) {
        const double val = ub(rng);
        std::vector<double> xs(5, val), ys(5), zs(5);
        kernels::logistic_value(1000.0, 2.0, 4.0, xs, ys);
        kernels::logistic_slope(1000.0, 2.0, 4.0, xs, zs);
        CHECK(std::memcmp(&ys[0], &ys[4], sizeof(double)) == 0);
        CHECK(std::memcmp(&zs[0], &zs[4], sizeof(double)) == 0);
    }
}
