#include "bidcurve/kernels.hpp"

#if defined(BIDCURVE_BUILD_AVX2)

#include <immintrin.h>

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace bidcurve::kernels::avx2 {
namespace {

// Rational approximation to exp on the reduced range |r| <= ln2/2, after
// writing exp(x) = 2^n * exp(r). Coefficients are Cephes expml's (Moshier,
// netlib.org/cephes), good to about 1 ulp on the reduced range. The ln2
// constant is split hi/lo so n*ln2 subtracts exactly.
constexpr double kLog2E = 1.4426950408889634074;
constexpr double kLn2Hi = 6.93145751953125e-1;
constexpr double kLn2Lo = 1.42860682030941723212e-6;
constexpr double kP0 = 1.26177193074810590878e-4;
constexpr double kP1 = 3.02994407707441961300e-2;
constexpr double kP2 = 9.99999999999999999910e-1;
constexpr double kQ0 = 3.00198505138664455042e-6;
constexpr double kQ1 = 2.52448340349684104192e-3;
constexpr double kQ2 = 2.27265548208155028766e-1;
constexpr double kQ3 = 2.00000000000000000005e0;
constexpr double kMaxArg = 709.782712893383996843;  // exp overflows above this
constexpr double kMinArg = -745.13321910194110842;  // exp underflows below this

inline double pow2i(int k) {
    // 2^k for k well inside the normal exponent range.
    return std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
}

// One lane of the vector algorithm, for array remainders. Uses fma and the
// same operation order as the vector path so a value's result does not
// depend on which path processed it.
inline double exp_lane(double x) {
    if (std::isnan(x)) return x;
    const double xc = x < kMinArg ? kMinArg : (x > kMaxArg ? kMaxArg : x);
    const int n = static_cast<int>(std::nearbyint(xc * kLog2E));
    const double nd = static_cast<double>(n);
    double r = std::fma(-nd, kLn2Hi, xc);
    r = std::fma(-nd, kLn2Lo, r);
    const double rr = r * r;
    const double pm = r * std::fma(std::fma(kP0, rr, kP1), rr, kP2);
    const double qm = std::fma(std::fma(std::fma(kQ0, rr, kQ1), rr, kQ2), rr, kQ3);
    const double er = 1.0 + 2.0 * pm / (qm - pm);
    // Split 2^n into two factors so the subnormal end stays representable.
    const int n1 = n >> 1;
    const double scaled = (er * pow2i(n1)) * pow2i(n - n1);
    if (x > kMaxArg) return HUGE_VAL;
    if (x < kMinArg) return 0.0;
    return scaled;
}

inline __m256d exp_pd(__m256d x) {
    const __m256d max_arg = _mm256_set1_pd(kMaxArg);
    const __m256d min_arg = _mm256_set1_pd(kMinArg);
    // max/min with x in the second slot keep NaN lanes as NaN.
    __m256d xc = _mm256_max_pd(min_arg, x);
    xc = _mm256_min_pd(max_arg, xc);

    // n = nearest integer to x * log2(e); comes back via int32 (the exponent
    // range of double fits easily).
    const __m128i n32 = _mm256_cvtpd_epi32(_mm256_mul_pd(xc, _mm256_set1_pd(kLog2E)));
    const __m256d nd = _mm256_cvtepi32_pd(n32);

    __m256d r = _mm256_fmadd_pd(nd, _mm256_set1_pd(-kLn2Hi), xc);
    r = _mm256_fmadd_pd(nd, _mm256_set1_pd(-kLn2Lo), r);
    const __m256d rr = _mm256_mul_pd(r, r);

    __m256d pm = _mm256_fmadd_pd(_mm256_set1_pd(kP0), rr, _mm256_set1_pd(kP1));
    pm = _mm256_fmadd_pd(pm, rr, _mm256_set1_pd(kP2));
    pm = _mm256_mul_pd(pm, r);
    __m256d qm = _mm256_fmadd_pd(_mm256_set1_pd(kQ0), rr, _mm256_set1_pd(kQ1));
    qm = _mm256_fmadd_pd(qm, rr, _mm256_set1_pd(kQ2));
    qm = _mm256_fmadd_pd(qm, rr, _mm256_set1_pd(kQ3));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d er = _mm256_add_pd(
        one, _mm256_div_pd(_mm256_add_pd(pm, pm), _mm256_sub_pd(qm, pm)));

    // 2^n as two factors: n1 = n >> 1 (arithmetic), n2 = n - n1.
    const __m128i n1 = _mm_srai_epi32(n32, 1);
    const __m128i n2 = _mm_sub_epi32(n32, n1);
    const __m128i bias = _mm_set1_epi32(1023);
    const __m256i e1 = _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n1, bias)), 52);
    const __m256i e2 = _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n2, bias)), 52);
    __m256d scaled = _mm256_mul_pd(er, _mm256_castsi256_pd(e1));
    scaled = _mm256_mul_pd(scaled, _mm256_castsi256_pd(e2));

    // Out-of-range lanes: saturate. NaN compares false on both, so it
    // passes through untouched.
    const __m256d hi_mask = _mm256_cmp_pd(x, max_arg, _CMP_GT_OQ);
    const __m256d lo_mask = _mm256_cmp_pd(x, min_arg, _CMP_LT_OQ);
    scaled = _mm256_blendv_pd(scaled, _mm256_set1_pd(HUGE_VAL), hi_mask);
    scaled = _mm256_blendv_pd(scaled, _mm256_setzero_pd(), lo_mask);
    return scaled;
}

inline double sigmoid_lane(double v) {
    const double e = exp_lane(-std::fabs(v));
    return (v >= 0.0 ? 1.0 : e) / (1.0 + e);
}

inline __m256d abs_pd(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline double hsum_pd(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void exp_batch(std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    std::size_t i = 0;
    for (; i + 4 <= x.size(); i += 4) {
        _mm256_storeu_pd(&y[i], exp_pd(_mm256_loadu_pd(&x[i])));
    }
    for (; i < x.size(); ++i) y[i] = exp_lane(x[i]);
}

void logistic_value(double s, double t, double p,
                    std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    // Subtract sigmas before scaling by s. At x = 0 the lane sigma is
    // bitwise equal to sig0 (exp_lane mirrors exp_pd op for op), so the
    // difference is exactly zero and no fused multiply can spoil it.
    const double sig0 = sigmoid_lane(-p);
    const __m256d vs = _mm256_set1_pd(s);
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d vnp = _mm256_set1_pd(-p);
    const __m256d vsig0 = _mm256_set1_pd(sig0);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= x.size(); i += 4) {
        const __m256d v = _mm256_fmadd_pd(vt, _mm256_loadu_pd(&x[i]), vnp);
        const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), abs_pd(v)));
        // sigma(v) = 1/(1+e) for v >= 0, e/(1+e) otherwise; e = exp(-|v|).
        const __m256d num = _mm256_blendv_pd(e, one, _mm256_cmp_pd(v, _mm256_setzero_pd(), _CMP_GE_OQ));
        const __m256d sig = _mm256_div_pd(num, _mm256_add_pd(one, e));
        _mm256_storeu_pd(&y[i], _mm256_mul_pd(vs, _mm256_sub_pd(sig, vsig0)));
    }
    for (; i < x.size(); ++i) {
        const double v = std::fma(t, x[i], -p);
        const double e = exp_lane(-std::fabs(v));
        const double sig = (v >= 0.0 ? 1.0 : e) / (1.0 + e);
        y[i] = s * (sig - sig0);
    }
}

void logistic_slope(double s, double t, double p,
                    std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const double st = s * t;
    const __m256d vst = _mm256_set1_pd(st);
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d vnp = _mm256_set1_pd(-p);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= x.size(); i += 4) {
        const __m256d v = _mm256_fmadd_pd(vt, _mm256_loadu_pd(&x[i]), vnp);
        const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), abs_pd(v)));
        const __m256d d = _mm256_add_pd(one, e);
        const __m256d num = _mm256_mul_pd(vst, e);
        _mm256_storeu_pd(&y[i], _mm256_div_pd(num, _mm256_mul_pd(d, d)));
    }
    for (; i < x.size(); ++i) {
        const double v = std::fma(t, x[i], -p);
        const double e = exp_lane(-std::fabs(v));
        const double d = 1.0 + e;
        y[i] = st * e / (d * d);
    }
}

double sum_squared_error(std::span<const double> pred, std::span<const double> obs) {
    assert(pred.size() == obs.size());
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= pred.size(); i += 4) {
        const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(&pred[i]), _mm256_loadu_pd(&obs[i]));
        acc = _mm256_fmadd_pd(r, r, acc);
    }
    double total = hsum_pd(acc);
    for (; i < pred.size(); ++i) {
        const double r = pred[i] - obs[i];
        total = std::fma(r, r, total);
    }
    return total;
}

}  // namespace bidcurve::kernels::avx2

#endif  // BIDCURVE_BUILD_AVX2
