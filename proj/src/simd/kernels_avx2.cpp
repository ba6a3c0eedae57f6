// Compiled with -mavx2 -mfma. Only reached after the runtime CPU check.

#include "dyadint/interval.hpp"
#include "dyadint/simd/kernels.hpp"

#include <immintrin.h>

#include <cfloat>
#include <cmath>

namespace dyadint::simd {

namespace detail {
void scalar_sin(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n);
void scalar_cos(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n);
void scalar_exp(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n);
} // namespace detail

namespace {

constexpr std::size_t W = 4;

inline __m256d sign_mask() { return _mm256_set1_pd(-0.0); }
inline __m256d vabs(__m256d x) { return _mm256_andnot_pd(sign_mask(), x); }
inline __m256d vneg(__m256d x) { return _mm256_xor_pd(sign_mask(), x); }

// std::min(a, b) == (b < a) ? b : a; vminpd(x, y) == (x < y) ? x : y.
inline __m256d smin(__m256d a, __m256d b) { return _mm256_min_pd(b, a); }
// std::max(a, b) == (a < b) ? b : a; vmaxpd(x, y) == (x > y) ? x : y.
inline __m256d smax(__m256d a, __m256d b) { return _mm256_max_pd(b, a); }

inline __m256d next_up(__m256d x) {
    const __m256d inf = _mm256_set1_pd(HUGE_VAL);
    const __m256d zero = _mm256_setzero_pd();
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256d pos = _mm256_and_pd(_mm256_cmp_pd(x, zero, _CMP_GT_OQ), _mm256_cmp_pd(x, inf, _CMP_NEQ_OQ));
    const __m256d negm = _mm256_cmp_pd(x, zero, _CMP_LT_OQ);
    // masks are all-ones (-1) lanes: subtract for +1, add for -1
    __m256i r = _mm256_sub_epi64(bits, _mm256_castpd_si256(pos));
    r = _mm256_add_epi64(r, _mm256_castpd_si256(negm));
    __m256d out = _mm256_castsi256_pd(r);
    const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
    return _mm256_blendv_pd(out, _mm256_set1_pd(DBL_TRUE_MIN), is_zero);
}

inline __m256d next_down(__m256d x) { return vneg(next_up(vneg(x))); }

inline __m256d is_tiny(__m256d p) { return _mm256_cmp_pd(vabs(p), _mm256_set1_pd(DBL_MIN), _CMP_LT_OQ); }
inline __m256d nonzero(__m256d x) { return _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_NEQ_UQ); }

inline __m256d two_sum_err(__m256d a, __m256d b, __m256d s) {
    const __m256d bb = _mm256_sub_pd(s, a);
    return _mm256_add_pd(_mm256_sub_pd(a, _mm256_sub_pd(s, bb)), _mm256_sub_pd(b, bb));
}

inline __m256d fix_pos_inf(__m256d r, __m256d raw) {
    return _mm256_blendv_pd(r, _mm256_set1_pd(DBL_MAX), _mm256_cmp_pd(raw, _mm256_set1_pd(HUGE_VAL), _CMP_EQ_OQ));
}
inline __m256d fix_neg_inf(__m256d r, __m256d raw) {
    return _mm256_blendv_pd(r, _mm256_set1_pd(-DBL_MAX), _mm256_cmp_pd(raw, _mm256_set1_pd(-HUGE_VAL), _CMP_EQ_OQ));
}

inline __m256d add_down(__m256d a, __m256d b) {
    const __m256d s = _mm256_add_pd(a, b);
    const __m256d step = _mm256_cmp_pd(two_sum_err(a, b, s), _mm256_setzero_pd(), _CMP_LT_OQ);
    return fix_pos_inf(_mm256_blendv_pd(s, next_down(s), step), s);
}

inline __m256d add_up(__m256d a, __m256d b) {
    const __m256d s = _mm256_add_pd(a, b);
    const __m256d step = _mm256_cmp_pd(two_sum_err(a, b, s), _mm256_setzero_pd(), _CMP_GT_OQ);
    return fix_neg_inf(_mm256_blendv_pd(s, next_up(s), step), s);
}

inline __m256d mul_down(__m256d a, __m256d b) {
    const __m256d p = _mm256_mul_pd(a, b);
    const __m256d err = _mm256_fmsub_pd(a, b, p);
    const __m256d tiny = _mm256_and_pd(is_tiny(p), _mm256_and_pd(nonzero(a), nonzero(b)));
    const __m256d step = _mm256_or_pd(_mm256_cmp_pd(err, _mm256_setzero_pd(), _CMP_LT_OQ), tiny);
    return fix_pos_inf(_mm256_blendv_pd(p, next_down(p), step), p);
}

inline __m256d mul_up(__m256d a, __m256d b) {
    const __m256d p = _mm256_mul_pd(a, b);
    const __m256d err = _mm256_fmsub_pd(a, b, p);
    const __m256d tiny = _mm256_and_pd(is_tiny(p), _mm256_and_pd(nonzero(a), nonzero(b)));
    const __m256d step = _mm256_or_pd(_mm256_cmp_pd(err, _mm256_setzero_pd(), _CMP_GT_OQ), tiny);
    return fix_neg_inf(_mm256_blendv_pd(p, next_up(p), step), p);
}

inline __m256d div_down(__m256d a, __m256d b) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d q = _mm256_div_pd(a, b);
    const __m256d r = _mm256_fnmadd_pd(q, b, a); // a - q b
    const __m256d sign_differs =
        _mm256_xor_pd(_mm256_cmp_pd(r, zero, _CMP_LT_OQ), _mm256_cmp_pd(b, zero, _CMP_LT_OQ));
    const __m256d tiny = _mm256_and_pd(is_tiny(q), nonzero(a));
    const __m256d step = _mm256_or_pd(_mm256_and_pd(nonzero(r), sign_differs), tiny);
    return fix_pos_inf(_mm256_blendv_pd(q, next_down(q), step), q);
}

inline __m256d div_up(__m256d a, __m256d b) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d q = _mm256_div_pd(a, b);
    const __m256d r = _mm256_fnmadd_pd(q, b, a);
    const __m256d sign_differs =
        _mm256_xor_pd(_mm256_cmp_pd(r, zero, _CMP_GT_OQ), _mm256_cmp_pd(b, zero, _CMP_LT_OQ));
    const __m256d tiny = _mm256_and_pd(is_tiny(q), nonzero(a));
    const __m256d step = _mm256_or_pd(_mm256_and_pd(nonzero(r), sign_differs), tiny);
    return fix_neg_inf(_mm256_blendv_pd(q, next_up(q), step), q);
}

template <class Fn>
inline void for_blocks(std::size_t n, Fn&& vec_fn, auto&& scalar_fn) {
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        vec_fn(i);
    }
    for (; i < n; ++i) {
        scalar_fn(i);
    }
}

void add_avx2(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
              double* ohi, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            _mm256_storeu_pd(olo + i, add_down(_mm256_loadu_pd(alo + i), _mm256_loadu_pd(blo + i)));
            _mm256_storeu_pd(ohi + i, add_up(_mm256_loadu_pd(ahi + i), _mm256_loadu_pd(bhi + i)));
        },
        [&](std::size_t i) {
            const Interval r = ia::add({alo[i], ahi[i]}, {blo[i], bhi[i]});
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

void sub_avx2(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
              double* ohi, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            _mm256_storeu_pd(olo + i, add_down(_mm256_loadu_pd(alo + i), vneg(_mm256_loadu_pd(bhi + i))));
            _mm256_storeu_pd(ohi + i, add_up(_mm256_loadu_pd(ahi + i), vneg(_mm256_loadu_pd(blo + i))));
        },
        [&](std::size_t i) {
            const Interval r = ia::sub({alo[i], ahi[i]}, {blo[i], bhi[i]});
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

void mul_avx2(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
              double* ohi, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            const __m256d al = _mm256_loadu_pd(alo + i);
            const __m256d ah = _mm256_loadu_pd(ahi + i);
            const __m256d bl = _mm256_loadu_pd(blo + i);
            const __m256d bh = _mm256_loadu_pd(bhi + i);
            const __m256d l1 = mul_down(al, bl);
            const __m256d l2 = mul_down(al, bh);
            const __m256d l3 = mul_down(ah, bl);
            const __m256d l4 = mul_down(ah, bh);
            const __m256d u1 = mul_up(al, bl);
            const __m256d u2 = mul_up(al, bh);
            const __m256d u3 = mul_up(ah, bl);
            const __m256d u4 = mul_up(ah, bh);
            _mm256_storeu_pd(olo + i, smin(smin(l1, l2), smin(l3, l4)));
            _mm256_storeu_pd(ohi + i, smax(smax(u1, u2), smax(u3, u4)));
        },
        [&](std::size_t i) {
            const Interval r = ia::mul({alo[i], ahi[i]}, {blo[i], bhi[i]});
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

void min_avx2(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
              double* ohi, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            _mm256_storeu_pd(olo + i, smin(_mm256_loadu_pd(alo + i), _mm256_loadu_pd(blo + i)));
            _mm256_storeu_pd(ohi + i, smin(_mm256_loadu_pd(ahi + i), _mm256_loadu_pd(bhi + i)));
        },
        [&](std::size_t i) {
            const Interval r = ia::min({alo[i], ahi[i]}, {blo[i], bhi[i]});
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

void max_avx2(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
              double* ohi, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            _mm256_storeu_pd(olo + i, smax(_mm256_loadu_pd(alo + i), _mm256_loadu_pd(blo + i)));
            _mm256_storeu_pd(ohi + i, smax(_mm256_loadu_pd(ahi + i), _mm256_loadu_pd(bhi + i)));
        },
        [&](std::size_t i) {
            const Interval r = ia::max({alo[i], ahi[i]}, {blo[i], bhi[i]});
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

void div_avx2(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
              double* ohi, std::uint8_t* flags, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            const __m256d zero = _mm256_setzero_pd();
            const __m256d al = _mm256_loadu_pd(alo + i);
            const __m256d ah = _mm256_loadu_pd(ahi + i);
            const __m256d bl = _mm256_loadu_pd(blo + i);
            const __m256d bh = _mm256_loadu_pd(bhi + i);
            const __m256d bad =
                _mm256_and_pd(_mm256_cmp_pd(bl, zero, _CMP_LE_OQ), _mm256_cmp_pd(zero, bh, _CMP_LE_OQ));
            const __m256d l1 = div_down(al, bl);
            const __m256d l2 = div_down(al, bh);
            const __m256d l3 = div_down(ah, bl);
            const __m256d l4 = div_down(ah, bh);
            const __m256d u1 = div_up(al, bl);
            const __m256d u2 = div_up(al, bh);
            const __m256d u3 = div_up(ah, bl);
            const __m256d u4 = div_up(ah, bh);
            const __m256d lo = smin(smin(l1, l2), smin(l3, l4));
            const __m256d hi = smax(smax(u1, u2), smax(u3, u4));
            _mm256_storeu_pd(olo + i, _mm256_blendv_pd(lo, _mm256_set1_pd(-HUGE_VAL), bad));
            _mm256_storeu_pd(ohi + i, _mm256_blendv_pd(hi, _mm256_set1_pd(HUGE_VAL), bad));
            const int m = _mm256_movemask_pd(bad);
            for (std::size_t l = 0; l < W; ++l) {
                flags[i + l] |= static_cast<std::uint8_t>((m >> l) & 1);
            }
        },
        [&](std::size_t i) {
            bool b = false;
            const Interval r = ia::div({alo[i], ahi[i]}, {blo[i], bhi[i]}, b);
            olo[i] = r.lo;
            ohi[i] = r.hi;
            flags[i] |= static_cast<std::uint8_t>(b);
        });
}

void neg_avx2(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            const __m256d l = _mm256_loadu_pd(alo + i);
            const __m256d h = _mm256_loadu_pd(ahi + i);
            _mm256_storeu_pd(olo + i, vneg(h));
            _mm256_storeu_pd(ohi + i, vneg(l));
        },
        [&](std::size_t i) {
            const Interval r = ia::neg({alo[i], ahi[i]});
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

void abs_avx2(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            const __m256d zero = _mm256_setzero_pd();
            const __m256d l = _mm256_loadu_pd(alo + i);
            const __m256d h = _mm256_loadu_pd(ahi + i);
            const __m256d nonneg = _mm256_cmp_pd(l, zero, _CMP_GE_OQ);
            const __m256d nonpos = _mm256_cmp_pd(h, zero, _CMP_LE_OQ);
            // straddling case
            __m256d rl = zero;
            __m256d rh = smax(vneg(l), h);
            rl = _mm256_blendv_pd(rl, vneg(h), nonpos);
            rh = _mm256_blendv_pd(rh, vneg(l), nonpos);
            rl = _mm256_blendv_pd(rl, l, nonneg);
            rh = _mm256_blendv_pd(rh, h, nonneg);
            _mm256_storeu_pd(olo + i, rl);
            _mm256_storeu_pd(ohi + i, rh);
        },
        [&](std::size_t i) {
            const Interval r = ia::abs({alo[i], ahi[i]});
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

inline __m256d pow_down_nonneg(__m256d x, unsigned e) {
    __m256d r = _mm256_set1_pd(1.0);
    for (unsigned k = 0; k < e; ++k) {
        r = mul_down(r, x);
    }
    return r;
}

inline __m256d pow_up_nonneg(__m256d x, unsigned e) {
    __m256d r = _mm256_set1_pd(1.0);
    for (unsigned k = 0; k < e; ++k) {
        r = mul_up(r, x);
    }
    return r;
}

void pow_avx2(const double* alo, const double* ahi, unsigned e, double* olo, double* ohi, std::size_t n) {
    if (e == 0) {
        for (std::size_t i = 0; i < n; ++i) {
            olo[i] = 1.0;
            ohi[i] = 1.0;
        }
        return;
    }
    for_blocks(
        n,
        [&](std::size_t i) {
            const __m256d zero = _mm256_setzero_pd();
            const __m256d l = _mm256_loadu_pd(alo + i);
            const __m256d h = _mm256_loadu_pd(ahi + i);
            const __m256d l_nonneg = _mm256_cmp_pd(l, zero, _CMP_GE_OQ);
            const __m256d h_nonneg = _mm256_cmp_pd(h, zero, _CMP_GE_OQ);
            __m256d rl;
            __m256d rh;
            if (e % 2 == 0) {
                const __m256d h_nonpos = _mm256_cmp_pd(h, zero, _CMP_LE_OQ);
                // straddle
                rl = zero;
                rh = smax(pow_up_nonneg(vneg(l), e), pow_up_nonneg(h, e));
                rl = _mm256_blendv_pd(rl, pow_down_nonneg(vneg(h), e), h_nonpos);
                rh = _mm256_blendv_pd(rh, pow_up_nonneg(vneg(l), e), h_nonpos);
                rl = _mm256_blendv_pd(rl, pow_down_nonneg(l, e), l_nonneg);
                rh = _mm256_blendv_pd(rh, pow_up_nonneg(h, e), l_nonneg);
            } else {
                rl = _mm256_blendv_pd(vneg(pow_up_nonneg(vneg(l), e)), pow_down_nonneg(l, e), l_nonneg);
                rh = _mm256_blendv_pd(vneg(pow_down_nonneg(vneg(h), e)), pow_up_nonneg(h, e), h_nonneg);
            }
            _mm256_storeu_pd(olo + i, rl);
            _mm256_storeu_pd(ohi + i, rh);
        },
        [&](std::size_t i) {
            const Interval r = ia::pow({alo[i], ahi[i]}, e);
            olo[i] = r.lo;
            ohi[i] = r.hi;
        });
}

void sqrt_avx2(const double* alo, const double* ahi, double* olo, double* ohi, std::uint8_t* flags,
               std::size_t n) {
    for_blocks(
        n,
        [&](std::size_t i) {
            const __m256d zero = _mm256_setzero_pd();
            const __m256d l = smax(_mm256_loadu_pd(alo + i), zero);
            const __m256d h = _mm256_loadu_pd(ahi + i);
            const __m256d bad = _mm256_cmp_pd(h, zero, _CMP_LT_OQ);
            const __m256d sl = _mm256_sqrt_pd(l);
            const __m256d rl = _mm256_fnmadd_pd(sl, sl, l);
            const __m256d lo = _mm256_blendv_pd(sl, next_down(sl), _mm256_cmp_pd(rl, zero, _CMP_LT_OQ));
            const __m256d sh = _mm256_sqrt_pd(h);
            const __m256d rh = _mm256_fnmadd_pd(sh, sh, h);
            const __m256d hi = _mm256_blendv_pd(sh, next_up(sh), _mm256_cmp_pd(rh, zero, _CMP_GT_OQ));
            _mm256_storeu_pd(olo + i, _mm256_blendv_pd(lo, _mm256_set1_pd(-HUGE_VAL), bad));
            _mm256_storeu_pd(ohi + i, _mm256_blendv_pd(hi, _mm256_set1_pd(HUGE_VAL), bad));
            const int m = _mm256_movemask_pd(bad);
            for (std::size_t k = 0; k < W; ++k) {
                flags[i + k] |= static_cast<std::uint8_t>((m >> k) & 1);
            }
        },
        [&](std::size_t i) {
            bool b = false;
            const Interval r = ia::sqrt({alo[i], ahi[i]}, b);
            olo[i] = r.lo;
            ohi[i] = r.hi;
            flags[i] |= static_cast<std::uint8_t>(b);
        });
}

SumResult sum_avx2(const double* x, std::size_t n) {
    __m256d s = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd();
    __m256d a = _mm256_setzero_pd();
    const std::size_t full = n - n % W;
    for (std::size_t i = 0; i < full; i += W) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d t = _mm256_add_pd(s, v);
        const __m256d big_s = _mm256_cmp_pd(vabs(s), vabs(v), _CMP_GE_OQ);
        const __m256d corr_s = _mm256_add_pd(_mm256_sub_pd(s, t), v);
        const __m256d corr_v = _mm256_add_pd(_mm256_sub_pd(v, t), s);
        c = _mm256_add_pd(c, _mm256_blendv_pd(corr_v, corr_s, big_s));
        s = t;
        a = _mm256_add_pd(a, vabs(v));
    }
    detail::LaneState st{};
    _mm256_storeu_pd(st.s, s);
    _mm256_storeu_pd(st.c, c);
    _mm256_storeu_pd(st.a, a);
    return detail::merge_lanes(st, x + full, n - full);
}

} // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{
        Isa::Avx2,   "avx2",    &add_avx2, &sub_avx2,          &mul_avx2,          &min_avx2,
        &max_avx2,   &div_avx2, &neg_avx2, &abs_avx2,          &detail::scalar_sin, &detail::scalar_cos,
        &detail::scalar_exp,    &pow_avx2, &sqrt_avx2,         &sum_avx2,
    };
    return table;
}

} // namespace dyadint::simd
