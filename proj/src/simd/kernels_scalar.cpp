#include "dyadint/interval.hpp"
#include "dyadint/simd/kernels.hpp"

#include <cmath>

namespace dyadint::simd {

namespace detail {

namespace {

inline void neumaier_step(double& s, double& c, double x) {
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x)) {
        c += (s - t) + x;
    } else {
        c += (x - t) + s;
    }
    s = t;
}

} // namespace

SumResult merge_lanes(const LaneState& st, const double* tail, std::size_t tail_n) {
    double s = st.s[0];
    double c = st.c[0];
    for (std::size_t l = 1; l < kSumLanes; ++l) {
        neumaier_step(s, c, st.s[l]);
        c += st.c[l];
    }
    double a = (st.a[0] + st.a[1]) + (st.a[2] + st.a[3]);
    for (std::size_t i = 0; i < tail_n; ++i) {
        neumaier_step(s, c, tail[i]);
        a += std::fabs(tail[i]);
    }
    return {s + c, a};
}

} // namespace detail

namespace {

template <Interval (*Fn)(Interval, Interval)>
void binary(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
            double* ohi, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const Interval r = Fn({alo[i], ahi[i]}, {blo[i], bhi[i]});
        olo[i] = r.lo;
        ohi[i] = r.hi;
    }
}

template <Interval (*Fn)(Interval)>
void unary(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const Interval r = Fn({alo[i], ahi[i]});
        olo[i] = r.lo;
        ohi[i] = r.hi;
    }
}

void div_scalar(const double* alo, const double* ahi, const double* blo, const double* bhi, double* olo,
                double* ohi, std::uint8_t* flags, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        bool bad = false;
        const Interval r = ia::div({alo[i], ahi[i]}, {blo[i], bhi[i]}, bad);
        olo[i] = r.lo;
        ohi[i] = r.hi;
        flags[i] |= static_cast<std::uint8_t>(bad);
    }
}

void sqrt_scalar(const double* alo, const double* ahi, double* olo, double* ohi, std::uint8_t* flags,
                 std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        bool bad = false;
        const Interval r = ia::sqrt({alo[i], ahi[i]}, bad);
        olo[i] = r.lo;
        ohi[i] = r.hi;
        flags[i] |= static_cast<std::uint8_t>(bad);
    }
}

void pow_scalar(const double* alo, const double* ahi, unsigned e, double* olo, double* ohi, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const Interval r = ia::pow({alo[i], ahi[i]}, e);
        olo[i] = r.lo;
        ohi[i] = r.hi;
    }
}

SumResult sum_scalar(const double* x, std::size_t n) {
    detail::LaneState st{};
    const std::size_t full = n - n % detail::kSumLanes;
    for (std::size_t i = 0; i < full; i += detail::kSumLanes) {
        for (std::size_t l = 0; l < detail::kSumLanes; ++l) {
            const double v = x[i + l];
            const double t = st.s[l] + v;
            if (std::fabs(st.s[l]) >= std::fabs(v)) {
                st.c[l] += (st.s[l] - t) + v;
            } else {
                st.c[l] += (v - t) + st.s[l];
            }
            st.s[l] = t;
            st.a[l] += std::fabs(v);
        }
    }
    return detail::merge_lanes(st, x + full, n - full);
}

Interval ia_add(Interval a, Interval b) { return ia::add(a, b); }
Interval ia_sub(Interval a, Interval b) { return ia::sub(a, b); }
Interval ia_mul(Interval a, Interval b) { return ia::mul(a, b); }
Interval ia_min(Interval a, Interval b) { return ia::min(a, b); }
Interval ia_max(Interval a, Interval b) { return ia::max(a, b); }
Interval ia_neg(Interval a) { return ia::neg(a); }
Interval ia_abs(Interval a) { return ia::abs(a); }
Interval ia_sin(Interval a) { return ia::sin(a); }
Interval ia_cos(Interval a) { return ia::cos(a); }
Interval ia_exp(Interval a) { return ia::exp(a); }

} // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        Isa::Scalar,
        "scalar",
        &binary<ia_add>,
        &binary<ia_sub>,
        &binary<ia_mul>,
        &binary<ia_min>,
        &binary<ia_max>,
        &div_scalar,
        &unary<ia_neg>,
        &unary<ia_abs>,
        &unary<ia_sin>,
        &unary<ia_cos>,
        &unary<ia_exp>,
        &pow_scalar,
        &sqrt_scalar,
        &sum_scalar,
    };
    return table;
}

// Transcendentals have no vector form; vector tables reuse these.
namespace detail {
void scalar_sin(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n) {
    unary<ia_sin>(alo, ahi, olo, ohi, n);
}
void scalar_cos(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n) {
    unary<ia_cos>(alo, ahi, olo, ohi, n);
}
void scalar_exp(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n) {
    unary<ia_exp>(alo, ahi, olo, ohi, n);
}
} // namespace detail

} // namespace dyadint::simd
