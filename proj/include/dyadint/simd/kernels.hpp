#ifndef DYADINT_SIMD_KERNELS_HPP
#define DYADINT_SIMD_KERNELS_HPP

// Batch interval kernels over structure-of-arrays operands, plus the
// compensated reduction used for every dyadic sum. The scalar table is the
// reference; vector tables must agree with it bit for bit, which the
// equivalence tests check.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dyadint::simd {

enum class Isa : std::uint8_t { Scalar, Avx2 };

// Result of the canonical compensated summation.
struct SumResult {
    double sum = 0.0;     // Neumaier sum of x
    double abs_sum = 0.0; // plain sum of |x|, for error bounds
};

struct KernelTable {
    Isa isa;
    std::string_view name;

    using Binary = void (*)(const double* alo, const double* ahi, const double* blo, const double* bhi,
                            double* olo, double* ohi, std::size_t n);
    using Unary = void (*)(const double* alo, const double* ahi, double* olo, double* ohi, std::size_t n);
    using Flagged = void (*)(const double* alo, const double* ahi, const double* blo, const double* bhi,
                             double* olo, double* ohi, std::uint8_t* flags, std::size_t n);

    Binary add;
    Binary sub;
    Binary mul;
    Binary min;
    Binary max;
    Flagged div;
    Unary neg;
    Unary abs;
    Unary sin;
    Unary cos;
    Unary exp;
    void (*pow)(const double* alo, const double* ahi, unsigned exponent, double* olo, double* ohi,
                std::size_t n);
    void (*sqrt)(const double* alo, const double* ahi, double* olo, double* ohi, std::uint8_t* flags,
                 std::size_t n);

    // Canonical order: element i goes to lane i % 4, each lane runs its own
    // Neumaier accumulator, lanes are then merged in a fixed order.
    SumResult (*sum)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();

// Null when the build lacks the AVX2 kernels or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

// Best table for this machine. DYADINT_SIMD=scalar forces the reference.
const KernelTable& active_kernels();

namespace detail {

inline constexpr std::size_t kSumLanes = 4;

struct LaneState {
    double s[kSumLanes];
    double c[kSumLanes];
    double a[kSumLanes];
};

// Shared tail of the reduction; both tables call it on their lane states.
SumResult merge_lanes(const LaneState& st, const double* tail, std::size_t tail_n);

} // namespace detail

} // namespace dyadint::simd

#endif
