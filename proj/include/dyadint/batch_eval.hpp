#ifndef DYADINT_BATCH_EVAL_HPP
#define DYADINT_BATCH_EVAL_HPP

#include "dyadint/expr.hpp"
#include "dyadint/geometry.hpp"
#include "dyadint/simd/kernels.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dyadint {

// Axis-major boxes: lo(j)[i], hi(j)[i] for box i, axis j.
class BoxBatch {
public:
    BoxBatch(std::size_t dim, std::size_t count) : dim_(dim), count_(count), lo_(dim * count), hi_(dim * count) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return count_; }

    double* lo(std::size_t axis) { return lo_.data() + axis * count_; }
    double* hi(std::size_t axis) { return hi_.data() + axis * count_; }
    const double* lo(std::size_t axis) const { return lo_.data() + axis * count_; }
    const double* hi(std::size_t axis) const { return hi_.data() + axis * count_; }

    void set(std::size_t i, const Cell& cell);

private:
    std::size_t dim_;
    std::size_t count_;
    std::vector<double> lo_;
    std::vector<double> hi_;
};

// Lane flags written by BatchEvaluator::evaluate.
inline constexpr std::uint8_t kFlagDomain = 1;   // divisor held 0 or sqrt argument < 0
inline constexpr std::uint8_t kFlagOverflow = 2; // enclosure not finite

// Interval evaluation of one expression over many boxes at once.
// Results equal Expr::eval_interval box by box, bit for bit.
class BatchEvaluator {
public:
    explicit BatchEvaluator(const Expr& expr, const simd::KernelTable* kernels = nullptr);

    std::size_t dim() const noexcept { return tape_.dim; }
    const simd::KernelTable& kernels() const noexcept { return *kernels_; }

    // out and flags must have boxes.size() entries; flags are overwritten.
    void evaluate(const BoxBatch& boxes, std::span<Interval> out, std::span<std::uint8_t> flags) const;

private:
    Tape tape_;
    const simd::KernelTable* kernels_;
};

} // namespace dyadint

#endif
