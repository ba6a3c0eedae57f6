#include "dyadint/batch_eval.hpp"

#include "dyadint/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dyadint {

namespace {
constexpr std::size_t kBlock = 256;
} // namespace

void BoxBatch::set(std::size_t i, const Cell& cell) {
    for (std::size_t j = 0; j < dim_; ++j) {
        lo(j)[i] = cell.lo[j];
        hi(j)[i] = cell.hi[j];
    }
}

BatchEvaluator::BatchEvaluator(const Expr& expr, const simd::KernelTable* kernels)
    : tape_(compile(expr)), kernels_(kernels != nullptr ? kernels : &simd::active_kernels()) {
    if (tape_.code.empty()) {
        throw PreconditionError("cannot evaluate an empty expression");
    }
}

void BatchEvaluator::evaluate(const BoxBatch& boxes, std::span<Interval> out,
                              std::span<std::uint8_t> flags) const {
    if (boxes.dim() != tape_.dim) {
        throw DimensionError("box batch dimension does not match expression");
    }
    const std::size_t n = boxes.size();
    if (out.size() < n || flags.size() < n) {
        throw PreconditionError("output spans too small");
    }
    std::fill(flags.begin(), flags.begin() + static_cast<std::ptrdiff_t>(n), std::uint8_t{0});

    const std::size_t slots = tape_.code.size();
    std::vector<double> work(2 * slots * kBlock);
    std::vector<const double*> slot_lo(slots);
    std::vector<const double*> slot_hi(slots);
    auto buf_lo = [&](std::size_t s) { return work.data() + (2 * s) * kBlock; };
    auto buf_hi = [&](std::size_t s) { return work.data() + (2 * s + 1) * kBlock; };

    // Constants are the same for every block.
    for (std::size_t s = 0; s < slots; ++s) {
        if (tape_.code[s].op == Op::Const) {
            std::fill(buf_lo(s), buf_lo(s) + kBlock, tape_.code[s].c.lo);
            std::fill(buf_hi(s), buf_hi(s) + kBlock, tape_.code[s].c.hi);
        }
    }

    const auto& k = *kernels_;
    for (std::size_t base = 0; base < n; base += kBlock) {
        const std::size_t m = std::min(kBlock, n - base);
        std::uint8_t* fl = flags.data() + base;
        for (std::size_t s = 0; s < slots; ++s) {
            const Instr& ins = tape_.code[s];
            double* olo = buf_lo(s);
            double* ohi = buf_hi(s);
            const double* alo = slot_lo[ins.a];
            const double* ahi = slot_hi[ins.a];
            const double* blo = slot_lo[ins.b];
            const double* bhi = slot_hi[ins.b];
            switch (ins.op) {
            case Op::Const:
                break;
            case Op::Var:
                slot_lo[s] = boxes.lo(ins.n) + base;
                slot_hi[s] = boxes.hi(ins.n) + base;
                continue;
            case Op::Neg:
                k.neg(alo, ahi, olo, ohi, m);
                break;
            case Op::Add:
                k.add(alo, ahi, blo, bhi, olo, ohi, m);
                break;
            case Op::Sub:
                k.sub(alo, ahi, blo, bhi, olo, ohi, m);
                break;
            case Op::Mul:
                k.mul(alo, ahi, blo, bhi, olo, ohi, m);
                break;
            case Op::Div:
                k.div(alo, ahi, blo, bhi, olo, ohi, fl, m);
                break;
            case Op::Abs:
                k.abs(alo, ahi, olo, ohi, m);
                break;
            case Op::Min:
                k.min(alo, ahi, blo, bhi, olo, ohi, m);
                break;
            case Op::Max:
                k.max(alo, ahi, blo, bhi, olo, ohi, m);
                break;
            case Op::Pow:
                k.pow(alo, ahi, ins.n, olo, ohi, m);
                break;
            case Op::Sqrt:
                k.sqrt(alo, ahi, olo, ohi, fl, m);
                break;
            case Op::Sin:
                k.sin(alo, ahi, olo, ohi, m);
                break;
            case Op::Cos:
                k.cos(alo, ahi, olo, ohi, m);
                break;
            case Op::Exp:
                k.exp(alo, ahi, olo, ohi, m);
                break;
            }
            slot_lo[s] = olo;
            slot_hi[s] = ohi;
        }
        const double* rlo = slot_lo[slots - 1];
        const double* rhi = slot_hi[slots - 1];
        for (std::size_t i = 0; i < m; ++i) {
            out[base + i] = {rlo[i], rhi[i]};
            if (!(std::isfinite(rlo[i]) && std::isfinite(rhi[i]))) {
                fl[i] |= kFlagOverflow;
            }
        }
    }
}

} // namespace dyadint
