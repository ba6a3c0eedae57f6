#include "dyadint/simd/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace dyadint::simd {

#if defined(DYADINT_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(DYADINT_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_kernel_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() {
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("DYADINT_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") {
            return &scalar_kernels();
        }
        if (const auto* v = avx2_kernels()) {
            return v;
        }
        return &scalar_kernels();
    }();
    return *chosen;
}

} // namespace dyadint::simd
