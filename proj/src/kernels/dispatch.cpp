#include <cstdlib>
#include <cstring>

#include "bss/kernels.hpp"
#include "bss/error.hpp"

namespace bss::kernels {

#if defined(BSS_HAVE_AVX2_KERNELS)
namespace avx2 {
const KernelTable& table();
}
#endif

namespace {

bool force_scalar() {
    const char* v = std::getenv("BSS_FORCE_SCALAR");
    return v != nullptr && *v != '\0' && std::strcmp(v, "0") != 0;
}

}  // namespace

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(BSS_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!isa_supported(isa)) {
        throw InvalidArgument(std::string("kernel variant not available on this CPU: ") +
                              isa_name(isa));
    }
#if defined(BSS_HAVE_AVX2_KERNELS)
    if (isa == Isa::Avx2) return avx2::table();
#endif
    return scalar::table();
}

Isa active_isa() {
    static const Isa isa = [] {
        if (force_scalar()) return Isa::Scalar;
        return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    }();
    return isa;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
    }
    return "unknown";
}

}  // namespace bss::kernels
