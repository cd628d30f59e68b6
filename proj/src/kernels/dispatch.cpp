#include <cstdlib>
#include <string_view>

#include "destake/kernels.hpp"

namespace destake::kernels {

std::string_view name(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return &scalar::table;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        if (__builtin_cpu_supports("avx2"))
            return &avx2::table;
#endif
        return nullptr;
    case Isa::neon:
#if defined(__aarch64__)
        return &neon::table;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

namespace {

const KernelTable& select() noexcept {
    if (const char* env = std::getenv("DESTAKE_ISA")) {
        const std::string_view want(env);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (want == name(isa)) {
                if (const KernelTable* t = table_for(isa))
                    return *t;
            }
        }
    }
    for (Isa isa : {Isa::avx2, Isa::neon}) {
        if (const KernelTable* t = table_for(isa))
            return *t;
    }
    return scalar::table;
}

} // namespace

const KernelTable& active() noexcept {
    static const KernelTable& chosen = select();
    return chosen;
}

} // namespace destake::kernels
