#include <cstdlib>
#include <cstring>

#include "fsw/kernels.hpp"

namespace fsw::kernels {

namespace {

const Table& choose() {
    const char* force = std::getenv("FSW_KERNELS");
    if (force && std::strcmp(force, "scalar") == 0) return scalar();
#if defined(__x86_64__) || defined(__i386__)
    if (const Table* t = avx2()) {
        __builtin_cpu_init();
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return *t;
    }
#endif
    if (const Table* t = neon()) return *t;
    return scalar();
}

}  // namespace

const Table& active() {
    static const Table& t = choose();
    return t;
}

}  // namespace fsw::kernels
