#include "topoalign/kernels.hpp"

#include <atomic>

#if defined(__x86_64__) || defined(_M_X64)
#define TOPOALIGN_X86 1
#else
#define TOPOALIGN_X86 0
#endif

namespace topoalign::kernels {

#if TOPOALIGN_X86
namespace avx2 {
double dot(const double*, const double*, std::size_t);
double sqnorm(const double*, std::size_t);
double sqdist(const double*, const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void edge_dots(const double*, const double*, const double*, const double*, std::size_t,
               double&, double&, double&);
void combine_diffs(double, const double*, const double*, double, const double*, const double*,
                   double*, std::size_t);
} // namespace avx2
#endif

namespace {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sqnorm)(const double*, std::size_t);
    double (*sqdist)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*edge_dots)(const double*, const double*, const double*, const double*, std::size_t,
                      double&, double&, double&);
    void (*combine_diffs)(double, const double*, const double*, double, const double*,
                          const double*, double*, std::size_t);
    const char* isa;
};

constexpr KernelTable kScalarTable{scalar::dot,  scalar::sqnorm,    scalar::sqdist,
                                   scalar::axpy, scalar::edge_dots, scalar::combine_diffs,
                                   "scalar"};

KernelTable detect_best() {
#if TOPOALIGN_X86 && defined(__GNUC__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return KernelTable{avx2::dot,  avx2::sqnorm,    avx2::sqdist,
                           avx2::axpy, avx2::edge_dots, avx2::combine_diffs,
                           "avx2-fma"};
#endif
    return kScalarTable;
}

const KernelTable kBestTable = detect_best();

std::atomic<const KernelTable*> g_active{&kBestTable};

const KernelTable& table() { return *g_active.load(std::memory_order_relaxed); }

} // namespace

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

double sqnorm(const double* a, std::size_t n) { return table().sqnorm(a, n); }

double sqdist(const double* a, const double* b, std::size_t n) { return table().sqdist(a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}

void edge_dots(const double* xa, const double* xb, const double* ya, const double* yb,
               std::size_t n, double& uv, double& uu, double& vv) {
    table().edge_dots(xa, xb, ya, yb, n, uv, uu, vv);
}

void combine_diffs(double cu, const double* xa, const double* xb,
                   double cv, const double* ya, const double* yb,
                   double* out, std::size_t n) {
    table().combine_diffs(cu, xa, xb, cv, ya, yb, out, n);
}

const char* active_isa() { return table().isa; }

void set_force_scalar(bool force) {
    g_active.store(force ? &kScalarTable : &kBestTable, std::memory_order_relaxed);
}

} // namespace topoalign::kernels
