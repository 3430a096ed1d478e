#include "topoalign/kernels.hpp"

namespace topoalign::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sqnorm(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

double sqdist(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void edge_dots(const double* xa, const double* xb, const double* ya, const double* yb,
               std::size_t n, double& uv, double& uu, double& vv) {
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = xa[i] - xb[i];
        const double v = ya[i] - yb[i];
        suv += u * v;
        suu += u * u;
        svv += v * v;
    }
    uv = suv;
    uu = suu;
    vv = svv;
}

void combine_diffs(double cu, const double* xa, const double* xb,
                   double cv, const double* ya, const double* yb,
                   double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = cu * (xa[i] - xb[i]) + cv * (ya[i] - yb[i]);
}

void combine_diffs2(double a1, double b1, double a2, double b2,
                    const double* xa, const double* xb, const double* ya, const double* yb,
                    double* t1, double* t2, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double u = xa[i] - xb[i];
        const double v = ya[i] - yb[i];
        t1[i] = a1 * u + b1 * v;
        t2[i] = a2 * u + b2 * v;
    }
}

} // namespace topoalign::kernels::scalar
