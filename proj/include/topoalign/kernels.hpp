#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the geometry and loss code. Every
// kernel has a scalar reference implementation plus (on x86-64) an
// AVX2+FMA variant selected at runtime; the dispatched entry points below
// resolve to the best supported variant on first use. Equivalence between
// the scalar and vector paths is covered by tests/test_kernels.cpp.

namespace topoalign::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n);
double sqnorm(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// Single-pass reductions over the two edge-difference vectors
// u = xa - xb and v = ya - yb:  uv = u.v, uu = u.u, vv = v.v.
void edge_dots(const double* xa, const double* xb, const double* ya, const double* yb,
               std::size_t n, double& uv, double& uu, double& vv);

// out = cu * (xa - xb) + cv * (ya - yb)
void combine_diffs(double cu, const double* xa, const double* xb,
                   double cv, const double* ya, const double* yb,
                   double* out, std::size_t n);

// Two combinations of the same difference vectors in one pass:
// t1 = a1*(xa-xb) + b1*(ya-yb), t2 = a2*(xa-xb) + b2*(ya-yb)
void combine_diffs2(double a1, double b1, double a2, double b2,
                    const double* xa, const double* xb, const double* ya, const double* yb,
                    double* t1, double* t2, std::size_t n);

} // namespace scalar

double dot(const double* a, const double* b, std::size_t n);
double sqnorm(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void edge_dots(const double* xa, const double* xb, const double* ya, const double* yb,
               std::size_t n, double& uv, double& uu, double& vv);
void combine_diffs(double cu, const double* xa, const double* xb,
                   double cv, const double* ya, const double* yb,
                   double* out, std::size_t n);
void combine_diffs2(double a1, double b1, double a2, double b2,
                    const double* xa, const double* xb, const double* ya, const double* yb,
                    double* t1, double* t2, std::size_t n);

// Name of the instruction set the dispatched entry points currently use
// ("avx2-fma" or "scalar").
const char* active_isa();

// Force the scalar reference path (test hook; not thread-safe against
// concurrent kernel calls).
void set_force_scalar(bool force);

} // namespace topoalign::kernels
