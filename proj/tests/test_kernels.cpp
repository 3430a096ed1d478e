#include <doctest.h>

#include <cmath>
#include <vector>

#include "topoalign/kernels.hpp"
#include "topoalign/rng.hpp"

using namespace topoalign;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

bool close(double a, double b, double rel = 1e-12) {
    return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

} // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
    Rng rng(42);
    // Lengths straddling the vector widths and remainders.
    for (std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(4), std::size_t(7),
                          std::size_t(8), std::size_t(33), std::size_t(512),
                          std::size_t(513)}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        auto c = random_vec(rng, n);
        auto d = random_vec(rng, n);

        CHECK(close(kernels::dot(a.data(), b.data(), n),
                    kernels::scalar::dot(a.data(), b.data(), n)));
        CHECK(close(kernels::sqnorm(a.data(), n), kernels::scalar::sqnorm(a.data(), n)));
        CHECK(close(kernels::sqdist(a.data(), b.data(), n),
                    kernels::scalar::sqdist(a.data(), b.data(), n)));

        double uv1, uu1, vv1, uv2, uu2, vv2;
        kernels::edge_dots(a.data(), b.data(), c.data(), d.data(), n, uv1, uu1, vv1);
        kernels::scalar::edge_dots(a.data(), b.data(), c.data(), d.data(), n, uv2, uu2, vv2);
        CHECK(close(uv1, uv2));
        CHECK(close(uu1, uu2));
        CHECK(close(vv1, vv2));

        auto y1 = random_vec(rng, n);
        auto y2 = y1;
        kernels::axpy(0.75, a.data(), y1.data(), n);
        kernels::scalar::axpy(0.75, a.data(), y2.data(), n);
        for (std::size_t k = 0; k < n; ++k) CHECK(close(y1[k], y2[k]));

        std::vector<double> o1(n), o2(n);
        kernels::combine_diffs(0.3, a.data(), b.data(), -1.7, c.data(), d.data(), o1.data(), n);
        kernels::scalar::combine_diffs(0.3, a.data(), b.data(), -1.7, c.data(), d.data(),
                                       o2.data(), n);
        for (std::size_t k = 0; k < n; ++k) CHECK(close(o1[k], o2[k]));
    }
}

TEST_CASE("force_scalar switches the active table") {
    kernels::set_force_scalar(true);
    CHECK(std::string(kernels::active_isa()) == "scalar");
    kernels::set_force_scalar(false);
#if defined(__x86_64__)
    // On the CI hosts this resolves to the AVX2 path; on other machines the
    // scalar table is also a valid answer.
    CHECK((std::string(kernels::active_isa()) == "avx2-fma" ||
           std::string(kernels::active_isa()) == "scalar"));
#endif
}

TEST_CASE("kernel identities") {
    Rng rng(7);
    auto a = random_vec(rng, 19);
    auto b = random_vec(rng, 19);
    // sqdist(a,b) = |a|^2 - 2 a.b + |b|^2
    const double lhs = kernels::sqdist(a.data(), b.data(), a.size());
    const double rhs = kernels::sqnorm(a.data(), a.size()) -
                       2.0 * kernels::dot(a.data(), b.data(), a.size()) +
                       kernels::sqnorm(b.data(), b.size());
    CHECK(close(lhs, rhs, 1e-10));
}
