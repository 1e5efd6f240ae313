#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opstep/kernels.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

using opstep::kern::KernelSet;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& gen,
                               double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) {
        x = dist(gen);
    }
    return v;
}

// Sizes chosen to hit every remainder of the 4- and 8-wide vector loops.
const std::vector<std::size_t> test_sizes = [] {
    std::vector<std::size_t> s;
    for (std::size_t n = 1; n <= 67; ++n) {
        s.push_back(n);
    }
    s.push_back(255);
    s.push_back(1000);
    return s;
}();

} // namespace

TEST_CASE("scalar kernels are always available and named") {
    const KernelSet& k = opstep::kern::scalar_kernels();
    CHECK(std::string(k.name) == "scalar");
    CHECK(opstep::kern::kernels_by_name("scalar") == &k);
    CHECK(opstep::kern::kernels_by_name("no-such-variant") == nullptr);
}

TEST_CASE("active kernels resolve to a known variant") {
    const KernelSet& k = opstep::kern::active_kernels();
    const std::string name = k.name;
    CHECK((name == "scalar" || name == "avx2" || name == "neon"));
    MESSAGE("active kernel set: ", name);
}

TEST_CASE("scalar dot/combine basics") {
    const KernelSet& k = opstep::kern::scalar_kernels();
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> b = {4.0, -5.0, 6.0};
    CHECK(k.dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
    CHECK(k.dot(a.data(), b.data(), 0) == 0.0);

    std::vector<double> out(3);
    k.combine2(2.0, a.data(), -1.0, b.data(), out.data(), 3);
    CHECK(out[0] == doctest::Approx(-2.0));
    CHECK(out[1] == doctest::Approx(9.0));
    CHECK(out[2] == doctest::Approx(0.0));

    k.combine3(1.0, a.data(), 1.0, b.data(), 0.5, a.data(), out.data(), 3);
    CHECK(out[0] == doctest::Approx(5.5));
    CHECK(out[1] == doctest::Approx(-2.0));
    CHECK(out[2] == doctest::Approx(10.5));
}

TEST_CASE("scalar tridiag_apply matches the stencil by hand") {
    const KernelSet& k = opstep::kern::scalar_kernels();
    const std::vector<double> diag = {2.0, 3.0, 4.0};
    const std::vector<double> off = {-1.0, 0.5};
    const std::vector<double> x = {1.0, 2.0, -1.0};
    std::vector<double> y(3);
    k.tridiag_apply(diag.data(), off.data(), x.data(), y.data(), 3);
    CHECK(y[0] == doctest::Approx(2.0 * 1.0 - 1.0 * 2.0));
    CHECK(y[1] == doctest::Approx(3.0 * 2.0 - 1.0 * 1.0 + 0.5 * (-1.0)));
    CHECK(y[2] == doctest::Approx(4.0 * (-1.0) + 0.5 * 2.0));

    std::vector<double> y1(1);
    k.tridiag_apply(diag.data(), off.data(), x.data(), y1.data(), 1);
    CHECK(y1[0] == doctest::Approx(2.0));
}

// The SIMD variants use FMA, so agreement with the scalar reference is
// magnitude-aware, never bitwise.
TEST_CASE("active kernels agree with the scalar reference on all remainders") {
    const KernelSet& ref = opstep::kern::scalar_kernels();
    const KernelSet& act = opstep::kern::active_kernels();
    std::mt19937_64 gen(12345);

    for (std::size_t n : test_sizes) {
        const std::vector<double> a = random_vec(n, gen);
        const std::vector<double> b = random_vec(n, gen);
        const std::vector<double> c = random_vec(n, gen);

        {
            double mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                mag += std::abs(a[i] * b[i]);
            }
            const double d_ref = ref.dot(a.data(), b.data(), n);
            const double d_act = act.dot(a.data(), b.data(), n);
            CHECK(std::abs(d_ref - d_act) <= 1e-13 * mag + 1e-300);
        }

        if (n >= 1) {
            const std::vector<double> diag = random_vec(n, gen, 1.0, 3.0);
            const std::vector<double> off =
                n > 1 ? random_vec(n - 1, gen) : std::vector<double>{};
            std::vector<double> y_ref(n);
            std::vector<double> y_act(n);
            ref.tridiag_apply(diag.data(), off.data(), a.data(), y_ref.data(),
                              n);
            act.tridiag_apply(diag.data(), off.data(), a.data(), y_act.data(),
                              n);
            for (std::size_t i = 0; i < n; ++i) {
                double rowmag = std::abs(diag[i] * a[i]);
                if (i > 0) {
                    rowmag += std::abs(off[i - 1] * a[i - 1]);
                }
                if (i + 1 < n) {
                    rowmag += std::abs(off[i] * a[i + 1]);
                }
                CHECK(std::abs(y_ref[i] - y_act[i]) <=
                      1e-13 * rowmag + 1e-300);
            }
        }

        {
            std::vector<double> o_ref(n);
            std::vector<double> o_act(n);
            ref.combine2(1.7, a.data(), -2.3, b.data(), o_ref.data(), n);
            act.combine2(1.7, a.data(), -2.3, b.data(), o_act.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                const double mag =
                    std::abs(1.7 * a[i]) + std::abs(2.3 * b[i]);
                CHECK(std::abs(o_ref[i] - o_act[i]) <= 1e-13 * mag + 1e-300);
            }

            ref.combine3(0.3, a.data(), 1.1, b.data(), -0.7, c.data(),
                         o_ref.data(), n);
            act.combine3(0.3, a.data(), 1.1, b.data(), -0.7, c.data(),
                         o_act.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                const double mag = std::abs(0.3 * a[i]) +
                                   std::abs(1.1 * b[i]) +
                                   std::abs(0.7 * c[i]);
                CHECK(std::abs(o_ref[i] - o_act[i]) <= 1e-13 * mag + 1e-300);
            }
        }
    }
}

TEST_CASE("combines tolerate aliased output") {
    const KernelSet& act = opstep::kern::active_kernels();
    std::mt19937_64 gen(777);
    for (std::size_t n : {1u, 5u, 16u, 33u}) {
        const std::vector<double> a = random_vec(n, gen);
        const std::vector<double> b = random_vec(n, gen);

        std::vector<double> fresh(n);
        act.combine2(2.0, a.data(), 3.0, b.data(), fresh.data(), n);
        std::vector<double> aliased = a;
        act.combine2(2.0, aliased.data(), 3.0, b.data(), aliased.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(aliased[i] == fresh[i]);
        }

        std::vector<double> fresh3(n);
        act.combine3(1.0, a.data(), -1.0, b.data(), 0.5, a.data(),
                     fresh3.data(), n);
        std::vector<double> aliased3 = a;
        act.combine3(1.0, aliased3.data(), -1.0, b.data(), 0.5,
                     aliased3.data(), aliased3.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(aliased3[i] == fresh3[i]);
        }
    }
}
