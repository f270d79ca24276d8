#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "aniso/geometry.hpp"

using namespace aniso;

TEST_CASE("anisotropy validation and derived quantities") {
    CHECK_THROWS_AS(Anisotropy({}), std::invalid_argument);
    CHECK_THROWS_AS(Anisotropy({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Anisotropy({1.0, -2.0}), std::invalid_argument);
    const Anisotropy a({1.0, 2.0, 0.5});
    CHECK(a.dim() == 3);
    CHECK(a.trace() == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(a.max() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(Anisotropy::isotropic(4).trace() == doctest::Approx(4.0));
}

TEST_CASE("box quasi-norm basics") {
    const Anisotropy iso({1.0, 1.0});
    const double x[2] = {3.0, 4.0};
    CHECK(box_quasi_norm(x, iso) == doctest::Approx(4.0).epsilon(1e-15));

    // exact 1-homogeneity under the dilation
    const Anisotropy a({1.0, 2.0});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0), ts(0.2, 5.0);
    for (int i = 0; i < 500; ++i) {
        const std::vector<double> p{u(rng), u(rng)};
        const double t = ts(rng);
        const double lhs = box_quasi_norm(dilate_point(p, a, t), a);
        const double rhs = t * box_quasi_norm(p, a);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("rho quasi-norm anchors") {
    // isotropic case is the Euclidean norm
    const Anisotropy iso({1.0, 1.0});
    const double x34[2] = {3.0, 4.0};
    CHECK(rho_quasi_norm(x34, iso) == doctest::Approx(5.0).epsilon(1e-10));

    // single-coordinate point: |x1|^2 t^{-2 a1} = 1  =>  t = |x1|^{1/a1}
    const Anisotropy a21({2.0, 1.0});
    const double x20[2] = {2.0, 0.0};
    CHECK(rho_quasi_norm(x20, a21) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const double zero[2] = {0.0, 0.0};
    CHECK(rho_quasi_norm(zero, a21) == 0.0);
}

TEST_CASE("rho quasi-norm matches the a=(1,2) closed form") {
    // t^2 = u solves u^2 - x1^2 u - x2^2 = 0
    const Anisotropy a({1.0, 2.0});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> x{u(rng), u(rng)};
        if (x[0] == 0.0 && x[1] == 0.0) continue;
        const double x1 = x[0] * x[0];
        const double root = (x1 + std::sqrt(x1 * x1 + 4.0 * x[1] * x[1])) / 2.0;
        CHECK(rho_quasi_norm(x, a) == doctest::Approx(std::sqrt(root)).epsilon(1e-12));
    }
}

TEST_CASE("rho solver residual and homogeneity over random anisotropies") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ua(0.5, 3.0), ux(-5.0, 5.0), ut(0.1, 10.0);
    std::uniform_int_distribution<std::size_t> un(1, 4);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t n = un(rng);
        std::vector<double> av(n), x(n);
        for (auto& v : av) v = ua(rng);
        bool zero = true;
        for (auto& v : x) {
            v = ux(rng);
            if (v != 0.0) zero = false;
        }
        if (zero) continue;
        const Anisotropy a(av);
        const double t = rho_quasi_norm(x, a);
        CHECK(std::fabs(rho_residual(x, a, t)) <= 1e-10);
        const double lam = ut(rng);
        const double scaled = rho_quasi_norm(dilate_point(x, a, lam), a);
        CHECK(std::fabs(scaled / (lam * t) - 1.0) <= 1e-8);
    }
}

TEST_CASE("rho and box quasi-norms are equivalent on the unit shell") {
    // on |x|_a = 1 some coordinate has |x_i|^{1/a_i} = 1, so the defining sum
    // at t = 1 is >= 1 and the solution satisfies t >= 1; conversely the sum
    // at t = sqrt(n) is <= 1
    const Anisotropy a({0.7, 1.3, 2.2});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> x{u(rng), u(rng), u(rng)};
        const double bn = box_quasi_norm(x, a);
        if (bn == 0.0) continue;
        const std::vector<double> y = dilate_point(x, a, 1.0 / bn);
        const double ratio = rho_quasi_norm(y, a) / box_quasi_norm(y, a);
        CHECK(ratio >= 1.0 - 1e-12);
        CHECK(ratio <= std::sqrt(3.0) + 1e-12);
    }
}

TEST_CASE("parallelepiped measure and scaling") {
    const Anisotropy a({1.0, 2.0});
    const Parallelepiped e({0.3, -0.7}, 2.0, a);
    CHECK(e.half_widths[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.half_widths[1] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(lebesgue_measure(e) == doctest::Approx(32.0).epsilon(1e-12));  // 2^2 * 2^{1+2}

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.5, 3.0), uc(-2.0, 2.0), ut(0.1, 4.0);
    for (int i = 0; i < 100; ++i) {
        const Anisotropy ar({ua(rng), ua(rng), ua(rng)});
        const Parallelepiped er({uc(rng), uc(rng), uc(rng)}, ut(rng), ar);
        const double m = lebesgue_measure(er);
        CHECK(m == doctest::Approx(8.0 * std::pow(er.t, ar.trace())).epsilon(1e-12));
        for (double lam : {2.0, 3.0, 5.0}) {
            const double ms = lebesgue_measure(scale_parallelepiped(er, lam));
            CHECK(ms == doctest::Approx(std::pow(lam, ar.trace()) * m).epsilon(1e-12));
        }
    }
}

TEST_CASE("parallelepiped containment is boundary-inclusive") {
    const Anisotropy a({1.0, 2.0});
    const Parallelepiped e({0.0, 0.0}, 2.0, a);  // half widths 2 and 4
    const double on_edge[2] = {2.0, 4.0};
    const double inside[2] = {1.9, -3.9};
    const double outside[2] = {2.0001, 0.0};
    CHECK(e.contains(on_edge));
    CHECK(e.contains(inside));
    CHECK(!e.contains(outside));
}

TEST_CASE("dilation of points") {
    const Anisotropy a({1.0, 2.0});
    const double x[2] = {1.0, 1.0};
    const auto y = dilate_point(x, a, 3.0);
    CHECK(y[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(9.0).epsilon(1e-15));
    CHECK_THROWS_AS(dilate_point(x, a, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(scale_parallelepiped(Parallelepiped({0.0, 0.0}, 1.0, a), -1.0),
                    std::invalid_argument);
}
