#include <doctest.h>

#include <cmath>
#include <random>

#include "gchtw/equations.hpp"

using namespace gchtw;

TEST_CASE("wave parameters reject c = 0 and non-finite values") {
    CHECK_THROWS_AS(WaveParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WaveParams(1.0, std::nan("")), std::invalid_argument);
    CHECK_NOTHROW(WaveParams(-2.0, 0.0));
}

TEST_CASE("planar systems carry exact polynomial coefficients") {
    const WaveParams p(0.5, 0.014);
    const PlanarSystem s1 = build_system(EquationId::gch1, p);
    CHECK(s1.cls == SystemClass::type_one);
    // numerator 4 phi^2 - 2 y^2 + 0.5 phi + 0.014
    CHECK(s1.numerator(1.0, 1.0) == doctest::Approx(4.0 - 2.0 + 0.5 + 0.014));
    CHECK(s1.numerator(0.0, 0.0) == doctest::Approx(0.014));
    CHECK(s1.denominator(0.25, 0.0) == doctest::Approx(1.0));

    const PlanarSystem s3 = build_system(EquationId::gch3, WaveParams(1.0, 0.0));
    CHECK(s3.cls == SystemClass::type_two);
    CHECK(s3.denominator(2.0, 1.0) == doctest::Approx(1.0 - 4.0 + 1.0));
}

TEST_CASE("type-two systems satisfy the integrability identity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (EquationId eq : {EquationId::gch2, EquationId::gch3}) {
        const WaveParams p(uni(rng) + 3.0, uni(rng));
        const PlanarSystem s = build_system(eq, p);
        // y * df/dphi + dQ/dy == 0 as polynomials
        const Poly2 ident = s.denominator.d_dphi().times_y() + s.numerator.d_dy();
        CHECK(ident.is_zero(1e-14));
        for (int i = 0; i < 100; ++i) {
            const double phi = uni(rng), y = uni(rng);
            const double scale = 1.0 + std::abs(phi) + std::abs(y);
            CHECK(std::abs(ident(phi, y)) <= 1e-12 * scale);
        }
    }
    // gch1 is type one and genuinely not integrable in this sense
    const PlanarSystem s1 = build_system(EquationId::gch1, WaveParams(1.0, 0.1));
    const Poly2 ident1 = s1.denominator.d_dphi().times_y() + s1.numerator.d_dy();
    CHECK_FALSE(ident1.is_zero(1e-14));
}

TEST_CASE("singular sets") {
    SUBCASE("gch1 vertical line with singular points") {
        const auto s = singular_set(EquationId::gch1, WaveParams(1.0, 0.0));
        CHECK(s.kind == SingularSet::Kind::vertical_line);
        CHECK(s.phi_s == doctest::Approx(-0.5));
        CHECK(s.Y == doctest::Approx(0.25));
        REQUIRE(s.singular_points.has_value());
        CHECK((*s.singular_points)[0][1] == doctest::Approx(-0.5));
        CHECK((*s.singular_points)[1][1] == doctest::Approx(0.5));
    }
    SUBCASE("gch1 Y formula (c^2 + 2g)/4") {
        const auto s = singular_set(EquationId::gch1, WaveParams(0.5, 0.014));
        CHECK(s.Y == doctest::Approx(0.0695).epsilon(1e-12));
        CHECK(s.singular_points.has_value());
        // points satisfy the defining equation of the set
        for (const auto& pt : *s.singular_points)
            CHECK(std::abs(pt[0] - s.phi_s) <= 1e-12);
    }
    SUBCASE("gch1 Y <= 0 means no singular points") {
        const auto s = singular_set(EquationId::gch1, WaveParams(1.0, -0.6));
        CHECK_FALSE(s.singular_points.has_value());
    }
    SUBCASE("gch2 line and gch3 hyperbola") {
        const auto s2 = singular_set(EquationId::gch2, WaveParams(3.0, 0.1));
        CHECK(s2.kind == SingularSet::Kind::straight_line);
        CHECK(s2.a * 1.0 + s2.b * 3.5 + s2.d == doctest::Approx(0.0));  // 3+4-7=0
        const auto s3 = singular_set(EquationId::gch3, WaveParams(1.0, 0.0));
        CHECK(s3.kind == SingularSet::Kind::hyperbola);
        CHECK(s3.c_value == doctest::Approx(1.0));
    }
}

TEST_CASE("equilibria reproduce the anchor parameter sets") {
    auto values = [](EquationId eq, double c, double g) {
        std::vector<double> v;
        for (const auto& r : equilibria(eq, WaveParams(c, g))) v.push_back(r.value);
        return v;
    };
    auto v1 = values(EquationId::gch1, 0.5, 0.014);
    REQUIRE(v1.size() == 2);
    CHECK(v1[0] == doctest::Approx(-0.0827).epsilon(5e-3));
    CHECK(v1[1] == doctest::Approx(-0.0423).epsilon(5e-3));

    auto v2 = values(EquationId::gch1, -1.0, 0.06);
    REQUIRE(v2.size() == 2);
    CHECK(v2[0] == doctest::Approx(0.1));
    CHECK(v2[1] == doctest::Approx(0.15));

    auto v3 = values(EquationId::gch2, -1.0, -1.25);
    REQUIRE(v3.size() == 2);
    CHECK(v3[0] == doctest::Approx(-0.3377).epsilon(1e-3));
    CHECK(v3[1] == doctest::Approx(0.4627).epsilon(1e-3));

    auto v4 = values(EquationId::gch3, 2.0, 0.8);
    REQUIRE(v4.size() == 3);
    CHECK(v4[0] == doctest::Approx(-1.5828).epsilon(1e-3));
    CHECK(v4[1] == doctest::Approx(0.4436).epsilon(1e-3));
    CHECK(v4[2] == doctest::Approx(1.1391).epsilon(1e-3));

    CHECK(values(EquationId::gch1, 1.0, 1.0).empty());  // c^2 - 16 g < 0
}

TEST_CASE("every equilibrium satisfies the traveling ODE residual") {
    for (EquationId eq : {EquationId::gch1, EquationId::gch2, EquationId::gch3}) {
        for (auto [c, g] : {std::pair{0.5, 0.014}, {-1.0, 0.06}, {3.0, 0.1}, {2.0, 0.8},
                            {0.5, -0.1}}) {
            const WaveParams p(c, g);
            const auto poly = equilibrium_polynomial(eq, p);
            for (const auto& r : equilibria(eq, p)) {
                CHECK(std::abs(traveling_residual(eq, p, r.value, 0.0, 0.0)) <= 1e-10);
                const double bound =
                    1e-12 * std::max(1.0, std::abs(r.value * r.value * r.value));
                CHECK(std::abs(poly_eval(poly, r.value)) <= bound);
            }
        }
    }
}

TEST_CASE("residual vanishes on known exact solutions") {
    SUBCASE("gch3 with g = 0: phi = k1 e^z + k2 e^{-z}") {
        const WaveParams p(1.0, 0.0);
        const double k1 = 0.2, k2 = 0.7, z = 0.3;
        const double phi = k1 * std::exp(z) + k2 * std::exp(-z);
        const double d1 = k1 * std::exp(z) - k2 * std::exp(-z);
        CHECK(std::abs(traveling_residual(EquationId::gch3, p, phi, d1, phi)) <= 1e-10);
    }
    SUBCASE("gch2 with g = 0: two-term left branch") {
        const double c = 0.5, b1 = 0.0821, z = -1.0;
        const WaveParams p(c, 0.0);
        const double b2 = 4.0 * b1 * b1 / (3.0 * c);
        const double phi = b1 * std::exp(z) + b2 * std::exp(2.0 * z);
        const double d1 = b1 * std::exp(z) + 2.0 * b2 * std::exp(2.0 * z);
        const double d2 = b1 * std::exp(z) + 4.0 * b2 * std::exp(2.0 * z);
        CHECK(std::abs(traveling_residual(EquationId::gch2, p, phi, d1, d2)) <= 1e-10);
    }
}

TEST_CASE("gch3 real-root count matches the sign analysis") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> cs(0.2, 3.0), gs(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double c = cs(rng);
        const double g = gs(rng);
        const double bound = (2.0 * c / 3.0) * std::sqrt(c / 3.0);
        if (std::abs(std::abs(g) - bound) < 1e-3) continue;  // skip the boundary
        int count = 0;
        for (const auto& r : equilibria(EquationId::gch3, WaveParams(c, g)))
            count += r.multiplicity;
        CHECK(count == (std::abs(g) < bound ? 3 : 1));
    }
}

TEST_CASE("equilibria are deterministic and sorted") {
    const WaveParams p(2.0, 0.8);
    const auto a = equilibria(EquationId::gch3, p);
    const auto b = equilibria(EquationId::gch3, p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].value == b[i].value);  // bit-identical
        if (i) CHECK(a[i].value > a[i - 1].value);
    }
}
