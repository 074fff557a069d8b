#include <cmath>

#include "doctest.h"
#include "rmstable/errors.hpp"
#include "rmstable/spectral.hpp"
#include "rmstable/stable1d.hpp"

using namespace rms;

TEST_CASE("measure validation") {
    CHECK_NOTHROW(validate(Elliptical{1.0, -0.4}, 2));
    CHECK_THROWS_AS(validate(Elliptical{1.0, -0.5}, 2), ParameterError);
    CHECK_THROWS_AS(validate(Elliptical{0.0, 0.0}, 2), ParameterError);
    CHECK_THROWS_AS(validate(DiracIdentity{1.1}, 2), ParameterError);
    CHECK_THROWS_AS(Orbital::from_spectra({{{0.0, 0.0}, 1.0}}), ParameterError);
    CHECK_THROWS_AS(validate(Orbital::from_spectra({{{1.0, 0.0}, 0.6}}), 2), ParameterError);
    CHECK_THROWS_AS(validate(Orbital::from_spectra({{{1.0, 0.0, 2.0}, 1.0}}), 2), ParameterError);
    CHECK(measure_name(Isotropic{}) == "isotropic");
}

TEST_CASE("orbit representatives are normalised") {
    Orbital o = Orbital::from_spectra({{{3.0, 4.0}, 0.5}, {{-1.0, 1.0}, 0.5}});
    CHECK(frobenius_norm(o.orbits[0].representative) == doctest::Approx(1.0));
    CHECK(o.orbits[0].spectrum[0] == doctest::Approx(0.6));
    CHECK(o.orbits[0].spectrum[1] == doctest::Approx(0.8));
}

TEST_CASE("directions have unit norm and the right law") {
    Engine eng(4);
    std::vector<SpectralMeasure> hs{Isotropic{}, Elliptical{1.0, 0.5}, Elliptical{1.0, -0.3}, DiracIdentity{0.7},
                                    Orbital::from_spectra({{{1.0, -1.0}, 0.4}, {{2.0, 1.0}, 0.6}})};
    for (const auto& h : hs) {
        for (int k = 0; k < 500; ++k) {
            HermitianMatrix r = sample_direction(h, 2, 1.3, eng);
            CHECK(frobenius_norm(r) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // Dirac: +I/sqrt(N) with probability p
    int plus = 0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        HermitianMatrix r = sample_direction(DiracIdentity{0.7}, 3, 1.0, eng);
        CHECK(std::abs(r(0, 1)) == 0.0);
        if (r(0, 0).real() > 0) ++plus;
        CHECK(std::abs(std::abs(r(2, 2).real()) - 1.0 / std::sqrt(3.0)) <= 1e-15);
    }
    CHECK(std::abs(plus / double(n) - 0.7) <= 4.0 * std::sqrt(0.21 / n));
    // isotropic: E (diag entry)^2 = 1/N^2
    std::vector<double> d(n);
    for (int k = 0; k < n; ++k) d[k] = std::pow(sample_direction(Isotropic{}, 3, 1.0, eng)(1, 1).real(), 2);
    Estimate e = mean_estimate(d);
    CHECK(std::abs(e.value - 1.0 / 9.0) <= 4.0 * e.std_error);
}

TEST_CASE("Gauss hypergeometric reference values") {
    // 2F1(1,1;2;z) = -log(1-z)/z; 2F1(1/2,1;3/2;-x^2) = atan(x)/x
    CHECK(gauss_2f1(1.0, 1.0, 2.0, -0.5) == doctest::Approx(std::log(1.5) / 0.5).epsilon(1e-14));
    CHECK(gauss_2f1(1.0, 1.0, 2.0, -3.0) == doctest::Approx(std::log(4.0) / 3.0).epsilon(1e-14));
    CHECK(gauss_2f1(1.0, 1.0, 2.0, 0.6) == doctest::Approx(-std::log(0.4) / 0.6).epsilon(1e-13));
    CHECK(gauss_2f1(0.5, 1.0, 1.5, -0.25) == doctest::Approx(std::atan(0.5) / 0.5).epsilon(1e-14));
    CHECK(gauss_2f1(0.5, 1.0, 1.5, -100.0) == doctest::Approx(std::atan(10.0) / 10.0).epsilon(1e-13));
    CHECK(gauss_2f1(2.0, 3.0, 4.0, 0.0) == 1.0);
    CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, 2.0, 1.0), ParameterError);
}

TEST_CASE("elliptical constants reproduce q(S)^{alpha/2}") {
    struct C {
        double sigma, kappa, alpha;
        std::size_t n;
    };
    Engine eng(12);
    for (C c : {C{1.0, 0.0, 1.5, 2}, C{1.0, 0.5, 1.5, 2}, C{0.7, -0.2, 0.8, 2}, C{1.2, 0.3, 1.0, 3}}) {
        EllipticalConstants k = elliptical_constants(c.sigma, c.kappa, c.alpha, c.n);
        CHECK(k.c1 == doctest::Approx(c.alpha / (4.0 * c.sigma * c.sigma)));
        std::vector<double> s(c.n);
        for (std::size_t a = 0; a < c.n; ++a) s[a] = 0.9 - 0.7 * a;
        HermitianMatrix sm = HermitianMatrix::diagonal(s);
        const int n_mc = 60000;
        std::vector<std::complex<double>> z(n_mc);
        for (int i = 0; i < n_mc; ++i)
            z[i] = nu_alpha(c.alpha, trace_product(sm, sample_direction(Elliptical{c.sigma, c.kappa}, c.n, c.alpha, eng)));
        ComplexEstimate e = mean_estimate(z);
        double tr = 0.0, ss = 0.0;
        for (double v : s) tr += v, ss += v * v;
        double q = (c.sigma * c.sigma * ss + c.kappa * tr * tr) / c.alpha;
        CHECK(std::abs(k.gamma_scale * e.value - std::pow(q, c.alpha / 2.0)) <= 4.0 * k.gamma_scale * e.std_error);
    }
}

TEST_CASE("strictness at alpha = 1") {
    Engine eng(2);
    CHECK(check_strict_alpha1(Isotropic{}, 2, 0.02, 20000, eng).is_strict);
    CHECK(check_strict_alpha1(Orbital::from_spectra({{{1.0, -1.0}, 1.0}}), 2, 0.02, 20000, eng).is_strict);
    StrictCheck d = check_strict_alpha1(DiracIdentity{0.9}, 2, 0.02, 20000, eng);
    CHECK_FALSE(d.is_strict);
    CHECK(d.residual == doctest::Approx(0.8).epsilon(0.05));  // |E R|_F = |2p-1|
    CHECK(check_strict_alpha1(DiracIdentity{0.5}, 2, 0.02, 20000, eng).is_strict);
}

TEST_CASE("alpha = 1 shift") {
    Engine eng(8);
    // diagonals of +-I/sqrt(N) have unit norm: no shift
    CHECK(alpha1_shift(DiracIdentity{0.9}, 2, 1.0, 1000, eng).value == doctest::Approx(0.0));
    Estimate iso = alpha1_shift(Isotropic{}, 2, 1.0, 40000, eng);
    CHECK(std::abs(iso.value) <= 4.0 * iso.std_error);
}

TEST_CASE("g_alpha weights") {
    CHECK_FALSE(g_alpha_weight({0.0, 0.0}, 1.2).has_value());
    auto g = g_alpha_weight({3.0, 4.0}, 1.5);
    REQUIRE(g.has_value());
    CHECK(g->direction[0] == doctest::Approx(0.6));
    CHECK(g->weight == doctest::Approx(std::pow(5.0, 1.5)));
}
