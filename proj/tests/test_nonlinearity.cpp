#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynbif/nonlinearity.hpp"
#include "test_util.hpp"

using namespace dynbif;
using testutil::kPi;

TEST_CASE("beta is the linear gain at the origin") {
    const auto cubic = NonlinearityFamily::power_law(1.0, 3.0);
    CHECK(cubic.beta(7.0) == doctest::Approx(7.0).epsilon(1e-14));

    const auto ag =
        NonlinearityFamily::affine_gain(scalar_function("s_plus_s3"), scalar_function("cubic_pos"));
    CHECK(ag.beta(2.0) == doctest::Approx(2.0).epsilon(1e-14));  // 2 * g'(0), f'(0) = 0

    // monotonicity over a grid is the transversality hypothesis
    for (const auto& fam : {cubic, ag}) {
        double prev = fam.beta(-10.0);
        for (int i = 1; i <= 100; ++i) {
            const double lam = -10.0 + 20.0 * i / 100.0;
            CHECK(fam.beta(lam) > prev);
            prev = fam.beta(lam);
        }
    }
}

TEST_CASE("family construction validates consistency") {
    // f(lambda, 0) must vanish
    CHECK_THROWS_AS(NonlinearityFamily::custom(
                        "bad", [](double, double s) { return s + 1.0; },
                        [](double, double) { return 1.0; },
                        [](double, double s) { return 0.5 * s * s + s; }, 1.0),
                    InvalidArgument);
    // inconsistent derivative
    CHECK_THROWS_AS(NonlinearityFamily::custom(
                        "bad2", [](double l, double s) { return l * s; },
                        [](double l, double) { return 2.0 * l; },
                        [](double l, double s) { return 0.5 * l * s * s; }, 1.0),
                    InvalidArgument);
    CHECK_THROWS_AS(NonlinearityFamily::power_law(1.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(NonlinearityFamily::power_law(1.0, 3.0, 0.5, 4.0), InvalidArgument);
}

TEST_CASE("bifurcation values for beta(lambda) = lambda") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 5);
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    const auto gammas = bifurcation_values(fam, d, 3);
    REQUIRE(gammas.size() == 3);
    CHECK(gammas[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gammas[1] == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(gammas[2] == doctest::Approx(9.0).epsilon(1e-10));
    for (std::size_t k = 0; k < gammas.size(); ++k)
        CHECK(std::abs(fam.beta(gammas[k]) - d.distinct_eigenvalue(k + 1).first) <= 1e-9);
}

TEST_CASE("bifurcation values for an affine gain with g'(0) = 2") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 4);
    const auto fam =
        NonlinearityFamily::affine_gain(scalar_function("atan_gain2"), scalar_function("cubic_neg"));
    const auto gammas = bifurcation_values(fam, d, 2);
    CHECK(gammas[0] == doctest::Approx(0.5).epsilon(1e-10));  // 2 gamma = 1
    CHECK(gammas[1] == doctest::Approx(2.0).epsilon(1e-10));  // 2 gamma = 4
}

TEST_CASE("bifurcation values on the square") {
    const auto d = SpectralDomain::build(DomainSpec::rectangle(kPi, kPi), 6);
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    const auto gammas = bifurcation_values(fam, d, 2);
    CHECK(gammas[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(gammas[1] == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("bifurcation values are strictly increasing") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const auto gammas = bifurcation_values(fam, d, 8);
    for (std::size_t i = 0; i + 1 < gammas.size(); ++i) CHECK(gammas[i] < gammas[i + 1]);
}

TEST_CASE("non-monotone beta raises, exhausted window raises") {
    // decreasing gain violates the monotone hypothesis
    auto bad = NonlinearityFamily::custom(
        "declining", [](double l, double s) { return -l * s; },
        [](double l, double) { return -l; },
        [](double l, double s) { return -0.5 * l * s * s; }, 1.0);
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 3);
    CHECK_THROWS_AS(bifurcation_values(bad, d, 1), HypothesisViolation);

    // saturating beta never reaches mu = 4
    auto sat = NonlinearityFamily::custom(
        "saturating_beta", [](double l, double s) { return 2.0 * std::atan(l) * s; },
        [](double l, double) { return 2.0 * std::atan(l); },
        [](double l, double s) { return std::atan(l) * s * s; }, 1.0);
    CHECK_THROWS_AS(bifurcation_values(sat, d, 2), WindowExhausted);

    CHECK_THROWS_AS(bifurcation_values(bad, d, 4), OutOfRange);
}

TEST_CASE("(f1) passes for power laws with the expected slope") {
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    const auto res = check_f1(fam, -10.0, 10.0);
    CHECK(res.pass);
    CHECK(res.fitted_slope == doctest::Approx(2.0).epsilon(0.05));
    CHECK(res.a2 > 0.0);
}

TEST_CASE("(f1) rejects the exponential counterexample") {
    const auto fam = custom_family("exp_counterexample");
    const auto res = check_f1(fam, -1.0, 1.0);
    CHECK_FALSE(res.pass);
    CHECK(res.witness_s >= 10.0);
}

TEST_CASE("(f1) on the pure linear family admits a2 = 0") {
    const auto fam = custom_family("linear");
    const auto res = check_f1(fam, -1.0, 1.0);
    CHECK(res.pass);
    CHECK(res.a2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("(f2) certificate matches the symbolic supremand for the cubic") {
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    const auto res = check_f2(fam, -5.0, 5.0, 3.0, 1.0);
    REQUIRE(res.pass);
    // oracle: mu F - s f - eps s^2 = (lambda/2 - 1) s^2 - s^4 / 4, maximized
    // over the lambda edge lambda = 5
    double sup = 0.0;
    for (double lambda : {-5.0, 5.0}) {
        for (int i = 0; i <= 200000; ++i) {
            const double s = -20.0 + 40.0 * i / 200000.0;
            sup = std::max(sup, (lambda / 2.0 - 1.0) * s * s - 0.25 * s * s * s * s);
        }
    }
    CHECK(res.c_eps == doctest::Approx(sup).epsilon(1e-6));
    CHECK(res.c_eps == doctest::Approx(2.25).epsilon(1e-6));
}

TEST_CASE("(f2) for the defocusing cubic needs mu > p + 1") {
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    CHECK(check_f2(fam, -5.0, 5.0, 5.0, 1.0).pass);
}

TEST_CASE("(f2) fails when the quartic coefficient flips sign") {
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    const auto res = check_f2(fam, -5.0, 5.0, 10.0, 1.0);
    CHECK_FALSE(res.pass);
    CHECK(std::abs(res.witness_s) == doctest::Approx(1e6));
}

TEST_CASE("(f2) rejects bad arguments") {
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    CHECK_THROWS_AS(check_f2(fam, -1.0, 1.0, 2.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(check_f2(fam, -1.0, 1.0, 3.0, 0.0), InvalidArgument);
}

TEST_CASE("suggested mu per the leading-term rules") {
    CHECK(suggest_mu(NonlinearityFamily::power_law(1.0, 3.0)) == doctest::Approx(3.0));
    CHECK(suggest_mu(NonlinearityFamily::power_law(-2.0, 3.0)) == doctest::Approx(5.0));
    CHECK(suggest_mu(NonlinearityFamily::affine_gain(scalar_function("atan_gain"),
                                                     scalar_function("cubic_pos"))) ==
          doctest::Approx(3.0));
    CHECK_THROWS_AS(suggest_mu(custom_family("linear")), PreconditionViolation);
}

TEST_CASE("suggested mu certifies (f2) across the built-in family sweep") {
    for (double alpha : {0.5, 1.0, 2.0, -0.5, -1.0, -2.0}) {
        for (double p : {2.0, 3.0, 4.0}) {
            const double q = 1.0 + 0.5 * (p - 1.0);
            for (double beta_c : {0.0, 0.3, -0.3}) {
                const auto fam = NonlinearityFamily::power_law(alpha, p, beta_c, q);
                const double mu = suggest_mu(fam);
                const auto res = check_f2(fam, -10.0, 10.0, mu, 1.0);
                CAPTURE(alpha);
                CAPTURE(p);
                CAPTURE(beta_c);
                CHECK(res.pass);
            }
        }
    }
}

TEST_CASE("registry lookups") {
    CHECK_THROWS_AS(scalar_function("nope"), InvalidArgument);
    CHECK_THROWS_AS(custom_family("nope"), InvalidArgument);
    CHECK(scalar_function("atan_gain2").deriv(0.0) == doctest::Approx(2.0));
    CHECK(!scalar_function_names().empty());
    CHECK(!custom_family_names().empty());
}
