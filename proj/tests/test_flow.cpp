#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynbif/flow.hpp"
#include "dynbif/rng.hpp"
#include "test_util.hpp"

using namespace dynbif;
using testutil::kPi;

namespace {

Eigen::VectorXd unit(int m, int j, double amp = 1.0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    v[j] = amp;
    return v;
}

}  // namespace

TEST_CASE("vector field: trivial state, linear family, spectral bound") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 5);
    const auto cubic = NonlinearityFamily::power_law(-1.0, 3.0);
    CHECK(vector_field(d, cubic, 2.0, Eigen::VectorXd::Zero(5)).norm() == 0.0);

    const auto lin = custom_family("linear");
    Rng rng(5);
    Eigen::VectorXd a(5);
    for (int j = 0; j < 5; ++j) a[j] = rng.gaussian();
    const double lambda = 1.7;
    const Eigen::VectorXd rate = vector_field(d, lin, lambda, a);
    for (int j = 0; j < 5; ++j) {
        const double mu = d.eigenvalue(j);
        CHECK(rate[j] == doctest::Approx((lambda - mu) * a[j] / (1.0 + mu)).epsilon(1e-10));
        // the preconditioned linear part has spectrum -mu/(1+mu) in (-1, 0)
        CHECK(mu / (1.0 + mu) > 0.0);
        CHECK(mu / (1.0 + mu) < 1.0);
    }
    CHECK_THROWS_AS(vector_field(d, lin, 1.0, Eigen::VectorXd::Zero(4)), InvalidArgument);
}

TEST_CASE("integrate: subcritical linear flow decays to the origin") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 4);
    const auto lin = custom_family("linear");
    const auto rec = integrate(d, lin, 0.5, unit(4, 0));
    CHECK(rec.status == TerminalStatus::ConvergedToEquilibrium);
    CHECK(rec.back().coeffs.norm() < 1e-6);
    // known decay rate (lambda - mu_1)/(1 + mu_1) = -1/4
    bool checked = false;
    for (const auto& s : rec.samples) {
        if (s.t > 1.0 && s.t < 20.0) {
            CHECK(s.coeffs[0] == doctest::Approx(std::exp(-0.25 * s.t)).epsilon(1e-5));
            checked = true;
        }
    }
    CHECK(checked);
}

TEST_CASE("integrate: one-mode pitchfork amplitude") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 1);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const auto rec = integrate(d, fam, 2.5, unit(1, 0, 0.1));
    CHECK(rec.status == TerminalStatus::ConvergedToEquilibrium);
    // oracle: (lambda - mu_1) a = c3 a^3 with c3 = int phi1^4
    const double c3 = testutil::simpson(
        [](double x) { return std::pow(std::sqrt(2.0 / kPi) * std::sin(x), 4); }, 0.0, kPi);
    const double expected = std::sqrt((2.5 - 1.0) / c3);
    CHECK(expected == doctest::Approx(std::sqrt(kPi)).epsilon(1e-9));
    CHECK(rec.back().coeffs[0] == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("integrate: the origin is stationary and budgets trip") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 3);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const auto rec = integrate(d, fam, 2.5, Eigen::VectorXd::Zero(3));
    CHECK(rec.status == TerminalStatus::ConvergedToEquilibrium);
    CHECK(rec.samples.size() == 1);

    // supercritical linear growth exceeds the V-norm budget
    const auto lin = custom_family("linear");
    FlowControls fc;
    fc.norm_budget = 10.0;
    const auto esc = integrate(d, lin, 3.0, unit(3, 0, 1.0), fc);
    CHECK(esc.status == TerminalStatus::NormBudgetExceeded);

    FlowControls bad;
    bad.horizon = -1.0;
    CHECK_THROWS_AS(integrate(d, lin, 1.0, unit(3, 0), bad), InvalidArgument);
}

TEST_CASE("energy: zero state, linear first mode, decrease along trajectories") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 4);
    const auto lin = custom_family("linear");
    const auto cubic = NonlinearityFamily::power_law(-1.0, 3.0);
    CHECK(energy(d, cubic, 2.0, Eigen::VectorXd::Zero(4)) == 0.0);

    const double lambda = 0.8;
    CHECK(energy(d, lin, lambda, unit(4, 0)) ==
          doctest::Approx(0.5 * (1.0 - lambda)).epsilon(1e-12));

    const auto rec = integrate(d, cubic, 2.5, unit(4, 0, 0.1));
    for (std::size_t i = 1; i < rec.samples.size(); ++i)
        CHECK(rec.samples[i].energy <=
              rec.samples[i - 1].energy + 1e-8 * (1.0 + std::abs(rec.samples[i - 1].energy)));
}

TEST_CASE("dissipation identity against finite differences") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 6);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    Rng rng(11);
    Eigen::VectorXd a0(6);
    for (int j = 0; j < 6; ++j) a0[j] = 0.5 * rng.gaussian();

    FlowControls fc;
    fc.horizon = 5.0;
    fc.max_step = 0.01;  // dense samples so the secant is second-order accurate
    const auto rec = integrate(d, fam, 2.0, a0, fc);
    REQUIRE(rec.samples.size() > 100);
    for (std::size_t i = 0; i + 1 < rec.samples.size(); ++i) {
        const auto& s0 = rec.samples[i];
        const auto& s1 = rec.samples[i + 1];
        if (s1.t - s0.t < 1e-4) continue;  // too short for a meaningful secant
        const double fd = (s1.energy - s0.energy) / (s1.t - s0.t);
        const double diss = 0.5 * (s0.dissipation + s1.dissipation);  // trapezoid mean
        CHECK(fd == doctest::Approx(diss).epsilon(1e-4).scale(1.0 + std::abs(diss)));
        CHECK(s0.dissipation <= 0.0);
    }

    // at an equilibrium the rate vanishes
    const auto eqrec = integrate(d, fam, 2.5, unit(6, 0, 0.1));
    REQUIRE(eqrec.status == TerminalStatus::ConvergedToEquilibrium);
    CHECK(std::abs(dissipation_rate(d, fam, 2.5, eqrec.back().coeffs)) < 1e-12);
}

TEST_CASE("Lyapunov monotonicity over random trajectories") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    Rng rng(2024);
    FlowControls fc;
    fc.horizon = 50.0;
    for (int trial = 0; trial < 20; ++trial) {
        const double lambda = rng.uniform(0.0, 6.0);
        Eigen::VectorXd a0(8);
        for (int j = 0; j < 8; ++j) a0[j] = rng.gaussian();
        a0 *= rng.uniform(0.1, 5.0) / d.v_norm(a0);
        const auto rec = integrate(d, fam, lambda, a0, fc);
        for (std::size_t i = 1; i < rec.samples.size(); ++i)
            CHECK(rec.samples[i].energy <= rec.samples[i - 1].energy +
                                               10.0 * fc.tol *
                                                   (1.0 + std::abs(rec.samples[i - 1].energy)));
    }
}

TEST_CASE("tail decay: linear flow decays the second mode at rate 1.6") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 4);
    const auto lin = custom_family("linear");
    const auto rep = tail_decay_probe(d, lin, 0.0, unit(4, 1), 1, 20.0);
    CHECK(rep.alpha == doctest::Approx(1.0));
    CHECK(rep.envelope_holds);
    CHECK(rep.e0 == doctest::Approx(1.0 + 4.0));  // (1 + mu_2) a^2
    // exact modal decay rate 2 mu_2 / (1 + mu_2) = 1.6 beats the envelope
    for (const auto& [t, e] : rep.samples)
        if (t > 0.1 && t < 10.0)
            CHECK(e == doctest::Approx(rep.e0 * std::exp(-1.6 * t)).epsilon(1e-4));
}

TEST_CASE("tail decay: cubic flow obeys the envelope; zero tail stays at the floor") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    Rng rng(99);
    Eigen::VectorXd a0(8);
    for (int j = 0; j < 8; ++j) a0[j] = rng.gaussian();
    a0 *= 2.0 / d.v_norm(a0);
    const auto rep = tail_decay_probe(d, fam, 2.5, a0, 4, 50.0);
    CHECK(rep.envelope_holds);

    const auto lin = custom_family("linear");
    const auto rep0 = tail_decay_probe(d, lin, 0.5, unit(8, 0), 4, 20.0);
    CHECK(rep0.e0 == 0.0);
    for (const auto& [t, e] : rep0.samples) CHECK(e <= rep0.floor + 1e-12);

    CHECK_THROWS_AS(tail_decay_probe(d, fam, 1.0, a0, 8, 10.0), InvalidArgument);
}

TEST_CASE("stability at infinity: pointwise inequality and trajectory confinement") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 16);
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);  // focusing cubic
    const double mu = 3.0;
    const double eps = d.eigenvalue(0) * (mu - 2.0) / 8.0;  // 2 eps / mu_1 < (mu-2)/2
    const auto cert = check_f2(fam, 0.0, 3.0, mu, eps);
    REQUIRE(cert.pass);

    InfinityProbeOptions opts;
    opts.seed = 31;
    const auto rep = infinity_stability_probe(d, fam, 0.0, 3.0, 2.0, cert, 1000, opts);
    CHECK(rep.states_checked == 1000);
    CHECK(rep.pointwise_holds);
    CHECK(rep.worst_slack >= 0.0);
    CHECK(rep.trajectory_holds);
    CHECK(rep.min_norm_along > rep.r0);
    CHECK(rep.r1_factor == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("stability at infinity: growth of the squared norms for f(s) = s^3") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    // lambda = 0 kills the linear term; the quartic dominates at a huge state
    Eigen::VectorXd a = Eigen::VectorXd::Zero(8);
    a[0] = 50.0;
    const Eigen::VectorXd rate = vector_field(d, fam, 0.0, a);
    double growth = 0.0;
    for (int j = 0; j < 8; ++j) growth += 2.0 * (1.0 + d.eigenvalue(j)) * a[j] * rate[j];
    CHECK(growth > 0.0);
}

TEST_CASE("stability at infinity: precondition checks") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 4);
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    F2Result nocert;
    nocert.pass = false;
    CHECK_THROWS_AS(infinity_stability_probe(d, fam, 0.0, 1.0, 1.0, nocert, 10),
                    PreconditionViolation);
    // eps too large for the lemma's constant
    const auto loose = check_f2(fam, 0.0, 1.0, 3.0, 1.0);
    REQUIRE(loose.pass);
    CHECK_THROWS_AS(infinity_stability_probe(d, fam, 0.0, 1.0, 1.0, loose, 10),
                    PreconditionViolation);
}
