#include "dynbif/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynbif/rng.hpp"

namespace dynbif {

const char* to_string(TerminalStatus s) {
    switch (s) {
        case TerminalStatus::ConvergedToEquilibrium: return "converged-to-equilibrium";
        case TerminalStatus::HorizonReached: return "horizon-reached";
        case TerminalStatus::NormBudgetExceeded: return "norm-budget-exceeded";
    }
    return "unknown";
}

Eigen::VectorXd vector_field(const SpectralDomain& d, const NonlinearityFamily& fam,
                             double lambda, const Eigen::VectorXd& state) {
    const int m = d.mode_count();
    if (state.size() != m) throw InvalidArgument("state dimension mismatch");
    Eigen::VectorXd u = d.synthesize(state);
    for (int i = 0; i < u.size(); ++i) u[i] = fam.f(lambda, u[i]);
    Eigen::VectorXd fhat = d.project(u);
    Eigen::VectorXd rhs(m);
    for (int j = 0; j < m; ++j)
        rhs[j] = (fhat[j] - d.eigenvalue(j) * state[j]) / (1.0 + d.eigenvalue(j));
    return rhs;
}

double energy(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
              const Eigen::VectorXd& state) {
    Eigen::VectorXd u = d.synthesize(state);
    for (int i = 0; i < u.size(); ++i) u[i] = fam.antiderivative(lambda, u[i]);
    return 0.5 * d.v_norm2(state) - d.integrate(u);
}

double dissipation_rate(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
                        const Eigen::VectorXd& state) {
    const Eigen::VectorXd rate = vector_field(d, fam, lambda, state);
    return -(d.h_norm2(rate) + d.v_norm2(rate));
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

TrajectoryRecord integrate(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
                           const Eigen::VectorXd& state0, const FlowControls& controls) {
    if (!(controls.horizon > 0.0) || !(controls.tol > 0.0) || !(controls.norm_budget > 0.0))
        throw InvalidArgument("flow controls must be positive");

    TrajectoryRecord rec;
    const double eq_tol = controls.eq_tol > 0.0 ? controls.eq_tol : controls.tol;
    auto near_stop_point = [&](const Eigen::VectorXd& a) {
        if (controls.stop_near == nullptr) return false;
        for (const Eigen::VectorXd& p : *controls.stop_near)
            if (d.v_norm((a - p).eval()) <= controls.stop_radius) return true;
        return false;
    };
    auto push = [&](double t, const Eigen::VectorXd& a) {
        rec.samples.push_back({t, a, std::sqrt(d.h_norm2(a)), d.v_norm(a),
                               energy(d, fam, lambda, a), dissipation_rate(d, fam, lambda, a)});
    };

    Eigen::VectorXd a = state0;
    double t = 0.0;
    Eigen::VectorXd k1 = vector_field(d, fam, lambda, a);
    push(0.0, a);

    if (k1.norm() <= eq_tol * (1.0 + a.norm())) {
        rec.status = TerminalStatus::ConvergedToEquilibrium;
        return rec;
    }
    if (d.v_norm(a) > controls.norm_budget) {
        rec.status = TerminalStatus::NormBudgetExceeded;
        return rec;
    }

    const double hmax0 = controls.max_step > 0.0 ? controls.max_step : controls.horizon;
    double h = std::min({0.01 * (1.0 + a.norm()) / (1.0 + k1.norm()), hmax0, controls.horizon});

    Eigen::VectorXd k2, k3, k4, k5, k6, k7, anew, err;
    while (controls.horizon - t > 1e-12 * std::max(1.0, t)) {
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationFailure("step size underflow at t=" + std::to_string(t));
        const double ht = std::min(h, controls.horizon - t);

        k2 = vector_field(d, fam, lambda, a + ht * (a21 * k1));
        k3 = vector_field(d, fam, lambda, a + ht * (a31 * k1 + a32 * k2));
        k4 = vector_field(d, fam, lambda, a + ht * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = vector_field(d, fam, lambda, a + ht * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = vector_field(d, fam, lambda,
                          a + ht * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        anew = a + ht * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = vector_field(d, fam, lambda, anew);  // FSAL
        err = ht * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm_err = 0.0;
        if (!anew.allFinite() || !err.allFinite()) {
            norm_err = std::numeric_limits<double>::infinity();
        } else {
            for (int j = 0; j < a.size(); ++j) {
                const double sc =
                    controls.tol * (1.0 + std::max(std::abs(a[j]), std::abs(anew[j])));
                norm_err = std::max(norm_err, std::abs(err[j]) / sc);
            }
        }

        if (norm_err <= 1.0) {
            t += ht;
            a = anew;
            k1 = k7;
            ++rec.accepted_steps;
            push(t, a);

            if (k1.norm() <= eq_tol * (1.0 + a.norm()) || near_stop_point(a)) {
                rec.status = TerminalStatus::ConvergedToEquilibrium;
                return rec;
            }
            if (d.v_norm(a) > controls.norm_budget) {
                rec.status = TerminalStatus::NormBudgetExceeded;
                return rec;
            }
        } else {
            ++rec.rejected_steps;
        }

        const double fac =
            std::isfinite(norm_err)
                ? std::clamp(0.9 * std::pow(std::max(norm_err, 1e-10), -0.2), 0.2, 5.0)
                : 0.2;
        h = std::min(fac * ht, hmax0);
    }
    rec.status = TerminalStatus::HorizonReached;
    return rec;
}

TailDecayReport tail_decay_probe(const SpectralDomain& d, const NonlinearityFamily& fam,
                                 double lambda, const Eigen::VectorXd& state0, int m0,
                                 double horizon, double tol) {
    if (m0 < 0 || m0 >= d.mode_count()) throw InvalidArgument("tail cutoff must satisfy 0 <= m0 < m");

    TailDecayReport rep;
    rep.alpha = std::min(d.eigenvalue(0), 1.0);

    FlowControls controls;
    controls.horizon = horizon;
    const TrajectoryRecord rec = integrate(d, fam, lambda, state0, controls);

    auto tail_energy = [&](const Eigen::VectorXd& a) {
        const auto [h2, v2] = d.tail_norms(a, m0);
        return h2 + v2;
    };
    for (const auto& s : rec.samples) rep.samples.push_back({s.t, tail_energy(s.coeffs)});
    rep.e0 = rep.samples.front().second;

    const double t_end = rep.samples.back().first;
    double acc = 0.0;
    int n = 0;
    for (const auto& [t, e] : rep.samples)
        if (t >= 0.9 * t_end) { acc += e; ++n; }
    rep.floor = n > 0 ? acc / n : 0.0;

    rep.envelope_holds = true;
    for (const auto& [t, e] : rep.samples) {
        const double excess = e - (std::exp(-rep.alpha * t) * rep.e0 + rep.floor + tol);
        if (excess > rep.worst_excess) rep.worst_excess = excess;
        if (excess > 0.0 && rep.envelope_holds) {
            rep.envelope_holds = false;
            rep.first_violation_t = t;
        }
    }
    return rep;
}

InfinityStabilityReport infinity_stability_probe(const SpectralDomain& d,
                                                 const NonlinearityFamily& fam, double lambda_lo,
                                                 double lambda_hi, double c,
                                                 const F2Result& certificate, int n_states,
                                                 const InfinityProbeOptions& opts) {
    if (!certificate.pass) throw PreconditionViolation("family lacks an (f2) certificate");
    if (!(c > 0.0)) throw InvalidArgument("energy bound c must be positive");
    const double mu = certificate.mu, eps = certificate.eps;
    const double mu1 = d.eigenvalue(0);
    if (!(2.0 * eps / mu1 <= 0.5 * (mu - 2.0)))
        throw PreconditionViolation(
            "(f2) certificate eps too large: need 2 eps / mu_1 <= (mu - 2)/2");

    InfinityStabilityReport rep;
    rep.c_prime = 2.0 * (c * mu + certificate.c_eps * d.domain_measure());
    rep.r0 = 2.0 * std::sqrt(rep.c_prime / (mu - 2.0));
    rep.r1_factor = std::sqrt((mu1 + 1.0) / mu1);

    const int m = d.mode_count();
    Rng rng(opts.seed);

    // d/dt(|u|^2 + ||u||^2) from the vector field
    auto growth = [&](double lambda, const Eigen::VectorXd& a) {
        const Eigen::VectorXd rate = vector_field(d, fam, lambda, a);
        double g = 0.0;
        for (int j = 0; j < m; ++j) g += 2.0 * (1.0 + d.eigenvalue(j)) * a[j] * rate[j];
        return g;
    };

    // A state on the J = 0 shell along a random direction: J(r v) rises from
    // 0 then crosses zero again where the potential term overtakes; bisect
    // that sign change. The mode-weight exponent is itself randomized so the
    // draws range from low-mode bumps to high-mode states, where the
    // zero-energy shell reaches large norms.
    auto draw_state = [&](double lambda, double r_min, Eigen::VectorXd& out) -> bool {
        const double w = rng.uniform(-1.0, 1.5);
        Eigen::VectorXd v(m);
        for (int j = 0; j < m; ++j) v[j] = rng.gaussian() * std::pow(d.eigenvalue(j), w);
        const double vn = d.v_norm(v);
        if (vn <= 0.0) return false;
        v /= vn;
        auto J = [&](double r) { return energy(d, fam, lambda, (r * v).eval()); };
        double lo = 1.0, hi = 1.0;
        int guard = 0;
        while (J(hi) > 0.0 && guard++ < 60) hi *= 2.0;
        if (J(hi) > 0.0) return false;
        if (J(lo) <= 0.0) {
            // shell starts below 1; walk down for a bracket
            while (J(lo) <= 0.0 && lo > 1e-8) lo *= 0.5;
            if (J(lo) <= 0.0) return false;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (J(mid) > 0.0 ? lo : hi) = mid;
        }
        const double r = 0.5 * (lo + hi);
        if (r < r_min) return false;
        out = r * v;
        return true;
    };

    // pointwise differential inequality on the sampled shell states
    rep.pointwise_holds = true;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    int checked = 0, attempts = 0;
    const int max_attempts = 200 * std::max(n_states, 1);
    while (checked < n_states && attempts < max_attempts) {
        ++attempts;
        const double lambda =
            lambda_lo + (lambda_hi - lambda_lo) *
                            ((attempts - 1) % opts.lambda_samples) / std::max(1, opts.lambda_samples - 1);
        Eigen::VectorXd u;
        if (!draw_state(lambda, rep.r0, u)) continue;
        ++checked;
        const double lhs = growth(lambda, u);
        const double rhs = 0.5 * (mu - 2.0) * d.v_norm2(u) - rep.c_prime - opts.tol;
        const double slack = lhs - rhs;
        rep.worst_slack = std::min(rep.worst_slack, slack);
        if (slack < 0.0) rep.pointwise_holds = false;
    }
    rep.states_checked = checked;

    // trajectory check: start on the J = 0 shell above radius_factor * R1
    // (with R = r0, R1 = r1_factor * R) and verify the orbit keeps ||u|| > R
    // while it remains in M_c
    rep.trajectory_holds = true;
    rep.min_norm_along = std::numeric_limits<double>::infinity();
    const double R = rep.r0;
    const double start_min = opts.radius_factor * rep.r1_factor * R;
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
        const double lambda = lambda_lo + (lambda_hi - lambda_lo) * rep_i / 2.0;
        Eigen::VectorXd u;
        bool ok = false;
        for (int tries = 0; tries < 400 && !ok; ++tries) ok = draw_state(lambda, start_min, u);
        if (!ok) continue;
        FlowControls fc;
        fc.horizon = opts.horizon;
        // escaping orbits of a focusing nonlinearity blow up in finite time;
        // the budget cuts the run well after the |J| <= c segment of interest
        fc.norm_budget = 100.0 * d.v_norm(u);
        fc.tol = 1e-8;
        const TrajectoryRecord rec = integrate(d, fam, lambda, u, fc);
        for (const auto& s : rec.samples) {
            if (std::abs(s.energy) > c) break;  // left M_c
            rep.min_norm_along = std::min(rep.min_norm_along, s.v_norm);
            if (s.v_norm <= R) rep.trajectory_holds = false;
        }
    }
    if (!std::isfinite(rep.min_norm_along)) rep.min_norm_along = 0.0;
    return rep;
}

}  // namespace dynbif
