#include "dynbif/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynbif/rng.hpp"

namespace dynbif {

namespace {

// R(a) = diag(mu) a - fhat(a)
Eigen::VectorXd stationary_residual(const SpectralDomain& d, const NonlinearityFamily& fam,
                                    double lambda, const Eigen::VectorXd& a) {
    Eigen::VectorXd u = d.synthesize(a);
    for (int i = 0; i < u.size(); ++i) u[i] = fam.f(lambda, u[i]);
    return d.eigenvalues().cwiseProduct(a) - d.project(u);
}

// F'(a)_{ij} = int f'(u) phi_i phi_j (symmetric)
Eigen::MatrixXd nonlinearity_jacobian(const SpectralDomain& d, const NonlinearityFamily& fam,
                                      double lambda, const Eigen::VectorXd& a) {
    Eigen::VectorXd u = d.synthesize(a);
    for (int i = 0; i < u.size(); ++i) u[i] = fam.fprime(lambda, u[i]);
    // Phi^T diag(w .* f'(u)) Phi computed column by column through project()
    const int m = d.mode_count();
    Eigen::MatrixXd fp(m, m);
    Eigen::VectorXd col(d.grid_size());
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd ej = Eigen::VectorXd::Zero(m);
        ej[j] = 1.0;
        col = d.synthesize(ej).cwiseProduct(u);
        fp.col(j) = d.project(col);
    }
    return 0.5 * (fp + fp.transpose());  // kill quadrature round-off asymmetry
}

// dR/dlambda = -proj(df/dlambda(u))
Eigen::VectorXd residual_dlambda(const SpectralDomain& d, const NonlinearityFamily& fam,
                                 double lambda, const Eigen::VectorXd& a) {
    Eigen::VectorXd u = d.synthesize(a);
    for (int i = 0; i < u.size(); ++i) u[i] = fam.dlambda(lambda, u[i]);
    return -d.project(u);
}

int determinant_sign(const Eigen::MatrixXd& jac) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const auto& m = lu.matrixLU();
    double sign = lu.permutationP().determinant();
    for (int i = 0; i < m.rows(); ++i) sign *= (m(i, i) > 0.0) ? 1.0 : (m(i, i) < 0.0 ? -1.0 : 0.0);
    return sign > 0.0 ? 1 : (sign < 0.0 ? -1 : 0);
}

}  // namespace

Inertia linearization_inertia(const SpectralDomain& d, const NonlinearityFamily& fam,
                              double lambda, const Eigen::VectorXd& coeffs) {
    const int m = d.mode_count();
    Eigen::MatrixXd A = nonlinearity_jacobian(d, fam, lambda, coeffs);
    A.diagonal() -= d.eigenvalues();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    B.diagonal() = d.eigenvalues().array() + 1.0;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, B);
    Inertia in;
    in.nu = solver.eigenvalues();
    in.eigenvectors = solver.eigenvectors();
    for (int j = 0; j < m; ++j) in.eigenvectors.col(j).normalize();
    in.morse_index = 0;
    in.margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        if (in.nu[j] > 0.0) ++in.morse_index;
        in.margin = std::min(in.margin, std::abs(in.nu[j]));
    }
    return in;
}

Equilibrium newton_solve(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
                         const Eigen::VectorXd& guess, const NewtonOptions& opts) {
    if (!guess.allFinite()) throw InvalidArgument("newton guess must be finite");
    const int m = d.mode_count();
    if (guess.size() != m) throw InvalidArgument("guess dimension mismatch");

    Eigen::VectorXd a = guess;
    Eigen::VectorXd r = stationary_residual(d, fam, lambda, a);
    double rn = r.norm();

    bool converged = rn <= opts.tol * (1.0 + a.norm());
    for (int it = 0; it < opts.max_iterations && !converged; ++it) {
        Eigen::MatrixXd jac = -nonlinearity_jacobian(d, fam, lambda, a);
        jac.diagonal() += d.eigenvalues();
        const Eigen::VectorXd step = jac.partialPivLu().solve(-r);

        double s = 1.0;
        while (s > 1e-4) {
            Eigen::VectorXd cand = a + s * step;
            Eigen::VectorXd rc = stationary_residual(d, fam, lambda, cand);
            if (rc.norm() <= (1.0 - 0.25 * s) * rn || rc.norm() < opts.tol) {
                a = cand;
                r = rc;
                rn = rc.norm();
                break;
            }
            s *= 0.5;
        }
        if (s <= 1e-4) break;  // damping exhausted
        converged = rn <= opts.tol * (1.0 + a.norm());
    }

    Equilibrium eq;
    eq.lambda = lambda;
    eq.coeffs = a;
    eq.residual = rn;
    eq.converged = converged;
    eq.h_norm = std::sqrt(d.h_norm2(a));
    eq.v_norm = d.v_norm(a);
    const Inertia in = linearization_inertia(d, fam, lambda, a);
    eq.morse_index = in.morse_index;
    eq.margin = in.margin;
    eq.nu = in.nu;
    eq.eigenvectors = in.eigenvectors;
    return eq;
}

HomotopyType equilibrium_index(const Equilibrium& eq, double margin_threshold) {
    if (!(eq.margin > margin_threshold))
        throw NonHyperbolic("equilibrium is not hyperbolic (margin " +
                            std::to_string(eq.margin) + "); perturb lambda");
    return HomotopyType::sphere(eq.morse_index);
}

// ---- pseudo-arclength continuation -------------------------------------------

namespace {

struct ExtendedPoint {
    Eigen::VectorXd a;
    double lambda;
};

// Correct (a, lambda) onto {R = 0, tau . (x - base) = ds}; returns converged.
bool corrector(const SpectralDomain& d, const NonlinearityFamily& fam, ExtendedPoint& x,
               const ExtendedPoint& base, const Eigen::VectorXd& tau_a, double tau_l, double ds,
               double tol, int max_it) {
    const int m = d.mode_count();
    for (int it = 0; it < max_it; ++it) {
        const Eigen::VectorXd r = stationary_residual(d, fam, x.lambda, x.a);
        const double g =
            tau_a.dot(x.a - base.a) + tau_l * (x.lambda - base.lambda) - ds;
        if (r.norm() <= tol * (1.0 + x.a.norm()) && std::abs(g) <= tol * (1.0 + std::abs(ds)))
            return true;

        Eigen::MatrixXd big(m + 1, m + 1);
        Eigen::MatrixXd jac = -nonlinearity_jacobian(d, fam, x.lambda, x.a);
        jac.diagonal() += d.eigenvalues();
        big.topLeftCorner(m, m) = jac;
        big.block(0, m, m, 1) = residual_dlambda(d, fam, x.lambda, x.a);
        big.block(m, 0, 1, m) = tau_a.transpose();
        big(m, m) = tau_l;

        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = -r;
        rhs[m] = -g;
        const Eigen::VectorXd delta = big.partialPivLu().solve(rhs);
        if (!delta.allFinite()) return false;
        x.a += delta.head(m);
        x.lambda += delta[m];
    }
    return false;
}

// Unit tangent through the bordered system [J_R R_l; tau_prev^T] t = e_{m+1}.
bool tangent(const SpectralDomain& d, const NonlinearityFamily& fam, const ExtendedPoint& x,
             Eigen::VectorXd& tau_a, double& tau_l) {
    const int m = d.mode_count();
    Eigen::MatrixXd big(m + 1, m + 1);
    Eigen::MatrixXd jac = -nonlinearity_jacobian(d, fam, x.lambda, x.a);
    jac.diagonal() += d.eigenvalues();
    big.topLeftCorner(m, m) = jac;
    big.block(0, m, m, 1) = residual_dlambda(d, fam, x.lambda, x.a);
    big.block(m, 0, 1, m) = tau_a.transpose();
    big(m, m) = tau_l;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs[m] = 1.0;
    Eigen::VectorXd t = big.fullPivLu().solve(rhs);
    if (!t.allFinite()) return false;
    const double nrm = t.norm();
    if (!(nrm > 0.0)) return false;
    t /= nrm;
    tau_a = t.head(m);
    tau_l = t[m];
    return true;
}

// Newton on {R(a, lambda) = 0, w.(a - base) = delta}: finds a point on a
// bifurcating branch with prescribed amplitude along w, leaving lambda free.
// Robust where fixed-lambda correction collapses back onto the base branch.
bool amplitude_constrained_solve(const SpectralDomain& d, const NonlinearityFamily& fam,
                                 ExtendedPoint& x, const Eigen::VectorXd& base_a,
                                 const Eigen::VectorXd& w, double delta, double tol,
                                 int max_it = 20) {
    const int m = d.mode_count();
    for (int it = 0; it < max_it; ++it) {
        const Eigen::VectorXd r = stationary_residual(d, fam, x.lambda, x.a);
        const double g = w.dot(x.a - base_a) - delta;
        if (r.norm() <= tol * (1.0 + x.a.norm()) && std::abs(g) <= tol * (1.0 + std::abs(delta)))
            return true;
        Eigen::MatrixXd big(m + 1, m + 1);
        Eigen::MatrixXd jac = -nonlinearity_jacobian(d, fam, x.lambda, x.a);
        jac.diagonal() += d.eigenvalues();
        big.topLeftCorner(m, m) = jac;
        big.block(0, m, m, 1) = residual_dlambda(d, fam, x.lambda, x.a);
        big.block(m, 0, 1, m) = w.transpose();
        big(m, m) = 0.0;
        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = -r;
        rhs[m] = -g;
        const Eigen::VectorXd delta_x = big.fullPivLu().solve(rhs);
        if (!delta_x.allFinite()) return false;
        x.a += delta_x.head(m);
        x.lambda += delta_x[m];
    }
    return false;
}

Equilibrium make_equilibrium(const SpectralDomain& d, const NonlinearityFamily& fam,
                             const ExtendedPoint& x) {
    Equilibrium eq;
    eq.lambda = x.lambda;
    eq.coeffs = x.a;
    eq.residual = stationary_residual(d, fam, x.lambda, x.a).norm();
    eq.converged = true;
    eq.h_norm = std::sqrt(d.h_norm2(x.a));
    eq.v_norm = d.v_norm(x.a);
    const Inertia in = linearization_inertia(d, fam, x.lambda, x.a);
    eq.morse_index = in.morse_index;
    eq.margin = in.margin;
    eq.nu = in.nu;
    eq.eigenvectors = in.eigenvectors;
    return eq;
}

}  // namespace

ContinuedBranch continue_branch(const SpectralDomain& d, const NonlinearityFamily& fam,
                                const Equilibrium& start, int direction,
                                const ContinuationControls& controls) {
    if (!start.converged) throw InvalidArgument("continuation start must be converged");
    if (!(controls.ds > 0.0)) throw InvalidArgument("arclength step must be positive");
    const int m = d.mode_count();
    const double ds_max = controls.ds_max > 0.0 ? controls.ds_max : 40.0 * controls.ds;

    ContinuedBranch branch;
    ExtendedPoint x{start.coeffs, start.lambda};

    // initial tangent from a lambda-oriented bordered solve
    Eigen::VectorXd tau_a = Eigen::VectorXd::Zero(m);
    double tau_l = direction >= 0 ? 1.0 : -1.0;
    if (!tangent(d, fam, x, tau_a, tau_l)) throw HypothesisViolation("singular start point");
    if ((direction >= 0 && tau_l < 0.0) || (direction < 0 && tau_l > 0.0)) {
        tau_a = -tau_a;
        tau_l = -tau_l;
    }

    auto jac_at = [&](const ExtendedPoint& p) {
        Eigen::MatrixXd jac = -nonlinearity_jacobian(d, fam, p.lambda, p.a);
        jac.diagonal() += d.eigenvalues();
        return jac;
    };

    {
        BranchPoint bp;
        bp.eq = make_equilibrium(d, fam, x);
        bp.arclength = 0.0;
        bp.tangent_lambda = tau_l;
        bp.det_sign = determinant_sign(jac_at(x));
        branch.points.push_back(bp);
    }

    double ds = controls.ds;
    double arclength = 0.0;
    branch.termination = BranchTermination::MaxSteps;

    // Bisection refinement via chord correction between two accepted points.
    auto refine_event = [&](const BranchPoint& p1, const BranchPoint& p2,
                            auto&& classify) -> std::optional<ExtendedPoint> {
        // classify(point) -> int; sign differs between p1 and p2
        ExtendedPoint lo{p1.eq.coeffs, p1.eq.lambda}, hi{p2.eq.coeffs, p2.eq.lambda};
        int clo = classify(lo);
        Eigen::VectorXd chord_a = p2.eq.coeffs - p1.eq.coeffs;
        double chord_l = p2.eq.lambda - p1.eq.lambda;
        const double chord_norm =
            std::sqrt(chord_a.squaredNorm() + chord_l * chord_l);
        if (!(chord_norm > 0.0)) return std::nullopt;
        Eigen::VectorXd ta = chord_a / chord_norm;
        double tl = chord_l / chord_norm;
        double lo_s = 0.0, hi_s = chord_norm;
        ExtendedPoint lo_pt = lo, hi_pt = hi;
        for (int it = 0; it < 80 && (hi_s - lo_s) > controls.event_tol; ++it) {
            const double mid_s = 0.5 * (lo_s + hi_s);
            ExtendedPoint mid;
            mid.a = lo.a + (mid_s / chord_norm) * chord_a;
            mid.lambda = lo.lambda + (mid_s / chord_norm) * chord_l;
            if (!corrector(d, fam, mid, lo, ta, tl, mid_s, controls.newton_tol, 12))
                return std::nullopt;
            if (classify(mid) == clo) {
                lo_s = mid_s;
                lo_pt = mid;
            } else {
                hi_s = mid_s;
                hi_pt = mid;
            }
        }
        ExtendedPoint res;
        res.a = 0.5 * (lo_pt.a + hi_pt.a);
        res.lambda = 0.5 * (lo_pt.lambda + hi_pt.lambda);
        return res;
    };

    for (int step = 0; step < controls.max_steps; ++step) {
        // predictor / corrector with step halving
        ExtendedPoint xnew;
        bool ok = false;
        while (ds >= controls.ds_min) {
            xnew.a = x.a + ds * tau_a;
            xnew.lambda = x.lambda + ds * tau_l;
            if (corrector(d, fam, xnew, x, tau_a, tau_l, ds, controls.newton_tol, 8)) {
                ok = true;
                break;
            }
            ds *= 0.5;
        }
        if (!ok) {
            branch.termination = BranchTermination::StepFailure;
            break;
        }

        arclength += ds;
        Eigen::VectorXd tau_a_new = tau_a;
        double tau_l_new = tau_l;
        if (!tangent(d, fam, xnew, tau_a_new, tau_l_new)) {
            branch.termination = BranchTermination::StepFailure;
            break;
        }

        BranchPoint bp;
        bp.eq = make_equilibrium(d, fam, xnew);
        bp.arclength = arclength;
        bp.tangent_lambda = tau_l_new;
        bp.det_sign = determinant_sign(jac_at(xnew));
        const BranchPoint& prev = branch.points.back();

        // fold: lambda component of the tangent changes sign together with
        // the determinant (a trivial-line crossing flips the tangent without
        // flipping the determinant and is not a fold)
        if (prev.tangent_lambda * bp.tangent_lambda < 0.0 &&
            prev.det_sign * bp.det_sign < 0) {
            BranchEvent ev;
            ev.kind = BranchEventKind::Fold;
            ev.arclength = arclength - 0.5 * ds;
            auto fold_side = [&](const ExtendedPoint& p) {
                Eigen::VectorXd ta = tau_a;
                double tl = tau_l;
                tangent(d, fam, p, ta, tl);
                return tl > 0.0 ? 1 : 0;
            };
            auto refined = refine_event(prev, bp, fold_side);
            ev.lambda = refined ? refined->lambda : 0.5 * (prev.eq.lambda + bp.eq.lambda);
            branch.events.push_back(ev);
        }

        // index change: bracketed eigenvalue sign crossing
        if (prev.eq.morse_index != bp.eq.morse_index) {
            BranchEvent ev;
            ev.kind = BranchEventKind::IndexChange;
            ev.old_index = prev.eq.morse_index;
            ev.new_index = bp.eq.morse_index;
            ev.arclength = arclength - 0.5 * ds;
            auto index_of = [&](const ExtendedPoint& p) {
                return linearization_inertia(d, fam, p.lambda, p.a).morse_index ==
                               prev.eq.morse_index
                           ? 0
                           : 1;
            };
            auto refined = refine_event(prev, bp, index_of);
            ev.lambda = refined ? refined->lambda : 0.5 * (prev.eq.lambda + bp.eq.lambda);
            branch.events.push_back(ev);
        }

        // trivial intersection: the curve lands on the origin or passes
        // through it (coefficient vector flips orientation across the step,
        // as a pitchfork branch does at the bifurcation point)
        const double amp_prev = prev.eq.coeffs.norm();
        const double amp_new = bp.eq.coeffs.norm();
        const bool lands = amp_prev >= controls.trivial_tol && amp_new < controls.trivial_tol;
        const bool flips = amp_prev >= controls.trivial_tol && amp_new >= controls.trivial_tol &&
                           prev.eq.coeffs.dot(bp.eq.coeffs) < 0.0;
        if (lands || flips) {
            double ev_lambda = bp.eq.lambda;
            if (flips) {
                // near the crossing the curve is lambda = lambda* + c q^2 in
                // the signed amplitude q along the incoming direction; fit
                // the vertex from the endpoint and a corrected quarter point
                ev_lambda = 0.5 * (prev.eq.lambda + bp.eq.lambda);
                const Eigen::VectorXd w = prev.eq.coeffs / amp_prev;
                const double q1 = amp_prev;
                const Eigen::VectorXd chord_a = bp.eq.coeffs - prev.eq.coeffs;
                const double chord_l = bp.eq.lambda - prev.eq.lambda;
                const double chord_norm =
                    std::sqrt(chord_a.squaredNorm() + chord_l * chord_l);
                const Eigen::VectorXd ta = chord_a / chord_norm;
                const double tl = chord_l / chord_norm;
                ExtendedPoint base{prev.eq.coeffs, prev.eq.lambda};
                ExtendedPoint q3pt;
                q3pt.a = base.a + 0.25 * chord_a;
                q3pt.lambda = base.lambda + 0.25 * chord_l;
                if (corrector(d, fam, q3pt, base, ta, tl, 0.25 * chord_norm,
                              controls.newton_tol, 15)) {
                    const double q3 = w.dot(q3pt.a);
                    const double denom = q1 * q1 - q3 * q3;
                    if (std::abs(denom) > 1e-10 * (q1 * q1 + q3 * q3)) {
                        const double c = (prev.eq.lambda - q3pt.lambda) / denom;
                        ev_lambda = prev.eq.lambda - c * q1 * q1;
                    }
                }
            }
            BranchEvent ev;
            ev.kind = BranchEventKind::TrivialIntersection;
            ev.lambda = ev_lambda;
            ev.arclength = arclength;
            branch.events.push_back(ev);
        }

        branch.points.push_back(bp);
        x = xnew;
        tau_a = tau_a_new;
        tau_l = tau_l_new;

        if (bp.eq.v_norm > controls.norm_budget) {
            branch.termination = BranchTermination::NormBudget;
            break;
        }
        if (bp.eq.lambda < controls.lambda_lo || bp.eq.lambda > controls.lambda_hi) {
            branch.termination = BranchTermination::WindowEdge;
            break;
        }

        ds = std::min(ds * 1.3, ds_max);
    }
    return branch;
}

// ---- branch switching ---------------------------------------------------------

std::vector<Equilibrium> branch_switch(const SpectralDomain& d, const NonlinearityFamily& fam,
                                       double at_lambda, const Eigen::VectorXd& at_coeffs,
                                       const BranchSwitchOptions& opts) {
    if (!(opts.delta > 0.0)) throw InvalidArgument("seed amplitude delta must be positive");
    const Inertia in = linearization_inertia(d, fam, at_lambda, at_coeffs);
    const int m = d.mode_count();

    std::vector<int> kernel;
    for (int j = 0; j < m; ++j)
        if (std::abs(in.nu[j]) <= opts.kernel_tol) kernel.push_back(j);
    const int r = static_cast<int>(kernel.size());
    if (r == 0) throw InvalidArgument("no near-zero eigenvalue at the given point");

    std::vector<Eigen::VectorXd> directions;
    if (r == 1) {
        directions.push_back(in.eigenvectors.col(kernel[0]));
        directions.push_back(-in.eigenvectors.col(kernel[0]));
    } else if (r == 2) {
        const int n = opts.directions_per_dim * r;
        for (int i = 0; i < n; ++i) {
            const double th = 2.0 * 3.141592653589793 * i / n;
            Eigen::VectorXd w = std::cos(th) * in.eigenvectors.col(kernel[0]) +
                                std::sin(th) * in.eigenvectors.col(kernel[1]);
            directions.push_back(w.normalized());
        }
    } else {
        Rng rng(opts.seed);
        const int n = opts.directions_per_dim * r;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
            for (int k : kernel) w += rng.gaussian() * in.eigenvectors.col(k);
            if (w.norm() > 0.0) directions.push_back(w.normalized());
        }
    }

    std::vector<Equilibrium> found;
    auto try_add = [&](const ExtendedPoint& x) {
        Equilibrium eq = make_equilibrium(d, fam, x);
        if (!(eq.residual <= opts.newton_tol * (1.0 + eq.coeffs.norm()))) return;
        if ((eq.coeffs - at_coeffs).norm() <= 0.1 * opts.delta) return;  // base point
        for (const Equilibrium& other : found)
            if (std::abs(other.lambda - eq.lambda) < 1e-9 * (1.0 + std::abs(eq.lambda)) &&
                (other.coeffs - eq.coeffs).norm() < 1e-6 * (1.0 + eq.coeffs.norm()))
                return;
        found.push_back(eq);
    };

    // amplitude-constrained corrections leave lambda free, so each direction
    // lands on its own bifurcating branch regardless of which side of the
    // critical value that branch lives on
    for (const Eigen::VectorXd& w : directions) {
        for (double side : {1.0, -1.0}) {
            ExtendedPoint x{at_coeffs + opts.delta * w, at_lambda + side * opts.dlambda};
            if (amplitude_constrained_solve(d, fam, x, at_coeffs, w, opts.delta,
                                            opts.newton_tol))
                try_add(x);
        }
    }
    return found;
}

}  // namespace dynbif
