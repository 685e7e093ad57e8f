#include "dynbif/conley.hpp"

#include <algorithm>
#include <cmath>

#include "dynbif/equilibria.hpp"

namespace dynbif {

// ---- homotopy-type algebra ----------------------------------------------------

HomotopyType HomotopyType::sphere(int p) {
    if (p < 0) throw InvalidArgument("sphere dimension must be nonnegative");
    HomotopyType h;
    h.factors_ = {p};
    return h;
}

HomotopyType HomotopyType::wedge_of(std::vector<int> sphere_dims) {
    for (int p : sphere_dims)
        if (p < 0) throw InvalidArgument("sphere dimension must be nonnegative");
    HomotopyType h;
    h.factors_ = std::move(sphere_dims);
    std::sort(h.factors_.begin(), h.factors_.end());
    return h;
}

int HomotopyType::sphere_dim() const {
    if (!is_sphere()) throw InvalidArgument("homotopy type is not a single sphere");
    return factors_[0];
}

std::string HomotopyType::to_string() const {
    if (factors_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += " v ";
        s += "S^" + std::to_string(factors_[i]);
    }
    return s;
}

HomotopyType wedge(const HomotopyType& a, const HomotopyType& b) {
    // both factor lists are canonical (sorted), so a single merge suffices
    std::vector<int> f(a.factors().size() + b.factors().size());
    std::merge(a.factors().begin(), a.factors().end(), b.factors().begin(), b.factors().end(),
               f.begin());
    return HomotopyType::wedge_of(std::move(f));
}

std::optional<HomotopyType> factor_through_sphere(const HomotopyType& total,
                                                  const HomotopyType& known) {
    if (!total.is_sphere())
        throw InvalidArgument("factor_through_sphere requires a sphere total");
    if (known.is_zero()) return total;
    if (known == total) return HomotopyType::zero();
    return std::nullopt;  // a sphere admits no nontrivial wedge splitting
}

// ---- index profile --------------------------------------------------------------

double IndexProfile::breakpoint(int i) const {
    if (i < 0 || i > static_cast<int>(upsilon.size()) + 1) throw OutOfRange("breakpoint index");
    if (i == 0) return window_lo;
    if (i == static_cast<int>(upsilon.size()) + 1) return window_hi;
    return upsilon[i - 1];
}

const HomotopyType& IndexProfile::value_at(double lambda) const {
    if (lambda < window_lo || lambda > window_hi)
        throw OutOfRange("lambda outside the profiled window");
    int gap = 0;
    while (gap < static_cast<int>(upsilon.size()) && lambda > upsilon[gap]) ++gap;
    return values[gap];
}

IndexProfile index_profile(const SpectralDomain& d, const NonlinearityFamily& fam,
                           double window_lo, double window_hi,
                           const std::vector<double>& upsilon, const ProfileOptions& opts) {
    if (!(window_lo < window_hi)) throw InvalidArgument("empty profile window");

    IndexProfile prof;
    prof.window_lo = window_lo;
    prof.window_hi = window_hi;
    for (double g : upsilon)
        if (g > window_lo && g < window_hi) prof.upsilon.push_back(g);
    std::sort(prof.upsilon.begin(), prof.upsilon.end());

    for (double g : prof.upsilon)
        if (std::min(g - window_lo, window_hi - g) <= opts.grid_tol)
            throw InvalidArgument("window endpoint coincides with a bifurcation value");

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.mode_count());
    const int gaps = static_cast<int>(prof.upsilon.size()) + 1;
    for (int gi = 0; gi < gaps; ++gi) {
        const double lo = prof.breakpoint(gi);
        const double hi = prof.breakpoint(gi + 1);
        // midpoint plus three confirmation samples; constancy inside a gap is
        // exactly what the continuation property asserts
        const double fracs[4] = {0.5, 0.25, 0.75, 0.125};
        HomotopyType value;
        for (int si = 0; si < 4; ++si) {
            const double lambda = lo + fracs[si] * (hi - lo);
            const Inertia in = linearization_inertia(d, fam, lambda, zero);
            if (!(in.margin > opts.margin_threshold))
                throw ContinuationViolation(
                    "non-hyperbolic trivial equilibrium inside a gap: missed bifurcation value?");
            const HomotopyType h = HomotopyType::sphere(in.morse_index);
            if (si == 0)
                value = h;
            else if (!(h == value))
                throw ContinuationViolation(
                    "index samples disagree inside a gap: truncation too small or missed "
                    "bifurcation value");
        }
        prof.values.push_back(value);
    }
    return prof;
}

Essentiality essential_test(const IndexProfile& profile, double gamma, double grid_tol) {
    const int n = static_cast<int>(profile.upsilon.size());
    int hit = -1;
    for (int i = 0; i < n; ++i)
        if (std::abs(profile.upsilon[i] - gamma) <= grid_tol * (1.0 + std::abs(gamma))) hit = i;
    if (hit < 0) return Essentiality::Undecidable;
    // neighbors closer than the grid can resolve make the one-sided indices
    // unreadable
    const double left_gap = profile.upsilon[hit] - profile.breakpoint(hit);
    const double right_gap = profile.breakpoint(hit + 2) - profile.upsilon[hit];
    if (left_gap <= 10.0 * grid_tol || right_gap <= 10.0 * grid_tol)
        return Essentiality::Undecidable;
    return profile.values[hit] == profile.values[hit + 1] ? Essentiality::Inessential
                                                          : Essentiality::Essential;
}

HypothesesResult check_hypotheses(const IndexProfile& profile, double grid_tol) {
    HypothesesResult res;
    res.h1 = true;
    for (std::size_t i = 0; i + 1 < profile.upsilon.size(); ++i)
        if (profile.upsilon[i + 1] - profile.upsilon[i] <= grid_tol) res.h1 = false;

    res.h2 = true;
    for (const HomotopyType& v : profile.values)
        if (!v.is_sphere()) res.h2 = false;

    // any two gaps are separated by at least one bifurcation value, so (H3)
    // asks for pairwise distinct gap values
    res.h3 = true;
    for (std::size_t i = 0; i < profile.values.size(); ++i)
        for (std::size_t j = i + 1; j < profile.values.size(); ++j)
            if (profile.values[i] == profile.values[j]) res.h3 = false;
    return res;
}

// ---- continuation invariance probe ----------------------------------------------

namespace {

// Multistart enumeration of equilibria with V-norm below the search radius:
// the trivial solution plus Newton runs from axis seeds at several
// amplitudes. Deterministic seed set, deduplicated.
std::vector<Equilibrium> equilibria_in_ball(const SpectralDomain& d,
                                            const NonlinearityFamily& fam, double lambda,
                                            double search_radius, int amplitude_seeds,
                                            double newton_tol) {
    const int m = d.mode_count();
    NewtonOptions nopts;
    nopts.tol = newton_tol;

    std::vector<Equilibrium> found;
    auto try_add = [&](const Equilibrium& eq) {
        if (!eq.converged) return;
        if (eq.v_norm > search_radius) return;
        for (const Equilibrium& other : found)
            if ((other.coeffs - eq.coeffs).norm() < 1e-6 * (1.0 + eq.coeffs.norm())) return;
        found.push_back(eq);
    };

    try_add(newton_solve(d, fam, lambda, Eigen::VectorXd::Zero(m), nopts));
    for (int j = 0; j < m; ++j) {
        const double mu_j = d.eigenvalue(j);
        for (int k = 1; k <= amplitude_seeds; ++k) {
            const double vnorm = search_radius * k / amplitude_seeds;
            const double amp = vnorm / std::sqrt(mu_j);
            for (double sign : {1.0, -1.0}) {
                Eigen::VectorXd guess = Eigen::VectorXd::Zero(m);
                guess[j] = sign * amp;
                try_add(newton_solve(d, fam, lambda, guess, nopts));
            }
        }
    }
    return found;
}

}  // namespace

ContinuationCheckResult continuation_check(const SpectralDomain& d, const NonlinearityFamily& fam,
                                           double a, double b, double radius,
                                           const ContinuationCheckOptions& opts) {
    if (!(a < b)) throw InvalidArgument("empty continuation interval");
    if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");

    const double delta = opts.boundary_fraction * radius;
    ContinuationCheckResult res;

    for (int i = 1; i <= opts.lambda_samples; ++i) {
        const double lambda = a + (b - a) * i / (opts.lambda_samples + 1);
        const auto eqs = equilibria_in_ball(d, fam, lambda, radius + 2.0 * delta,
                                            opts.amplitude_seeds, opts.newton_tol);

        HomotopyType total;  // wedge over equilibria inside the ball
        for (const Equilibrium& eq : eqs) {
            if (eq.v_norm >= radius - delta && eq.v_norm <= radius + delta)
                throw IsolationFailure("equilibrium with V-norm " + std::to_string(eq.v_norm) +
                                       " in the boundary band at lambda=" +
                                       std::to_string(lambda));
            if (eq.v_norm < radius) total = wedge(total, equilibrium_index(eq));
        }
        res.lambdas.push_back(lambda);
        res.samples.push_back(total);
    }

    res.constant = true;
    res.value = res.samples.front();
    for (std::size_t i = 1; i < res.samples.size(); ++i) {
        if (!(res.samples[i] == res.value)) {
            res.constant = false;
            res.violated_at = res.lambdas[i];
            break;
        }
    }
    return res;
}

}  // namespace dynbif
