#include "dynbif/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dynbif {

namespace {

double sgn_pow(double s, double e) {  // |s|^(e-1) * s, continuous odd power
    if (e == 2.0) return s * std::abs(s);
    if (e == 3.0) return s * s * s;
    if (e == 4.0) return s * s * s * std::abs(s);
    if (e == 5.0) return s * s * s * s * s;
    return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), e), s);
}

double abs_pow(double s, double e) {  // |s|^e
    if (e == 1.0) return std::abs(s);
    if (e == 2.0) return s * s;
    if (e == 3.0) return std::abs(s) * s * s;
    if (e == 4.0) return (s * s) * (s * s);
    if (e == 5.0) return (s * s) * (s * s) * std::abs(s);
    if (e == 6.0) return (s * s) * (s * s) * (s * s);
    return std::pow(std::abs(s), e);
}

// log-symmetric sample set: 0 and +/- log-spaced magnitudes up to s_max.
std::vector<double> log_symmetric_grid(double s_max, int n) {
    std::vector<double> s;
    s.push_back(0.0);
    const int half = std::max(2, n / 2);
    const double lo = 1e-3, hi = s_max;
    for (int i = 0; i < half; ++i) {
        const double v = lo * std::pow(hi / lo, static_cast<double>(i) / (half - 1));
        s.push_back(v);
        s.push_back(-v);
    }
    std::sort(s.begin(), s.end());
    return s;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

}  // namespace

// ---- family construction and validation ------------------------------------

NonlinearityFamily NonlinearityFamily::power_law(double alpha, double p, double beta_c, double q) {
    if (!(p > 1.0)) throw InvalidArgument("power-law exponent p must exceed 1");
    if (beta_c != 0.0 && !(q > 1.0 && q < p))
        throw InvalidArgument("secondary exponent must satisfy 1 < q < p");
    NonlinearityFamily fam;
    fam.form_ = Form::PowerLaw;
    fam.name_ = "power_law";
    fam.alpha_ = alpha;
    fam.growth_p_ = p;
    fam.f_ = [alpha, p, beta_c, q](double lambda, double s) {
        return lambda * s + alpha * sgn_pow(s, p) + beta_c * sgn_pow(s, q);
    };
    fam.fp_ = [alpha, p, beta_c, q](double lambda, double s) {
        return lambda + alpha * p * abs_pow(s, p - 1.0) + beta_c * q * abs_pow(s, q - 1.0);
    };
    fam.F_ = [alpha, p, beta_c, q](double lambda, double s) {
        return 0.5 * lambda * s * s + alpha / (p + 1.0) * abs_pow(s, p + 1.0) +
               beta_c / (q + 1.0) * abs_pow(s, q + 1.0);
    };
    fam.dl_ = [](double, double s) { return s; };
    fam.validate();
    return fam;
}

NonlinearityFamily NonlinearityFamily::affine_gain(const ScalarFunction& g,
                                                   const ScalarFunction& f) {
    if (!(g.deriv(0.0) > 0.0)) throw InvalidArgument("affine gain requires g'(0) > 0");
    NonlinearityFamily fam;
    fam.form_ = Form::AffineGain;
    fam.name_ = "affine_gain(" + g.name + "," + f.name + ")";
    fam.growth_p_ = std::max(f.growth_p, g.growth_p);
    fam.declared_mu_ = f.declared_mu;
    fam.gain_sublinear_ = g.sublinear;
    auto gv = g.value, gd = g.deriv, gF = g.antideriv;
    auto fv = f.value, fd = f.deriv, fF = f.antideriv;
    fam.f_ = [gv, fv](double lambda, double s) { return lambda * gv(s) + fv(s); };
    fam.fp_ = [gd, fd](double lambda, double s) { return lambda * gd(s) + fd(s); };
    fam.F_ = [gF, fF](double lambda, double s) { return lambda * gF(s) + fF(s); };
    fam.dl_ = [gv](double, double s) { return gv(s); };
    fam.validate();
    return fam;
}

NonlinearityFamily NonlinearityFamily::custom(std::string name,
                                              std::function<double(double, double)> f,
                                              std::function<double(double, double)> fprime,
                                              std::function<double(double, double)> antideriv,
                                              double growth_p,
                                              std::optional<double> declared_mu) {
    NonlinearityFamily fam;
    fam.form_ = Form::Custom;
    fam.name_ = std::move(name);
    fam.f_ = std::move(f);
    fam.fp_ = std::move(fprime);
    fam.F_ = std::move(antideriv);
    fam.growth_p_ = growth_p;
    fam.declared_mu_ = declared_mu;
    auto fv = fam.f_;
    fam.dl_ = [fv](double lambda, double s) {
        const double h = 1e-6 * (1.0 + std::abs(lambda));
        return (fv(lambda + h, s) - fv(lambda - h, s)) / (2.0 * h);
    };
    fam.validate();
    return fam;
}

void NonlinearityFamily::validate() const {
    const std::vector<double> lambdas = {-2.0, -1.0, 0.0, 0.7, 1.0, 2.0};
    // s grid away from the |s|^(q-1)s kink at 0; the origin itself is covered
    // by the f(lambda, 0) = 0 check.
    std::vector<double> ss;
    for (double v : {0.11, 0.37, 0.9, 2.3, 5.1, 9.7}) {
        ss.push_back(v);
        ss.push_back(-v);
    }
    const double cbrt_eps = 6.0e-6;
    for (double lambda : lambdas) {
        if (std::abs(f_(lambda, 0.0)) > 1e-12)
            throw InvalidArgument("family invalid: f_lambda(0) != 0 at lambda=" +
                                  std::to_string(lambda));
        if (std::abs(F_(lambda, 0.0)) > 1e-12)
            throw InvalidArgument("family invalid: F_lambda(0) != 0");
        for (double s : ss) {
            const double h = cbrt_eps * (1.0 + std::abs(s));
            const double fd = (f_(lambda, s + h) - f_(lambda, s - h)) / (2.0 * h);
            if (std::abs(fd - fp_(lambda, s)) > 1e-6 * (1.0 + std::abs(fp_(lambda, s))))
                throw InvalidArgument("family invalid: f' inconsistent with f");
            const double Fd = (F_(lambda, s + h) - F_(lambda, s - h)) / (2.0 * h);
            if (std::abs(Fd - f_(lambda, s)) > 1e-6 * (1.0 + std::abs(f_(lambda, s))))
                throw InvalidArgument("family invalid: antiderivative inconsistent with f");
        }
    }
}

// ---- registry ---------------------------------------------------------------

namespace {

std::map<std::string, ScalarFunction> build_scalar_registry() {
    std::map<std::string, ScalarFunction> r;
    // gains g (need g'(0) > 0); saturating gains satisfy the sublinear bound
    r["identity"] = {"identity", [](double s) { return s; }, [](double) { return 1.0; },
                     [](double s) { return 0.5 * s * s; }, false, 1.0, std::nullopt};
    r["atan_gain"] = {"atan_gain", [](double s) { return std::atan(s); },
                      [](double s) { return 1.0 / (1.0 + s * s); },
                      [](double s) { return s * std::atan(s) - 0.5 * std::log1p(s * s); },
                      true, 1.0, std::nullopt};
    r["atan_gain2"] = {"atan_gain2", [](double s) { return 2.0 * std::atan(s); },
                       [](double s) { return 2.0 / (1.0 + s * s); },
                       [](double s) { return 2.0 * (s * std::atan(s) - 0.5 * std::log1p(s * s)); },
                       true, 1.0, std::nullopt};
    r["s_plus_s3"] = {"s_plus_s3", [](double s) { return s + s * s * s; },
                      [](double s) { return 1.0 + 3.0 * s * s; },
                      [](double s) { return 0.5 * s * s + 0.25 * s * s * s * s; },
                      false, 3.0, std::nullopt};
    // autonomous parts f (f'(0) contributes a constant offset to beta)
    r["cubic_pos"] = {"cubic_pos", [](double s) { return s * s * s; },
                      [](double s) { return 3.0 * s * s; },
                      [](double s) { return 0.25 * s * s * s * s; }, false, 3.0, 3.0};
    r["cubic_neg"] = {"cubic_neg", [](double s) { return -s * s * s; },
                      [](double s) { return -3.0 * s * s; },
                      [](double s) { return -0.25 * s * s * s * s; }, false, 3.0, 5.0};
    r["quad_cubic"] = {"quad_cubic", [](double s) { return s * s - s * s * s; },
                       [](double s) { return 2.0 * s - 3.0 * s * s; },
                       [](double s) { return s * s * s / 3.0 - 0.25 * s * s * s * s; },
                       false, 3.0, 5.0};
    return r;
}

const std::map<std::string, ScalarFunction>& scalar_registry() {
    static const std::map<std::string, ScalarFunction> r = build_scalar_registry();
    return r;
}

}  // namespace

const ScalarFunction& scalar_function(const std::string& name) {
    auto it = scalar_registry().find(name);
    if (it == scalar_registry().end())
        throw InvalidArgument("unknown scalar function: " + name);
    return it->second;
}

std::vector<std::string> scalar_function_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : scalar_registry()) names.push_back(k);
    return names;
}

NonlinearityFamily custom_family(const std::string& name) {
    if (name == "exp_counterexample") {
        // f = lambda*s + (e^s - 1 - s): smooth, f(.,0)=0, but f' grows
        // exponentially so the polynomial growth bound must fail.
        return NonlinearityFamily::custom(
            "exp_counterexample",
            [](double lambda, double s) { return lambda * s + std::expm1(s) - s; },
            [](double lambda, double s) { return lambda + std::expm1(s); },
            [](double lambda, double s) {
                return 0.5 * lambda * s * s + std::expm1(s) - s - 0.5 * s * s;
            },
            3.0, std::nullopt);
    }
    if (name == "linear") {
        return NonlinearityFamily::custom(
            "linear", [](double lambda, double s) { return lambda * s; },
            [](double lambda, double) { return lambda; },
            [](double lambda, double s) { return 0.5 * lambda * s * s; }, 1.0, std::nullopt);
    }
    throw InvalidArgument("unknown custom family: " + name);
}

std::vector<std::string> custom_family_names() { return {"exp_counterexample", "linear"}; }

// ---- bifurcation values -----------------------------------------------------

std::vector<double> bifurcation_values(const NonlinearityFamily& fam, const SpectralDomain& d,
                                       int count, const BifurcationOptions& opts) {
    if (count < 1) throw InvalidArgument("bifurcation value count must be >= 1");
    if (count > d.distinct_count())
        throw OutOfRange("fewer distinct eigenvalues retained than requested");

    // monotonicity of beta on the window
    const auto grid = linear_grid(opts.window_lo, opts.window_hi, opts.monotonicity_grid);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(fam.beta(grid[i + 1]) > fam.beta(grid[i])))
            throw HypothesisViolation("beta(lambda) is not strictly increasing on the window");
    }

    std::vector<double> gammas;
    for (int k = 1; k <= count; ++k) {
        const double mu = d.distinct_eigenvalue(k).first;
        double lo = opts.window_lo, hi = opts.window_hi;
        if (fam.beta(lo) > mu || fam.beta(hi) < mu)
            throw WindowExhausted("no bracket for beta(gamma) = mu_k inside the window");
        for (int it = 0; it < 240 && (hi - lo) > opts.root_tol * std::max(1.0, std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (fam.beta(mid) < mu ? lo : hi) = mid;
        }
        gammas.push_back(0.5 * (lo + hi));
    }
    return gammas;
}

// ---- (f1) -------------------------------------------------------------------

F1Result check_f1(const NonlinearityFamily& fam, double lambda_lo, double lambda_hi,
                  const F1Options& opts) {
    F1Result res;
    const double p = fam.growth_exponent();
    const auto lambdas = linear_grid(lambda_lo, lambda_hi, opts.lambda_grid);
    const auto ss = log_symmetric_grid(opts.s_max, opts.s_grid);

    // certifying constants over the bounded grid: a1 caps |f'| on |s| <= 1
    // first, then a2 covers the rest
    double a1 = 0.0, a2 = 0.0;
    for (double lambda : lambdas)
        for (double s : ss)
            if (std::abs(s) <= 1.0) a1 = std::max(a1, std::abs(fam.fprime(lambda, s)));
    for (double lambda : lambdas)
        for (double s : ss)
            if (std::abs(s) > 1.0)
                a2 = std::max(a2, (std::abs(fam.fprime(lambda, s)) - a1) /
                                      std::pow(std::abs(s), p - 1.0));
    a2 = std::max(a2, 0.0);

    // asymptotic log-log slope of |f'| at |s| in {10^1, ..., 10^6}
    const double lam_edge = std::max(std::abs(lambda_lo), std::abs(lambda_hi));
    double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
    int n = 0;
    double worst_s = 0.0, worst_lambda = 0.0, worst_ratio = 0.0;
    for (int e = 1; e <= 6; ++e) {
        const double s = std::pow(10.0, e);
        double v = 0.0, v_lambda = 0.0;
        for (double sign : {1.0, -1.0})
            for (double lambda : {lambda_lo, 0.0, lambda_hi}) {
                const double c = std::abs(fam.fprime(lambda, sign * s));
                if (c > v) { v = c; v_lambda = lambda; }
            }
        v = std::min(v, 1e300);  // keep the fit finite past overflow
        const double x = std::log(s), y = std::log(std::max(v, 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++n;
        const double ratio = v / (1.0 + lam_edge + std::pow(s, p - 1.0));
        if (ratio > worst_ratio) { worst_ratio = ratio; worst_s = s; worst_lambda = v_lambda; }
    }
    res.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    res.a1 = a1;
    res.a2 = a2;
    res.pass = res.fitted_slope <= (p - 1.0) + opts.slope_allowance;
    if (!res.pass) {
        res.witness_lambda = worst_lambda;
        res.witness_s = worst_s;
    }
    return res;
}

// ---- (f2) -------------------------------------------------------------------

F2Result check_f2(const NonlinearityFamily& fam, double lambda_lo, double lambda_hi, double mu,
                  double eps, const F2Options& opts) {
    if (!(mu > 2.0)) throw InvalidArgument("superquadraticity exponent mu must exceed 2");
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    F2Result res;
    res.mu = mu;
    res.eps = eps;

    auto supremand = [&](double lambda, double s) {
        return mu * fam.antiderivative(lambda, s) - s * fam.f(lambda, s) - eps * s * s;
    };

    const auto lambdas = linear_grid(lambda_lo, lambda_hi, opts.lambda_grid);
    const auto ss = log_symmetric_grid(opts.s_max, opts.s_grid);
    double sup = 0.0;
    std::size_t arg_s = 0;
    for (double lambda : lambdas)
        for (std::size_t i = 0; i < ss.size(); ++i) {
            const double v = supremand(lambda, ss[i]);
            if (v > sup) { sup = v; arg_s = i; }
        }
    // Polish interior maxima by golden-section around the grid argmax. The
    // supremand is linear in lambda for every registered form, so checking
    // the window edges (plus the grid argmax lambda) captures the sup.
    auto polish = [&](double lambda, double lo, double hi) {
        const double gr = 0.6180339887498949;
        double c = hi - gr * (hi - lo), e = lo + gr * (hi - lo);
        for (int it = 0; it < 160; ++it) {
            if (supremand(lambda, c) < supremand(lambda, e))
                lo = c;
            else
                hi = e;
            c = hi - gr * (hi - lo);
            e = lo + gr * (hi - lo);
        }
        return supremand(lambda, 0.5 * (lo + hi));
    };
    if (arg_s > 0 && arg_s + 1 < ss.size()) {
        for (double lambda : {lambda_lo, lambda_hi})
            sup = std::max(sup, polish(lambda, ss[arg_s - 1], ss[arg_s + 1]));
    }

    // asymptotic sign condition at geometrically growing |s|: the supremand
    // must eventually stop growing on every lambda edge
    bool diverges = false;
    double wit_l = 0.0, wit_s = 0.0;
    for (double lambda : {lambda_lo, 0.0, lambda_hi}) {
        for (double sign : {1.0, -1.0}) {
            double v4 = supremand(lambda, sign * 1e4);
            double v5 = supremand(lambda, sign * 1e5);
            double v6 = supremand(lambda, sign * 1e6);
            if (v6 > std::max(v5, 0.0) + 1.0 && v5 > std::max(v4, 0.0) + 1.0) {
                diverges = true;
                wit_l = lambda;
                wit_s = sign * 1e6;
            }
        }
    }

    if (diverges) {
        res.pass = false;
        res.witness_lambda = wit_l;
        res.witness_s = wit_s;
    } else {
        res.pass = true;
        res.c_eps = std::max(0.0, sup);
    }
    return res;
}

double suggest_mu(const NonlinearityFamily& fam) {
    const double p = fam.growth_exponent();
    switch (fam.form()) {
        case NonlinearityFamily::Form::PowerLaw:
            if (fam.power_alpha() > 0.0) return 0.5 * (2.0 + (p + 1.0));
            if (fam.power_alpha() < 0.0) return p + 2.0;
            throw PreconditionViolation("power law with alpha = 0 has no leading term");
        case NonlinearityFamily::Form::AffineGain:
            if (fam.declared_mu()) return *fam.declared_mu();
            throw PreconditionViolation("affine gain without a declared mu for its f part");
        case NonlinearityFamily::Form::Custom:
            if (fam.declared_mu()) return *fam.declared_mu();
            throw PreconditionViolation("custom family without declared mu is unsupported");
    }
    throw PreconditionViolation("unreachable");
}

}  // namespace dynbif
