// Parametric nonlinearity families f_lambda(s): evaluation, the linear gain
// beta(lambda) = f_lambda'(0), bifurcation values beta(gamma_k) = mu_k, and
// the growth/superquadraticity hypothesis checkers.
#ifndef DYNBIF_NONLINEARITY_HPP
#define DYNBIF_NONLINEARITY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dynbif/errors.hpp"
#include "dynbif/spectral.hpp"

namespace dynbif {

// A named scalar function with exact derivative and antiderivative, for the
// affine-gain form f_lambda(s) = lambda*g(s) + f(s). Registration is
// code-level; run configurations refer to these by name.
struct ScalarFunction {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::function<double(double)> antideriv;  // vanishing at 0
    bool sublinear = false;                   // |g(s)| <= c1 + c2|s|^sigma, sigma < 1
    double growth_p = 1.0;                    // polynomial growth degree of value()
    std::optional<double> declared_mu;        // superquadraticity exponent, if known
};

class NonlinearityFamily {
  public:
    enum class Form { PowerLaw, AffineGain, Custom };

    // f_lambda(s) = lambda*s + alpha*|s|^(p-1)*s + beta_c*|s|^(q-1)*s
    static NonlinearityFamily power_law(double alpha, double p, double beta_c = 0.0,
                                        double q = 2.0);
    // f_lambda(s) = lambda*g(s) + f(s), g'(0) > 0
    static NonlinearityFamily affine_gain(const ScalarFunction& g, const ScalarFunction& f);
    // fully custom (lambda, s) |-> value / derivative / antiderivative
    static NonlinearityFamily custom(std::string name,
                                     std::function<double(double, double)> f,
                                     std::function<double(double, double)> fprime,
                                     std::function<double(double, double)> antideriv,
                                     double growth_p,
                                     std::optional<double> declared_mu = std::nullopt);

    double f(double lambda, double s) const { return f_(lambda, s); }
    double fprime(double lambda, double s) const { return fp_(lambda, s); }
    double antiderivative(double lambda, double s) const { return F_(lambda, s); }
    // d f_lambda(s) / d lambda, used by continuation
    double dlambda(double lambda, double s) const { return dl_(lambda, s); }

    double beta(double lambda) const { return fp_(lambda, 0.0); }

    Form form() const { return form_; }
    const std::string& name() const { return name_; }
    double growth_exponent() const { return growth_p_; }
    std::optional<double> declared_mu() const { return declared_mu_; }
    double power_alpha() const { return alpha_; }  // PowerLaw only
    bool gain_sublinear() const { return gain_sublinear_; }

  private:
    NonlinearityFamily() = default;
    void validate() const;  // f(.,0)=0 and derivative/antiderivative consistency

    Form form_ = Form::Custom;
    std::string name_;
    std::function<double(double, double)> f_, fp_, F_, dl_;
    double growth_p_ = 1.0;
    std::optional<double> declared_mu_;
    double alpha_ = 0.0;
    bool gain_sublinear_ = false;
};

// ---- registry of named scalar functions / custom families -----------------

const ScalarFunction& scalar_function(const std::string& name);
NonlinearityFamily custom_family(const std::string& name);
std::vector<std::string> scalar_function_names();
std::vector<std::string> custom_family_names();

// ---- bifurcation values ----------------------------------------------------

struct BifurcationOptions {
    double window_lo = -1e6;
    double window_hi = 1e6;
    int monotonicity_grid = 1000;
    double root_tol = 1e-12;
};

// First `count` solutions of beta(gamma) = mu_k, one per distinct eigenvalue.
// beta must be strictly increasing on the window (checked on a grid).
std::vector<double> bifurcation_values(const NonlinearityFamily& fam, const SpectralDomain& d,
                                       int count, const BifurcationOptions& opts = {});

// ---- hypothesis (f1): |f'(s)| <= a1 + a2 |s|^(p-1) --------------------------

struct F1Options {
    double s_max = 1e3;
    int s_grid = 512;
    int lambda_grid = 129;
    double slope_allowance = 0.1;  // admissible excess over p-1 in the log-log fit
};

struct F1Result {
    bool pass = false;
    double a1 = 0.0, a2 = 0.0;     // certifying constants over the examined grid
    double fitted_slope = 0.0;     // log-log growth rate of |f'| at large |s|
    double witness_lambda = 0.0;   // violating point when !pass
    double witness_s = 0.0;
};

F1Result check_f1(const NonlinearityFamily& fam, double lambda_lo, double lambda_hi,
                  const F1Options& opts = {});

// ---- hypothesis (f2): s f(s) >= mu F(s) - eps s^2 - C_eps -------------------

struct F2Options {
    double s_max = 1e3;
    int s_grid = 512;      // log-symmetric in s to resolve interior maxima
    int lambda_grid = 129;
};

struct F2Result {
    bool pass = false;
    double mu = 0.0, eps = 0.0;
    double c_eps = 0.0;           // max(0, grid sup of mu F - s f - eps s^2)
    double witness_lambda = 0.0;  // divergence witness when !pass
    double witness_s = 0.0;
};

F2Result check_f2(const NonlinearityFamily& fam, double lambda_lo, double lambda_hi, double mu,
                  double eps, const F2Options& opts = {});

// Exponent choice from the leading-term sign analysis: alpha > 0 gives the
// midpoint of (2, p+1), alpha < 0 gives p+2; affine gains inherit the mu of
// their autonomous part. Throws PreconditionViolation when no rule applies.
double suggest_mu(const NonlinearityFamily& fam);

}  // namespace dynbif

#endif
