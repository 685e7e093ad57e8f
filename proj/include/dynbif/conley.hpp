// Formal homotopy-type algebra on {one-point type, pointed spheres, finite
// wedges of spheres}, plus the trivial-branch index profile, essential-value
// test, (H1)-(H3) checks and the continuation-invariance probe.
#ifndef DYNBIF_CONLEY_HPP
#define DYNBIF_CONLEY_HPP

#include <optional>
#include <string>
#include <vector>

#include "dynbif/errors.hpp"
#include "dynbif/nonlinearity.hpp"
#include "dynbif/spectral.hpp"

namespace dynbif {

// Canonical form: empty factor list = one-point type "0", one factor =
// sphere S^p, several factors = wedge (sorted ascending). The one-point type
// is absorbed by wedge products, so it never appears as a factor.
class HomotopyType {
  public:
    HomotopyType() = default;  // one-point type

    static HomotopyType zero() { return HomotopyType(); }
    static HomotopyType sphere(int p);
    static HomotopyType wedge_of(std::vector<int> sphere_dims);

    bool is_zero() const { return factors_.empty(); }
    bool is_sphere() const { return factors_.size() == 1; }
    int sphere_dim() const;  // throws unless is_sphere()
    const std::vector<int>& factors() const { return factors_; }

    std::string to_string() const;  // "0", "S^p", "S^a v S^b v ..."

    friend bool operator==(const HomotopyType& a, const HomotopyType& b) {
        return a.factors_ == b.factors_;
    }
    friend bool operator!=(const HomotopyType& a, const HomotopyType& b) { return !(a == b); }

  private:
    std::vector<int> factors_;
};

// Index of a disjoint union; the one-point type is the unit.
HomotopyType wedge(const HomotopyType& a, const HomotopyType& b);

// Solve X v known = total within the representable class, total a sphere.
// Returns nullopt when no X exists (the wedge-of-spheres dichotomy forbids
// splitting a sphere into two nontrivial factors).
std::optional<HomotopyType> factor_through_sphere(const HomotopyType& total,
                                                  const HomotopyType& known);

// Conley index of the trivial equilibrium per gap of the bifurcation set.
struct IndexProfile {
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<double> upsilon;       // bifurcation values inside the window, sorted
    std::vector<HomotopyType> values;  // one per gap; size = upsilon.size() + 1

    int gap_count() const { return static_cast<int>(values.size()); }
    // gap i spans (breakpoint(i), breakpoint(i+1))
    double breakpoint(int i) const;
    const HomotopyType& value_at(double lambda) const;
};

struct ProfileOptions {
    double grid_tol = 1e-6;        // minimal gap the sampling can resolve
    double margin_threshold = 1e-8;
};

// Evaluates the trivial-equilibrium index at four interior samples per gap
// (continuation invariance justifies constancy between bifurcation values;
// disagreement raises ContinuationViolation).
IndexProfile index_profile(const SpectralDomain& d, const NonlinearityFamily& fam,
                           double window_lo, double window_hi,
                           const std::vector<double>& upsilon,
                           const ProfileOptions& opts = {});

enum class Essentiality { Essential, Inessential, Undecidable };

Essentiality essential_test(const IndexProfile& profile, double gamma,
                            double grid_tol = 1e-6);

struct HypothesesResult {
    bool h1 = false;  // bifurcation values isolated at grid resolution
    bool h2 = false;  // every gap value is a sphere
    bool h3 = false;  // gap values separated by a bifurcation value differ
};

HypothesesResult check_hypotheses(const IndexProfile& profile, double grid_tol = 1e-6);

struct ContinuationCheckOptions {
    double boundary_fraction = 0.05;  // delta = fraction * R
    int lambda_samples = 20;          // interior sample count
    int amplitude_seeds = 4;          // multistart amplitudes per mode axis
    double newton_tol = 1e-10;
};

struct ContinuationCheckResult {
    bool constant = false;
    HomotopyType value;                 // common value when constant
    std::vector<double> lambdas;        // sampled parameter values
    std::vector<HomotopyType> samples;  // wedge proxy per sample
    double violated_at = 0.0;           // first disagreeing sample when !constant
    bool proxy_only = true;  // Morse-decomposition proxy: exact only without connecting orbits
};

// Total index of all equilibria inside the V-ball of radius R as the wedge of
// their individual indices, sampled at interior lambdas of [a, b]. Throws
// IsolationFailure when any discovered equilibrium has V-norm within
// [R-delta, R+delta] at a sampled lambda.
ContinuationCheckResult continuation_check(const SpectralDomain& d,
                                           const NonlinearityFamily& fam, double a, double b,
                                           double radius,
                                           const ContinuationCheckOptions& opts = {});

}  // namespace dynbif

#endif
