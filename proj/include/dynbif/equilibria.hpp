// Stationary Galerkin problem diag(mu) a = fhat(a), its linearization, Morse
// indices of hyperbolic equilibria, pseudo-arclength continuation with fold /
// index-change / trivial-intersection events, and branch switching at
// near-singular points.
#ifndef DYNBIF_EQUILIBRIA_HPP
#define DYNBIF_EQUILIBRIA_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dynbif/conley.hpp"
#include "dynbif/nonlinearity.hpp"
#include "dynbif/spectral.hpp"

namespace dynbif {

struct Equilibrium {
    double lambda = 0.0;
    Eigen::VectorXd coeffs;
    double residual = 0.0;
    bool converged = false;

    // linearization data: eigenvalues nu of the pencil
    // (F'(u) - diag(mu)) v = nu (I + diag(mu)) v, the flow Jacobian spectrum
    int morse_index = 0;          // #{nu > 0}
    double margin = 0.0;          // min |nu|
    Eigen::VectorXd nu;           // ascending
    Eigen::MatrixXd eigenvectors; // columns match nu, unit Euclidean norm

    double h_norm = 0.0;
    double v_norm = 0.0;
};

struct NewtonOptions {
    double tol = 1e-10;  // residual <= tol * (1 + ||a||)
    int max_iterations = 50;
};

// Damped Newton on R(a) = diag(mu) a - fhat(a); a non-converged result is
// returned flagged rather than thrown.
Equilibrium newton_solve(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
                         const Eigen::VectorXd& guess, const NewtonOptions& opts = {});

struct Inertia {
    int morse_index = 0;
    double margin = 0.0;
    Eigen::VectorXd nu;
    Eigen::MatrixXd eigenvectors;
};

// Spectrum of the symmetric pencil; inertia equals the flow Jacobian's since
// the weight I + diag(mu) is positive definite.
Inertia linearization_inertia(const SpectralDomain& d, const NonlinearityFamily& fam,
                              double lambda, const Eigen::VectorXd& coeffs);

// Sigma^p for a hyperbolic equilibrium; throws NonHyperbolic below the
// margin threshold.
HomotopyType equilibrium_index(const Equilibrium& eq, double margin_threshold = 1e-8);

// ---- continuation -----------------------------------------------------------

enum class BranchEventKind { Fold, IndexChange, TrivialIntersection };

struct BranchEvent {
    BranchEventKind kind;
    double lambda;      // refined location
    double arclength;   // cumulative arclength at the event
    int old_index = 0;  // index-change only
    int new_index = 0;
};

enum class BranchTermination { WindowEdge, NormBudget, StepFailure, MaxSteps };

struct ContinuationControls {
    double ds = 0.05;
    double ds_min = 1e-10;
    double ds_max = 0.0;  // 0 = 40 * ds
    double lambda_lo = -1e9;
    double lambda_hi = 1e9;
    double norm_budget = 1e3;
    int max_steps = 20000;
    double newton_tol = 1e-10;
    double event_tol = 1e-8;      // arclength resolution for event refinement
    double trivial_tol = 1e-6;    // amplitude below which the point counts as trivial
};

struct BranchPoint {
    Equilibrium eq;
    double arclength = 0.0;
    double tangent_lambda = 0.0;  // lambda-component of the unit tangent
    int det_sign = 0;             // sign of det(J_R), for fold diagnostics
};

struct ContinuedBranch {
    std::vector<BranchPoint> points;
    std::vector<BranchEvent> events;
    BranchTermination termination = BranchTermination::MaxSteps;
};

// Pseudo-arclength predictor-corrector; direction = +/-1 orients the initial
// tangent toward increasing/decreasing lambda.
ContinuedBranch continue_branch(const SpectralDomain& d, const NonlinearityFamily& fam,
                                const Equilibrium& start, int direction,
                                const ContinuationControls& controls);

// ---- branch switching -------------------------------------------------------

struct BranchSwitchOptions {
    double delta = 1e-2;       // seed amplitude along kernel directions
    double dlambda = 1e-3;     // parameter offset for the corrected seeds
    double kernel_tol = 1e-6;  // |nu| below this counts as kernel
    int directions_per_dim = 8;
    std::uint64_t seed = 1;    // RNG for kernel dimension >= 3
    double newton_tol = 1e-10;
};

// Newton-corrected seeds along the near-kernel of the linearization at a
// non-hyperbolic point; kernel dimension r = 1 gives the +/- pair, r >= 2 an
// angular grid of 8r directions on the kernel sphere. Seeds that fall back
// onto the base point are discarded; survivors are de-duplicated.
std::vector<Equilibrium> branch_switch(const SpectralDomain& d, const NonlinearityFamily& fam,
                                       double at_lambda, const Eigen::VectorXd& at_coeffs,
                                       const BranchSwitchOptions& opts = {});

}  // namespace dynbif

#endif
