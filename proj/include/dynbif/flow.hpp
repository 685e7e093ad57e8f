// Galerkin truncation of the pseudoparabolic flow u_t - Lap u_t - Lap u =
// f_lambda(u). In the H-orthonormal eigenbasis the equation reads
//     (1 + mu_j) da_j/dt + mu_j a_j = fhat_j(a),
// so the linear part has spectrum -mu/(1+mu) in (-1, 0): nonstiff, integrated
// with an adaptive embedded Runge-Kutta pair. The flow is gradient-like for
// J(u) = 1/2 ||u||^2 - int F_lambda(u), with dJ/dt = -(|u_t|^2 + ||u_t||^2).
#ifndef DYNBIF_FLOW_HPP
#define DYNBIF_FLOW_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dynbif/nonlinearity.hpp"
#include "dynbif/spectral.hpp"

namespace dynbif {

// coefficient state of u at one time
struct GalerkinState {
    double t = 0.0;
    Eigen::VectorXd coeffs;
};

enum class TerminalStatus { ConvergedToEquilibrium, HorizonReached, NormBudgetExceeded };

const char* to_string(TerminalStatus s);

struct TrajectorySample {
    double t;
    Eigen::VectorXd coeffs;
    double h_norm;
    double v_norm;
    double energy;
    double dissipation;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;  // one per accepted step, times strictly increasing
    TerminalStatus status = TerminalStatus::HorizonReached;
    int accepted_steps = 0;
    int rejected_steps = 0;

    const TrajectorySample& back() const { return samples.back(); }
};

struct FlowControls {
    double horizon = 1e4;
    double tol = 1e-9;        // per-step error tolerance and equilibrium threshold
    double norm_budget = 1e3; // V-norm cap
    double max_step = 0.0;    // 0 = unlimited (used by tests needing dense output)
    double eq_tol = 0.0;      // equilibrium detection threshold; 0 = tol. Set the
                              // step tolerance tighter than this so the local-error
                              // noise floor sits below the detection level.

    // optional proximity exit: terminate as converged once the state enters
    // the stop_radius V-ball of any listed point (heteroclinic probes use
    // this to skip the stiff final settle onto an already-known equilibrium)
    const std::vector<Eigen::VectorXd>* stop_near = nullptr;
    double stop_radius = 0.0;
};

// da_j/dt = (fhat_j - mu_j a_j) / (1 + mu_j)
Eigen::VectorXd vector_field(const SpectralDomain& d, const NonlinearityFamily& fam,
                             double lambda, const Eigen::VectorXd& state);

// Adaptive Dormand-Prince 5(4); terminates on ||da/dt|| <= tol*(1+||a||),
// the horizon, or the V-norm budget. Throws IntegrationFailure on step-size
// underflow.
TrajectoryRecord integrate(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
                           const Eigen::VectorXd& state0, const FlowControls& controls = {});

// J(u) = 1/2 ||u||^2 - int F_lambda(u)
double energy(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
              const Eigen::VectorXd& state);

// -(|u_t|^2 + ||u_t||^2), always <= 0
double dissipation_rate(const SpectralDomain& d, const NonlinearityFamily& fam, double lambda,
                        const Eigen::VectorXd& state);

// ---- tail decay probe -------------------------------------------------------

struct TailDecayReport {
    double alpha = 0.0;    // envelope rate min(mu_1, 1)
    double e0 = 0.0;       // initial tail energy above mode m0
    double floor = 0.0;    // late-time mean of the tail energy
    bool envelope_holds = false;
    double worst_excess = 0.0;  // max over samples of E(t) - envelope(t)
    double first_violation_t = -1.0;
    std::vector<std::pair<double, double>> samples;  // (t, E)
};

// Samples E(t) = H-tail^2 + V-tail^2 above mode m0 along the trajectory and
// verifies E(t) <= exp(-alpha t) E(0) + floor + tol.
TailDecayReport tail_decay_probe(const SpectralDomain& d, const NonlinearityFamily& fam,
                                 double lambda, const Eigen::VectorXd& state0, int m0,
                                 double horizon, double tol = 1e-8);

// ---- stability at infinity --------------------------------------------------

struct InfinityStabilityReport {
    double r0 = 0.0;           // 2 sqrt(C'_eps / (mu - 2))
    double c_prime = 0.0;      // 2 (c mu + C_eps |Omega|)
    double r1_factor = 0.0;    // sqrt((mu_1 + 1)/mu_1): R_1 = factor * R
    int states_checked = 0;
    bool pointwise_holds = false;
    double worst_slack = 0.0;  // min over states of lhs - rhs
    bool trajectory_holds = false;
    double min_norm_along = 0.0;  // min V-norm along probe trajectories inside M_c
};

struct InfinityProbeOptions {
    int lambda_samples = 5;
    double radius_factor = 2.0;  // trajectories start at radius_factor * R1(R0)
    double horizon = 50.0;
    double tol = 1e-6;
    std::uint64_t seed = 1;
};

// Draws states on the J = 0 shell with ||u|| >= R0 (so |J| <= c for any
// c > 0), checks d/dt(|u|^2 + ||u||^2) >= (mu-2)/2 ||u||^2 - C'_eps at each,
// and runs trajectories from above R1 verifying they stay above R until they
// leave M_c. The (f2) certificate must satisfy 2 eps / mu_1 <= (mu - 2)/2.
InfinityStabilityReport infinity_stability_probe(const SpectralDomain& d,
                                                 const NonlinearityFamily& fam, double lambda_lo,
                                                 double lambda_hi, double c,
                                                 const F2Result& certificate, int n_states,
                                                 const InfinityProbeOptions& opts = {});

}  // namespace dynbif

#endif
