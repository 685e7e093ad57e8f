// Approximate global bifurcation branch: a lambda-indexed graph of
// equilibria joined by continuation links and heteroclinic connections,
// rooted at a bifurcation point on the trivial line. The trivial line is not
// free glue; its nodes join the component only where a nontrivial family
// shrinks into them or a heteroclinic orbit touches them.
#ifndef DYNBIF_BRANCH_HPP
#define DYNBIF_BRANCH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynbif/conley.hpp"
#include "dynbif/equilibria.hpp"
#include "dynbif/flow.hpp"

namespace dynbif {

struct HetControls {
    double delta = 1e-2;      // perturbation amplitude along unstable directions
    double horizon = 300.0;   // escape from a just-bifurcated saddle is slow
    double tol = 1e-6;        // equilibrium detection threshold (steps run tighter)
    double norm_budget = 1e3;
    double match_tol = 1e-4;  // V-norm distance for matching the limit equilibrium
    std::uint64_t seed = 1;
};

enum class HetStatus { Connected, Unmatched, HorizonReached, BudgetExceeded };

struct HetEdge {
    int source = -1;              // index into the supplied equilibria list
    int target = -1;              // -1 unless status == Connected
    HetStatus status = HetStatus::Unmatched;
    Eigen::VectorXd terminal;     // final state of the probe trajectory
    double energy_source = 0.0;
    double energy_target = 0.0;
};

// Integrates from +/- delta perturbations along each unstable eigenvector of
// every supplied equilibrium with Morse index >= 1 (all 2r axis seeds for
// r <= 2, 4r seeded random unstable directions otherwise) and records the
// equilibrium each run converges to. When n_sources >= 0 only the leading
// n_sources entries spawn trajectories; the rest serve as match targets.
std::vector<HetEdge> heteroclinics_at(const SpectralDomain& d, const NonlinearityFamily& fam,
                                      double lambda, const std::vector<Equilibrium>& equilibria,
                                      const HetControls& controls = {});
std::vector<HetEdge> heteroclinics_at(const SpectralDomain& d, const NonlinearityFamily& fam,
                                      double lambda, const std::vector<Equilibrium>& equilibria,
                                      int n_sources, const HetControls& controls = {});

// ---- branch graph -----------------------------------------------------------

struct BranchNode {
    int id = -1;
    double lambda = 0.0;
    Eigen::VectorXd coeffs;
    int morse_index = 0;
    double margin = 0.0;
    double h_norm = 0.0;
    double v_norm = 0.0;
    double energy = 0.0;
    bool trivial = false;
    int family = -1;  // continuation family id, -1 for trivial/heteroclinic-discovered
};

enum class EdgeKind { ContinuationLink, Heteroclinic };

struct BranchGraphEdge {
    EdgeKind kind;
    int from;
    int to;
};

struct BranchControls {
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    double step_factor = 0.05;   // grid step = factor * gap to nearest other bifurcation value
    double norm_budget = 1e3;
    int max_nodes = 20000;
    std::uint64_t seed = 1;
    bool heteroclinics = true;
    HetControls het;
    BranchSwitchOptions switch_opts;
    double continuation_ds = 0.0;  // 0 = derived from the grid step
};

struct BranchGraph {
    std::vector<BranchNode> nodes;
    std::vector<BranchGraphEdge> edges;
    std::vector<double> lambda_grid;
    int root = -1;               // trivial node at gamma_k
    double gamma = 0.0;          // root bifurcation value
    std::vector<int> component;  // node ids connected to the root
    std::vector<char> in_component;

    bool norm_budget_hit = false;
    bool window_edge_reached = false;
    bool node_budget_exhausted = false;
    std::vector<double> trivial_meets;  // trivial-intersection lambdas away from gamma

    const BranchNode& node(int id) const { return nodes[id]; }
};

BranchGraph build_global_branch(const SpectralDomain& d, const NonlinearityFamily& fam,
                                double gamma_k, const std::vector<double>& upsilon,
                                const BranchControls& controls);

// Section of the component at the grid value nearest lambda.
struct Section {
    double lambda = 0.0;
    std::vector<int> nodes;                      // component node ids at this lambda
    std::vector<BranchGraphEdge> heteroclinics;  // component het edges at this lambda
};

Section section(const BranchGraph& g, double lambda);

// Grid lambdas at which the trivial node belongs to the component.
std::vector<double> j_set(const BranchGraph& g);

// ---- outcome classification --------------------------------------------------

enum class BranchClassification {
    UnboundedInNorm,
    UnboundedInLambda,
    MeetsTrivialAt,
    UndeterminedBudget,
};

const char* to_string(BranchClassification c);

struct OutcomeReport {
    BranchClassification classification = BranchClassification::UndeterminedBudget;
    double meets_trivial_at = 0.0;             // MeetsTrivialAt only
    std::vector<double> upsilon_between;       // bifurcation values strictly between
    double extremal_lambda = 0.0;              // farthest explored lambda with nontrivial nodes
    double extremal_v_norm = 0.0;
    std::vector<double> j_set;
    double norm_budget = 0.0;
    int max_nodes = 0;
    bool theorem_contradiction = false;  // MeetsTrivialAt despite (H1)-(H3): numerical failure
};

OutcomeReport classify(const BranchGraph& g, const IndexProfile& profile,
                       const std::vector<double>& upsilon, const HypothesesResult& hypotheses,
                       const BranchControls& controls);

}  // namespace dynbif

#endif
