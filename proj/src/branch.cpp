#include "dynbif/branch.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "dynbif/rng.hpp"

namespace dynbif {

const char* to_string(BranchClassification c) {
    switch (c) {
        case BranchClassification::UnboundedInNorm: return "UnboundedInNorm";
        case BranchClassification::UnboundedInLambda: return "UnboundedInLambda";
        case BranchClassification::MeetsTrivialAt: return "MeetsTrivialAt";
        case BranchClassification::UndeterminedBudget: return "UndeterminedBudget";
    }
    return "unknown";
}

std::vector<HetEdge> heteroclinics_at(const SpectralDomain& d, const NonlinearityFamily& fam,
                                      double lambda, const std::vector<Equilibrium>& equilibria,
                                      const HetControls& controls) {
    return heteroclinics_at(d, fam, lambda, equilibria,
                            static_cast<int>(equilibria.size()), controls);
}

std::vector<HetEdge> heteroclinics_at(const SpectralDomain& d, const NonlinearityFamily& fam,
                                      double lambda, const std::vector<Equilibrium>& equilibria,
                                      int n_sources, const HetControls& controls) {
    const std::size_t sources = std::min<std::size_t>(
        n_sources < 0 ? equilibria.size() : static_cast<std::size_t>(n_sources),
        equilibria.size());
    for (std::size_t i = 0; i < sources; ++i)
        if (!(equilibria[i].margin > 1e-8))
            throw InvalidArgument("heteroclinic sweep requires hyperbolic equilibria");

    std::vector<HetEdge> edges;
    std::vector<Eigen::VectorXd> targets;
    for (const Equilibrium& eq : equilibria) targets.push_back(eq.coeffs);

    FlowControls fc;
    fc.horizon = controls.horizon;
    fc.tol = 0.1 * controls.tol;  // keep the error noise floor below detection
    fc.eq_tol = controls.tol;
    fc.norm_budget = controls.norm_budget;
    fc.stop_near = &targets;
    fc.stop_radius = 0.5 * controls.match_tol;

    for (std::size_t i = 0; i < sources; ++i) {
        const Equilibrium& eq = equilibria[i];
        const int r = eq.morse_index;
        if (r < 1) continue;
        const int m = d.mode_count();

        // unstable eigenvectors are the trailing columns (nu ascending)
        std::vector<Eigen::VectorXd> seeds;
        if (r <= 2) {
            for (int k = 0; k < r; ++k) {
                const Eigen::VectorXd v = eq.eigenvectors.col(m - 1 - k);
                seeds.push_back(v);
                seeds.push_back(-v);
            }
        } else {
            Rng rng(Rng::derive(controls.seed, 1000 * i + 7));
            for (int k = 0; k < 4 * r; ++k) {
                Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
                for (int u = 0; u < r; ++u)
                    w += rng.gaussian() * eq.eigenvectors.col(m - 1 - u);
                if (w.norm() > 0.0) seeds.push_back(w.normalized());
            }
        }

        const double delta = controls.delta * (1.0 + eq.coeffs.norm());
        for (const Eigen::VectorXd& w : seeds) {
            const Eigen::VectorXd start = eq.coeffs + delta * w;
            const TrajectoryRecord rec = integrate(d, fam, lambda, start, fc);

            HetEdge e;
            e.source = static_cast<int>(i);
            e.terminal = rec.back().coeffs;
            e.energy_source = energy(d, fam, lambda, eq.coeffs);
            if (rec.status == TerminalStatus::ConvergedToEquilibrium) {
                int best = -1;
                double best_dist = controls.match_tol;
                for (std::size_t k = 0; k < equilibria.size(); ++k) {
                    const double dist = d.v_norm((e.terminal - equilibria[k].coeffs).eval());
                    if (dist < best_dist) {
                        best_dist = dist;
                        best = static_cast<int>(k);
                    }
                }
                if (best >= 0 && best != static_cast<int>(i)) {
                    e.status = HetStatus::Connected;
                    e.target = best;
                    e.energy_target = energy(d, fam, lambda, equilibria[best].coeffs);
                } else {
                    e.status = HetStatus::Unmatched;
                }
            } else if (rec.status == TerminalStatus::NormBudgetExceeded) {
                e.status = HetStatus::BudgetExceeded;
            } else {
                e.status = HetStatus::HorizonReached;
            }
            edges.push_back(e);
        }
    }
    return edges;
}

// ---- graph construction -------------------------------------------------------

namespace {

struct Builder {
    const SpectralDomain& d;
    const NonlinearityFamily& fam;
    const BranchControls& controls;
    BranchGraph g;
    std::vector<Equilibrium> eq_store;          // parallel to g.nodes
    std::vector<std::vector<int>> at_grid;      // node ids per grid index
    std::vector<int> trivial_at;                // trivial node id per grid index
    int next_family = 0;

    Builder(const SpectralDomain& d_, const NonlinearityFamily& fam_, const BranchControls& c_)
        : d(d_), fam(fam_), controls(c_) {}

    int grid_index(double lambda) const {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.lambda_grid.size(); ++i) {
            const double dist = std::abs(g.lambda_grid[i] - lambda);
            if (dist < bd) {
                bd = dist;
                best = static_cast<int>(i);
            }
        }
        return best;
    }

    int add_node(const Equilibrium& eq, int family, bool trivial) {
        const int gi = grid_index(eq.lambda);
        if (!trivial) {
            for (int id : at_grid[gi]) {
                const BranchNode& n = g.nodes[id];
                if (!n.trivial &&
                    (n.coeffs - eq.coeffs).norm() < 1e-6 * (1.0 + eq.coeffs.norm()))
                    return id;  // duplicate
            }
        }
        BranchNode n;
        n.id = static_cast<int>(g.nodes.size());
        n.lambda = g.lambda_grid[gi];
        n.coeffs = eq.coeffs;
        n.morse_index = eq.morse_index;
        n.margin = eq.margin;
        n.h_norm = eq.h_norm;
        n.v_norm = eq.v_norm;
        n.energy = energy(d, fam, eq.lambda, eq.coeffs);
        n.trivial = trivial;
        n.family = family;
        g.nodes.push_back(n);
        eq_store.push_back(eq);
        at_grid[gi].push_back(n.id);
        return n.id;
    }

    void add_edge(EdgeKind kind, int from, int to) {
        if (from == to) return;
        for (const auto& e : g.edges)
            if (e.kind == kind && e.from == from && e.to == to) return;
        g.edges.push_back({kind, from, to});
    }

    bool node_budget_ok() const {
        return static_cast<int>(g.nodes.size()) < controls.max_nodes;
    }
};

}  // namespace

BranchGraph build_global_branch(const SpectralDomain& d, const NonlinearityFamily& fam,
                                double gamma_k, const std::vector<double>& upsilon,
                                const BranchControls& controls) {
    if (!(controls.lambda_lo < gamma_k && gamma_k < controls.lambda_hi))
        throw InvalidArgument("window must contain the root bifurcation value");
    bool in_upsilon = false;
    for (double g : upsilon)
        if (std::abs(g - gamma_k) <= 1e-6 * (1.0 + std::abs(gamma_k))) in_upsilon = true;
    if (!in_upsilon)
        throw InvalidArgument("root must be a detected bifurcation value");

    Builder b(d, fam, controls);
    b.g.gamma = gamma_k;

    // lambda grid anchored at gamma_k, step proportional to the gap to the
    // nearest other bifurcation value (window width as fallback)
    double gap = controls.lambda_hi - controls.lambda_lo;
    for (double g : upsilon) {
        const double dist = std::abs(g - gamma_k);
        if (dist > 1e-9) gap = std::min(gap, dist);
    }
    const double step = controls.step_factor * gap;
    if (!(step > 0.0)) throw InvalidArgument("degenerate lambda grid step");
    std::vector<double> grid;
    for (double lam = gamma_k; lam >= controls.lambda_lo - 1e-12; lam -= step) grid.push_back(lam);
    std::reverse(grid.begin(), grid.end());
    for (double lam = gamma_k + step; lam <= controls.lambda_hi + 1e-12; lam += step)
        grid.push_back(lam);
    // nudge grid points off other bifurcation values, where the trivial
    // equilibrium is non-hyperbolic and cannot join the heteroclinic sweep
    for (double& lam : grid) {
        if (std::abs(lam - gamma_k) < 1e-12) continue;
        for (double u : upsilon)
            if (std::abs(lam - u) < 1e-6 * (1.0 + std::abs(u))) lam = u + 0.137 * step;
    }
    b.g.lambda_grid = grid;
    b.at_grid.assign(grid.size(), {});
    b.trivial_at.assign(grid.size(), -1);

    // trivial node at every grid lambda
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.mode_count());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        Equilibrium eq;
        eq.lambda = grid[gi];
        eq.coeffs = zero;
        eq.residual = 0.0;
        eq.converged = true;
        eq.h_norm = 0.0;
        eq.v_norm = 0.0;
        const Inertia in = linearization_inertia(d, fam, grid[gi], zero);
        eq.morse_index = in.morse_index;
        eq.margin = in.margin;
        eq.nu = in.nu;
        eq.eigenvectors = in.eigenvectors;
        b.trivial_at[gi] = b.add_node(eq, -1, true);
    }
    b.g.root = b.trivial_at[b.grid_index(gamma_k)];

    // continuation controls shared by all families
    ContinuationControls cc;
    cc.ds = controls.continuation_ds > 0.0 ? controls.continuation_ds : 0.5 * step;
    cc.lambda_lo = controls.lambda_lo;
    cc.lambda_hi = controls.lambda_hi;
    cc.norm_budget = controls.norm_budget;

    struct FamilyTask {
        Equilibrium seed;
        int emerge_from;  // node id the family emerges from
    };
    std::deque<FamilyTask> tasks;

    BranchSwitchOptions sw = controls.switch_opts;
    sw.seed = Rng::derive(controls.seed, 0xB1F);
    for (const Equilibrium& eq : branch_switch(d, fam, gamma_k, zero, sw))
        tasks.push_back({eq, b.g.root});

    const double trivial_contact_tol = 1e-6 * (1.0 + std::abs(gamma_k));
    int families_done = 0;

    while (!tasks.empty() && b.node_budget_ok() && families_done < 64) {
        const FamilyTask task = tasks.front();
        tasks.pop_front();
        ++families_done;
        const int family_id = b.next_family++;

        int first_node = -1;
        for (int direction : {+1, -1}) {
            ContinuedBranch br;
            try {
                br = continue_branch(d, fam, task.seed, direction, cc);
            } catch (const HypothesisViolation&) {
                continue;  // singular start; the mirror seed covers this family
            }
            if (br.termination == BranchTermination::NormBudget) b.g.norm_budget_hit = true;
            if (br.termination == BranchTermination::WindowEdge) b.g.window_edge_reached = true;

            // resample the curve onto the lambda grid
            int prev_node = -1;
            for (std::size_t i = 0; i + 1 < br.points.size(); ++i) {
                const auto& p1 = br.points[i].eq;
                const auto& p2 = br.points[i + 1].eq;
                const double l1 = p1.lambda, l2 = p2.lambda;
                for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                    const double lg = grid[gi];
                    if ((lg - l1) * (lg - l2) > 0.0) continue;  // not crossed
                    if (std::abs(l2 - l1) < 1e-14) continue;
                    const double t = (lg - l1) / (l2 - l1);
                    const Eigen::VectorXd guess = p1.coeffs + t * (p2.coeffs - p1.coeffs);
                    if (guess.norm() < 0.5 * controls.switch_opts.delta) continue;  // trivial passage
                    Equilibrium eq = newton_solve(d, fam, lg, guess);
                    if (!eq.converged) continue;
                    if (eq.coeffs.norm() < 1e-8) continue;  // fell onto the trivial line
                    if (!b.node_budget_ok()) break;
                    const int id = b.add_node(eq, family_id, false);
                    if (eq.v_norm >= controls.norm_budget) b.g.norm_budget_hit = true;
                    if (prev_node >= 0) b.add_edge(EdgeKind::ContinuationLink, prev_node, id);
                    prev_node = id;
                    if (first_node < 0 ||
                        std::abs(b.g.nodes[id].lambda - gamma_k) <
                            std::abs(b.g.nodes[first_node].lambda - gamma_k))
                        first_node = id;
                }
            }

            for (const BranchEvent& ev : br.events) {
                if (ev.kind == BranchEventKind::TrivialIntersection) {
                    if (std::abs(ev.lambda - gamma_k) > trivial_contact_tol) {
                        b.g.trivial_meets.push_back(ev.lambda);
                        // family meets the trivial line away from the root
                        const int gi = b.grid_index(ev.lambda);
                        if (prev_node >= 0)
                            b.add_edge(EdgeKind::ContinuationLink, prev_node, b.trivial_at[gi]);
                    }
                } else if (ev.kind == BranchEventKind::IndexChange && b.node_budget_ok()) {
                    // secondary bifurcation: switch branches at the event point
                    double best = std::numeric_limits<double>::infinity();
                    const Equilibrium* at = nullptr;
                    for (const BranchPoint& bp : br.points) {
                        const double dist = std::abs(bp.eq.lambda - ev.lambda);
                        if (dist < best) {
                            best = dist;
                            at = &bp.eq;
                        }
                    }
                    if (at != nullptr) {
                        BranchSwitchOptions sw2 = controls.switch_opts;
                        sw2.seed = Rng::derive(controls.seed, 0x5EC0 + b.next_family);
                        sw2.kernel_tol = std::max(sw2.kernel_tol, 10.0 * best);
                        try {
                            const int from =
                                b.add_node(newton_solve(d, fam, at->lambda, at->coeffs),
                                           family_id, false);
                            for (const Equilibrium& eq :
                                 branch_switch(d, fam, at->lambda, at->coeffs, sw2))
                                tasks.push_back({eq, from});
                        } catch (const InvalidArgument&) {
                            // no usable kernel at the sampled point
                        }
                    }
                }
            }
        }
        if (first_node >= 0 && task.emerge_from >= 0)
            b.add_edge(EdgeKind::ContinuationLink, task.emerge_from, first_node);
    }
    if (!tasks.empty() || !b.node_budget_ok()) b.g.node_budget_exhausted = true;

    // generic adjacent-lambda continuation links (covers nodes found by the
    // heteroclinic sweeps, which carry no family id)
    auto link_adjacent = [&]() {
        for (std::size_t gi = 0; gi + 1 < grid.size(); ++gi) {
            for (int id1 : b.at_grid[gi]) {
                if (b.g.nodes[id1].trivial) continue;
                int best = -1;
                double bd = std::numeric_limits<double>::infinity();
                for (int id2 : b.at_grid[gi + 1]) {
                    if (b.g.nodes[id2].trivial) continue;
                    const double dist = (b.g.nodes[id1].coeffs - b.g.nodes[id2].coeffs).norm();
                    if (dist < bd) {
                        bd = dist;
                        best = id2;
                    }
                }
                const double tol =
                    0.2 * (1.0 + std::min(b.g.nodes[id1].coeffs.norm(),
                                          best >= 0 ? b.g.nodes[best].coeffs.norm() : 0.0));
                if (best >= 0 && bd < tol)
                    b.add_edge(EdgeKind::ContinuationLink, id1, best);
            }
        }
    };

    // heteroclinic sweeps per grid lambda; discovered equilibria join the
    // worklist so their own unstable manifolds are probed exactly once
    if (controls.heteroclinics) {
        for (std::size_t gi = 0; gi < grid.size() && b.node_budget_ok(); ++gi) {
            std::vector<char> swept(b.g.nodes.size(), 0);
            for (int round = 0; round < 4; ++round) {
                std::vector<int> ids;
                std::vector<Equilibrium> sources;
                swept.resize(b.g.nodes.size(), 0);
                for (int id : b.at_grid[gi]) {
                    if (!swept[id] && b.eq_store[id].margin > 1e-8 &&
                        b.eq_store[id].morse_index >= 1) {
                        ids.push_back(id);
                        sources.push_back(b.eq_store[id]);
                        swept[id] = 1;
                    }
                }
                if (sources.empty()) break;
                // matching targets: everything known at this lambda
                std::vector<int> all_ids = ids;
                std::vector<Equilibrium> pool = sources;
                for (int id : b.at_grid[gi])
                    if (std::find(all_ids.begin(), all_ids.end(), id) == all_ids.end()) {
                        all_ids.push_back(id);
                        pool.push_back(b.eq_store[id]);
                    }

                HetControls hc = controls.het;
                hc.norm_budget = controls.norm_budget;
                hc.seed = Rng::derive(controls.seed, 0xAE7 + 131 * gi + round);
                const auto edges = heteroclinics_at(d, fam, grid[gi], pool,
                                                    static_cast<int>(sources.size()), hc);

                bool discovered = false;
                for (const HetEdge& e : edges) {
                    if (e.status == HetStatus::Connected) {
                        b.add_edge(EdgeKind::Heteroclinic, all_ids[e.source], all_ids[e.target]);
                    } else if (e.status == HetStatus::Unmatched && b.node_budget_ok()) {
                        Equilibrium eq = newton_solve(d, fam, grid[gi], e.terminal);
                        if (!eq.converged) continue;
                        const bool trivial_hit = eq.coeffs.norm() < 1e-8;
                        const std::size_t nodes_before = b.g.nodes.size();
                        const int id = trivial_hit ? b.trivial_at[gi]
                                                   : b.add_node(eq, -1, false);
                        b.add_edge(EdgeKind::Heteroclinic, all_ids[e.source], id);
                        if (!trivial_hit && b.g.nodes.size() > nodes_before) discovered = true;
                    }
                    // budget/horizon runs stay open: an escaping probe orbit
                    // is not a bounded invariant set and says nothing about
                    // the branch itself
                }
                if (!discovered) break;
            }
        }
    }

    link_adjacent();

    // component of the root under continuation + heteroclinic edges
    std::vector<std::vector<int>> adj(b.g.nodes.size());
    for (const auto& e : b.g.edges) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    b.g.in_component.assign(b.g.nodes.size(), 0);
    std::deque<int> bfs{b.g.root};
    b.g.in_component[b.g.root] = 1;
    while (!bfs.empty()) {
        const int v = bfs.front();
        bfs.pop_front();
        b.g.component.push_back(v);
        for (int w : adj[v])
            if (!b.g.in_component[w]) {
                b.g.in_component[w] = 1;
                bfs.push_back(w);
            }
    }
    std::sort(b.g.component.begin(), b.g.component.end());
    return b.g;
}

Section section(const BranchGraph& g, double lambda) {
    if (g.lambda_grid.empty()) throw OutOfRange("empty graph");
    if (lambda < g.lambda_grid.front() - 1e-9 || lambda > g.lambda_grid.back() + 1e-9)
        throw OutOfRange("lambda outside the explored window");
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.lambda_grid.size(); ++i) {
        const double dist = std::abs(g.lambda_grid[i] - lambda);
        if (dist < bd) {
            bd = dist;
            best = static_cast<int>(i);
        }
    }
    const double lg = g.lambda_grid[best];
    Section s;
    s.lambda = lg;
    for (int id : g.component)
        if (std::abs(g.nodes[id].lambda - lg) < 1e-12) s.nodes.push_back(id);
    for (const auto& e : g.edges)
        if (e.kind == EdgeKind::Heteroclinic && g.in_component[e.from] &&
            std::abs(g.nodes[e.from].lambda - lg) < 1e-12)
            s.heteroclinics.push_back(e);
    return s;
}

std::vector<double> j_set(const BranchGraph& g) {
    std::vector<double> js;
    for (int id : g.component)
        if (g.nodes[id].trivial) js.push_back(g.nodes[id].lambda);
    std::sort(js.begin(), js.end());
    return js;
}

OutcomeReport classify(const BranchGraph& g, const IndexProfile& profile,
                       const std::vector<double>& upsilon, const HypothesesResult& hypotheses,
                       const BranchControls& controls) {
    (void)profile;
    OutcomeReport rep;
    rep.norm_budget = controls.norm_budget;
    rep.max_nodes = controls.max_nodes;
    rep.j_set = j_set(g);

    bool nontrivial_at_edge = false;
    double extremal_dist = -1.0;
    for (int id : g.component) {
        const BranchNode& n = g.nodes[id];
        if (n.trivial) continue;
        rep.extremal_v_norm = std::max(rep.extremal_v_norm, n.v_norm);
        const double dist = std::abs(n.lambda - g.gamma);
        if (dist > extremal_dist) {
            extremal_dist = dist;
            rep.extremal_lambda = n.lambda;
        }
        if (std::abs(n.lambda - g.lambda_grid.front()) < 1e-12 ||
            std::abs(n.lambda - g.lambda_grid.back()) < 1e-12)
            nontrivial_at_edge = true;
    }

    const bool norm_hit = g.norm_budget_hit || rep.extremal_v_norm >= controls.norm_budget;
    if (norm_hit) {
        rep.classification = BranchClassification::UnboundedInNorm;
    } else if (nontrivial_at_edge || g.window_edge_reached) {
        rep.classification = BranchClassification::UnboundedInLambda;
    } else if (!g.trivial_meets.empty()) {
        rep.classification = BranchClassification::MeetsTrivialAt;
        rep.meets_trivial_at = g.trivial_meets.front();
        const double lo = std::min(g.gamma, rep.meets_trivial_at);
        const double hi = std::max(g.gamma, rep.meets_trivial_at);
        for (double u : upsilon)
            if (u > lo + 1e-9 && u < hi - 1e-9) rep.upsilon_between.push_back(u);
        rep.theorem_contradiction = hypotheses.h1 && hypotheses.h2 && hypotheses.h3;
    } else {
        rep.classification = BranchClassification::UndeterminedBudget;
    }
    return rep;
}

}  // namespace dynbif
