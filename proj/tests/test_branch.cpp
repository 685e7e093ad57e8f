#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynbif/branch.hpp"
#include "dynbif/report.hpp"
#include "test_util.hpp"

using namespace dynbif;
using testutil::kPi;

namespace {

std::vector<Equilibrium> pitchfork_triple(const SpectralDomain& d, const NonlinearityFamily& fam,
                                          double lambda) {
    Eigen::VectorXd up = Eigen::VectorXd::Zero(d.mode_count());
    up[0] = std::sqrt(2.0944 * (lambda - 1.0));  // one-mode amplitude estimate
    std::vector<Equilibrium> eqs;
    eqs.push_back(newton_solve(d, fam, lambda, Eigen::VectorXd::Zero(d.mode_count())));
    eqs.push_back(newton_solve(d, fam, lambda, up));
    eqs.push_back(newton_solve(d, fam, lambda, (-up).eval()));
    return eqs;
}

}  // namespace

TEST_CASE("heteroclinics: the unstable origin connects to both pitchfork states") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const auto eqs = pitchfork_triple(d, fam, 2.5);
    REQUIRE(eqs[1].converged);
    REQUIRE(eqs[2].converged);

    const auto edges = heteroclinics_at(d, fam, 2.5, eqs);
    int to_plus = 0, to_minus = 0;
    for (const auto& e : edges) {
        CHECK(eqs[e.source].morse_index >= 1);
        REQUIRE(e.status == HetStatus::Connected);
        CHECK(e.source == 0);
        CHECK(e.energy_source > e.energy_target);
        if (e.target == 1) ++to_plus;
        if (e.target == 2) ++to_minus;
    }
    CHECK(to_plus == 1);
    CHECK(to_minus == 1);
}

TEST_CASE("heteroclinics: no unstable equilibrium, no edges") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 6);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    std::vector<Equilibrium> eqs{newton_solve(d, fam, 0.5, Eigen::VectorXd::Zero(6))};
    CHECK(heteroclinics_at(d, fam, 0.5, eqs).empty());
}

TEST_CASE("heteroclinics: two unstable directions at lambda = 4.5") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    auto eqs = pitchfork_triple(d, fam, 4.5);  // {0, +u1, -u1}
    // the mode-2 pair also exists here
    Eigen::VectorXd g2 = Eigen::VectorXd::Zero(8);
    g2[1] = 1.2;
    eqs.push_back(newton_solve(d, fam, 4.5, g2));
    eqs.push_back(newton_solve(d, fam, 4.5, (-g2).eval()));
    REQUIRE(eqs[3].converged);
    REQUIRE(eqs[3].coeffs.cwiseAbs().maxCoeff() > 0.5);
    CHECK(eqs[0].morse_index == 2);
    CHECK(eqs[3].morse_index >= 1);

    const auto edges = heteroclinics_at(d, fam, 4.5, eqs);
    bool origin_to_ground = false, saddle_to_ground = false;
    for (const auto& e : edges) {
        if (e.status != HetStatus::Connected) continue;
        CHECK(e.energy_source > e.energy_target);
        if (e.source == 0 && (e.target == 1 || e.target == 2)) origin_to_ground = true;
        if (e.source >= 3 && (e.target == 1 || e.target == 2)) saddle_to_ground = true;
    }
    // connections out of the origin's unstable manifold reach the ground
    // states; transverse round-off keeps forward runs off the saddle pair,
    // whose own unstable directions connect down instead
    CHECK(origin_to_ground);
    CHECK(saddle_to_ground);
}

TEST_CASE("heteroclinics require hyperbolic input") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 6);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    std::vector<Equilibrium> eqs{newton_solve(d, fam, 1.0, Eigen::VectorXd::Zero(6))};
    CHECK_THROWS_AS(heteroclinics_at(d, fam, 1.0, eqs), InvalidArgument);
}

TEST_CASE("global branch: supercritical pitchfork spans the window") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const std::vector<double> ups{1.0, 4.0, 9.0, 16.0, 25.0, 36.0, 49.0, 64.0};

    BranchControls bc;
    bc.lambda_lo = 0.5;
    bc.lambda_hi = 8.0;
    bc.seed = 7;
    const auto g = build_global_branch(d, fam, 1.0, ups, bc);

    CHECK(g.root >= 0);
    CHECK(g.nodes[g.root].trivial);
    CHECK(std::abs(g.nodes[g.root].lambda - 1.0) <= 1e-6);

    // a nontrivial pair at every grid lambda above gamma_1
    for (double lg : g.lambda_grid) {
        if (lg < 1.05 || lg > 8.0) continue;
        const auto s = section(g, lg);
        int nontrivial = 0;
        bool trivial_there = false;
        for (int id : s.nodes) {
            if (g.nodes[id].trivial)
                trivial_there = true;
            else
                ++nontrivial;
        }
        CHECK(nontrivial >= 2);
        CHECK(trivial_there);  // joined through the heteroclinic contact
    }

    // section at 2.5 is exactly the triple with both connections
    const auto s = section(g, 2.5);
    CHECK(s.nodes.size() == 3);
    CHECK(s.heteroclinics.size() == 2);

    // below the root the component is empty
    CHECK(section(g, 0.6).nodes.empty());
    // at the root: the root node alone
    const auto sroot = section(g, 1.0);
    REQUIRE(sroot.nodes.size() == 1);
    CHECK(sroot.nodes[0] == g.root);

    // J-set: the root value plus every heteroclinic-touched grid lambda
    const auto js = j_set(g);
    REQUIRE(!js.empty());
    CHECK(js.front() == doctest::Approx(1.0));
    int above = 0;
    for (double l : js)
        if (l > 1.05) ++above;
    CHECK(above >= 40);

    // energy drops along every heteroclinic edge
    for (const auto& e : g.edges)
        if (e.kind == EdgeKind::Heteroclinic)
            CHECK(g.nodes[e.from].energy > g.nodes[e.to].energy);

    // every member of the component is marked reachable
    for (int id : g.component) CHECK(g.in_component[id]);

    IndexProfile prof = index_profile(d, fam, 0.5, 8.0, {1.0, 4.0});
    const auto hyp = check_hypotheses(prof);
    const auto outcome = classify(g, prof, ups, hyp, bc);
    CHECK(outcome.classification == BranchClassification::UnboundedInLambda);
    CHECK_FALSE(outcome.theorem_contradiction);
    CHECK(outcome.extremal_v_norm > 3.0);
}

TEST_CASE("global branch: subcritical pitchfork escapes through the left edge") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(1.0, 3.0);
    const std::vector<double> ups{1.0, 4.0, 9.0, 16.0, 25.0, 36.0, 49.0, 64.0};

    BranchControls bc;
    bc.lambda_lo = -10.0;
    bc.lambda_hi = 1.5;
    bc.seed = 7;
    const auto g = build_global_branch(d, fam, 1.0, ups, bc);

    // nontrivial nodes at the left window edge
    bool at_edge = false;
    for (int id : g.component)
        if (!g.nodes[id].trivial &&
            std::abs(g.nodes[id].lambda - g.lambda_grid.front()) < 1e-12)
            at_edge = true;
    CHECK(at_edge);

    IndexProfile prof = index_profile(d, fam, -10.0, 1.5, {1.0});
    const auto outcome = classify(g, prof, ups, check_hypotheses(prof), bc);
    CHECK(outcome.classification == BranchClassification::UnboundedInLambda);
}

TEST_CASE("global branch without heteroclinics keeps the J-set at the root") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 8);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const std::vector<double> ups{1.0, 4.0};

    BranchControls bc;
    bc.lambda_lo = 0.5;
    bc.lambda_hi = 3.5;
    bc.seed = 3;
    bc.heteroclinics = false;
    const auto g = build_global_branch(d, fam, 1.0, ups, bc);
    const auto js = j_set(g);
    REQUIRE(js.size() == 1);
    CHECK(js[0] == doctest::Approx(1.0));
}

TEST_CASE("determinism: identical seed reproduces the graph byte for byte") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 6);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const std::vector<double> ups{1.0, 4.0};
    BranchControls bc;
    bc.lambda_lo = 0.6;
    bc.lambda_hi = 3.0;
    bc.seed = 42;
    const auto g1 = build_global_branch(d, fam, 1.0, ups, bc);
    const auto g2 = build_global_branch(d, fam, 1.0, ups, bc);
    CHECK(dump_json(graph_json(g1)) == dump_json(graph_json(g2)));
}

TEST_CASE("classification: synthetic graph meeting the trivial line") {
    BranchGraph g;
    g.gamma = 1.0;
    g.lambda_grid = {1.0, 2.5, 4.0};
    for (int i = 0; i < 3; ++i) {
        BranchNode n;
        n.id = i;
        n.lambda = g.lambda_grid[i];
        n.coeffs = Eigen::VectorXd::Zero(2);
        n.trivial = true;
        g.nodes.push_back(n);
    }
    BranchNode mid;  // one nontrivial node linking root to the far end
    mid.id = 3;
    mid.lambda = 2.5;
    mid.coeffs = Eigen::VectorXd::Constant(2, 0.5);
    mid.v_norm = 0.5;
    g.nodes.push_back(mid);
    g.root = 0;
    g.edges.push_back({EdgeKind::ContinuationLink, 0, 3});
    g.edges.push_back({EdgeKind::ContinuationLink, 3, 2});
    g.in_component = {1, 0, 1, 1};
    g.component = {0, 2, 3};
    g.trivial_meets = {4.0};

    IndexProfile prof;
    prof.window_lo = 0.5;
    prof.window_hi = 4.5;
    prof.upsilon = {1.0, 2.0, 4.0};
    prof.values = {HomotopyType::sphere(0), HomotopyType::sphere(1), HomotopyType::sphere(2),
                   HomotopyType::sphere(3)};

    BranchControls bc;
    bc.norm_budget = 100.0;
    const auto out = classify(g, prof, {1.0, 2.0, 4.0}, check_hypotheses(prof), bc);
    CHECK(out.classification == BranchClassification::MeetsTrivialAt);
    CHECK(out.meets_trivial_at == doctest::Approx(4.0));
    REQUIRE(out.upsilon_between.size() == 1);
    CHECK(out.upsilon_between[0] == doctest::Approx(2.0));
    // (H1)-(H3) hold yet the branch claims to die: flagged as contradictory
    CHECK(out.theorem_contradiction);
}

TEST_CASE("build validates the root") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 4);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    BranchControls bc;
    bc.lambda_lo = 0.5;
    bc.lambda_hi = 3.0;
    CHECK_THROWS_AS(build_global_branch(d, fam, 2.0, {1.0, 4.0}, bc), InvalidArgument);
    CHECK_THROWS_AS(build_global_branch(d, fam, 4.0, {1.0, 4.0}, bc), InvalidArgument);
}
