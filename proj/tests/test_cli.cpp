#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dynbif/diagram.hpp"
#include "dynbif/run.hpp"
#include "test_util.hpp"

using namespace dynbif;
using testutil::kPi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_config(const std::string& out) {
    RunConfig cfg;
    cfg.modes = 6;
    cfg.seed = 99;
    cfg.lambda_lo = 0.5;
    cfg.lambda_hi = 10.5;
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("config round trip and validation") {
    RunConfig cfg = small_config("out_cfg");
    cfg.domain_kind = "rectangle";
    cfg.length_y = 2.0 * kPi;
    cfg.alpha = 0.75;
    cfg.branch_k = 2;
    const RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back == cfg);

    CHECK_THROWS_AS(parse_config("seed = 1\nnot_a_key = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("modes = 8\n"), InvalidArgument);  // seed mandatory
    CHECK_THROWS_AS(parse_config("seed = 1\nmodes = zero\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("seed = 1\ndomain.kind = disk\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("seed = 1\nlambda.lo = 2\nlambda.hi = 1\n"), InvalidArgument);

    // comments and blank lines are fine
    const RunConfig c2 = parse_config("# comment\n\nseed = 5 # trailing\n");
    CHECK(c2.seed == 5);
}

TEST_CASE("spectrum subcommand writes the eigenvalue table") {
    RunConfig cfg = small_config("out_spectrum");
    const auto res = run_subcommand("spectrum", cfg);
    CHECK(res.exit_code == kExitOk);
    const std::string csv = slurp(cfg.out_dir + "/spectrum.csv");
    CHECK(csv.find("index,eigenvalue,jx,jy") == 0);
    CHECK(csv.find("1,1,1,0") != std::string::npos);
    CHECK(csv.find("2,4,2,0") != std::string::npos);
    CHECK(res.report.contains("spectrum"));
}

TEST_CASE("check subcommand passes the defocusing cubic and reports hypotheses") {
    RunConfig cfg = small_config("out_check");
    const auto res = run_subcommand("check", cfg);
    CHECK(res.exit_code == kExitOk);
    const auto& h = res.report["hypotheses"];
    CHECK(h["beta_monotone"].get<bool>());
    CHECK(h["f1"]["pass"].get<bool>());
    CHECK(h["f2"]["pass"].get<bool>());
    CHECK(h["H1"].get<bool>());
    CHECK(h["H2"].get<bool>());
    CHECK(h["H3"].get<bool>());

    // the report document on disk parses back to the same JSON
    const Json parsed = Json::parse(slurp(cfg.out_dir + "/report.json"));
    CHECK(dump_json(parsed) == dump_json(res.report));
}

TEST_CASE("check subcommand fails the exponential counterexample with exit 2") {
    RunConfig cfg = small_config("out_check_exp");
    cfg.family_form = "custom";
    cfg.family_name = "exp_counterexample";
    cfg.lambda_lo = -1.0;
    cfg.lambda_hi = 1.0;
    const auto res = run_subcommand("check", cfg);
    CHECK(res.exit_code == kExitHypothesisFailed);
    CHECK_FALSE(res.report["hypotheses"]["f1"]["pass"].get<bool>());
}

TEST_CASE("bifvalues subcommand detects the k^2 sequence") {
    RunConfig cfg = small_config("out_bif");
    const auto res = run_subcommand("bifvalues", cfg);
    CHECK(res.exit_code == kExitOk);
    const auto ups = res.report["upsilon"];
    REQUIRE(ups.size() == 3);  // 1, 4, 9 inside (0.5, 10.5)
    CHECK(std::stod(ups[0].get<std::string>()) == doctest::Approx(1.0));
    CHECK(std::stod(ups[2].get<std::string>()) == doctest::Approx(9.0));
}

TEST_CASE("profile subcommand reports the index ladder") {
    RunConfig cfg = small_config("out_profile");
    const auto res = run_subcommand("profile", cfg);
    CHECK(res.exit_code == kExitOk);
    const auto gaps = res.report["profile"]["gaps"];
    REQUIRE(gaps.size() == 4);
    CHECK(gaps[0]["index"] == "S^0");
    CHECK(gaps[3]["index"] == "S^3");
}

TEST_CASE("simulate subcommand writes the trajectory CSV") {
    RunConfig cfg = small_config("out_sim");
    cfg.simulate_lambda = 2.5;
    cfg.simulate_mode = 1;
    cfg.simulate_amplitude = 0.1;
    const auto res = run_subcommand("simulate", cfg);
    CHECK(res.exit_code == kExitOk);
    const std::string csv = slurp(cfg.out_dir + "/trajectory.csv");
    CHECK(csv.find("t,h_norm,v_norm,energy,dissipation,status") == 0);
    CHECK(csv.find("converged-to-equilibrium") != std::string::npos);
}

TEST_CASE("branch subcommand produces graph, diagram and outcome") {
    RunConfig cfg = small_config("out_branch");
    cfg.lambda_hi = 3.5;  // keep the run small
    const auto res = run_subcommand("branch", cfg);
    CHECK(res.exit_code == kExitOk);
    CHECK(res.report["outcome"]["classification"] == "UnboundedInLambda");
    CHECK(std::filesystem::exists(cfg.out_dir + "/graph.json"));
    CHECK(std::filesystem::exists(cfg.out_dir + "/diagram.svg"));

    const std::string svg = slurp(cfg.out_dir + "/diagram.svg");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("branch run is deterministic byte for byte") {
    RunConfig cfg = small_config("out_det1");
    cfg.lambda_hi = 3.0;
    run_subcommand("branch", cfg);
    RunConfig cfg2 = cfg;
    cfg2.out_dir = "out_det2";
    run_subcommand("branch", cfg2);

    CHECK(slurp("out_det1/graph.json") == slurp("out_det2/graph.json"));
    CHECK(slurp("out_det1/diagram.svg") == slurp("out_det2/diagram.svg"));

    // reports agree once timing is removed
    Json r1 = Json::parse(slurp("out_det1/report.json"));
    Json r2 = Json::parse(slurp("out_det2/report.json"));
    r1.erase("timing");
    r2.erase("timing");
    r1["config"].erase("out");
    r2["config"].erase("out");
    CHECK(dump_json(r1) == dump_json(r2));
}

TEST_CASE("sweep covers every bifurcation value in the window") {
    RunConfig cfg = small_config("out_sweep");
    cfg.lambda_lo = 0.5;
    cfg.lambda_hi = 5.5;
    cfg.branch_step_factor = 0.1;
    const auto res = run_subcommand("sweep", cfg);
    CHECK(res.exit_code == kExitOk);
    REQUIRE(res.report["outcome"].size() == 2);  // gamma_1 = 1, gamma_2 = 4
    CHECK(std::filesystem::exists(cfg.out_dir + "/graph_k1.json"));
    CHECK(std::filesystem::exists(cfg.out_dir + "/graph_k2.json"));
    CHECK(std::filesystem::exists(cfg.out_dir + "/diagram_k2.svg"));
}

TEST_CASE("unknown subcommand rejected") {
    RunConfig cfg = small_config("out_unknown");
    CHECK_THROWS_AS(run_subcommand("nope", cfg), InvalidArgument);
}

TEST_CASE("diagram of a graph with no nontrivial nodes still shows line and ticks") {
    BranchGraph g;
    g.gamma = 1.0;
    g.lambda_grid = {0.5, 1.0, 1.5};
    for (int i = 0; i < 3; ++i) {
        BranchNode n;
        n.id = i;
        n.lambda = g.lambda_grid[i];
        n.coeffs = Eigen::VectorXd::Zero(2);
        n.trivial = true;
        g.nodes.push_back(n);
    }
    g.root = 1;
    g.in_component = {0, 1, 0};
    g.component = {1};
    const std::string svg = render_diagram(g, {1.0});
    CHECK(svg.find("#888888") != std::string::npos);  // trivial line
    CHECK(svg.find("#cc0000") != std::string::npos);  // tick + root marker
    CHECK(render_diagram(g, {1.0}) == svg);           // deterministic re-render

    BranchGraph empty;
    CHECK_THROWS_AS(render_diagram(empty, {}), InvalidArgument);
}

TEST_CASE("branch csv and trajectory csv carry events and status") {
    const auto d = SpectralDomain::build(DomainSpec::interval(kPi), 4);
    const auto fam = NonlinearityFamily::power_law(-1.0, 3.0);
    const auto start = newton_solve(d, fam, 0.5, Eigen::VectorXd::Zero(4));
    ContinuationControls cc;
    cc.ds = 0.05;
    cc.lambda_lo = 0.4;
    cc.lambda_hi = 2.0;
    const auto br = continue_branch(d, fam, start, +1, cc);
    const std::string csv = branch_csv(br);
    CHECK(csv.find("arclength,lambda,h_norm,v_norm,morse_index,margin,event") == 0);
    CHECK(csv.find("index-change") != std::string::npos);
}
