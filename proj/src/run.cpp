#include "dynbif/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "dynbif/diagram.hpp"

namespace dynbif {

namespace {

struct Pipeline {
    RunConfig cfg;
    SpectralDomain domain;
    NonlinearityFamily fam;
    std::vector<Warning> warnings;
    Json report = Json::object();
    bool hypotheses_ok = true;
    bool consistency_flag = false;
    bool undetermined = false;

    Pipeline(const RunConfig& c) : cfg(c), domain(build_domain(c)), fam(build_family(c)) {
        report["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
        report["config"] = config_json(cfg);
    }

    std::vector<double> upsilon_in_window() {
        BifurcationOptions bo;
        // bracket every distinct eigenvalue the truncation retains
        std::vector<double> gammas;
        int count = domain.distinct_count();
        while (count > 0) {
            try {
                gammas = bifurcation_values(fam, domain, count, bo);
                break;
            } catch (const WindowExhausted&) {
                --count;  // gains saturating below the top eigenvalues
            }
        }
        std::vector<double> in;
        for (double g : gammas)
            if (g > cfg.lambda_lo && g < cfg.lambda_hi) in.push_back(g);
        return in;
    }

    void run_checks() {
        // beta monotonicity on the window is the transversality condition
        bool monotone = true;
        double prev = fam.beta(cfg.lambda_lo);
        for (int i = 1; i < 1000; ++i) {
            const double lam = cfg.lambda_lo + (cfg.lambda_hi - cfg.lambda_lo) * i / 999.0;
            const double b = fam.beta(lam);
            if (!(b > prev)) monotone = false;
            prev = b;
        }
        report["hypotheses"]["beta_monotone"] = monotone;
        if (!monotone) {
            hypotheses_ok = false;
            warnings.push_back({"beta", "beta(lambda) is not strictly increasing on the window"});
        }

        F1Options f1o;
        f1o.s_max = cfg.check_s_max;
        const F1Result f1 = check_f1(fam, cfg.lambda_lo, cfg.lambda_hi, f1o);
        report["hypotheses"]["f1"] = f1_json(f1);
        if (!f1.pass) hypotheses_ok = false;

        Json f2j;
        try {
            const double mu = suggest_mu(fam);
            F2Options f2o;
            f2o.s_max = cfg.check_s_max;
            const F2Result f2 =
                check_f2(fam, cfg.lambda_lo, cfg.lambda_hi, mu, cfg.check_eps, f2o);
            f2j = f2_json(f2);
            if (!f2.pass) hypotheses_ok = false;
        } catch (const PreconditionViolation& e) {
            f2j = Json{{"pass", false}, {"error", e.what()}};
            hypotheses_ok = false;
        }
        report["hypotheses"]["f2"] = f2j;
    }

    IndexProfile run_profile(const std::vector<double>& upsilon) {
        const IndexProfile prof =
            index_profile(domain, fam, cfg.lambda_lo, cfg.lambda_hi, upsilon);
        report["profile"] = profile_json(prof);
        const HypothesesResult hyp = check_hypotheses(prof);
        report["hypotheses"]["H1"] = hyp.h1;
        report["hypotheses"]["H2"] = hyp.h2;
        report["hypotheses"]["H3"] = hyp.h3;
        if (!(hyp.h1 && hyp.h2 && hyp.h3)) hypotheses_ok = false;
        return prof;
    }

    Json upsilon_json(const std::vector<double>& ups) {
        Json j = Json::array();
        for (double u : ups) j.push_back(format_double(u));
        return j;
    }

    BranchControls branch_controls() const {
        BranchControls bc;
        bc.lambda_lo = cfg.lambda_lo;
        bc.lambda_hi = cfg.lambda_hi;
        bc.step_factor = cfg.branch_step_factor;
        bc.norm_budget = cfg.norm_budget;
        bc.max_nodes = cfg.node_budget;
        bc.seed = cfg.seed;
        bc.het.horizon = std::min(cfg.horizon, 300.0);
        return bc;
    }
};

Json timing_json(double seconds) {
    Json j = Json::object();
    j["seconds"] = format_double(seconds);
    return j;
}

}  // namespace

std::string write_artifact(const RunConfig& cfg, const std::string& filename,
                           const std::string& text) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/" + filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write artifact: " + path);
    out << text;
    return path;
}

RunResult run_subcommand(const std::string& sub, const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    Pipeline pipe(cfg);

    auto finalize = [&](const std::string& report_name) {
        pipe.report["warnings"] = warnings_json(pipe.warnings);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        pipe.report["timing"] = timing_json(secs);
        res.report = pipe.report;
        write_artifact(cfg, report_name, dump_json(pipe.report));
        if (res.exit_code == kExitOk && !pipe.hypotheses_ok) res.exit_code = kExitHypothesisFailed;
        if (res.exit_code == kExitOk && pipe.undetermined) res.exit_code = kExitUndeterminedBudget;
        if (res.exit_code == kExitOk && pipe.consistency_flag) res.exit_code = kExitConsistencyFlag;
    };

    if (sub == "spectrum") {
        write_artifact(cfg, "spectrum.csv", spectrum_csv(pipe.domain));
        Json modes = Json::array();
        for (const Mode& mo : pipe.domain.mode_list()) modes.push_back(format_double(mo.eigenvalue));
        pipe.report["spectrum"] = modes;
        res.summary = "spectrum: " + std::to_string(pipe.domain.mode_count()) + " modes";
        finalize("report.json");
        return res;
    }

    if (sub == "check") {
        pipe.run_checks();
        if (pipe.hypotheses_ok) {
            try {
                const auto ups = pipe.upsilon_in_window();
                pipe.report["upsilon"] = pipe.upsilon_json(ups);
                pipe.run_profile(ups);
            } catch (const ContinuationViolation& e) {
                pipe.warnings.push_back({"index_profile", e.what()});
                pipe.consistency_flag = true;
            }
        }
        res.summary = pipe.hypotheses_ok ? "check: all hypotheses hold" : "check: failed";
        finalize("report.json");
        return res;
    }

    if (sub == "bifvalues") {
        const auto ups = pipe.upsilon_in_window();
        pipe.report["upsilon"] = pipe.upsilon_json(ups);
        std::string csv = "k,gamma\n";
        for (std::size_t i = 0; i < ups.size(); ++i)
            csv += std::to_string(i + 1) + "," + format_double(ups[i]) + "\n";
        write_artifact(cfg, "upsilon.csv", csv);
        res.summary = "bifvalues: " + std::to_string(ups.size()) + " in window";
        finalize("report.json");
        return res;
    }

    if (sub == "profile") {
        const auto ups = pipe.upsilon_in_window();
        pipe.report["upsilon"] = pipe.upsilon_json(ups);
        try {
            pipe.run_profile(ups);
            res.summary = "profile: ok";
        } catch (const ContinuationViolation& e) {
            pipe.warnings.push_back({"index_profile", e.what()});
            pipe.consistency_flag = true;
            res.summary = "profile: continuation violation";
        }
        finalize("report.json");
        return res;
    }

    if (sub == "simulate") {
        if (cfg.simulate_mode < 1 || cfg.simulate_mode > cfg.modes)
            throw InvalidArgument("simulate.mode out of range");
        Eigen::VectorXd a0 = Eigen::VectorXd::Zero(cfg.modes);
        a0[cfg.simulate_mode - 1] = cfg.simulate_amplitude;
        FlowControls fc;
        fc.horizon = cfg.horizon;
        fc.norm_budget = cfg.norm_budget;
        const TrajectoryRecord rec = integrate(pipe.domain, pipe.fam, cfg.simulate_lambda, a0, fc);
        write_artifact(cfg, "trajectory.csv", trajectory_csv(rec));
        pipe.report["trajectory"] =
            Json{{"status", to_string(rec.status)},
                 {"t_end", format_double(rec.samples.back().t)},
                 {"accepted_steps", rec.accepted_steps}};
        res.summary = std::string("simulate: ") + to_string(rec.status);
        finalize("report.json");
        return res;
    }

    if (sub == "branch" || sub == "sweep") {
        pipe.run_checks();
        const auto ups = pipe.upsilon_in_window();
        pipe.report["upsilon"] = pipe.upsilon_json(ups);
        if (ups.empty()) throw InvalidArgument("no bifurcation values inside the window");
        IndexProfile prof;
        HypothesesResult hyp;
        try {
            prof = pipe.run_profile(ups);
            hyp = check_hypotheses(prof);
        } catch (const ContinuationViolation& e) {
            pipe.warnings.push_back({"index_profile", e.what()});
            pipe.consistency_flag = true;
            finalize("report.json");
            return res;
        }

        std::vector<int> targets;
        if (sub == "branch") {
            if (cfg.branch_k < 1 || cfg.branch_k > static_cast<int>(ups.size()))
                throw InvalidArgument("branch.k does not select a detected bifurcation value");
            targets.push_back(cfg.branch_k - 1);
        } else {
            for (std::size_t i = 0; i < ups.size(); ++i) targets.push_back(static_cast<int>(i));
        }

        Json outcomes = Json::array();
        for (int idx : targets) {
            const double gamma = ups[idx];
            const BranchControls bc = pipe.branch_controls();
            const BranchGraph graph = build_global_branch(pipe.domain, pipe.fam, gamma, ups, bc);
            const OutcomeReport outcome = classify(graph, prof, ups, hyp, bc);

            const std::string suffix = sub == "sweep" ? "_k" + std::to_string(idx + 1) : "";
            write_artifact(cfg, "graph" + suffix + ".json", dump_json(graph_json(graph)));
            write_artifact(cfg, "diagram" + suffix + ".svg", render_diagram(graph, ups));

            Json oj = outcome_json(outcome);
            oj["gamma"] = format_double(gamma);
            outcomes.push_back(oj);

            if (outcome.classification == BranchClassification::UndeterminedBudget)
                pipe.undetermined = true;
            if (outcome.theorem_contradiction) {
                pipe.consistency_flag = true;
                pipe.warnings.push_back(
                    {"classify",
                     "MeetsTrivialAt reported although (H1)-(H3) hold; this contradicts the "
                     "unbounded-branch conclusion and signals a numerical failure"});
            }
            if (res.summary.empty())
                res.summary = std::string(sub) + ": " + to_string(outcome.classification);
        }
        pipe.report["outcome"] = sub == "branch" ? outcomes[0] : Json(outcomes);
        finalize("report.json");
        return res;
    }

    throw InvalidArgument("unknown subcommand: " + sub);
}

}  // namespace dynbif
