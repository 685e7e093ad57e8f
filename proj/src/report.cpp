#include "dynbif/report.hpp"

#include <sstream>

namespace dynbif {

Json config_json(const RunConfig& cfg) {
    // the canonical serialized form, key by key, so the report embeds the
    // exact text round-trip of the configuration
    Json j = Json::object();
    std::istringstream in(serialize_config(cfg));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

Json f1_json(const F1Result& r) {
    Json j = Json::object();
    j["pass"] = r.pass;
    j["a1"] = format_double(r.a1);
    j["a2"] = format_double(r.a2);
    j["fitted_slope"] = format_double(r.fitted_slope);
    if (!r.pass) {
        j["witness_lambda"] = format_double(r.witness_lambda);
        j["witness_s"] = format_double(r.witness_s);
    }
    return j;
}

Json f2_json(const F2Result& r) {
    Json j = Json::object();
    j["pass"] = r.pass;
    j["mu"] = format_double(r.mu);
    j["eps"] = format_double(r.eps);
    if (r.pass) {
        j["c_eps"] = format_double(r.c_eps);
        j["c_eps_note"] =
            "valid for the examined grid and asymptotic samples; not a proof over all s";
    } else {
        j["witness_lambda"] = format_double(r.witness_lambda);
        j["witness_s"] = format_double(r.witness_s);
    }
    return j;
}

Json profile_json(const IndexProfile& p) {
    Json gaps = Json::array();
    for (int i = 0; i < p.gap_count(); ++i) {
        Json g = Json::object();
        g["lo"] = format_double(p.breakpoint(i));
        g["hi"] = format_double(p.breakpoint(i + 1));
        g["index"] = p.values[i].to_string();
        gaps.push_back(g);
    }
    Json j = Json::object();
    j["window_lo"] = format_double(p.window_lo);
    j["window_hi"] = format_double(p.window_hi);
    Json ups = Json::array();
    for (double u : p.upsilon) ups.push_back(format_double(u));
    j["upsilon"] = ups;
    j["gaps"] = gaps;
    return j;
}

Json outcome_json(const OutcomeReport& r) {
    Json j = Json::object();
    j["classification"] = to_string(r.classification);
    j["budget_note"] =
        "unboundedness is budget-relative evidence, not a mathematical claim";
    j["norm_budget"] = format_double(r.norm_budget);
    j["max_nodes"] = r.max_nodes;
    j["extremal_lambda"] = format_double(r.extremal_lambda);
    j["extremal_v_norm"] = format_double(r.extremal_v_norm);
    if (r.classification == BranchClassification::MeetsTrivialAt) {
        j["meets_trivial_at"] = format_double(r.meets_trivial_at);
        Json between = Json::array();
        for (double u : r.upsilon_between) between.push_back(format_double(u));
        j["upsilon_between"] = between;
    }
    j["theorem_contradiction"] = r.theorem_contradiction;
    Json js = Json::array();
    for (double u : r.j_set) js.push_back(format_double(u));
    j["j_set"] = js;
    return j;
}

Json graph_json(const BranchGraph& g) {
    Json nodes = Json::array();
    for (const BranchNode& n : g.nodes) {
        Json jn = Json::object();
        jn["id"] = n.id;
        jn["lambda"] = format_double(n.lambda);
        jn["trivial"] = n.trivial;
        jn["family"] = n.family;
        jn["morse_index"] = n.morse_index;
        jn["margin"] = format_double(n.margin);
        jn["h_norm"] = format_double(n.h_norm);
        jn["v_norm"] = format_double(n.v_norm);
        jn["energy"] = format_double(n.energy);
        jn["in_component"] = static_cast<bool>(g.in_component[n.id]);
        Json cs = Json::array();
        for (int i = 0; i < n.coeffs.size(); ++i) cs.push_back(format_double(n.coeffs[i]));
        jn["coeffs"] = cs;
        nodes.push_back(jn);
    }
    Json edges = Json::array();
    for (const auto& e : g.edges) {
        Json je = Json::object();
        je["kind"] = e.kind == EdgeKind::ContinuationLink ? "continuation" : "heteroclinic";
        je["from"] = e.from;
        je["to"] = e.to;
        edges.push_back(je);
    }
    Json j = Json::object();
    j["object"] = "Gamma approximation";
    j["gamma"] = format_double(g.gamma);
    j["root"] = g.root;
    Json lg = Json::array();
    for (double l : g.lambda_grid) lg.push_back(format_double(l));
    j["lambda_grid"] = lg;
    j["nodes"] = nodes;
    j["edges"] = edges;
    j["norm_budget_hit"] = g.norm_budget_hit;
    j["window_edge_reached"] = g.window_edge_reached;
    j["node_budget_exhausted"] = g.node_budget_exhausted;
    return j;
}

Json warnings_json(const std::vector<Warning>& ws) {
    Json j = Json::array();
    for (const Warning& w : ws) {
        Json jw = Json::object();
        jw["op"] = w.op;
        jw["message"] = w.message;
        j.push_back(jw);
    }
    return j;
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
    std::ostringstream o;
    o << "t,h_norm,v_norm,energy,dissipation,status\n";
    const char* status = to_string(rec.status);
    for (const TrajectorySample& s : rec.samples) {
        o << format_double(s.t) << ',' << format_double(s.h_norm) << ','
          << format_double(s.v_norm) << ',' << format_double(s.energy) << ','
          << format_double(s.dissipation) << ',' << status << '\n';
    }
    return o.str();
}

std::string branch_csv(const ContinuedBranch& br) {
    // each event labels the point nearest in arclength
    std::vector<std::string> labels(br.points.size());
    for (const BranchEvent& e : br.events) {
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t i = 0; i < br.points.size(); ++i) {
            const double dist = std::abs(br.points[i].arclength - e.arclength);
            if (dist < bd) { bd = dist; best = i; }
        }
        const char* name = e.kind == BranchEventKind::Fold ? "fold"
                           : e.kind == BranchEventKind::IndexChange ? "index-change"
                                                                    : "trivial-intersection";
        if (!labels[best].empty()) labels[best] += ';';
        labels[best] += name;
    }
    std::ostringstream o;
    o << "arclength,lambda,h_norm,v_norm,morse_index,margin,event\n";
    for (std::size_t i = 0; i < br.points.size(); ++i) {
        const BranchPoint& p = br.points[i];
        o << format_double(p.arclength) << ',' << format_double(p.eq.lambda) << ','
          << format_double(p.eq.h_norm) << ',' << format_double(p.eq.v_norm) << ','
          << p.eq.morse_index << ',' << format_double(p.eq.margin) << ',' << labels[i] << '\n';
    }
    return o.str();
}

std::string spectrum_csv(const SpectralDomain& d) {
    std::ostringstream o;
    o << "index,eigenvalue,jx,jy\n";
    for (int j = 0; j < d.mode_count(); ++j) {
        const Mode& mo = d.mode_list()[j];
        o << j + 1 << ',' << format_double(mo.eigenvalue) << ',' << mo.jx << ',' << mo.jy << '\n';
    }
    return o.str();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace dynbif
