#include "dynbif/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dynbif {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    // normalize negative zero for byte stability
    if (std::string(buf) == "-0.0000") return "0.0000";
    return buf;
}

}  // namespace

std::string render_diagram(const BranchGraph& g, const std::vector<double>& upsilon,
                           const DiagramStyle& st) {
    if (g.lambda_grid.empty()) throw InvalidArgument("cannot render an empty graph");

    const double lam_lo = g.lambda_grid.front();
    const double lam_hi = g.lambda_grid.back();
    double norm_hi = 1.0;
    for (const BranchNode& n : g.nodes) norm_hi = std::max(norm_hi, n.v_norm);
    norm_hi *= 1.05;

    const double w = st.width - 2.0 * st.margin;
    const double h = st.height - 2.0 * st.margin;
    auto X = [&](double lam) { return st.margin + w * (lam - lam_lo) / (lam_hi - lam_lo); };
    auto Y = [&](double vn) { return st.height - st.margin - h * vn / norm_hi; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << st.width << "\" height=\""
      << st.height << "\" viewBox=\"0 0 " << st.width << " " << st.height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // axes
    o << "<line x1=\"" << fmt(st.margin) << "\" y1=\"" << fmt(st.height - st.margin)
      << "\" x2=\"" << fmt(st.width - st.margin) << "\" y2=\"" << fmt(st.height - st.margin)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    o << "<line x1=\"" << fmt(st.margin) << "\" y1=\"" << fmt(st.margin) << "\" x2=\""
      << fmt(st.margin) << "\" y2=\"" << fmt(st.height - st.margin)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // trivial line along norm = 0
    o << "<line x1=\"" << fmt(X(lam_lo)) << "\" y1=\"" << fmt(Y(0.0)) << "\" x2=\""
      << fmt(X(lam_hi)) << "\" y2=\"" << fmt(Y(0.0))
      << "\" stroke=\"#888888\" stroke-width=\"2\"/>\n";

    // bifurcation-value ticks
    for (double u : upsilon) {
        if (u < lam_lo || u > lam_hi) continue;
        o << "<line x1=\"" << fmt(X(u)) << "\" y1=\"" << fmt(Y(0.0) - 6.0) << "\" x2=\""
          << fmt(X(u)) << "\" y2=\"" << fmt(Y(0.0) + 6.0)
          << "\" stroke=\"#cc0000\" stroke-width=\"2\"/>\n";
    }

    // continuation segments, solid when the source node is stable
    for (const auto& e : g.edges) {
        if (e.kind != EdgeKind::ContinuationLink) continue;
        const BranchNode& a = g.nodes[e.from];
        const BranchNode& b = g.nodes[e.to];
        if (a.trivial && b.trivial) continue;
        const bool stable = a.morse_index == 0 && b.morse_index == 0;
        o << "<line x1=\"" << fmt(X(a.lambda)) << "\" y1=\"" << fmt(Y(a.v_norm)) << "\" x2=\""
          << fmt(X(b.lambda)) << "\" y2=\"" << fmt(Y(b.v_norm))
          << "\" stroke=\"#1f4e9c\" stroke-width=\"1.5\""
          << (stable ? "" : " stroke-dasharray=\"5,4\"") << "/>\n";
    }

    // nodes of the component
    for (int id : g.component) {
        const BranchNode& n = g.nodes[id];
        if (n.trivial) continue;
        o << "<circle cx=\"" << fmt(X(n.lambda)) << "\" cy=\"" << fmt(Y(n.v_norm))
          << "\" r=\"1.5\" fill=\"#1f4e9c\"/>\n";
    }

    // root marker
    o << "<circle cx=\"" << fmt(X(g.gamma)) << "\" cy=\"" << fmt(Y(0.0))
      << "\" r=\"4\" fill=\"#cc0000\"/>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace dynbif
