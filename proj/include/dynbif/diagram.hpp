// Deterministic SVG bifurcation diagram: lambda horizontal, V-norm vertical,
// solid curves for stable (index-0) segments, dashed otherwise, the trivial
// line, and ticks at the bifurcation values.
#ifndef DYNBIF_DIAGRAM_HPP
#define DYNBIF_DIAGRAM_HPP

#include <string>
#include <vector>

#include "dynbif/branch.hpp"

namespace dynbif {

struct DiagramStyle {
    int width = 900;
    int height = 600;
    int margin = 60;
};

// Byte-identical output for identical inputs.
std::string render_diagram(const BranchGraph& g, const std::vector<double>& upsilon,
                           const DiagramStyle& style = {});

}  // namespace dynbif

#endif
