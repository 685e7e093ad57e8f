// Machine-readable run report and graph/trajectory/branch exports.
#ifndef DYNBIF_REPORT_HPP
#define DYNBIF_REPORT_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "dynbif/branch.hpp"
#include "dynbif/config.hpp"
#include "dynbif/conley.hpp"
#include "dynbif/equilibria.hpp"
#include "dynbif/flow.hpp"
#include "dynbif/nonlinearity.hpp"

namespace dynbif {

using Json = nlohmann::ordered_json;

inline const char* kToolName = "dynbif";
inline const char* kToolVersion = "0.1.0";

struct Warning {
    std::string op;
    std::string message;
};

Json config_json(const RunConfig& cfg);
Json f1_json(const F1Result& r);
Json f2_json(const F2Result& r);
Json profile_json(const IndexProfile& p);
Json outcome_json(const OutcomeReport& r);
Json graph_json(const BranchGraph& g);
Json warnings_json(const std::vector<Warning>& ws);

// CSV columns: t, |u|, ||u||, J, dissipation, status
std::string trajectory_csv(const TrajectoryRecord& rec);
// CSV columns: arclength, lambda, |u|, ||u||, morse_index, margin, event
std::string branch_csv(const ContinuedBranch& br);
// CSV columns: index, eigenvalue, jx, jy, multiplicity_of_distinct
std::string spectrum_csv(const SpectralDomain& d);

std::string dump_json(const Json& j);

}  // namespace dynbif

#endif
