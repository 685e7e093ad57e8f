// Run configuration: a flat key = value text format with explicit defaults,
// unknown keys rejected, and a canonical serialization (17 significant
// digits) so parse(serialize(c)) == c.
#ifndef DYNBIF_CONFIG_HPP
#define DYNBIF_CONFIG_HPP

#include <cstdint>
#include <string>

#include "dynbif/nonlinearity.hpp"
#include "dynbif/spectral.hpp"

namespace dynbif {

struct RunConfig {
    // domain
    std::string domain_kind = "interval";  // interval | rectangle
    double length_x = 3.14159265358979323846;
    double length_y = 3.14159265358979323846;
    int modes = 16;
    int quadrature_pmax = 5;

    // family
    std::string family_form = "power_law";  // power_law | affine_gain | custom
    double alpha = -1.0;
    double p = 3.0;
    double beta_c = 0.0;
    double q = 2.0;
    std::string family_g = "atan_gain";   // affine_gain only
    std::string family_f = "cubic_neg";   // affine_gain only
    std::string family_name = "linear";   // custom only

    // window and budgets
    double lambda_lo = 0.5;
    double lambda_hi = 10.5;
    double norm_budget = 1e3;
    int node_budget = 20000;
    double horizon = 1e4;

    std::uint64_t seed = 0;  // mandatory: 0 means "unset"
    std::string out_dir = "out";

    // subcommand options
    int branch_k = 1;
    double branch_step_factor = 0.05;
    double check_s_max = 1e3;
    double check_eps = 1.0;
    double simulate_lambda = 2.5;
    int simulate_mode = 1;
    double simulate_amplitude = 0.1;

    bool operator==(const RunConfig&) const = default;
};

// Parse the key = value text; throws InvalidArgument on unknown keys, bad
// values, or a missing seed.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text with every key explicit.
std::string serialize_config(const RunConfig& cfg);

// Validated constructors for the pieces the pipeline needs.
DomainSpec domain_spec(const RunConfig& cfg);
SpectralDomain build_domain(const RunConfig& cfg);
NonlinearityFamily build_family(const RunConfig& cfg);

// %.17g float formatting used by every text artifact
std::string format_double(double v);

}  // namespace dynbif

#endif
