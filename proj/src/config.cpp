#include "dynbif/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dynbif {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_num(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw InvalidArgument("");
        return x;
    } catch (...) {
        throw InvalidArgument("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw InvalidArgument("");
        return static_cast<int>(x);
    } catch (...) {
        throw InvalidArgument("config: bad integer value for " + key + ": '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw InvalidArgument("");
        return x;
    } catch (...) {
        throw InvalidArgument("config: bad seed value for " + key + ": '" + v + "'");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool seed_seen = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config: missing '=' on line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "domain.kind") cfg.domain_kind = val;
        else if (key == "domain.length_x") cfg.length_x = parse_num(key, val);
        else if (key == "domain.length_y") cfg.length_y = parse_num(key, val);
        else if (key == "modes") cfg.modes = parse_int(key, val);
        else if (key == "quadrature.pmax") cfg.quadrature_pmax = parse_int(key, val);
        else if (key == "family.form") cfg.family_form = val;
        else if (key == "family.alpha") cfg.alpha = parse_num(key, val);
        else if (key == "family.p") cfg.p = parse_num(key, val);
        else if (key == "family.beta") cfg.beta_c = parse_num(key, val);
        else if (key == "family.q") cfg.q = parse_num(key, val);
        else if (key == "family.g") cfg.family_g = val;
        else if (key == "family.f") cfg.family_f = val;
        else if (key == "family.name") cfg.family_name = val;
        else if (key == "lambda.lo") cfg.lambda_lo = parse_num(key, val);
        else if (key == "lambda.hi") cfg.lambda_hi = parse_num(key, val);
        else if (key == "budget.norm") cfg.norm_budget = parse_num(key, val);
        else if (key == "budget.nodes") cfg.node_budget = parse_int(key, val);
        else if (key == "budget.horizon") cfg.horizon = parse_num(key, val);
        else if (key == "seed") { cfg.seed = parse_u64(key, val); seed_seen = true; }
        else if (key == "out") cfg.out_dir = val;
        else if (key == "branch.k") cfg.branch_k = parse_int(key, val);
        else if (key == "branch.step_factor") cfg.branch_step_factor = parse_num(key, val);
        else if (key == "check.s_max") cfg.check_s_max = parse_num(key, val);
        else if (key == "check.eps") cfg.check_eps = parse_num(key, val);
        else if (key == "simulate.lambda") cfg.simulate_lambda = parse_num(key, val);
        else if (key == "simulate.mode") cfg.simulate_mode = parse_int(key, val);
        else if (key == "simulate.amplitude") cfg.simulate_amplitude = parse_num(key, val);
        else throw InvalidArgument("config: unknown key '" + key + "'");
    }
    if (!seed_seen || cfg.seed == 0)
        throw InvalidArgument("config: a nonzero seed is mandatory");
    if (cfg.domain_kind != "interval" && cfg.domain_kind != "rectangle")
        throw InvalidArgument("config: domain.kind must be interval or rectangle");
    if (cfg.family_form != "power_law" && cfg.family_form != "affine_gain" &&
        cfg.family_form != "custom")
        throw InvalidArgument("config: family.form must be power_law, affine_gain or custom");
    if (!(cfg.lambda_lo < cfg.lambda_hi))
        throw InvalidArgument("config: lambda window is empty");
    if (cfg.modes < 1) throw InvalidArgument("config: modes must be >= 1");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    o << "domain.kind = " << c.domain_kind << "\n";
    o << "domain.length_x = " << format_double(c.length_x) << "\n";
    o << "domain.length_y = " << format_double(c.length_y) << "\n";
    o << "modes = " << c.modes << "\n";
    o << "quadrature.pmax = " << c.quadrature_pmax << "\n";
    o << "family.form = " << c.family_form << "\n";
    o << "family.alpha = " << format_double(c.alpha) << "\n";
    o << "family.p = " << format_double(c.p) << "\n";
    o << "family.beta = " << format_double(c.beta_c) << "\n";
    o << "family.q = " << format_double(c.q) << "\n";
    o << "family.g = " << c.family_g << "\n";
    o << "family.f = " << c.family_f << "\n";
    o << "family.name = " << c.family_name << "\n";
    o << "lambda.lo = " << format_double(c.lambda_lo) << "\n";
    o << "lambda.hi = " << format_double(c.lambda_hi) << "\n";
    o << "budget.norm = " << format_double(c.norm_budget) << "\n";
    o << "budget.nodes = " << c.node_budget << "\n";
    o << "budget.horizon = " << format_double(c.horizon) << "\n";
    o << "seed = " << c.seed << "\n";
    o << "out = " << c.out_dir << "\n";
    o << "branch.k = " << c.branch_k << "\n";
    o << "branch.step_factor = " << format_double(c.branch_step_factor) << "\n";
    o << "check.s_max = " << format_double(c.check_s_max) << "\n";
    o << "check.eps = " << format_double(c.check_eps) << "\n";
    o << "simulate.lambda = " << format_double(c.simulate_lambda) << "\n";
    o << "simulate.mode = " << c.simulate_mode << "\n";
    o << "simulate.amplitude = " << format_double(c.simulate_amplitude) << "\n";
    return o.str();
}

DomainSpec domain_spec(const RunConfig& cfg) {
    return cfg.domain_kind == "interval" ? DomainSpec::interval(cfg.length_x)
                                         : DomainSpec::rectangle(cfg.length_x, cfg.length_y);
}

SpectralDomain build_domain(const RunConfig& cfg) {
    return SpectralDomain::build(domain_spec(cfg), cfg.modes, cfg.quadrature_pmax);
}

NonlinearityFamily build_family(const RunConfig& cfg) {
    if (cfg.family_form == "power_law")
        return NonlinearityFamily::power_law(cfg.alpha, cfg.p, cfg.beta_c, cfg.q);
    if (cfg.family_form == "affine_gain")
        return NonlinearityFamily::affine_gain(scalar_function(cfg.family_g),
                                               scalar_function(cfg.family_f));
    return custom_family(cfg.family_name);
}

}  // namespace dynbif
