#include "owc/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "owc/errors.hpp"

namespace owc::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kSweepVars = {"pt_dbm", "d", "d_r", "gamma_th_db"};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

double number(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

void read_number(const json& obj, const std::string& key, double& out, const std::string& where) {
    if (obj.contains(key)) out = number(obj, key, where);
}

void read_bool(const json& obj, const std::string& key, bool& out, const std::string& where) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) throw ConfigError(where + "." + key + ": expected true/false");
    out = obj.at(key).get<bool>();
}

std::uint64_t read_u64(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(where + ": expected a non-negative integer");
}

QuadMode quad_mode_from_string(const std::string& s) {
    if (s == "bound") return QuadMode::bound;
    if (s == "harmonic") return QuadMode::harmonic;
    throw ConfigError("quadrature_mode: expected 'bound' or 'harmonic', got '" + s + "'");
}

OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("output.format: expected 'csv' or 'json', got '" + s + "'");
}

WzeqConvention convention_from_string(const std::string& s) {
    if (s == "paper") return WzeqConvention::paper;
    if (s == "literature") return WzeqConvention::literature;
    throw ConfigError("geometry.wzeq_convention: expected 'paper' or 'literature', got '" + s + "'");
}

std::string convention_name(WzeqConvention c) {
    return c == WzeqConvention::paper ? "paper" : "literature";
}

SweepSpec sweep_from_json(const json& j) {
    if (j.is_string()) return parse_sweep(j.get<std::string>());
    check_keys(j, {"var", "lo", "hi", "n"}, "sweep");
    SweepSpec s;
    if (!j.contains("var") || !j.at("var").is_string()) throw ConfigError("sweep.var: required string");
    s.var = j.at("var").get<std::string>();
    s.lo = number(j, "lo", "sweep");
    s.hi = number(j, "hi", "sweep");
    if (j.contains("n")) s.n = static_cast<int>(read_u64(j.at("n"), "sweep.n"));
    return s;
}

}  // namespace

std::string to_string(QuadMode mode) { return mode == QuadMode::bound ? "bound" : "harmonic"; }

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] =
            i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

std::string SweepSpec::column_name() const {
    if (var == "pt_dbm") return "pt_dbm[dBm]";
    if (var == "d") return "d[km]";
    if (var == "d_r") return "d_r[km]";
    return "gamma_th_db[dB]";
}

SweepSpec parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4) {
        throw ConfigError("sweep: expected <var>:<lo>:<hi>[:<n>], got '" + text + "'");
    }
    SweepSpec s;
    s.var = parts[0];
    try {
        std::size_t pos = 0;
        s.lo = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
        s.hi = std::stod(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
        if (parts.size() == 4) {
            s.n = std::stoi(parts[3], &pos);
            if (pos != parts[3].size()) throw std::invalid_argument(parts[3]);
        }
    } catch (const std::logic_error&) {
        throw ConfigError("sweep: could not parse numbers in '" + text + "'");
    }
    return s;
}

double RunConfig::gamma_th() const { return std::pow(10.0, gamma_th_db / 10.0); }

void RunConfig::validate() const {
    auto wrap = [](auto&& fn) {
        try {
            fn();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    };
    wrap([&] { fog.validate(); });
    wrap([&] { system.validate(); });
    if (geometry.has_value() == measured.has_value()) {
        throw ConfigError("pointing: give exactly one of 'geometry' or 'pointing'");
    }
    if (!(topology.d_km > 0.0) || !std::isfinite(topology.d_km)) {
        throw ConfigError("topology.d_km: total distance d must be positive");
    }
    if (topology.relay_km) {
        const double dr = *topology.relay_km;
        if (!(dr > 0.0 && dr < topology.d_km)) {
            throw ConfigError("topology.relay_km: relay distance must satisfy 0 < d_r < d (d_r = " +
                              std::to_string(dr) + " km, d = " + std::to_string(topology.d_km) +
                              " km)");
        }
    }
    if (!std::isfinite(gamma_th_db)) throw ConfigError("gamma_th_db: must be finite");
    if (!methods.closed_form && !methods.quadrature && !methods.monte_carlo) {
        throw ConfigError("methods: request at least one of closed_form, quadrature, monte_carlo");
    }
    if (!(numerics.rel_tol > 0.0) || !(numerics.abs_tol > 0.0) || numerics.max_subdivisions < 10) {
        throw ConfigError("numerics: rel_tol and abs_tol must be positive, max_subdivisions >= 10");
    }
    wrap([&] { simulation.validate(); });
    if (sweep) {
        if (!kSweepVars.count(sweep->var)) {
            throw ConfigError("sweep: variable must be one of pt_dbm, d, d_r, gamma_th_db (got '" +
                              sweep->var + "')");
        }
        if (sweep->n < 3) throw ConfigError("sweep: grid needs at least 3 points");
        if (!std::isfinite(sweep->lo) || !std::isfinite(sweep->hi) || sweep->lo == sweep->hi) {
            throw ConfigError("sweep: lo and hi must be finite and distinct");
        }
        if (sweep->var == "d" && !(std::min(sweep->lo, sweep->hi) > 0.0)) {
            throw ConfigError("sweep: distances must be positive");
        }
        if (sweep->var == "d_r") {
            const double lo = std::min(sweep->lo, sweep->hi);
            const double hi = std::max(sweep->lo, sweep->hi);
            if (!(lo > 0.0 && hi < topology.d_km)) {
                throw ConfigError("sweep: relay distance must satisfy 0 < d_r < d over the grid");
            }
        }
    }
    // Hop-level checks (Rayleigh distance, pointing ranges) surface here rather than mid-run.
    if (!sweep) {
        wrap([&] {
            relay();
            if (baseline) direct_link();
        });
    }
}

RelayConfig RunConfig::relay() const {
    const double d = topology.d_km;
    const double dr = topology.d_r_km();
    if (geometry) return make_relay(d, dr, fog, *geometry, system);
    const auto& mp = *measured;
    const auto pp1 = PointingParams::from_direct(mp.hop1_A0, mp.hop1_rho, mp.jitter_sigma);
    const auto pp2 = PointingParams::from_direct(mp.hop2_A0, mp.hop2_rho, mp.jitter_sigma);
    if (!(dr > 0.0 && dr < d)) throw DomainError("relay distance must satisfy 0 < d_r < d");
    return make_relay(dr, d - dr, fog, pp1, pp2, system);
}

PointingParams RunConfig::direct_pointing() const {
    if (geometry) return pointing_params(topology.d_km * 1000.0, *geometry);
    const auto& mp = *measured;
    return PointingParams::from_direct(mp.direct_A0, mp.direct_rho, mp.jitter_sigma);
}

LinkParams RunConfig::direct_link() const {
    return make_link(topology.d_km, fog, direct_pointing(), system);
}

RunConfig RunConfig::at(const std::string& var, double value) const {
    RunConfig c = *this;
    c.sweep.reset();
    if (var == "pt_dbm") {
        c.system.pt_dbm = value;
    } else if (var == "d") {
        c.topology.d_km = value;
    } else if (var == "d_r") {
        c.topology.relay_km = value;
    } else if (var == "gamma_th_db") {
        c.gamma_th_db = value;
    } else {
        throw ConfigError("unknown sweep variable '" + var + "'");
    }
    return c;
}

RunConfig default_config() {
    RunConfig c;
    c.geometry = PointingGeometry{};
    return c;
}

RunConfig parse_config(const json& j) {
    check_keys(j,
               {"fog", "system", "geometry", "pointing", "topology", "gamma_th_db", "methods",
                "quadrature_mode", "half_duplex_penalty", "simulation", "baseline", "numerics",
                "sweep", "output", "provenance"},
               "config");
    RunConfig c;
    if (j.contains("fog")) {
        const auto& f = j.at("fog");
        check_keys(f, {"k", "beta"}, "fog");
        read_number(f, "k", c.fog.k, "fog");
        read_number(f, "beta", c.fog.beta, "fog");
    }
    if (j.contains("system")) {
        const auto& s = j.at("system");
        check_keys(s, {"pt_dbm", "responsivity", "noise_var"}, "system");
        read_number(s, "pt_dbm", c.system.pt_dbm, "system");
        read_number(s, "responsivity", c.system.responsivity, "system");
        read_number(s, "noise_var", c.system.noise_var, "system");
    }
    if (j.contains("geometry") && j.contains("pointing")) {
        throw ConfigError("pointing: give exactly one of 'geometry' or 'pointing', not both");
    }
    if (j.contains("pointing")) {
        const auto& p = j.at("pointing");
        check_keys(p, {"hop1", "hop2", "direct", "jitter_sigma"}, "pointing");
        MeasuredPointing mp;
        auto read_pair = [&](const char* key, double& A0, double& rho) {
            if (!p.contains(key)) throw ConfigError(std::string("pointing.") + key + ": required");
            const auto& h = p.at(key);
            const std::string where = std::string("pointing.") + key;
            check_keys(h, {"A0", "rho"}, where);
            A0 = number(h, "A0", where);
            rho = number(h, "rho", where);
        };
        read_pair("hop1", mp.hop1_A0, mp.hop1_rho);
        read_pair("hop2", mp.hop2_A0, mp.hop2_rho);
        read_pair("direct", mp.direct_A0, mp.direct_rho);
        read_number(p, "jitter_sigma", mp.jitter_sigma, "pointing");
        c.measured = mp;
    } else {
        PointingGeometry g;
        if (j.contains("geometry")) {
            const auto& gj = j.at("geometry");
            check_keys(gj,
                       {"aperture_radius", "waist_w0", "wavelength", "jitter_sigma",
                        "ref_beam_waist", "ref_distance", "wzeq_convention"},
                       "geometry");
            read_number(gj, "aperture_radius", g.aperture_radius, "geometry");
            read_number(gj, "waist_w0", g.waist_w0, "geometry");
            read_number(gj, "wavelength", g.wavelength, "geometry");
            read_number(gj, "jitter_sigma", g.jitter_sigma_s, "geometry");
            read_number(gj, "ref_beam_waist", g.beam_waist_at_ref, "geometry");
            read_number(gj, "ref_distance", g.ref_distance, "geometry");
            if (gj.contains("wzeq_convention")) {
                g.convention = convention_from_string(gj.at("wzeq_convention").get<std::string>());
            }
        }
        c.geometry = g;
    }
    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        check_keys(t, {"d_km", "relay_km", "midpoint"}, "topology");
        read_number(t, "d_km", c.topology.d_km, "topology");
        bool midpoint = !t.contains("relay_km");
        read_bool(t, "midpoint", midpoint, "topology");
        if (t.contains("relay_km")) {
            if (midpoint) throw ConfigError("topology: 'relay_km' conflicts with midpoint = true");
            c.topology.relay_km = number(t, "relay_km", "topology");
        } else if (!midpoint) {
            throw ConfigError("topology: midpoint = false requires 'relay_km'");
        }
    }
    read_number(j, "gamma_th_db", c.gamma_th_db, "config");
    if (j.contains("methods")) {
        const auto& m = j.at("methods");
        if (!m.is_array()) throw ConfigError("methods: expected an array of method names");
        c.methods = Methods{false, false, false};
        for (const auto& item : m) {
            const auto name = item.get<std::string>();
            if (name == "closed_form") c.methods.closed_form = true;
            else if (name == "quadrature") c.methods.quadrature = true;
            else if (name == "monte_carlo") c.methods.monte_carlo = true;
            else throw ConfigError("methods: unknown method '" + name + "'");
        }
    }
    if (j.contains("quadrature_mode")) {
        c.quadrature_mode = quad_mode_from_string(j.at("quadrature_mode").get<std::string>());
    }
    read_bool(j, "half_duplex_penalty", c.half_duplex_penalty, "config");
    read_bool(j, "baseline", c.baseline, "config");
    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        check_keys(s, {"trials", "seed", "chunk_size", "mode", "threads"}, "simulation");
        if (s.contains("trials")) c.simulation.trials = read_u64(s.at("trials"), "simulation.trials");
        if (s.contains("seed")) c.simulation.master_seed = read_u64(s.at("seed"), "simulation.seed");
        if (s.contains("chunk_size")) {
            c.simulation.chunk_size = read_u64(s.at("chunk_size"), "simulation.chunk_size");
        }
        if (s.contains("threads")) {
            c.simulation.threads = static_cast<unsigned>(read_u64(s.at("threads"), "simulation.threads"));
        }
        if (s.contains("mode")) {
            try {
                c.simulation.mode = mc::sim_mode_from_string(s.at("mode").get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("simulation.mode: ") + e.what());
            }
        }
    }
    if (j.contains("numerics")) {
        const auto& n = j.at("numerics");
        check_keys(n, {"rel_tol", "abs_tol", "max_subdivisions"}, "numerics");
        read_number(n, "rel_tol", c.numerics.rel_tol, "numerics");
        read_number(n, "abs_tol", c.numerics.abs_tol, "numerics");
        if (n.contains("max_subdivisions")) {
            c.numerics.max_subdivisions =
                static_cast<int>(read_u64(n.at("max_subdivisions"), "numerics.max_subdivisions"));
        }
    }
    if (j.contains("sweep") && !j.at("sweep").is_null()) c.sweep = sweep_from_json(j.at("sweep"));
    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, {"path", "format"}, "output");
        if (o.contains("path") && !o.at("path").is_null()) c.output_path = o.at("path").get<std::string>();
        if (o.contains("format")) c.format = format_from_string(o.at("format").get<std::string>());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

json to_json(const RunConfig& c) {
    json j;
    j["fog"] = {{"k", c.fog.k}, {"beta", c.fog.beta}};
    j["system"] = {{"pt_dbm", c.system.pt_dbm},
                   {"responsivity", c.system.responsivity},
                   {"noise_var", c.system.noise_var}};
    if (c.geometry) {
        const auto& g = *c.geometry;
        j["geometry"] = {{"aperture_radius", g.aperture_radius},
                         {"waist_w0", g.waist_w0},
                         {"wavelength", g.wavelength},
                         {"jitter_sigma", g.jitter_sigma_s},
                         {"ref_beam_waist", g.beam_waist_at_ref},
                         {"ref_distance", g.ref_distance},
                         {"wzeq_convention", convention_name(g.convention)}};
    }
    if (c.measured) {
        const auto& m = *c.measured;
        j["pointing"] = {{"hop1", {{"A0", m.hop1_A0}, {"rho", m.hop1_rho}}},
                         {"hop2", {{"A0", m.hop2_A0}, {"rho", m.hop2_rho}}},
                         {"direct", {{"A0", m.direct_A0}, {"rho", m.direct_rho}}},
                         {"jitter_sigma", m.jitter_sigma}};
    }
    j["topology"] = {{"d_km", c.topology.d_km}, {"midpoint", c.topology.midpoint()}};
    if (c.topology.relay_km) j["topology"]["relay_km"] = *c.topology.relay_km;
    j["gamma_th_db"] = c.gamma_th_db;
    json methods = json::array();
    if (c.methods.closed_form) methods.push_back("closed_form");
    if (c.methods.quadrature) methods.push_back("quadrature");
    if (c.methods.monte_carlo) methods.push_back("monte_carlo");
    j["methods"] = methods;
    j["quadrature_mode"] = to_string(c.quadrature_mode);
    j["half_duplex_penalty"] = c.half_duplex_penalty;
    j["baseline"] = c.baseline;
    j["simulation"] = {{"trials", c.simulation.trials},
                       {"seed", c.simulation.master_seed},
                       {"chunk_size", c.simulation.chunk_size},
                       {"threads", c.simulation.threads},
                       {"mode", mc::to_string(c.simulation.mode)}};
    j["numerics"] = {{"rel_tol", c.numerics.rel_tol},
                     {"abs_tol", c.numerics.abs_tol},
                     {"max_subdivisions", c.numerics.max_subdivisions}};
    if (c.sweep) {
        j["sweep"] = {{"var", c.sweep->var}, {"lo", c.sweep->lo}, {"hi", c.sweep->hi}, {"n", c.sweep->n}};
    }
    j["output"] = {{"format", to_string(c.format)}};
    if (c.output_path) j["output"]["path"] = *c.output_path;
    return j;
}

}  // namespace owc::cli
