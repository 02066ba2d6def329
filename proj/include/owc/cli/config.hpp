#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "owc/channel.hpp"
#include "owc/geometry.hpp"
#include "owc/montecarlo.hpp"
#include "owc/relay.hpp"

namespace owc::cli {

/// Invalid or inconsistent run configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Measured pointing parameters, one set per link.
struct MeasuredPointing {
    double hop1_A0 = 0.0;
    double hop1_rho = 0.0;
    double hop2_A0 = 0.0;
    double hop2_rho = 0.0;
    double direct_A0 = 0.0;
    double direct_rho = 0.0;
    double jitter_sigma = 0.28;
};

struct Topology {
    double d_km = 1.0;
    std::optional<double> relay_km;  ///< empty: relay at the midpoint

    bool midpoint() const { return !relay_km.has_value(); }
    double d_r_km() const { return relay_km.value_or(d_km / 2.0); }
};

struct Methods {
    bool closed_form = true;
    bool quadrature = true;
    bool monte_carlo = false;
};

enum class OutputFormat { csv, json };

struct SweepSpec {
    std::string var;  ///< pt_dbm | d | d_r | gamma_th_db
    double lo = 0.0;
    double hi = 0.0;
    int n = 31;

    std::vector<double> grid() const;
    std::string column_name() const;  ///< variable name with its unit suffix
};

/// Parses "<var>:<lo>:<hi>[:<n>]".
SweepSpec parse_sweep(const std::string& text);

struct RunConfig {
    FogParams fog;
    SystemParams system;
    std::optional<PointingGeometry> geometry;  ///< exactly one of geometry / measured
    std::optional<MeasuredPointing> measured;
    Topology topology;
    double gamma_th_db = 6.0;
    Methods methods;
    QuadMode quadrature_mode = QuadMode::harmonic;
    bool half_duplex_penalty = false;
    mc::SimSpec simulation;
    bool baseline = true;
    NumericsOptions numerics;
    std::optional<SweepSpec> sweep;
    std::optional<std::string> output_path;
    OutputFormat format = OutputFormat::csv;

    double gamma_th() const;
    /// Throws ConfigError naming the violated constraint.
    void validate() const;

    RelayConfig relay() const;
    LinkParams direct_link() const;
    PointingParams direct_pointing() const;

    /// Copy with the sweep variable set to `value` (distances in km).
    RunConfig at(const std::string& var, double value) const;
};

/// Defaults: the numeric-analysis parameters (k = 2, β = 13.12, R = 0.41, σ_w² = 1e-14,
/// γ_th = 6 dB, beam-optics pointing, d = 1 km with a midpoint relay, pt = 15 dBm).
RunConfig default_config();

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

std::string to_string(QuadMode mode);
std::string to_string(OutputFormat f);

}  // namespace owc::cli
