// owcrelay: outage, average SNR and rate of a fog + pointing-error OWC relay link.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "owc/cli/commands.hpp"
#include "owc/cli/config.hpp"
#include "owc/errors.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::string> mode;
    std::optional<std::string> sweep;
    std::optional<std::string> methods;
};

owc::cli::RunConfig resolve(const Overrides& o) {
    using namespace owc::cli;
    RunConfig cfg = o.config_path.empty() ? default_config() : load_config(o.config_path);
    if (o.out) cfg.output_path = *o.out;
    if (o.format) {
        if (*o.format == "csv") {
            cfg.format = OutputFormat::csv;
        } else if (*o.format == "json") {
            cfg.format = OutputFormat::json;
        } else {
            throw ConfigError("--format must be csv or json");
        }
    }
    if (o.seed) cfg.simulation.master_seed = *o.seed;
    if (o.trials) cfg.simulation.trials = *o.trials;
    if (o.mode) {
        try {
            cfg.simulation.mode = owc::mc::sim_mode_from_string(*o.mode);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("--mode: ") + e.what());
        }
    }
    if (o.sweep) cfg.sweep = parse_sweep(*o.sweep);
    if (o.methods) {
        Methods m{false, false, false};
        std::stringstream ss(*o.methods);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "closed_form" || item == "cf") {
                m.closed_form = true;
            } else if (item == "quadrature" || item == "quad") {
                m.quadrature = true;
            } else if (item == "monte_carlo" || item == "mc") {
                m.monte_carlo = true;
            } else {
                throw ConfigError("--methods: unknown method '" + item + "'");
            }
        }
        cfg.methods = m;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace owc::cli;

    CLI::App app{"Fog and pointing-error OWC relay analysis"};
    app.require_subcommand(1);
    Overrides o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON run configuration");
        sub->add_option("--out", o.out, "output file (a <out>.json config sidecar is written too)");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", o.seed, "Monte Carlo master seed");
        sub->add_option("--trials", o.trials, "Monte Carlo trials");
        sub->add_option("--mode", o.mode, "direct, relay-min, relay-harmonic or relay-true");
        sub->add_option("--sweep", o.sweep, "<var>:<lo>:<hi>[:<n>], var in pt_dbm, d, d_r, gamma_th_db");
        sub->add_option("--methods", o.methods, "comma list of cf, quad, mc");
    };
    auto* metrics = app.add_subcommand("metrics", "all requested methods at one operating point");
    auto* sweep = app.add_subcommand("sweep", "curve data over one swept variable");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate at one operating point");
    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    for (auto* sub : {metrics, sweep, simulate, validate}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        const RunConfig cfg = resolve(o);
        if (metrics->parsed()) return cmd_metrics(cfg, std::cout, std::cerr);
        if (sweep->parsed()) return cmd_sweep(cfg, std::cout, std::cerr);
        if (simulate->parsed()) return cmd_simulate(cfg, std::cout, std::cerr);
        return cmd_validate(cfg, std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const owc::NonConvergence& e) {
        std::cerr << "error: numerical non-convergence in integral '" << e.label() << "'\n";
        return kNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
}
