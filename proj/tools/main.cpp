#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "fracbubble/error.hpp"
#include "fracbubble/parallel.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("fracbubble");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    const char* env = std::getenv("FRACBUBBLE_LOG");
    if (!env) return;
    const std::string v = env;
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "info") spdlog::set_level(spdlog::level::info);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("FRACBUBBLE_LOG='{}' not in {{error,info,debug}}; using warnings only", v);
}

nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream is(path);
    if (!is) throw fb::DomainError("--config", "cannot open '" + path + "'");
    try {
        nlohmann::json j = nlohmann::json::parse(is);
        if (!j.is_object()) throw fb::DomainError("config", "top level must be a JSON object");
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw fb::DomainError("config", std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Fractional critical-exponent bubbles: constants, estimates, sphere maps and the slit-annulus solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 1;
    std::uint64_t seed = 1;
    fbcli::Context ctx;
    int n_override = 0;
    double s_override = 0.0;

    using Fn = int (*)(const fbcli::Context&);
    const std::map<std::string, std::pair<Fn, std::string>> commands{
        {"constants", {fbcli::cmd_constants, "S(N,s), c_inf, C(N,s) and 2*"}},
        {"bubble-energy", {fbcli::cmd_bubble_energy, "normalization d and the Talenti identities"}},
        {"verify-estimates", {fbcli::cmd_verify_estimates, "energy and mass rates of truncated bubbles"}},
        {"capacity", {fbcli::cmd_capacity, "1/|log theta| decay of the capacity cut-off"}},
        {"sphere-map", {fbcli::cmd_sphere_map, "degree and energy of the bubble sphere map"}},
        {"solve", {fbcli::cmd_solve, "projected descent on the slit annulus"}},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory (default: out/<command>)");
        sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "seed for gradient-check directions");
        if (name == "constants") {
            sub->add_option("--n", n_override, "dimension N");
            sub->add_option("--s", s_override, "order s");
        }
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::string chosen;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) chosen = name;

    try {
        ctx.config = load_config(config_path);
        ctx.out = out_dir.empty() ? std::filesystem::path("out") / chosen : std::filesystem::path(out_dir);
        ctx.seed = seed;
        if (chosen == "constants") {
            if (subs.at(chosen)->count("--n")) ctx.n = n_override;
            if (subs.at(chosen)->count("--s")) ctx.s = s_override;
        }
        fb::set_worker_count(workers);
        return commands.at(chosen).first(ctx);
    } catch (const fb::DomainError& e) {
        std::cerr << "invalid input (" << e.field() << "): " << e.what() << "\n";
        return 2;
    } catch (const fb::ComputationError& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
