// techmap command-line driver.
#include "techmap/config.hpp"
#include "techmap/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using namespace techmap;

void print_warnings(const pipeline::StageResult& r) {
    for (const auto& w : r.diagnostics.warnings) std::cerr << "warning: [" << r.stage << "] " << w << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Technology map pipeline: corpus -> terms -> graph -> analysis -> layout -> export"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    app.add_option("-c,--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config, "print the effective configuration and exit");

    std::map<std::string, std::optional<std::string>> values;
    for (const auto& k : config::known_keys()) {
        auto& slot = values[k.key];
        app.add_option_function<std::string>("--" + k.key, [&slot](const std::string& v) { slot = v; }, k.help)
            ->group("Configuration [" + k.section + "]");
    }

    const std::map<std::string, std::string> commands{
        {"ingest", "load, deduplicate, year-filter and tag the corpus"},
        {"extract", "extract technology terms from the dependency parses"},
        {"build", "build the co-occurrence and semantic-link graph"},
        {"analyze", "centralities, clusters, bridging, RI matrix, trends"},
        {"layout", "ForceAtlas2 node positions"},
        {"export", "write GEXF and JSON graph files"},
        {"report", "print the analysis summary"},
        {"pipeline", "run every stage in order"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        std::map<std::string, std::string> overrides;
        for (const auto& [k, v] : values)
            if (v) overrides[k] = *v;
        auto raw = config_path.empty() ? config::RawConfig{} : config::load_ini(config_path);
        if (dump_config) {
            for (const auto& [k, v] : overrides) raw.entries[k].value = v;
            std::cout << config::to_ini(raw);
            return 0;
        }
        const bool needs_inputs = command == "ingest" || command == "extract" || command == "pipeline";
        const auto cfg = config::resolve(std::move(raw), overrides, needs_inputs);

        if (command == "report") {
            pipeline::run_report(cfg, std::cout);
        } else if (command == "pipeline") {
            for (const auto& r : pipeline::run_pipeline(cfg)) {
                print_warnings(r);
                std::cout << r.stage << ": " << r.outputs.size() << " files\n";
            }
        } else {
            const auto r = pipeline::run_stage(command, cfg);
            print_warnings(r);
            for (const auto& f : r.outputs) std::cout << (cfg.output_dir / f).string() << '\n';
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pipeline::exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pipeline::exit_code(e);
    }
}
