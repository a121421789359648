#include "openbilliard/commands.hpp"
#include "openbilliard/errors.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Flags {
    std::string config;
    std::string out;
    std::optional<int> workers;
    std::string preset;
    bool record_timing = false;
    bool quiet = false;
};

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON run configuration");
    sub->add_option("--out", f.out, "output directory (overrides the config)");
    sub->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--preset", f.preset, "fill absent fields from a preset")->check(CLI::IsMember({"paper"}));
    sub->add_flag("--record-timing", f.record_timing, "store wall-clock time in the manifest");
    sub->add_flag("-q,--quiet", f.quiet, "suppress progress output");
}

ob::RunConfig resolve(const Flags& f)
{
    const bool preset = f.preset == "paper";
    ob::RunConfig c;
    if (!f.config.empty())
        c = ob::load_config(f.config, preset);
    else if (preset)
        c = ob::RunConfig::paper();
    else
        throw ob::ConfigError("either --config or --preset paper is required");
    if (!f.out.empty())
        c.output = f.out;
    if (f.workers)
        c.numerics.workers = *f.workers;
    c.validate();
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Resonances and time delay of an open rectangular billiard"};
    app.require_subcommand(1);
    Flags flags;
    using Command = ob::CommandResult (*)(const ob::RunConfig&, const ob::CommandOptions&);
    const std::pair<const char*, Command> commands[] = {
        {"sweep-delay", &ob::cmd_sweep_delay},
        {"find-poles", &ob::cmd_find_poles},
        {"trace-poles", &ob::cmd_trace},
        {"gamow", &ob::cmd_gamow},
    };
    const char* help[] = {
        "Wigner delay tau_w(E) for every configured lambda",
        "classified complex-scaling eigenvalues in the pole window",
        "follow the seeded poles from lambda_from to lambda_to",
        "Gamow wavefunctions and box-mode mixing along the traced branches",
    };
    std::vector<CLI::App*> subs;
    for (std::size_t k = 0; k < std::size(commands); ++k) {
        subs.push_back(app.add_subcommand(commands[k].first, help[k]));
        add_common(subs.back(), flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const ob::RunConfig config = resolve(flags);
        ob::CommandOptions options;
        options.record_timing = flags.record_timing;
        options.log = flags.quiet ? nullptr : &std::cerr;
        for (std::size_t k = 0; k < subs.size(); ++k) {
            if (!subs[k]->parsed())
                continue;
            const auto result = commands[k].second(config, options);
            for (const auto& path : result.files)
                std::cout << path.string() << '\n';
        }
    } catch (const ob::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ob::DegenerateGeometry& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ob::SnapFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
