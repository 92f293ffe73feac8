#include "gem/cli/config.hpp"
#include "gem/cli/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "gem-out";
    std::string baseline;
    std::optional<std::size_t> oracle_period;
    std::string checkpoint;
};

gem::cli::ExperimentConfig resolve(const Options& o)
{
    auto c = o.config.empty() ? gem::cli::default_config() : gem::cli::load_config(o.config);
    if (o.seed) {
        c.trainer.seed = *o.seed;
    }
    if (o.baseline == "count-oracle") {
        c.trainer.intrinsic = gem::agent::IntrinsicMode::count_oracle;
    }
    if (o.oracle_period) {
        c.trainer.oracle_period = *o.oracle_period;
    }
    gem::cli::validate(c);
    return c;
}

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "experiment config (INI)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "root seed, overrides the config");
    cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"GEM exploration experiments"};
    app.set_version_flag("--version", std::string(gem::cli::tool_version));
    app.require_subcommand(1);
    Options o;

    auto* train = app.add_subcommand("train", "train an agent and write metrics, heatmaps and checkpoints");
    add_common(train, o);
    train->add_option("--baseline", o.baseline, "intrinsic reward baseline")
        ->check(CLI::IsMember({"none", "count-oracle"}));
    train->add_option("--oracle-period", o.oracle_period, "policy update period of the count oracle")
        ->check(CLI::IsMember({1, 5, 10}));

    auto* density = app.add_subcommand("density", "fit the 1-D bimodal density variants");
    add_common(density, o);

    auto* sweep = app.add_subcommand("sweep-resolution", "reward-free runs at three embedding resolutions");
    add_common(sweep, o);

    auto* eval = app.add_subcommand("eval", "evaluate a saved checkpoint");
    add_common(eval, o);
    eval->add_option("--checkpoint", o.checkpoint, "checkpoint directory (default <out>/checkpoint)");

    auto* exp = app.add_subcommand("export", "write embeddings and a visitation heatmap from a checkpoint");
    add_common(exp, o);
    exp->add_option("--checkpoint", o.checkpoint, "checkpoint directory (default <out>/checkpoint)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        const auto config = resolve(o);
        const std::filesystem::path out = o.out;
        const std::filesystem::path checkpoint = o.checkpoint.empty() ? out / "checkpoint" : std::filesystem::path(o.checkpoint);
        if (train->parsed()) {
            const auto r = gem::cli::run_train(config, out);
            std::cout << "steps " << config.steps << " success_rate " << r.final_eval.success_rate
                      << " visitation_entropy " << r.final_entropy << "\n";
        } else if (density->parsed()) {
            for (const auto& r : gem::cli::run_density(config, out)) {
                std::cout << r.variant.name() << " error " << r.error << " implied_entropy " << r.implied_entropy
                          << " true_entropy " << r.truth_entropy << "\n";
            }
        } else if (sweep->parsed()) {
            for (const auto& r : gem::cli::run_sweep_resolution(config, out)) {
                std::cout << r.setting.name << " entropy " << r.outcome.final_entropy << " max_cell_share "
                          << r.max_cell_share << "\n";
            }
        } else if (eval->parsed()) {
            const auto r = gem::cli::run_eval(config, checkpoint, out);
            std::cout << "success_rate " << r.success_rate << " mean_return " << r.mean_return << "\n";
        } else if (exp->parsed()) {
            gem::cli::run_export(config, checkpoint, out);
        }
    } catch (const gem::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const gem::agent::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
