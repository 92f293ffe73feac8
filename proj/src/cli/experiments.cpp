#include "gem/cli/experiments.hpp"

#include "gem/agent/rollout.hpp"
#include "gem/cli/export.hpp"
#include "gem/envs/environment.hpp"
#include "gem/oracles/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gem::cli {

namespace {

std::string num(double v)
{
    std::ostringstream s;
    s.precision(9);
    s << v;
    return s.str();
}

const envs::GridEnvironment* as_grid(const envs::Environment& env)
{
    return dynamic_cast<const envs::GridEnvironment*>(&env);
}

OutputHeader header_for(const ExperimentConfig& config, const std::string& hash, std::string kind)
{
    return {hash, config.trainer.seed, std::move(kind)};
}

std::string step_name(const char* prefix, std::uint64_t step, const char* ext)
{
    return std::string(prefix) + "_" + std::to_string(step) + ext;
}

void write_heatmap(const std::filesystem::path& out, const envs::GridEnvironment& grid,
                   const oracles::VisitationTracker& cells, const OutputHeader& header, std::uint64_t step)
{
    const auto values = cells.heatmap();
    write_file_atomic(out / step_name("heatmap", step, ".pgm"),
                      heatmap_pgm(values, grid.world().spec().layout, header));
}

std::uint64_t manifest_step(const std::filesystem::path& checkpoint)
{
    std::ifstream in(checkpoint / "manifest.txt");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("step=", 0) == 0) {
            return std::stoull(line.substr(5));
        }
    }
    throw std::runtime_error("checkpoint manifest missing in " + checkpoint.string());
}

}  // namespace

std::string metrics_csv_header()
{
    return "step,frames,episode_return,intrinsic_mean,intrinsic_std,visitation_entropy,gem_objective,ar_loss,"
           "success_rate\n";
}

std::string to_csv(const MetricsRow& r)
{
    return std::to_string(r.step) + "," + std::to_string(r.frames) + "," + num(r.episode_return) + ","
           + num(r.intrinsic_mean) + "," + num(r.intrinsic_std) + "," + num(r.visitation_entropy) + ","
           + num(r.gem_objective) + "," + num(r.ar_loss) + "," + num(r.success_rate) + "\n";
}

TrainOutcome run_train(const ExperimentConfig& config, const std::filesystem::path& out)
{
    validate(config);
    TrainOutcome outcome;
    outcome.config_hash = config_hash(config);
    const bool writing = !out.empty();
    const auto metrics_header = header_for(config, outcome.config_hash, "metrics");
    std::string metrics = header_comment(metrics_header) + metrics_csv_header();
    if (writing) {
        std::filesystem::create_directories(out);
        write_file_atomic(out / "config.ini", header_comment(header_for(config, outcome.config_hash, "config"))
                                                  + to_ini(config));
        write_file_atomic(out / "metrics.csv", metrics);
    }

    const auto checkpoint_preamble = header_comment(header_for(config, outcome.config_hash, "checkpoint manifest"));
    agent::Trainer trainer(config.trainer);
    const auto* grid = as_grid(trainer.environment());
    const bool embeddings = grid != nullptr && trainer.model().learned_embedding();

    double sum_mean = 0.0;
    double sum_std = 0.0;
    double sum_obj = 0.0;
    double sum_ar = 0.0;
    std::size_t window = 0;

    auto emit_row = [&](const agent::StepMetrics& m) {
        MetricsRow row;
        row.step = m.step;
        row.frames = m.frames;
        const auto ev = trainer.evaluate(config.eval_episodes, m.step);
        row.episode_return = ev.mean_return;
        row.success_rate = ev.success_rate;
        const double w = window > 0 ? static_cast<double>(window) : 1.0;
        row.intrinsic_mean = sum_mean / w;
        row.intrinsic_std = sum_std / w;
        row.gem_objective = sum_obj / w;
        row.ar_loss = sum_ar / w;
        row.visitation_entropy = m.visitation_entropy;
        sum_mean = sum_std = sum_obj = sum_ar = 0.0;
        window = 0;
        outcome.rows.push_back(row);
        metrics += to_csv(row);
        if (writing) {
            write_file_atomic(out / "metrics.csv", metrics);
        }
        outcome.final_eval = ev;
    };

    try {
        agent::StepMetrics last;
        for (std::size_t i = 0; i < config.steps; ++i) {
            last = trainer.step();
            sum_mean += last.intrinsic_mean;
            sum_std += last.intrinsic_std;
            sum_obj += last.gem_objective;
            sum_ar += last.ar_loss;
            ++window;
            const bool final_step = i + 1 == config.steps;
            if ((config.eval_every > 0 && last.step % config.eval_every == 0) || final_step) {
                emit_row(last);
            }
            if (!writing) {
                continue;
            }
            if (grid && trainer.cell_tracker()
                && (final_step || (config.heatmap_every > 0 && last.step % config.heatmap_every == 0))) {
                write_heatmap(out, *grid, *trainer.cell_tracker(),
                              header_for(config, outcome.config_hash, "heatmap"), last.step);
            }
            if (embeddings && (final_step || (config.embedding_every > 0 && last.step % config.embedding_every == 0))) {
                write_file_atomic(out / step_name("embeddings", last.step, ".csv"),
                                  embeddings_csv(trainer.model(), grid->world(), grid->mode(),
                                                 header_for(config, outcome.config_hash, "embeddings")));
            }
            if (config.checkpoint_every > 0 && last.step % config.checkpoint_every == 0 && !final_step) {
                trainer.save(out / step_name("checkpoint", last.step, ""), outcome.config_hash, checkpoint_preamble);
            }
        }
        if (writing) {
            trainer.save(out / "checkpoint", outcome.config_hash, checkpoint_preamble);
        }
    } catch (const agent::NumericalAbort& e) {
        if (writing) {
            std::ostringstream dump;
            dump << header_comment(header_for(config, outcome.config_hash, "abort"))
                 << "error: " << e.what() << "\n"
                 << "step: " << trainer.steps() << "\n"
                 << "frames: " << trainer.frames() << "\n"
                 << "normalizer_mean: " << trainer.normalizer().mean << "\n"
                 << "normalizer_variance: " << trainer.normalizer().variance << "\n"
                 << "last_rows:\n"
                 << metrics_csv_header();
            const std::size_t first = outcome.rows.size() > 5 ? outcome.rows.size() - 5 : 0;
            for (std::size_t i = first; i < outcome.rows.size(); ++i) {
                dump << to_csv(outcome.rows[i]);
            }
            write_file_atomic(out / "abort.txt", dump.str());
        }
        throw;
    }

    if (const auto* states = trainer.state_tracker()) {
        outcome.final_entropy = states->entropy();
    }
    if (const auto* cells = trainer.cell_tracker()) {
        outcome.final_cell_counts = cells->counts();
    }
    return outcome;
}

std::vector<oracles::CollapseReport> run_density(const ExperimentConfig& config, const std::filesystem::path& out)
{
    validate(config);
    const std::string hash = config_hash(config);
    std::vector<oracles::CollapseVariant> variants;
    for (const auto& v : oracles::CollapseVariant::all()) {
        if (config.density_variants.empty()
            || std::find(config.density_variants.begin(), config.density_variants.end(), v.name())
                   != config.density_variants.end()) {
            variants.push_back(v);
        }
    }
    auto settings = config.density;
    settings.seed = config.trainer.seed;
    const auto reports = oracles::collapse_harness(config.bimodal, variants, settings);
    if (out.empty()) {
        return reports;
    }
    std::string summary = header_comment(header_for(config, hash, "density report"))
                          + "variant,steps,untrained,error,error_vs_truth,truth_entropy,implied_entropy,"
                            "error_below_0.1,collapse\n";
    for (const auto& r : reports) {
        std::string csv = header_comment(header_for(config, hash, "density " + r.variant.name()))
                          + "x,true,implied,reference\n";
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            csv += num(r.x[i]) + "," + num(r.truth[i]) + "," + num(r.implied[i]) + "," + num(r.reference[i]) + "\n";
        }
        write_file_atomic(out / ("density_" + r.variant.name() + ".csv"), csv);
        summary += r.variant.name() + "," + std::to_string(r.steps) + "," + (r.untrained ? "1" : "0") + ","
                   + num(r.error) + "," + num(r.error_vs_truth) + "," + num(r.truth_entropy) + ","
                   + num(r.implied_entropy) + "," + (r.error < 0.1 ? "1" : "0") + ","
                   + (r.implied_entropy > r.truth_entropy ? "1" : "0") + "\n";
    }
    write_file_atomic(out / "report.csv", summary);
    return reports;
}

std::vector<ResolutionSetting> resolution_settings()
{
    return {{"coarse", 0.3, 20.0}, {"medium", 0.6, 10.0}, {"fine", 1.0, 1.0}};
}

std::vector<ResolutionResult> run_sweep_resolution(const ExperimentConfig& base, const std::filesystem::path& out)
{
    std::vector<ResolutionResult> results;
    for (const auto& s : resolution_settings()) {
        ExperimentConfig c = base;
        c.trainer.ar.delta = s.delta;
        c.trainer.ar.scale = s.scale;
        c.trainer.embedding = agent::EmbeddingMode::learned;
        c.trainer.intrinsic = agent::IntrinsicMode::gem;
        c.trainer.use_extrinsic = false;
        ResolutionResult r;
        r.setting = s;
        r.outcome = run_train(c, out.empty() ? out : out / s.name);
        const auto& counts = r.outcome.final_cell_counts;
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        if (total > 0.0) {
            r.max_cell_share = *std::max_element(counts.begin(), counts.end()) / total;
        }
        results.push_back(std::move(r));
    }
    if (!out.empty()) {
        std::string report = header_comment(header_for(base, config_hash(base), "resolution sweep"))
                             + "setting,delta,C,final_entropy,max_cell_share\n";
        for (const auto& r : results) {
            report += r.setting.name + "," + num(r.setting.delta) + "," + num(r.setting.scale) + ","
                      + num(r.outcome.final_entropy) + "," + num(r.max_cell_share) + "\n";
        }
        write_file_atomic(out / "report.csv", report);
    }
    return results;
}

agent::EvalResult run_eval(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
                           const std::filesystem::path& out)
{
    validate(config);
    agent::Trainer trainer(config.trainer);
    trainer.load_networks(checkpoint);
    const auto step = manifest_step(checkpoint);
    const auto ev = trainer.evaluate(config.eval_episodes, step);
    if (!out.empty()) {
        write_file_atomic(out / "eval.csv", header_comment(header_for(config, config_hash(config), "evaluation"))
                                                + "step,episodes,success_rate,mean_return\n" + std::to_string(step)
                                                + "," + std::to_string(ev.episodes) + "," + num(ev.success_rate)
                                                + "," + num(ev.mean_return) + "\n");
    }
    return ev;
}

void run_export(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
                const std::filesystem::path& out)
{
    validate(config);
    agent::Trainer trainer(config.trainer);
    trainer.load_networks(checkpoint);
    const auto step = manifest_step(checkpoint);
    const std::string hash = config_hash(config);
    const auto* grid = as_grid(trainer.environment());
    if (grid == nullptr) {
        throw ConfigError("export needs a grid-world environment");
    }
    if (trainer.model().learned_embedding()) {
        write_file_atomic(out / step_name("embeddings", step, ".csv"),
                          embeddings_csv(trainer.model(), grid->world(), grid->mode(),
                                         header_for(config, hash, "embeddings")));
    }
    auto env = trainer.environment().fresh(split_seed(config.trainer.seed, 0xE0));
    Rng rng(split_seed(config.trainer.seed, 0xE1));
    oracles::VisitationTracker cells(env->cell_count(), 1.0);
    for (std::size_t e = 0; e < config.eval_episodes; ++e) {
        const auto ep = agent::rollout(*env, trainer.nets(), rng);
        std::vector<std::size_t> visits{ep.initial_cell};
        for (const auto& t : ep.steps) {
            visits.push_back(t.next_cell);
        }
        cells.record(visits);
    }
    write_heatmap(out, *grid, cells, header_for(config, hash, "heatmap"), step);
}

}  // namespace gem::cli
