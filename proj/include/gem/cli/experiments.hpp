#pragma once

#include "gem/cli/config.hpp"
#include "gem/oracles/collapse.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gem::cli {

/// One metrics line, written at every evaluation point.
struct MetricsRow {
    std::uint64_t step = 0;
    std::uint64_t frames = 0;
    double episode_return = 0.0;      // mean extrinsic return of the evaluation episodes
    double intrinsic_mean = 0.0;      // raw intrinsic reward, averaged since the previous row
    double intrinsic_std = 0.0;
    double visitation_entropy = 0.0;  // tracked true-state entropy (0 for continuous tasks)
    double gem_objective = 0.0;       // averaged since the previous row
    double ar_loss = 0.0;
    double success_rate = 0.0;        // evaluation episodes with return > 0
};

std::string metrics_csv_header();
std::string to_csv(const MetricsRow& row);

struct TrainOutcome {
    std::string config_hash;
    std::vector<MetricsRow> rows;
    agent::EvalResult final_eval;
    double final_entropy = 0.0;
    std::vector<double> final_cell_counts;  // decayed visit counts per open cell (grid worlds only)
};

/// Runs the configured number of training steps. When `out` is non-empty it receives
/// metrics.csv, heatmaps, embeddings and checkpoints. A non-finite loss writes abort.txt and
/// rethrows agent::NumericalAbort.
TrainOutcome run_train(const ExperimentConfig& config, const std::filesystem::path& out = {});

/// Trains the selected bimodal-density variants; writes density_<variant>.csv and report.csv.
std::vector<oracles::CollapseReport> run_density(const ExperimentConfig& config,
                                                 const std::filesystem::path& out = {});

struct ResolutionSetting {
    std::string name;
    double delta = 1.0;
    double scale = 1.0;
};

/// Coarse (0.3, 20), medium (0.6, 10) and fine (1, 1) pairs of (AR delta, AR weight C).
std::vector<ResolutionSetting> resolution_settings();

struct ResolutionResult {
    ResolutionSetting setting;
    TrainOutcome outcome;
    double max_cell_share = 0.0;  // largest cell count over the total
};

/// Reward-free GEM runs of the base config under each resolution setting; each setting writes
/// into out/<name>/ and a summary goes to out/report.csv.
std::vector<ResolutionResult> run_sweep_resolution(const ExperimentConfig& base, const std::filesystem::path& out = {});

/// Loads the networks saved by run_train in `checkpoint` and evaluates them; writes out/eval.csv.
agent::EvalResult run_eval(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
                           const std::filesystem::path& out = {});

/// Loads a checkpoint and writes embeddings_<step>.csv (learned f, grid worlds) and
/// heatmap_<step>.pgm from evaluation rollouts.
void run_export(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
                const std::filesystem::path& out);

}  // namespace gem::cli
