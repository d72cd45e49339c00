#ifndef GRAMLAB_EXPERIMENT_H_
#define GRAMLAB_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gramlab/eval.h"
#include "gramlab/treebank.h"

namespace gramlab {

struct ExperimentConfig {
    std::string corpus_path;
    std::string gold_path;  // optional
    int num_categories = 30;
    double beta = 1.0;
    std::optional<int> depth_bound;  // nullopt = unbounded
    int iterations = 700;
    int runs = 10;
    std::uint64_t seed = 0;  // run k uses seed + k
    std::string output_dir = "out";
    std::string punctuation = "chars";  // chars | none | tags:<file>
    bool verbose = false;

    void validate() const;
};

struct RunOutcome {
    int run = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_log_joint = 0.0;
    std::optional<EvalReport> scores;
};

struct ExperimentResult {
    std::vector<RunOutcome> runs;
    // Scores over the concatenation of every successful run's Viterbi trees
    // against the gold treebank repeated once per run. Predicted labels are
    // prefixed with the run index, so categories of different runs count as
    // different clusters.
    std::optional<EvalReport> pooled;
};

// Metric names in the order they appear in every CSV.
const std::vector<std::string> &metric_names();
double metric_value(const EvalReport &report, const std::string &metric);

// Loads the corpus (and gold, when configured) from disk and runs.
ExperimentResult run_experiment(const ExperimentConfig &config);

// For every run: Gibbs induction, then Viterbi parsing with the last grammar.
// Writes into config.output_dir:
//   run<k>.grammar, run<k>.trees, run<k>.log   per run
//   summary.csv                                one row per run
//   scores.csv, scores.json                    only when gold trees exist
// A failing run is recorded in summary.csv and does not stop the others.
ExperimentResult run_experiment(const ExperimentConfig &config, const Corpus &corpus);

enum class SweepAxis { kBeta, kCategories, kDepth };

SweepAxis parse_axis(const std::string &name);
std::string axis_name(SweepAxis axis);

struct SweepCell {
    std::string value;
    bool ok = false;
    std::string error;
    ExperimentResult result;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

// Applies one axis value to a base configuration. Depth values accept
// "unbounded", "inf" or "none" for no bound.
ExperimentConfig apply_axis(const ExperimentConfig &base, SweepAxis axis, const std::string &value);

// Runs one experiment per value under output_dir/<axis>_<value>/ and writes
//   sweep.csv          axis_value,run,metric,score (successful runs)
//   sweep_pooled.csv   axis_value,metric,score (concatenated runs)
//   sweep_failures.csv axis_value,run,error
SweepResult sweep(const ExperimentConfig &base, SweepAxis axis,
                  const std::vector<std::string> &values);
SweepResult sweep(const ExperimentConfig &base, SweepAxis axis,
                  const std::vector<std::string> &values, const Corpus &corpus);

}  // namespace gramlab

#endif  // GRAMLAB_EXPERIMENT_H_
