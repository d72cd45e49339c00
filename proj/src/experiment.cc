#include "gramlab/experiment.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gramlab/error.h"
#include "gramlab/gibbs.h"
#include "gramlab/grammar.h"
#include "gramlab/report.h"

namespace gramlab {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

RunOutcome run_once(const ExperimentConfig &config, const Corpus &corpus, int run,
                    const PunctuationPolicy &policy, const fs::path &dir,
                    std::vector<Tree> *viterbi_out) {
    RunOutcome outcome;
    outcome.run = run;
    outcome.seed = config.seed + static_cast<std::uint64_t>(run);
    const std::string stem = "run" + std::to_string(run);
    try {
        GibbsConfig gc;
        gc.num_categories = config.num_categories;
        gc.beta = config.beta;
        gc.depth_bound = config.depth_bound;
        gc.iterations = config.iterations;
        gc.seed = outcome.seed;

        std::ofstream log = open_out(dir / (stem + ".log"));
        auto observer = [&](const GibbsState &s) {
            const double lj = s.log_joint_trace.back();
            log << "iter " << s.iteration << " logjoint " << format_double(lj) << '\n';
            if (config.verbose) {
                std::cerr << "[run " << run << "] iter " << s.iteration << " logjoint " << lj << '\n';
            }
        };
        const GibbsState state = gibbs_run(corpus, gc, observer);
        outcome.final_log_joint =
            state.log_joint_trace.empty() ? 0.0 : state.log_joint_trace.back();

        save_grammar((dir / (stem + ".grammar")).string(), state.grammar, corpus.vocab);
        std::vector<Tree> parses = viterbi_trees(corpus, state.grammar, config.depth_bound);
        write_treebank_file((dir / (stem + ".trees")).string(), parses);

        if (corpus.has_gold()) outcome.scores = evaluate_raw(corpus.gold, parses, policy);
        *viterbi_out = std::move(parses);
        outcome.ok = true;
    } catch (const std::exception &e) {
        outcome.ok = false;
        outcome.error = e.what();
        if (config.verbose) std::cerr << "[run " << run << "] failed: " << e.what() << '\n';
    }
    return outcome;
}

void write_scores(const fs::path &dir, const ExperimentResult &result) {
    std::ofstream csv = open_out(dir / "scores.csv");
    csv << "run,metric,score\n";
    nlohmann::json json;
    json["runs"] = nlohmann::json::array();
    for (const RunOutcome &r : result.runs) {
        if (!r.scores) continue;
        for (const std::string &m : metric_names()) {
            csv << r.run << ',' << m << ',' << format_double(metric_value(*r.scores, m)) << '\n';
        }
        nlohmann::json entry = to_json(*r.scores);
        entry["run"] = r.run;
        entry["seed"] = r.seed;
        json["runs"].push_back(entry);
    }
    if (result.pooled) {
        for (const std::string &m : metric_names()) {
            csv << "all," << m << ',' << format_double(metric_value(*result.pooled, m)) << '\n';
        }
        json["pooled"] = to_json(*result.pooled);
    }
    std::ofstream js = open_out(dir / "scores.json");
    js << json.dump(2) << '\n';
}

// Categories from different runs are unrelated clusters; keep them apart in
// the concatenation by prefixing the run index.
void prefix_labels(Tree *tree, const std::string &prefix) {
    if (tree->is_leaf()) return;
    tree->label = prefix + tree->label;
    for (Tree &child : tree->children) prefix_labels(&child, prefix);
}

std::optional<int> parse_depth_value(const std::string &value) {
    if (value == "unbounded" || value == "inf" || value == "none") return std::nullopt;
    std::size_t used = 0;
    int d = 0;
    try {
        d = std::stoi(value, &used);
    } catch (const std::exception &) {
        throw Error("bad depth value '" + value + "'");
    }
    if (used != value.size() || d < 1) throw Error("bad depth value '" + value + "'");
    return d;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (num_categories < 1) throw Error("C must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error("beta must be a positive real");
    if (iterations < 1) throw Error("iterations must be >= 1");
    if (runs < 1) throw Error("runs must be >= 1");
    if (depth_bound && *depth_bound < 1) throw Error("depth bound must be >= 1");
    if (output_dir.empty()) throw Error("output directory must be set");
}

const std::vector<std::string> &metric_names() {
    static const std::vector<std::string> names = {"precision", "recall", "f1", "h",
                                                   "c",         "v",      "rh", "rvm"};
    return names;
}

double metric_value(const EvalReport &report, const std::string &metric) {
    if (metric == "precision") return report.brackets.precision;
    if (metric == "recall") return report.brackets.recall;
    if (metric == "f1") return report.brackets.f1;
    if (metric == "h") return report.labels.homogeneity;
    if (metric == "c") return report.labels.completeness;
    if (metric == "v") return report.labels.v_measure;
    if (metric == "rh") return report.rh;
    if (metric == "rvm") return report.rvm;
    throw Error("unknown metric '" + metric + "'");
}

ExperimentResult run_experiment(const ExperimentConfig &config) {
    if (config.corpus_path.empty()) throw Error("corpus path must be set");
    std::vector<Sentence> sentences = read_raw_sentences(config.corpus_path);
    std::vector<Tree> gold;
    if (!config.gold_path.empty()) gold = read_treebank_file(config.gold_path);
    const Corpus corpus = make_corpus(std::move(sentences), std::move(gold));
    return run_experiment(config, corpus);
}

ExperimentResult run_experiment(const ExperimentConfig &config, const Corpus &corpus) {
    config.validate();
    if (corpus.sentences.empty()) throw Error("corpus is empty");
    const PunctuationPolicy policy = PunctuationPolicy::from_spec(config.punctuation);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    ExperimentResult result;
    std::vector<Tree> gold_concat, pred_concat;
    for (int run = 0; run < config.runs; ++run) {
        std::vector<Tree> parses;
        result.runs.push_back(run_once(config, corpus, run, policy, dir, &parses));
        if (result.runs.back().ok && corpus.has_gold()) {
            gold_concat.insert(gold_concat.end(), corpus.gold.begin(), corpus.gold.end());
            const std::string prefix = "r" + std::to_string(run) + ":";
            for (Tree &t : parses) {
                prefix_labels(&t, prefix);
                pred_concat.push_back(std::move(t));
            }
        }
    }
    if (corpus.has_gold() && !pred_concat.empty()) {
        result.pooled = evaluate_raw(gold_concat, pred_concat, policy);
    }

    std::ofstream summary = open_out(dir / "summary.csv");
    summary << "run,seed,status,final_logjoint,error\n";
    for (const RunOutcome &r : result.runs) {
        summary << r.run << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ','
                << (r.ok ? format_double(r.final_log_joint) : "") << ',' << csv_field(r.error)
                << '\n';
    }
    if (corpus.has_gold()) write_scores(dir, result);
    return result;
}

SweepAxis parse_axis(const std::string &name) {
    if (name == "beta") return SweepAxis::kBeta;
    if (name == "C" || name == "c" || name == "categories") return SweepAxis::kCategories;
    if (name == "depth" || name == "D") return SweepAxis::kDepth;
    throw Error("unknown sweep axis '" + name + "' (expected beta, C or depth)");
}

std::string axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::kBeta:
        return "beta";
    case SweepAxis::kCategories:
        return "C";
    case SweepAxis::kDepth:
        return "depth";
    }
    return "?";
}

ExperimentConfig apply_axis(const ExperimentConfig &base, SweepAxis axis, const std::string &value) {
    ExperimentConfig cfg = base;
    switch (axis) {
    case SweepAxis::kBeta: {
        std::size_t used = 0;
        try {
            cfg.beta = std::stod(value, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != value.size() || !(cfg.beta > 0.0)) throw Error("bad beta value '" + value + "'");
        break;
    }
    case SweepAxis::kCategories: {
        std::size_t used = 0;
        try {
            cfg.num_categories = std::stoi(value, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != value.size() || cfg.num_categories < 1) {
            throw Error("bad category count '" + value + "'");
        }
        break;
    }
    case SweepAxis::kDepth:
        cfg.depth_bound = parse_depth_value(value);
        break;
    }
    cfg.output_dir = (fs::path(base.output_dir) / (axis_name(axis) + "_" + value)).string();
    return cfg;
}

SweepResult sweep(const ExperimentConfig &base, SweepAxis axis,
                  const std::vector<std::string> &values) {
    if (base.corpus_path.empty()) throw Error("corpus path must be set");
    std::vector<Sentence> sentences = read_raw_sentences(base.corpus_path);
    std::vector<Tree> gold;
    if (!base.gold_path.empty()) gold = read_treebank_file(base.gold_path);
    const Corpus corpus = make_corpus(std::move(sentences), std::move(gold));
    return sweep(base, axis, values, corpus);
}

SweepResult sweep(const ExperimentConfig &base, SweepAxis axis,
                  const std::vector<std::string> &values, const Corpus &corpus) {
    if (values.empty()) throw Error("sweep needs at least one value");
    const fs::path dir(base.output_dir);
    fs::create_directories(dir);
    SweepResult result;
    for (const std::string &value : values) {
        SweepCell cell;
        cell.value = value;
        try {
            const ExperimentConfig cfg = apply_axis(base, axis, value);
            cell.result = run_experiment(cfg, corpus);
            cell.ok = true;
        } catch (const std::exception &e) {
            cell.ok = false;
            cell.error = e.what();
        }
        result.cells.push_back(std::move(cell));
    }

    std::ofstream csv = open_out(dir / "sweep.csv");
    std::ofstream pooled = open_out(dir / "sweep_pooled.csv");
    std::ofstream failures = open_out(dir / "sweep_failures.csv");
    csv << "axis_value,run,metric,score\n";
    pooled << "axis_value,metric,score\n";
    failures << "axis_value,run,error\n";
    for (const SweepCell &cell : result.cells) {
        if (!cell.ok) {
            failures << csv_field(cell.value) << ",all," << csv_field(cell.error) << '\n';
            continue;
        }
        for (const RunOutcome &r : cell.result.runs) {
            if (!r.ok) {
                failures << csv_field(cell.value) << ',' << r.run << ',' << csv_field(r.error) << '\n';
                continue;
            }
            if (!r.scores) continue;
            for (const std::string &m : metric_names()) {
                csv << csv_field(cell.value) << ',' << r.run << ',' << m << ','
                    << format_double(metric_value(*r.scores, m)) << '\n';
            }
        }
        if (cell.result.pooled) {
            for (const std::string &m : metric_names()) {
                pooled << csv_field(cell.value) << ',' << m << ','
                       << format_double(metric_value(*cell.result.pooled, m)) << '\n';
            }
        }
    }
    return result;
}

}  // namespace gramlab
