// gramlab: command-line front end for grammar induction and evaluation.
//
//   gramlab induce  --corpus FILE [--gold FILE] -C N --beta B [--depth D] ...
//   gramlab sweep   --axis beta|C|depth --values v1,v2,... (plus induce options)
//   gramlab eval    GOLD PRED [--metric rh] [--punct chars|none|tags:FILE]
//   gramlab sigtest GOLD PRED_A PRED_B [--iterations N] [--seed S]
//   gramlab depth   TREES [--bound D]
//   gramlab synth   -C N -V N --beta B --sentences N --max-len N --out-corpus F --out-gold F
//   gramlab stats   TREES
//
// Any subcommand accepts `--config FILE` with `key = value` lines; flags given
// on the command line win over the file.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gramlab/depth.h"
#include "gramlab/error.h"
#include "gramlab/eval.h"
#include "gramlab/experiment.h"
#include "gramlab/grammar.h"
#include "gramlab/random.h"
#include "gramlab/report.h"
#include "gramlab/synthetic.h"
#include "gramlab/treebank.h"

namespace {

using gramlab::Error;

// Splices `--config FILE` contents into argv right after the subcommand so
// that later command-line flags override them (options take the last value).
std::vector<std::string> expand_config(int argc, char **argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::vector<std::string> rest;
    std::optional<std::string> config;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    std::vector<std::string> out{args[0]};
    if (!config) {
        out.insert(out.end(), rest.begin(), rest.end());
        return out;
    }
    if (rest.empty()) throw Error("--config needs a subcommand");
    out.push_back(rest.front());
    std::ifstream in(*config);
    if (!in) throw Error("cannot open config '" + *config + "'");
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw Error("config line without '=': " + line);
            }
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.size() == 1) {
            out.push_back("-" + key);
            out.push_back(value);
        } else {
            out.push_back("--" + key + "=" + value);
        }
    }
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

std::optional<int> parse_depth(const std::string &value) {
    if (value.empty() || value == "unbounded" || value == "inf" || value == "none") {
        return std::nullopt;
    }
    const int d = std::stoi(value);
    if (d < 1) throw Error("depth bound must be >= 1");
    return d;
}

// Repeats gold so that it lines up with predictions concatenated over runs.
std::vector<gramlab::Tree> tile_gold(const std::vector<gramlab::Tree> &gold, std::size_t pred_size) {
    if (gold.empty() || pred_size == gold.size() || pred_size % gold.size() != 0) return gold;
    std::vector<gramlab::Tree> out;
    out.reserve(pred_size);
    for (std::size_t k = 0; k < pred_size / gold.size(); ++k) {
        out.insert(out.end(), gold.begin(), gold.end());
    }
    return out;
}

struct InduceOptions {
    gramlab::ExperimentConfig config;
    std::string depth;
};

void add_induce_options(CLI::App *cmd, InduceOptions *opt) {
    auto &c = opt->config;
    cmd->add_option("--corpus", c.corpus_path, "Raw corpus, one sentence per line")->required();
    cmd->add_option("--gold", c.gold_path, "Gold treebank aligned with the corpus");
    cmd->add_option("-C,--categories", c.num_categories, "Number of categories")
        ->capture_default_str();
    cmd->add_option("--beta", c.beta, "Dirichlet concentration")->capture_default_str();
    cmd->add_option("--depth", opt->depth, "Depth bound (integer or 'unbounded')");
    cmd->add_option("--iterations", c.iterations, "Gibbs iterations")->capture_default_str();
    cmd->add_option("--runs", c.runs, "Independent runs (run k uses seed + k)")
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    cmd->add_option("--out", c.output_dir, "Output directory")->capture_default_str();
    cmd->add_option("--punct", c.punctuation, "Punctuation policy: chars, none or tags:FILE")
        ->capture_default_str();
    cmd->add_flag("--verbose", c.verbose, "Log progress to stderr");
}

int report_failures(const gramlab::ExperimentResult &r) {
    int failed = 0;
    for (const auto &run : r.runs) {
        if (!run.ok) {
            std::cerr << "run " << run.run << " failed: " << run.error << '\n';
            ++failed;
        }
    }
    return failed == static_cast<int>(r.runs.size()) ? 1 : 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Grammar induction laboratory"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    InduceOptions induce;
    auto *induce_cmd = app.add_subcommand("induce", "Induce grammars and Viterbi-parse the corpus");
    add_induce_options(induce_cmd, &induce);

    InduceOptions sweep_opt;
    std::string axis;
    std::vector<std::string> values;
    auto *sweep_cmd = app.add_subcommand("sweep", "Grid sweep over beta, C or depth");
    add_induce_options(sweep_cmd, &sweep_opt);
    sweep_cmd->add_option("--axis", axis, "beta, C or depth")->required();
    sweep_cmd->add_option("--values", values, "Axis values")->required()->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    std::string gold_file, pred_file, pred_b_file, metric = "rh", punct = "chars";
    auto *eval_cmd = app.add_subcommand("eval", "Score predicted trees against gold trees");
    eval_cmd->add_option("gold", gold_file)->required();
    eval_cmd->add_option("pred", pred_file)->required();
    eval_cmd->add_option("--metric", metric, "Headline metric")
        ->check(CLI::IsMember({"f1", "rh", "rvm", "h", "c", "v", "precision", "recall"}))
        ->capture_default_str();
    eval_cmd->add_option("--punct", punct, "chars, none or tags:FILE")->capture_default_str();

    std::size_t sig_iterations = 10000;
    std::uint64_t sig_seed = 0;
    auto *sig_cmd = app.add_subcommand("sigtest", "Paired permutation test on unlabeled F1");
    sig_cmd->add_option("gold", gold_file)->required();
    sig_cmd->add_option("pred_a", pred_file)->required();
    sig_cmd->add_option("pred_b", pred_b_file)->required();
    sig_cmd->add_option("--iterations", sig_iterations)->capture_default_str();
    sig_cmd->add_option("--seed", sig_seed)->capture_default_str();
    sig_cmd->add_option("--punct", punct, "chars, none or tags:FILE")->capture_default_str();

    std::string trees_file;
    std::optional<int> bound;
    auto *depth_cmd = app.add_subcommand("depth", "Print the memory depth of each binary tree");
    depth_cmd->add_option("trees", trees_file)->required();
    depth_cmd->add_option("--bound", bound, "Also report whether each tree fits the bound");

    int syn_c = 5, syn_v = 20;
    double syn_beta = 0.1;
    std::size_t syn_n = 100, syn_max = 10;
    std::uint64_t syn_seed = 0;
    std::string syn_grammar, out_corpus, out_gold, out_grammar;
    auto *synth_cmd = app.add_subcommand("synth", "Sample a synthetic corpus with gold trees");
    synth_cmd->add_option("-C,--categories", syn_c)->capture_default_str();
    synth_cmd->add_option("-V,--vocab", syn_v)->capture_default_str();
    synth_cmd->add_option("--beta", syn_beta, "Prior concentration for the generating grammar")
        ->capture_default_str();
    synth_cmd->add_option("--sentences", syn_n)->capture_default_str();
    synth_cmd->add_option("--max-len", syn_max)->capture_default_str();
    synth_cmd->add_option("--seed", syn_seed)->capture_default_str();
    synth_cmd->add_option("--grammar", syn_grammar, "Generate from this grammar file instead");
    synth_cmd->add_option("--out-corpus", out_corpus)->required();
    synth_cmd->add_option("--out-gold", out_gold)->required();
    synth_cmd->add_option("--out-grammar", out_grammar, "Also save the generating grammar");

    bool histogram = false;
    auto *stats_cmd = app.add_subcommand("stats", "Category and rule counts of a treebank");
    stats_cmd->add_option("trees", trees_file)->required();
    stats_cmd->add_flag("--histogram", histogram, "Include the full rule histogram");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<char *> cargs;
        for (std::string &a : args) cargs.push_back(a.data());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*induce_cmd) {
            induce.config.depth_bound = parse_depth(induce.depth);
            const auto result = gramlab::run_experiment(induce.config);
            if (result.pooled) {
                std::cout << gramlab::to_json(*result.pooled).dump() << '\n';
            }
            return report_failures(result);
        }
        if (*sweep_cmd) {
            sweep_opt.config.depth_bound = parse_depth(sweep_opt.depth);
            const auto result =
                gramlab::sweep(sweep_opt.config, gramlab::parse_axis(axis), values);
            int failed = 0;
            for (const auto &cell : result.cells) {
                if (!cell.ok) {
                    std::cerr << "cell " << cell.value << " failed: " << cell.error << '\n';
                    ++failed;
                }
            }
            return failed == static_cast<int>(result.cells.size()) ? 1 : 0;
        }
        if (*eval_cmd) {
            const auto pred = gramlab::read_treebank_file(pred_file);
            const auto gold = tile_gold(gramlab::read_treebank_file(gold_file), pred.size());
            const auto policy = gramlab::PunctuationPolicy::from_spec(punct);
            const auto report = gramlab::evaluate_raw(gold, pred, policy);
            nlohmann::json j = gramlab::to_json(report);
            j["metric"] = metric;
            j["score"] = gramlab::metric_value(report, metric);
            std::cout << j.dump() << '\n';
            return 0;
        }
        if (*sig_cmd) {
            const auto pred_a = gramlab::read_treebank_file(pred_file);
            const auto pred_b = gramlab::read_treebank_file(pred_b_file);
            const auto gold = tile_gold(gramlab::read_treebank_file(gold_file), pred_a.size());
            const auto policy = gramlab::PunctuationPolicy::from_spec(punct);
            const auto na = gramlab::normalize_for_eval(gold, pred_a, policy);
            const auto nb = gramlab::normalize_for_eval(gold, pred_b, policy);
            const auto ca = gramlab::sentence_counts(na.gold, na.pred);
            const auto cb = gramlab::sentence_counts(nb.gold, nb.pred);
            gramlab::Rng rng(sig_seed);
            const auto r = gramlab::permutation_test(ca, cb, sig_iterations, rng);
            nlohmann::json j = {{"f1_a", gramlab::micro_f1(ca)},
                                {"f1_b", gramlab::micro_f1(cb)},
                                {"observed", r.observed},
                                {"p_value", r.p_value},
                                {"iterations", r.iterations}};
            std::cout << j.dump() << '\n';
            return 0;
        }
        if (*depth_cmd) {
            const auto trees = gramlab::read_treebank_file(trees_file);
            for (const auto &t : trees) {
                const int d = gramlab::tree_depth(t);
                std::cout << d;
                if (bound) std::cout << '\t' << (gramlab::check_bound(t, *bound) ? "ok" : "exceeds");
                std::cout << '\n';
            }
            return 0;
        }
        if (*synth_cmd) {
            gramlab::SyntheticCorpus corpus;
            if (!syn_grammar.empty()) {
                auto [g, vocab] = gramlab::load_grammar(syn_grammar);
                corpus = gramlab::generate_from_grammar(g, vocab, syn_n, syn_max, syn_seed);
            } else {
                corpus = gramlab::generate_synthetic(syn_c, syn_v, syn_beta, syn_n, syn_max, syn_seed);
            }
            std::ofstream raw(out_corpus, std::ios::binary);
            if (!raw) throw Error("cannot write '" + out_corpus + "'");
            for (const auto &s : corpus.sentences) {
                for (std::size_t i = 0; i < s.size(); ++i) raw << (i ? " " : "") << s[i];
                raw << '\n';
            }
            gramlab::write_treebank_file(out_gold, corpus.gold);
            if (!out_grammar.empty()) gramlab::save_grammar(out_grammar, corpus.grammar, corpus.vocab);
            return 0;
        }
        if (*stats_cmd) {
            const auto stats = gramlab::corpus_stats(gramlab::read_treebank_file(trees_file));
            nlohmann::json j = {{"unique_categories", stats.unique_categories},
                                {"unique_rules", stats.unique_rules}};
            if (histogram) j["rule_histogram"] = stats.rule_histogram;
            std::cout << j.dump() << '\n';
            return 0;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
