#include "gramlab/gibbs.h"

#include <cmath>

#include "gramlab/chart.h"
#include "gramlab/error.h"
#include "gramlab/random.h"

namespace gramlab {

void GibbsConfig::validate() const {
    if (num_categories < 1) throw Error("number of categories must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error("beta must be a positive real");
    if (iterations < 0) throw Error("iterations must be >= 0");
    if (depth_bound && *depth_bound < 1) throw Error("depth bound must be >= 1");
}

GibbsState gibbs_run(const Corpus &corpus, const GibbsConfig &config,
                     const IterationObserver &observer) {
    config.validate();
    if (corpus.sentences.empty()) throw Error("cannot induce a grammar from an empty corpus");
    const int V = static_cast<int>(corpus.vocab.size());

    GibbsState state;
    state.vocab = corpus.vocab;
    state.seed = config.seed;
    Rng prior_rng = make_rng(config.seed, {0});
    state.grammar = sample_prior(config.num_categories, V, config.beta, prior_rng);

    const std::size_t N = corpus.sentences.size();
    for (int t = 1; t <= config.iterations; ++t) {
        const CompiledGrammar compiled(state.grammar);
        std::vector<Tree> trees;
        trees.reserve(N);
        RuleCounts counts(config.num_categories, V);
        for (std::size_t i = 0; i < N; ++i) {
            Rng rng = make_rng(config.seed, {1, static_cast<std::uint64_t>(t), i});
            const Chart chart =
                inside_chart(corpus.sentences[i], corpus.vocab, compiled, config.depth_bound);
            trees.push_back(sample_tree(chart, compiled, rng));
            accumulate_rule_counts(trees.back(), corpus.vocab, &counts);
        }
        Rng grammar_rng = make_rng(config.seed, {2, static_cast<std::uint64_t>(t)});
        state.grammar = resample_posterior(counts, config.beta, grammar_rng);
        state.trees = std::move(trees);
        state.iteration = t;
        state.log_joint_trace.push_back(corpus_log_joint(state));
        if (observer) observer(state);
    }
    return state;
}

double corpus_log_joint(const GibbsState &state) {
    double total = 0.0;
    for (const Tree &t : state.trees) total += tree_logprob(state.grammar, t, state.vocab);
    return total;
}

std::vector<Tree> viterbi_trees(const Corpus &corpus, const Grammar &g,
                                std::optional<int> depth_bound) {
    const CompiledGrammar compiled(g);
    std::vector<Tree> out;
    out.reserve(corpus.sentences.size());
    for (const Sentence &s : corpus.sentences) {
        out.push_back(viterbi(s, corpus.vocab, compiled, depth_bound).tree);
    }
    return out;
}

}  // namespace gramlab
