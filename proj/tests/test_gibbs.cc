#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gramlab/depth.h"
#include "gramlab/error.h"
#include "gramlab/gibbs.h"
#include "gramlab/random.h"
#include "gramlab/synthetic.h"

using namespace gramlab;

namespace {

Corpus sparse_corpus(std::size_t sentences, std::uint64_t seed) {
    const auto [g, v] = load_grammar(std::string(GRAMLAB_TEST_DATA) + "/sparse5.grammar");
    SyntheticCorpus syn = generate_from_grammar(g, v, sentences, 10, seed);
    return make_corpus(std::move(syn.sentences), std::move(syn.gold));
}

}  // namespace

TEST(Gibbs, ZeroIterationsKeepsPrior) {
    const Corpus c = sparse_corpus(20, 1);
    GibbsConfig cfg;
    cfg.num_categories = 3;
    cfg.iterations = 0;
    cfg.seed = 5;
    const GibbsState s = gibbs_run(c, cfg);
    EXPECT_TRUE(s.trees.empty());
    EXPECT_TRUE(s.log_joint_trace.empty());
    EXPECT_EQ(s.iteration, 0);
    Rng rng = make_rng(5, {0});
    EXPECT_EQ(s.grammar, sample_prior(3, static_cast<int>(c.vocab.size()), 1.0, rng));
}

TEST(Gibbs, DeterministicAndYieldPreserving) {
    const Corpus c = sparse_corpus(40, 2);
    GibbsConfig cfg;
    cfg.num_categories = 4;
    cfg.beta = 0.1;
    cfg.iterations = 5;
    cfg.seed = 9;
    const GibbsState a = gibbs_run(c, cfg), b = gibbs_run(c, cfg);
    EXPECT_EQ(a.grammar, b.grammar);
    EXPECT_EQ(a.trees, b.trees);
    EXPECT_EQ(a.log_joint_trace, b.log_joint_trace);
    ASSERT_EQ(a.trees.size(), c.sentences.size());
    for (std::size_t i = 0; i < a.trees.size(); ++i) {
        EXPECT_EQ(yield(a.trees[i]), c.sentences[i]);
        EXPECT_TRUE(is_binary(a.trees[i]));
    }
    for (double lj : a.log_joint_trace) EXPECT_TRUE(std::isfinite(lj));
    cfg.seed = 10;
    EXPECT_NE(gibbs_run(c, cfg).trees, a.trees);
}

TEST(Gibbs, RejectsBadConfig) {
    const Corpus c = sparse_corpus(5, 3);
    GibbsConfig cfg;
    cfg.beta = 0.0;
    EXPECT_THROW(gibbs_run(c, cfg), Error);
    cfg.beta = 1.0;
    cfg.num_categories = 0;
    EXPECT_THROW(gibbs_run(c, cfg), Error);
    cfg.num_categories = 2;
    cfg.depth_bound = 0;
    EXPECT_THROW(gibbs_run(c, cfg), Error);
    EXPECT_THROW(gibbs_run(Corpus{}, GibbsConfig{}), Error);
}

TEST(LogJoint, HandExample) {
    GibbsState s;
    s.grammar = Grammar(1, 1, 1.0);
    s.grammar.row(0)[0] = 0.5;
    s.grammar.row(0)[1] = 0.5;
    s.grammar.root()[0] = 1.0;
    s.vocab.add("w");
    EXPECT_EQ(corpus_log_joint(s), 0.0);
    s.trees.push_back(parse_tree("(0 (0 w) (0 w))"));
    EXPECT_NEAR(corpus_log_joint(s), std::log(std::pow(0.5, 3)), 1e-12);
    s.trees.push_back(s.trees.front());
    EXPECT_NEAR(corpus_log_joint(s), 2 * std::log(std::pow(0.5, 3)), 1e-12);
}

TEST(Gibbs, BoundedTreesSatisfyBound) {
    const Corpus c = sparse_corpus(150, 4);
    for (int bound = 1; bound <= 3; ++bound) {
        GibbsConfig cfg;
        cfg.num_categories = 4;
        cfg.beta = 0.5;
        cfg.iterations = 4;
        cfg.depth_bound = bound;
        cfg.seed = 100 + static_cast<std::uint64_t>(bound);
        std::size_t checked = 0;
        gibbs_run(c, cfg, [&](const GibbsState &s) {
            for (const Tree &t : s.trees) {
                EXPECT_TRUE(check_bound(t, bound));
                ++checked;
            }
        });
        EXPECT_EQ(checked, 4 * c.sentences.size());
        GibbsState final_state = gibbs_run(c, cfg);
        for (const Tree &t : viterbi_trees(c, final_state.grammar, bound)) {
            EXPECT_TRUE(check_bound(t, bound));
        }
    }
}

TEST(Gibbs, TraceImprovesOnSparseCorpus) {
    const Corpus c = sparse_corpus(300, 5);
    GibbsConfig cfg;
    cfg.num_categories = 5;
    cfg.beta = 0.01;
    cfg.iterations = 700;
    cfg.seed = 21;
    const GibbsState s = gibbs_run(c, cfg);
    const auto &tr = s.log_joint_trace;
    ASSERT_EQ(tr.size(), 700U);
    const double first = std::accumulate(tr.begin(), tr.begin() + 10, 0.0) / 10;
    const double last = std::accumulate(tr.end() - 100, tr.end(), 0.0) / 100;
    EXPECT_GT(last, first);
}
