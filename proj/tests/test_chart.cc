#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "gramlab/chart.h"
#include "gramlab/depth.h"
#include "gramlab/error.h"
#include "gramlab/random.h"
#include "gramlab/treebank.h"
#include "oracles.h"

using namespace gramlab;

namespace {

Grammar one_category(double p) {
    Grammar g(1, 1, 1.0);
    g.row(0)[0] = p;
    g.row(0)[1] = 1.0 - p;
    g.root()[0] = 1.0;
    return g;
}

Vocabulary vocab_of(std::initializer_list<const char *> tokens) {
    Vocabulary v;
    for (const char *t : tokens) v.add(t);
    return v;
}

// S=0 -> A=2 T=1 | A B, T -> S B, A -> a, B -> b: a^n b^n only, center-embedded.
Grammar anbn_grammar() {
    Grammar g(4, 2, 1.0);
    g.row(0)[g.binary_index(2, 1)] = 0.5;
    g.row(0)[g.binary_index(2, 3)] = 0.5;
    g.row(1)[g.binary_index(0, 3)] = 1.0;
    g.row(2)[g.terminal_index(0)] = 1.0;
    g.row(3)[g.terminal_index(1)] = 1.0;
    g.root()[0] = 1.0;
    return g;
}

std::vector<std::string> random_sentence(std::size_t n, int V, std::mt19937 &rng) {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back("w" + std::to_string(rng() % V));
    return s;
}

Vocabulary word_vocab(int V) {
    Vocabulary v;
    for (int i = 0; i < V; ++i) v.add("w" + std::to_string(i));
    return v;
}

std::vector<int> ids_of(const std::vector<std::string> &s, const Vocabulary &v) {
    std::vector<int> out;
    for (const auto &t : s) out.push_back(v.id(t));
    return out;
}

}  // namespace

TEST(Inside, SingleCategoryClosedForms) {
    const double p = 0.3;
    const Grammar g = one_category(p);
    const Vocabulary v = vocab_of({"w"});
    const std::vector<std::string> two = {"w", "w"}, three = {"w", "w", "w"};
    EXPECT_NEAR(std::exp(inside_chart(two, v, g).log_sentence_mass()), p * std::pow(1 - p, 2), 1e-15);
    EXPECT_NEAR(std::exp(inside_chart(three, v, g).log_sentence_mass()),
                2 * p * p * std::pow(1 - p, 3), 1e-15);
}

TEST(Inside, LengthOne) {
    std::mt19937 rng(1);
    const Grammar g = oracle::random_grammar(3, 4, rng);
    const Vocabulary v = word_vocab(4);
    double expect = 0.0;
    for (int c = 0; c < 3; ++c) expect += g.root()[static_cast<std::size_t>(c)] * g.terminal_prob(c, 2);
    const std::vector<std::string> s = {"w2"};
    EXPECT_NEAR(std::exp(inside_chart(s, v, g).log_sentence_mass()), expect, 1e-15);
}

TEST(Inside, Errors) {
    const Grammar g = one_category(0.5);
    const Vocabulary v = vocab_of({"w"});
    const std::vector<std::string> empty, oov = {"w", "zz"}, ok = {"w"};
    EXPECT_THROW(inside_chart(empty, v, g), Error);
    EXPECT_THROW(inside_chart(oov, v, g), Error);
    EXPECT_THROW(inside_chart(ok, v, g, 0), Error);
}

TEST(Inside, MatchesLabeledEnumerationOnTinyCases) {
    std::mt19937 rng(2);
    const Vocabulary v = word_vocab(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Grammar g = oracle::random_grammar(2, 2, rng);
        for (std::size_t n = 1; n <= 4; ++n) {
            const auto s = random_sentence(n, 2, rng);
            const double brute = oracle::enumerate_labeled_mass(g, s, ids_of(s, v));
            const double shape = oracle::enumerate(g, s, ids_of(s, v), std::nullopt).mass;
            const double chart = std::exp(inside_chart(s, v, g).log_sentence_mass());
            EXPECT_NEAR(shape / brute, 1.0, 1e-12);
            EXPECT_NEAR(chart / brute, 1.0, 1e-9);
        }
    }
}

TEST(Inside, MatchesShapeEnumerationBoundedAndUnbounded) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const int C = 1 + static_cast<int>(rng() % 3);
        const int V = 3;
        const Grammar g = oracle::random_grammar(C, V, rng);
        const Vocabulary v = word_vocab(V);
        const auto s = random_sentence(1 + rng() % 7, V, rng);
        for (std::optional<int> bound : {std::optional<int>(), std::optional<int>(1),
                                         std::optional<int>(2), std::optional<int>(3)}) {
            const auto brute = oracle::enumerate(g, s, ids_of(s, v), bound);
            const double chart = inside_chart(s, v, g, bound).log_sentence_mass();
            EXPECT_NEAR(std::exp(chart - std::log(brute.mass)), 1.0, 1e-9);
            const ViterbiParse vp = viterbi(s, v, CompiledGrammar(g), bound);
            EXPECT_NEAR(vp.log_prob, brute.best_log, 1e-9);
            EXPECT_NEAR(tree_logprob(g, vp.tree, v), vp.log_prob, 1e-9);
            EXPECT_LE(vp.log_prob, chart + 1e-12);
            if (bound) EXPECT_TRUE(check_bound(vp.tree, *bound));
        }
    }
}

TEST(Inside, BoundVacuousAtHalfLength) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const Grammar g = oracle::random_grammar(3, 4, rng);
        const Vocabulary v = word_vocab(4);
        const std::size_t n = 1 + rng() % 10;
        const auto s = random_sentence(n, 4, rng);
        const double free = inside_chart(s, v, g).log_sentence_mass();
        const double bounded = inside_chart(s, v, g, static_cast<int>((n + 1) / 2)).log_sentence_mass();
        EXPECT_NEAR(std::exp(bounded - free), 1.0, 1e-12);
    }
}

TEST(Inside, LongSentenceStaysFinite) {
    std::mt19937 rng(5);
    const Grammar g = oracle::random_grammar(4, 30, rng);
    const Vocabulary v = word_vocab(30);
    const auto s = random_sentence(120, 30, rng);
    const Chart c = inside_chart(s, v, g);
    EXPECT_TRUE(std::isfinite(c.log_sentence_mass()));
    EXPECT_LT(c.log_sentence_mass(), -300 * std::log(2.0));  // far below double range
    Rng r = make_rng(1, {});
    EXPECT_EQ(yield(sample_tree(c, g, r)), s);
}

TEST(Viterbi, UniqueTreeAndTies) {
    const Grammar g = one_category(0.5);
    const Vocabulary v = vocab_of({"w"});
    const std::vector<std::string> two = {"w", "w"}, three = {"w", "w", "w"};
    EXPECT_EQ(viterbi_parse(two, v, g), parse_tree("(0 (0 w) (0 w))"));
    // Both trees over three tokens tie; the smallest split wins.
    EXPECT_EQ(viterbi_parse(three, v, g), parse_tree("(0 (0 w) (0 (0 w) (0 w)))"));
}

TEST(Viterbi, BoundedZeroMassIsError) {
    const Grammar g = anbn_grammar();
    const Vocabulary v = vocab_of({"a", "b"});
    const std::vector<std::string> s = {"a", "a", "b", "b"};
    EXPECT_NO_THROW(viterbi_parse(s, v, g));
    EXPECT_EQ(tree_depth(viterbi_parse(s, v, g)), 2);
    EXPECT_THROW(viterbi_parse(s, v, g, 1), Error);
    const Chart c = inside_chart(s, v, g, 1);
    Rng rng = make_rng(0, {});
    EXPECT_THROW(sample_tree(c, g, rng), Error);
}

TEST(Sample, DegenerateSupport) {
    const Grammar g = anbn_grammar();
    const Vocabulary v = vocab_of({"a", "b"});
    const std::vector<std::string> s = {"a", "a", "a", "b", "b", "b"};
    const Chart c = inside_chart(s, v, g);
    const Tree only = viterbi_parse(s, v, g);
    for (int k = 0; k < 20; ++k) {
        Rng rng = make_rng(7, {static_cast<std::uint64_t>(k)});
        EXPECT_EQ(sample_tree(c, g, rng), only);
    }
}

TEST(Sample, SymmetricTwoShapes) {
    const Grammar g = one_category(0.4);
    const Vocabulary v = vocab_of({"w"});
    const std::vector<std::string> s = {"w", "w", "w"};
    const Chart c = inside_chart(s, v, g);
    Rng rng = make_rng(11, {});
    const int n = 100000;
    int right = 0;
    for (int k = 0; k < n; ++k) {
        if (sample_tree(c, g, rng).children[0].is_preterminal()) ++right;
    }
    const double sigma = std::sqrt(0.25 / n);
    EXPECT_NEAR(static_cast<double>(right) / n, 0.5, 3 * sigma);
}

TEST(Sample, SpanMarginalsMatchEnumeration) {
    std::mt19937 gen(6);
    const Grammar g = oracle::random_grammar(2, 3, gen);
    const Vocabulary v = word_vocab(3);
    const std::vector<std::string> s = {"w0", "w1", "w2", "w0"};
    const auto ids = ids_of(s, v);

    // Exact span marginals from the shape posterior.
    std::map<std::pair<std::size_t, std::size_t>, double> exact;
    double z = 0.0;
    for (const Tree &shape : oracle::all_shapes(s)) {
        const double p = oracle::shape_prob(g, shape, ids);
        z += p;
        for (const auto &con : gold_constituents(shape)) exact[{con.begin, con.end}] += p;
    }
    for (auto &[span, p] : exact) p /= z;

    const Chart c = inside_chart(s, v, g);
    Rng rng = make_rng(12, {});
    const int n = 50000;
    std::map<std::pair<std::size_t, std::size_t>, int> seen;
    for (int k = 0; k < n; ++k) {
        for (const auto &con : gold_constituents(sample_tree(c, g, rng))) ++seen[{con.begin, con.end}];
    }
    for (const auto &[span, p] : exact) {
        const double se = std::sqrt(p * (1 - p) / n);
        EXPECT_NEAR(static_cast<double>(seen[span]) / n, p, 3 * se + 1e-12)
            << "span [" << span.first << "," << span.second << ")";
    }
}

TEST(Sample, BoundedDrawsRespectBound) {
    std::mt19937 gen(9);
    const Grammar g = oracle::random_grammar(3, 3, gen);
    const Vocabulary v = word_vocab(3);
    Rng rng = make_rng(13, {});
    for (int bound = 1; bound <= 3; ++bound) {
        for (int k = 0; k < 200; ++k) {
            const auto s = random_sentence(2 + gen() % 10, 3, gen);
            const Chart c = inside_chart(s, v, g, bound);
            const Tree t = sample_tree(c, g, rng);
            EXPECT_TRUE(check_bound(t, bound));
            EXPECT_EQ(yield(t), s);
        }
    }
}

TEST(Sample, DeterministicGivenRngState) {
    std::mt19937 gen(10);
    const Grammar g = oracle::random_grammar(3, 3, gen);
    const Vocabulary v = word_vocab(3);
    const auto s = random_sentence(8, 3, gen);
    const Chart c = inside_chart(s, v, g);
    Rng a = make_rng(5, {1}), b = make_rng(5, {1});
    for (int k = 0; k < 10; ++k) EXPECT_EQ(sample_tree(c, g, a), sample_tree(c, g, b));
}
