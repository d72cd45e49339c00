#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gramlab/error.h"
#include "gramlab/grammar.h"
#include "gramlab/random.h"
#include "gramlab/treebank.h"
#include "oracles.h"

using namespace gramlab;

namespace {

double row_total(std::span<const double> row) {
    double s = 0.0;
    for (double x : row) s += x;
    return s;
}

void expect_simplex(const Grammar &g) {
    for (int c = 0; c < g.num_categories(); ++c) {
        EXPECT_NEAR(row_total(g.row(c)), 1.0, 1e-9);
        EXPECT_EQ(g.row(c).size(), static_cast<std::size_t>(g.num_categories() * g.num_categories() +
                                                            g.vocab_size()));
        for (double x : g.row(c)) {
            EXPECT_GE(x, 0.0);
            EXPECT_TRUE(std::isfinite(x));
        }
    }
    EXPECT_NEAR(row_total(g.root()), 1.0, 1e-9);
}

double mean_prior_entropy(double beta, int draws, std::uint64_t seed) {
    double total = 0.0;
    for (int k = 0; k < draws; ++k) {
        Rng rng = make_rng(seed, {static_cast<std::uint64_t>(k)});
        total += sparsity_entropy(sample_prior(5, 10, beta, rng)).mean;
    }
    return total / draws;
}

// P(X <= x) for X ~ Beta(a, b) by Simpson integration of the density.
double beta_cdf(double x, double a, double b) {
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const int n = 200000;
    const double h = x / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        double f = 0.0;
        if (t > 0.0) f = std::exp(log_norm + (a - 1) * std::log(t) + (b - 1) * std::log1p(-t));
        s += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    return s * h / 3.0;
}

}  // namespace

TEST(Prior, OnSimplex) {
    for (double beta : {1e-6, 0.01, 0.3, 1.0, 5.0}) {
        Rng rng = make_rng(1, {});
        expect_simplex(sample_prior(3, 7, beta, rng));
    }
}

TEST(Prior, Deterministic) {
    Rng a = make_rng(42, {}), b = make_rng(42, {});
    EXPECT_EQ(sample_prior(4, 6, 0.1, a), sample_prior(4, 6, 0.1, b));
}

TEST(Prior, RejectsBadArguments) {
    Rng rng = make_rng(0, {});
    EXPECT_THROW(sample_prior(0, 3, 1.0, rng), Error);
    EXPECT_THROW(sample_prior(2, 0, 1.0, rng), Error);
    EXPECT_THROW(sample_prior(2, 3, 0.0, rng), Error);
    EXPECT_THROW(sample_prior(2, 3, -1.0, rng), Error);
}

TEST(Prior, SparsityMonotoneInBeta) {
    const double e001 = mean_prior_entropy(0.01, 100, 7);
    const double e01 = mean_prior_entropy(0.1, 100, 8);
    const double e1 = mean_prior_entropy(1.0, 100, 9);
    EXPECT_LT(e001 + 0.02, e01);
    EXPECT_LT(e01 + 0.02, e1);
}

TEST(Posterior, ZeroCountsMatchPriorInDistribution) {
    // Compare the mean of the first entry of row 0 over many draws.
    RuleCounts zero(2, 2);
    double a = 0.0, b = 0.0;
    const int n = 4000;
    for (int k = 0; k < n; ++k) {
        Rng r1 = make_rng(1, {static_cast<std::uint64_t>(k)});
        Rng r2 = make_rng(2, {static_cast<std::uint64_t>(k)});
        a += resample_posterior(zero, 0.5, r1).row(0)[0];
        b += sample_prior(2, 2, 0.5, r2).row(0)[0];
    }
    // Mean 1/6, sd of each entry ~ 0.22, so 5 SE of a difference of means.
    EXPECT_NEAR(a / n, 1.0 / 6, 5 * 0.22 / std::sqrt(n));
    EXPECT_NEAR(b / n, 1.0 / 6, 5 * 0.22 / std::sqrt(n));
}

TEST(Posterior, ConcentratedRowTail) {
    RuleCounts counts(2, 2);
    counts.add_binary(0, 0, 0, 1000);
    const double beta = 0.01;
    const double rest = beta * static_cast<double>(counts.row_size() - 1);
    const double p_below = beta_cdf(0.95, 1000 + beta, rest);
    ASSERT_LT(p_below, 1e-3);  // so >= 99 of 100 is overwhelmingly likely
    int above = 0;
    for (int k = 0; k < 100; ++k) {
        Rng rng = make_rng(99, {static_cast<std::uint64_t>(k)});
        if (resample_posterior(counts, beta, rng).row(0)[0] > 0.95) ++above;
    }
    EXPECT_GE(above, 99);
}

TEST(Posterior, MeanWithinThreeStandardErrors) {
    RuleCounts counts(1, 2);  // row size 3
    counts.add_binary(0, 0, 0, 3);
    counts.add_terminal(0, 1, 1);
    const double beta = 0.5;
    const std::vector<double> alpha = {beta + 3, beta, beta + 1};
    const double total = alpha[0] + alpha[1] + alpha[2];
    const int n = 10000;
    std::vector<double> sum(3, 0.0);
    for (int k = 0; k < n; ++k) {
        Rng rng = make_rng(5, {static_cast<std::uint64_t>(k)});
        const Grammar g = resample_posterior(counts, beta, rng);
        for (std::size_t i = 0; i < 3; ++i) sum[i] += g.row(0)[i];
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const double m = alpha[i] / total;
        const double se = std::sqrt(m * (1 - m) / (total + 1) / n);
        EXPECT_NEAR(sum[i] / n, m, 3 * se) << "entry " << i;
    }
}

TEST(Posterior, ShapeMismatch) {
    RuleCounts a(2, 3), b(3, 3);
    EXPECT_THROW(a += b, Error);
}

TEST(Posterior, NoNanForTinyBeta) {
    const Corpus c = make_corpus({{"a", "b", "c"}, {"c", "a"}});
    const std::vector<Tree> trees = {parse_tree("(0 (1 a) (0 (1 b) (2 c)))"),
                                     parse_tree("(2 (2 c) (1 a))")};
    const RuleCounts counts = tree_rule_counts(trees, c.vocab, 3);
    for (double beta : {1e-6, 1e-4, 0.01}) {
        Rng rng = make_rng(3, {});
        for (int it = 0; it < 50; ++it) {
            const Grammar g = resample_posterior(counts, beta, rng);
            expect_simplex(g);
            for (const Tree &t : trees) EXPECT_TRUE(std::isfinite(tree_logprob(g, t, c.vocab)));
        }
    }
}

TEST(Counts, HandExample) {
    const Corpus c = make_corpus({{"a", "b"}});
    const Tree t = parse_tree("(0 (1 a) (2 b))");
    const RuleCounts counts = tree_rule_counts(std::span<const Tree>(&t, 1), c.vocab, 3);
    EXPECT_EQ(counts.root()[0], 1U);
    EXPECT_EQ(counts.row(0)[3 * 1 + 2], 1U);
    EXPECT_EQ(counts.row(1)[9 + 0], 1U);
    EXPECT_EQ(counts.row(2)[9 + 1], 1U);
    EXPECT_EQ(counts.total_expansions(), 3U);
    EXPECT_EQ(counts.total_roots(), 1U);
    EXPECT_EQ(tree_rule_counts({}, c.vocab, 3), RuleCounts(3, 2));
}

TEST(Counts, AdditiveOverUnion) {
    std::mt19937 rng(17);
    const std::vector<std::string> tokens = {"a", "b", "c", "d", "e", "f"};
    const Corpus c = make_corpus({tokens});
    for (int k = 0; k < 50; ++k) {
        std::vector<Tree> a, b;
        for (int i = 0; i < 3; ++i) a.push_back(oracle::random_binary_tree(tokens, 0, 1 + rng() % 6, 4, rng));
        for (int i = 0; i < 2; ++i) b.push_back(oracle::random_binary_tree(tokens, 0, 1 + rng() % 6, 4, rng));
        std::vector<Tree> both = a;
        both.insert(both.end(), b.begin(), b.end());
        const RuleCounts u = tree_rule_counts(both, c.vocab, 4);
        EXPECT_EQ(u, tree_rule_counts(a, c.vocab, 4) + tree_rule_counts(b, c.vocab, 4));
        EXPECT_EQ(u.total_roots(), both.size());
        std::uint64_t nodes = 0;
        for (const Tree &t : both) nodes += count_nodes(t) - yield_length(t);
        EXPECT_EQ(u.total_expansions(), nodes);
        std::vector<Tree> twice = a;
        twice.insert(twice.end(), a.begin(), a.end());
        EXPECT_EQ(tree_rule_counts(twice, c.vocab, 4), tree_rule_counts(a, c.vocab, 4) + tree_rule_counts(a, c.vocab, 4));
    }
}

TEST(Counts, Errors) {
    const Corpus c = make_corpus({{"a", "b"}});
    const Tree oov = parse_tree("(0 (1 a) (2 zz))");
    EXPECT_THROW(tree_rule_counts(std::span<const Tree>(&oov, 1), c.vocab, 3), Error);
    const Tree ternary = parse_tree("(0 (1 a) (2 b) (1 a))");
    EXPECT_THROW(tree_rule_counts(std::span<const Tree>(&ternary, 1), c.vocab, 3), Error);
    const Tree bad_label = parse_tree("(0 (7 a) (2 b))");
    EXPECT_THROW(tree_rule_counts(std::span<const Tree>(&bad_label, 1), c.vocab, 3), Error);
}

TEST(LogProb, UniformTwoOutcomes) {
    Grammar g(1, 1, 1.0);
    g.row(0)[0] = 0.5;
    g.row(0)[1] = 0.5;
    g.root()[0] = 1.0;
    EXPECT_DOUBLE_EQ(expansion_logprob(g, 0, 0), std::log(0.5));
    EXPECT_DOUBLE_EQ(expansion_logprob(g, 0, 1), std::log(0.5));
    EXPECT_THROW(expansion_logprob(g, 0, 2), Error);
    EXPECT_THROW(expansion_logprob(g, 1, 0), Error);
    g.row(0)[0] = 0.0;
    g.row(0)[1] = 1.0;
    EXPECT_EQ(expansion_logprob(g, 0, 0), -std::numeric_limits<double>::infinity());
}

TEST(LogProb, ExponentiatesBack) {
    Rng rng = make_rng(4, {});
    const Grammar g = sample_prior(3, 4, 0.7, rng);
    for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (std::size_t e = 0; e < g.row_size(); ++e) {
            const double back = std::exp(expansion_logprob(g, c, e));
            EXPECT_NEAR(back, g.row(c)[e], 1e-12);
            s += back;
        }
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Sparsity, Examples) {
    Grammar g(1, 2, 1.0);  // row size 3
    g.row(0)[0] = 1.0;
    g.root()[0] = 1.0;
    EXPECT_NEAR(sparsity_entropy(g).mean, 0.0, 1e-12);
    for (double &x : g.row(0)) x = 1.0 / 3;
    EXPECT_NEAR(sparsity_entropy(g).mean, 1.0, 1e-12);

    Grammar h(1, 3, 1.0);  // row size 4
    h.row(0)[0] = 0.5;
    h.row(0)[3] = 0.5;
    h.root()[0] = 1.0;
    EXPECT_NEAR(sparsity_entropy(h).row_entropy[0], 0.5, 1e-12);
}

TEST(GrammarIO, RoundTripIsExact) {
    Rng rng = make_rng(12, {});
    Vocabulary v;
    for (const char *t : {"a", "quote\"d", "back\\slash", "(", "\xC3\xA9"}) v.add(t);
    const Grammar g = sample_prior(3, 5, 0.05, rng);
    std::stringstream ss;
    write_grammar(ss, g, v);
    const auto [g2, v2] = read_grammar(ss);
    EXPECT_EQ(g2, g);
    EXPECT_EQ(v2.tokens(), v.tokens());
}

TEST(GrammarIO, SparseFileAndErrors) {
    std::istringstream in(
        "# comment\n2 2 0.5\nROOT -> 0 : 1\n0 -> 1 1 : 0.25\n0 -> \"x\" : 0.75\n"
        "1 -> \"y\" : 1\n");
    const auto [g, v] = read_grammar(in);
    EXPECT_EQ(v.size(), 2U);
    EXPECT_DOUBLE_EQ(g.binary_prob(0, 1, 1), 0.25);
    EXPECT_DOUBLE_EQ(g.terminal_prob(1, v.id("y")), 1.0);
    EXPECT_DOUBLE_EQ(g.binary_prob(1, 0, 0), 0.0);

    std::istringstream bad("2 2 0.5\nROOT -> 0 : 1\n0 -> 1 1 : 0.5\n0 -> \"x\" : 0.75\n1 -> \"y\" : 1\n");
    EXPECT_THROW(read_grammar(bad), Error);
}
