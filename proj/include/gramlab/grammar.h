#ifndef GRAMLAB_GRAMMAR_H_
#define GRAMLAB_GRAMMAR_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gramlab/random.h"
#include "gramlab/tree.h"
#include "gramlab/treebank.h"

namespace gramlab {

// Chomsky-normal-form PCFG with C categories over a V-word vocabulary.
//
// Each parent category owns one multinomial row of length C*C + V: the first
// C*C slots are binary expansions (left, right) at left*C + right, the last V
// slots are terminal expansions (a word followed by the null node). Root
// categories are drawn from a separate distribution over C outcomes.
class Grammar {
public:
    Grammar() = default;
    // All-zero rows; callers fill them in.
    Grammar(int num_categories, int vocab_size, double beta);

    int num_categories() const { return num_categories_; }
    int vocab_size() const { return vocab_size_; }
    double beta() const { return beta_; }
    std::size_t row_size() const { return row_size_; }

    std::size_t binary_index(int left, int right) const {
        return static_cast<std::size_t>(left) * static_cast<std::size_t>(num_categories_) +
               static_cast<std::size_t>(right);
    }
    std::size_t terminal_index(int word) const {
        return static_cast<std::size_t>(num_categories_) * static_cast<std::size_t>(num_categories_) +
               static_cast<std::size_t>(word);
    }
    bool is_terminal_index(std::size_t expansion) const {
        return expansion >= terminal_index(0);
    }

    std::span<const double> row(int parent) const;
    std::span<double> row(int parent);
    std::span<const double> root() const { return root_; }
    std::span<double> root() { return root_; }

    double binary_prob(int parent, int left, int right) const {
        return probs_[offset(parent) + binary_index(left, right)];
    }
    double terminal_prob(int parent, int word) const {
        return probs_[offset(parent) + terminal_index(word)];
    }

    // Throws Error unless every row and the root distribution lie on the
    // simplex within `tolerance`.
    void validate(double tolerance = 1e-9) const;

    friend bool operator==(const Grammar &, const Grammar &) = default;

private:
    std::size_t offset(int parent) const {
        return static_cast<std::size_t>(parent) * row_size_;
    }

    int num_categories_ = 0;
    int vocab_size_ = 0;
    double beta_ = 0.0;
    std::size_t row_size_ = 0;
    std::vector<double> probs_;  // parent-major, row_size_ per parent
    std::vector<double> root_;
};

// Sufficient statistics for the Dirichlet posterior.
class RuleCounts {
public:
    RuleCounts() = default;
    RuleCounts(int num_categories, int vocab_size);

    int num_categories() const { return num_categories_; }
    int vocab_size() const { return vocab_size_; }
    std::size_t row_size() const { return row_size_; }

    std::span<const std::uint64_t> row(int parent) const;
    std::span<const std::uint64_t> root() const { return root_; }

    void add_binary(int parent, int left, int right, std::uint64_t n = 1);
    void add_terminal(int parent, int word, std::uint64_t n = 1);
    void add_root(int category, std::uint64_t n = 1);

    std::uint64_t total_expansions() const;
    std::uint64_t total_roots() const;

    RuleCounts &operator+=(const RuleCounts &other);
    friend bool operator==(const RuleCounts &, const RuleCounts &) = default;

private:
    int num_categories_ = 0;
    int vocab_size_ = 0;
    std::size_t row_size_ = 0;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> root_;
};

RuleCounts operator+(RuleCounts a, const RuleCounts &b);

// Every parent row ~ Dirichlet(beta) over C*C + V outcomes; root ~
// Dirichlet(beta) over C outcomes.
Grammar sample_prior(int num_categories, int vocab_size, double beta, Rng &rng);

// Conjugate update: each row ~ Dirichlet(beta + counts).
Grammar resample_posterior(const RuleCounts &counts, double beta, Rng &rng);

// Parses the integer category of an induced-tree node; throws when the label
// is not an integer in [0, num_categories).
int category_of(const std::string &label, int num_categories);

// Counts every binary node, preterminal and root over strictly binary trees
// with integer category labels.
RuleCounts tree_rule_counts(std::span<const Tree> trees, const Vocabulary &vocab,
                            int num_categories);
void accumulate_rule_counts(const Tree &tree, const Vocabulary &vocab, RuleCounts *counts);

// Natural log of a row entry; -infinity for exact zeros.
double expansion_logprob(const Grammar &g, int parent, std::size_t expansion);
double root_logprob(const Grammar &g, int category);

// Log probability of an induced tree (root choice plus every expansion).
double tree_logprob(const Grammar &g, const Tree &tree, const Vocabulary &vocab);

struct SparsityReport {
    std::vector<double> row_entropy;  // Shannon entropy / log(row size), per parent
    double mean = 0.0;
};

SparsityReport sparsity_entropy(const Grammar &g);

// Plain-text grammar format:
//
//   C V beta
//   ROOT -> c : prob
//   parent -> left right : prob
//   parent -> "token" : prob
//
// Probabilities carry 17 significant digits. Rule lines that are absent on
// read are zero. Tokens are double-quoted with `\"` and `\\` escapes.
void write_grammar(std::ostream &out, const Grammar &g, const Vocabulary &vocab);
std::pair<Grammar, Vocabulary> read_grammar(std::istream &in);

void save_grammar(const std::string &path, const Grammar &g, const Vocabulary &vocab);
std::pair<Grammar, Vocabulary> load_grammar(const std::string &path);

}  // namespace gramlab

#endif  // GRAMLAB_GRAMMAR_H_
