#ifndef GRAMLAB_CHART_H_
#define GRAMLAB_CHART_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gramlab/depth.h"
#include "gramlab/grammar.h"
#include "gramlab/random.h"
#include "gramlab/tree.h"
#include "gramlab/treebank.h"

namespace gramlab {

// Grammar rearranged for chart loops: binary probabilities laid out as
// [left*C + right][parent] so the innermost loop runs over parents.
class CompiledGrammar {
public:
    explicit CompiledGrammar(const Grammar &g);

    const Grammar &grammar() const { return *grammar_; }
    int num_categories() const { return num_categories_; }

    const double *binary_by_children(int left, int right) const {
        return &binary_[(static_cast<std::size_t>(left) * C() + static_cast<std::size_t>(right)) * C()];
    }
    const double *log_binary_by_children(int left, int right) const {
        return &log_binary_[(static_cast<std::size_t>(left) * C() + static_cast<std::size_t>(right)) * C()];
    }
    double log_terminal(int parent, int word) const;
    double log_root(int category) const { return log_root_[static_cast<std::size_t>(category)]; }

private:
    std::size_t C() const { return static_cast<std::size_t>(num_categories_); }

    const Grammar *grammar_;
    int num_categories_;
    std::vector<double> binary_;
    std::vector<double> log_binary_;
    std::vector<double> log_root_;
};

// Inside chart over one sentence.
//
// Unbounded charts have a single state per (span, category). Bounded charts
// index states by (depth, side) with depth in 1..D; width-1 items are shared
// by every state because preterminals never consume a memory level.
//
// Each span carries a binary exponent: the true inside score of an item is
// stored(item) * 2^exponent(span).
class Chart {
public:
    std::size_t length() const { return n_; }
    int num_categories() const { return num_categories_; }
    std::optional<int> depth_bound() const { return bound_; }
    int num_states() const { return num_states_; }

    static int state_index(int depth, Side side) {
        return (depth - 1) * 2 + (side == Side::kRight ? 1 : 0);
    }
    // State of the sentence root: (1, L) when bounded, 0 otherwise.
    int root_state() const { return 0; }

    double stored(std::size_t begin, std::size_t end, int category, int state) const {
        return scores_[item_offset(begin, end, state) + static_cast<std::size_t>(category)];
    }
    int exponent(std::size_t begin, std::size_t end) const { return exponents_[cell(begin, end)]; }
    bool nonzero(std::size_t begin, std::size_t end) const { return nonzero_[cell(begin, end)] != 0; }

    // log of the true inside score; -infinity for impossible items.
    double log_inside(std::size_t begin, std::size_t end, int category, int state) const;

    // log sum_c root(c) * inside(0, n, c, root state).
    double log_sentence_mass() const { return log_mass_; }

    const std::vector<std::string> &tokens() const { return tokens_; }
    const std::vector<int> &word_ids() const { return ids_; }

private:
    friend Chart inside_chart(std::span<const std::string>, const Vocabulary &,
                              const CompiledGrammar &, std::optional<int>);

    std::size_t cell(std::size_t begin, std::size_t end) const { return begin * (n_ + 1) + end; }
    std::size_t item_offset(std::size_t begin, std::size_t end, int state) const {
        return (cell(begin, end) * static_cast<std::size_t>(num_states_) +
                static_cast<std::size_t>(state)) *
               static_cast<std::size_t>(num_categories_);
    }

    std::size_t n_ = 0;
    int num_categories_ = 0;
    int num_states_ = 1;
    std::optional<int> bound_;
    std::vector<std::string> tokens_;
    std::vector<int> ids_;
    std::vector<double> scores_;
    std::vector<int> exponents_;
    std::vector<char> nonzero_;
    double log_mass_ = 0.0;
};

// Builds the inside chart. `depth_bound`, when set, restricts every node that
// dominates two or more terminals to depth <= bound. Throws Error for an empty
// sentence, an OOV token or a bound below 1.
Chart inside_chart(std::span<const std::string> sentence, const Vocabulary &vocab,
                   const CompiledGrammar &g, std::optional<int> depth_bound = std::nullopt);
Chart inside_chart(std::span<const std::string> sentence, const Vocabulary &vocab,
                   const Grammar &g, std::optional<int> depth_bound = std::nullopt);

// Draws a tree from the posterior given the sentence, top-down in proportion
// to inside scores. Throws Error when the sentence has zero mass.
Tree sample_tree(const Chart &chart, const CompiledGrammar &g, Rng &rng);
Tree sample_tree(const Chart &chart, const Grammar &g, Rng &rng);

struct ViterbiParse {
    Tree tree;
    double log_prob = 0.0;
};

// Most probable (depth-legal) tree. Ties go to the smallest split point, then
// the smallest left category, then the smallest right category; root ties to
// the smallest category.
ViterbiParse viterbi(std::span<const std::string> sentence, const Vocabulary &vocab,
                     const CompiledGrammar &g, std::optional<int> depth_bound = std::nullopt);
Tree viterbi_parse(std::span<const std::string> sentence, const Vocabulary &vocab,
                   const Grammar &g, std::optional<int> depth_bound = std::nullopt);

}  // namespace gramlab

#endif  // GRAMLAB_CHART_H_
