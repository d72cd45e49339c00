#ifndef GRAMLAB_EVAL_H_
#define GRAMLAB_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gramlab/random.h"
#include "gramlab/tree.h"
#include "gramlab/treebank.h"

namespace gramlab {

// Per-sentence bracket counts; the unit of pooling and of permutation.
struct SentenceCounts {
    std::size_t matched = 0;
    std::size_t gold_total = 0;
    std::size_t pred_total = 0;
};

struct BracketScores {
    std::size_t matched = 0;
    std::size_t gold_total = 0;
    std::size_t pred_total = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static BracketScores from_counts(std::size_t matched, std::size_t gold_total,
                                     std::size_t pred_total);
};

// (gold label, predicted label) for every span-matched constituent, pooled
// over the corpus.
using LabelPairs = std::vector<std::pair<std::string, std::string>>;

struct ClusterScores {
    double homogeneity = 0.0;
    double completeness = 0.0;
    double v_measure = 0.0;
};

// All functions below expect normalized trees (unary-collapsed, punctuation
// removed) with identical yields at each index; a mismatch throws Error
// naming the sentence.

std::vector<SentenceCounts> sentence_counts(std::span<const Tree> gold, std::span<const Tree> pred);
BracketScores pool(std::span<const SentenceCounts> counts);

BracketScores bracket_prf(std::span<const Tree> gold, std::span<const Tree> pred);
LabelPairs matched_label_pairs(std::span<const Tree> gold, std::span<const Tree> pred);

// Gold labels are classes, predicted labels are clusters. Empty input scores
// zero everywhere.
ClusterScores homogeneity_completeness_v(const LabelPairs &pairs);

// Recall-Homogeneity: unlabeled recall times homogeneity of matched labels.
double rh(std::span<const Tree> gold, std::span<const Tree> pred);
// Recall-V-Measure: unlabeled recall times V-measure of matched labels.
double rvm(std::span<const Tree> gold, std::span<const Tree> pred);

struct EvalReport {
    BracketScores brackets;
    ClusterScores labels;
    double rh = 0.0;
    double rvm = 0.0;
    std::size_t sentences = 0;  // evaluated
    std::size_t skipped = 0;    // empty after punctuation removal
};

EvalReport evaluate(std::span<const Tree> gold, std::span<const Tree> pred);

struct NormalizedPairs {
    std::vector<Tree> gold;
    std::vector<Tree> pred;
    std::size_t skipped = 0;
};

// Collapses unaries and removes punctuation from both sides. Punctuation
// positions are decided on the gold tree and removed at the same positions
// in the prediction, so tag-based policies work against integer-labeled
// induced trees. Sentences left empty are dropped and counted in `skipped`.
NormalizedPairs normalize_for_eval(std::span<const Tree> gold, std::span<const Tree> pred,
                                   const PunctuationPolicy &policy);

// Normalizes then evaluates.
EvalReport evaluate_raw(std::span<const Tree> gold, std::span<const Tree> pred,
                        const PunctuationPolicy &policy);

double micro_f1(std::span<const SentenceCounts> counts);

struct PermutationResult {
    double observed = 0.0;  // |F1(A) - F1(B)|
    double p_value = 1.0;
    std::size_t iterations = 0;
};

// Paired approximate randomization over sentences: each resample swaps the
// A/B records of every sentence with probability 1/2. The p-value is
// (1 + #{resampled >= observed}) / (1 + iterations).
PermutationResult permutation_test(std::span<const SentenceCounts> a,
                                   std::span<const SentenceCounts> b, std::size_t iterations,
                                   Rng &rng);

}  // namespace gramlab

#endif  // GRAMLAB_EVAL_H_
