#ifndef GRAMLAB_GIBBS_H_
#define GRAMLAB_GIBBS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gramlab/grammar.h"
#include "gramlab/tree.h"
#include "gramlab/treebank.h"

namespace gramlab {

struct GibbsConfig {
    int num_categories = 30;
    double beta = 1.0;
    std::optional<int> depth_bound;
    int iterations = 700;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GibbsState {
    Grammar grammar;
    Vocabulary vocab;
    std::vector<Tree> trees;  // one per sentence once an iteration has run
    int iteration = 0;
    std::uint64_t seed = 0;
    // Data log-likelihood of the sampled trees under the grammar resampled
    // from them, one entry per completed iteration.
    std::vector<double> log_joint_trace;
};

using IterationObserver = std::function<void(const GibbsState &)>;

// Blocked Gibbs sampler. The grammar starts as a prior draw; each iteration
// samples every tree from the current grammar, then resamples the grammar
// from the Dirichlet posterior given the trees' rule counts.
//
// Random streams: the prior uses (seed, 0), sentence i in iteration t uses
// (seed, 1, t, i) and the grammar update uses (seed, 2, t), so results do not
// depend on evaluation order.
GibbsState gibbs_run(const Corpus &corpus, const GibbsConfig &config,
                     const IterationObserver &observer = {});

// Sum over the state's trees of log root probability plus every expansion
// log probability under state.grammar.
double corpus_log_joint(const GibbsState &state);

// Viterbi trees for every corpus sentence under `g`.
std::vector<Tree> viterbi_trees(const Corpus &corpus, const Grammar &g,
                                std::optional<int> depth_bound);

}  // namespace gramlab

#endif  // GRAMLAB_GIBBS_H_
