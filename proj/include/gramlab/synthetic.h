#ifndef GRAMLAB_SYNTHETIC_H_
#define GRAMLAB_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gramlab/grammar.h"
#include "gramlab/random.h"
#include "gramlab/tree.h"
#include "gramlab/treebank.h"

namespace gramlab {

struct SyntheticCorpus {
    Grammar grammar;  // the generating grammar
    Vocabulary vocab;
    std::vector<Sentence> sentences;
    std::vector<Tree> gold;  // integer category labels
};

// Top-down draw of one tree. Gives up (nullopt) as soon as the tree is sure
// to exceed `max_len` leaves.
std::optional<Tree> sample_derivation(const Grammar &g, const Vocabulary &vocab,
                                      std::size_t max_len, Rng &rng);

// Samples `sentences` trees of at most `max_len` tokens from `g`. Throws Error
// when more than 99.9% of the first 10^6 attempts are rejected.
SyntheticCorpus generate_from_grammar(const Grammar &g, const Vocabulary &vocab,
                                      std::size_t sentences, std::size_t max_len,
                                      std::uint64_t seed);

// Draws the generating grammar from the Dirichlet(beta_gen) prior over the
// vocabulary w0 .. w{V-1}, then samples from it as above.
SyntheticCorpus generate_synthetic(int num_categories, int vocab_size, double beta_gen,
                                   std::size_t sentences, std::size_t max_len,
                                   std::uint64_t seed);

}  // namespace gramlab

#endif  // GRAMLAB_SYNTHETIC_H_
