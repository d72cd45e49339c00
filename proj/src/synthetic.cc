#include "gramlab/synthetic.h"

#include "gramlab/error.h"

namespace gramlab {

namespace {

constexpr std::size_t kRejectionWindow = 1000000;
constexpr double kMaxRejectionRate = 0.999;

}  // namespace

std::optional<Tree> sample_derivation(const Grammar &g, const Vocabulary &vocab,
                                      std::size_t max_len, Rng &rng) {
    if (max_len < 1) return std::nullopt;
    const int C = g.num_categories();
    // Leaves already emitted plus nodes still waiting to be expanded; every
    // pending node yields at least one leaf.
    std::size_t committed = 1;
    bool overflow = false;
    auto expand = [&](auto &self, int category) -> Tree {
        const auto row = g.row(category);
        const std::size_t pick = sample_discrete(row, 1.0, rng);
        if (g.is_terminal_index(pick)) {
            const int word = static_cast<int>(pick - g.terminal_index(0));
            return preterminal(std::to_string(category), vocab.token(word));
        }
        if (++committed > max_len) {
            overflow = true;
            return Tree(std::to_string(category));
        }
        const int left = static_cast<int>(pick) / C;
        const int right = static_cast<int>(pick) % C;
        Tree l = self(self, left);
        if (overflow) return Tree(std::to_string(category));
        Tree r = self(self, right);
        if (overflow) return Tree(std::to_string(category));
        return Tree(std::to_string(category), {std::move(l), std::move(r)});
    };
    const int root = static_cast<int>(sample_discrete(g.root(), 1.0, rng));
    Tree tree = expand(expand, root);
    if (overflow) return std::nullopt;
    return tree;
}

SyntheticCorpus generate_from_grammar(const Grammar &g, const Vocabulary &vocab,
                                      std::size_t sentences, std::size_t max_len,
                                      std::uint64_t seed) {
    if (max_len < 1) throw Error("max_len must be >= 1");
    if (static_cast<int>(vocab.size()) != g.vocab_size()) {
        throw Error("vocabulary does not match the generating grammar");
    }
    SyntheticCorpus out;
    out.grammar = g;
    out.vocab = vocab;
    Rng rng = make_rng(seed, {7});
    std::size_t attempts = 0;
    while (out.gold.size() < sentences) {
        ++attempts;
        if (auto tree = sample_derivation(g, vocab, max_len, rng)) {
            out.sentences.push_back(yield(*tree));
            out.gold.push_back(std::move(*tree));
        }
        if (attempts == kRejectionWindow) {
            const double rejected =
                1.0 - static_cast<double>(out.gold.size()) / static_cast<double>(attempts);
            if (rejected > kMaxRejectionRate) {
                throw Error("synthetic generation rejected more than 99.9% of 10^6 samples; "
                            "raise max_len or change beta/categories");
            }
        }
    }
    return out;
}

SyntheticCorpus generate_synthetic(int num_categories, int vocab_size, double beta_gen,
                                   std::size_t sentences, std::size_t max_len,
                                   std::uint64_t seed) {
    Rng rng = make_rng(seed, {6});
    const Grammar g = sample_prior(num_categories, vocab_size, beta_gen, rng);
    Vocabulary vocab;
    for (int w = 0; w < vocab_size; ++w) vocab.add("w" + std::to_string(w));
    return generate_from_grammar(g, vocab, sentences, max_len, seed);
}

}  // namespace gramlab
