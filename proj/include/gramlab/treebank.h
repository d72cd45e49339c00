#ifndef GRAMLAB_TREEBANK_H_
#define GRAMLAB_TREEBANK_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gramlab/tree.h"

namespace gramlab {

// ---------------------------------------------------------------------------
// Bracketed I/O
// ---------------------------------------------------------------------------

// Reads one tree per nonblank line in `(LABEL child ...)` notation.
// Function tags (`NP-SBJ`, `NP=2`) are stripped from nonterminal labels;
// labels starting with punctuation (`-LRB-`, `-NONE-`) are kept verbatim.
// `-LRB-`/`-RRB-` tokens are read back as literal parentheses.
// A nameless outer wrapper `( (S ...) )` is removed.
std::vector<Tree> parse_bracketed(std::string_view text);

// Parses a single tree; `line` is used in error messages only.
Tree parse_tree(std::string_view text, std::size_t line = 1);

// Single-line form with one space between siblings. Parentheses inside
// tokens are written as -LRB-/-RRB-.
std::string serialize(const Tree &tree);

std::string strip_function_tags(std::string_view label);

std::vector<Tree> read_treebank_file(const std::string &path);
void write_treebank_file(const std::string &path, const std::vector<Tree> &trees);

// ---------------------------------------------------------------------------
// Evaluation-side normalization
// ---------------------------------------------------------------------------

// Removes unary chains over the same span, keeping the topmost label.
// Preterminals over tokens are kept.
Tree collapse_unaries(Tree tree);

// Decides which leaves are punctuation.
class PunctuationPolicy {
public:
    enum class Mode { kCharacters, kTags, kNone };

    // Token is punctuation iff every code point is Unicode punctuation/symbol.
    static PunctuationPolicy characters();
    // Token is punctuation iff its preterminal label is in `tags`.
    static PunctuationPolicy tags(std::set<std::string> tags);
    static PunctuationPolicy none();
    // Parses `chars`, `none` or `tags:<file>` (one tag per line/whitespace).
    static PunctuationPolicy from_spec(const std::string &spec);

    bool is_punctuation(std::string_view token, std::string_view preterminal_label) const;
    Mode mode() const { return mode_; }

private:
    Mode mode_ = Mode::kCharacters;
    std::set<std::string> tags_;
};

// Unicode punctuation (P*) or symbol (S*) test on a single code point.
bool is_punct_or_symbol(char32_t cp);
// True iff token is nonempty valid UTF-8 made only of punctuation/symbols.
bool is_punctuation_token(std::string_view token);

// One flag per yield position, true where the leaf is punctuation.
std::vector<bool> punctuation_mask(const Tree &tree, const PunctuationPolicy &policy);

// Removes the leaves flagged in `mask` (size must equal the yield length),
// prunes emptied nodes and re-collapses unaries. nullopt if nothing is left.
std::optional<Tree> strip_positions(const Tree &tree, const std::vector<bool> &mask);

std::optional<Tree> strip_punctuation(const Tree &tree, const PunctuationPolicy &policy);

// Span [begin, end) over the token sequence with the node label.
struct Constituent {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string label;

    friend bool operator==(const Constituent &, const Constituent &) = default;
};

// Internal nodes covering >= 2 tokens, in preorder. Input is expected to be
// unary-collapsed and punctuation-stripped already.
std::vector<Constituent> gold_constituents(const Tree &tree);

// ---------------------------------------------------------------------------
// Sparsity diagnostics
// ---------------------------------------------------------------------------

struct CorpusStats {
    std::size_t unique_categories = 0;
    std::size_t unique_rules = 0;
    // "PARENT -> CHILD ..." with leaves written as kTerminalMarker.
    std::map<std::string, std::size_t> rule_histogram;
};

inline constexpr std::string_view kTerminalMarker = "<t>";

CorpusStats corpus_stats(const std::vector<Tree> &trees);

// ---------------------------------------------------------------------------
// Corpora
// ---------------------------------------------------------------------------

// Dense token -> id map.
class Vocabulary {
public:
    // Returns the id, inserting the token when unseen.
    int add(const std::string &token);
    // Throws Error for out-of-vocabulary tokens.
    int id(const std::string &token) const;
    std::optional<int> find(const std::string &token) const;
    const std::string &token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string> &tokens() const { return tokens_; }

private:
    std::unordered_map<std::string, int> ids_;
    std::vector<std::string> tokens_;
};

using Sentence = std::vector<std::string>;

struct Corpus {
    std::vector<Sentence> sentences;
    std::vector<Tree> gold;  // empty or parallel to sentences
    Vocabulary vocab;

    std::vector<std::vector<int>> encoded() const;
    bool has_gold() const { return !gold.empty(); }
};

// Raw mode: one sentence per nonblank line, space separated tokens.
std::vector<Sentence> read_raw_sentences(const std::string &path);
std::vector<Sentence> split_sentences(std::string_view text);

// Builds the vocabulary in first-occurrence order and validates that gold
// yields, when given, match the sentences exactly.
Corpus make_corpus(std::vector<Sentence> sentences, std::vector<Tree> gold = {});

}  // namespace gramlab

#endif  // GRAMLAB_TREEBANK_H_
