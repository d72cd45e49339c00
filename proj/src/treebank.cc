#include "gramlab/treebank.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "gramlab/error.h"

namespace gramlab {

namespace {

// ---------------------------------------------------------------------------
// Bracket reader
// ---------------------------------------------------------------------------

enum class TokKind { kOpen, kClose, kAtom };

struct Tok {
    TokKind kind;
    std::string_view text;
};

std::vector<Tok> tokenize(std::string_view s) {
    std::vector<Tok> toks;
    std::size_t i = 0;
    while (i < s.size()) {
        const char ch = s[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (ch == '(') {
            toks.push_back({TokKind::kOpen, s.substr(i, 1)});
            ++i;
        } else if (ch == ')') {
            toks.push_back({TokKind::kClose, s.substr(i, 1)});
            ++i;
        } else {
            std::size_t j = i;
            while (j < s.size() && s[j] != '(' && s[j] != ')' &&
                   !std::isspace(static_cast<unsigned char>(s[j]))) {
                ++j;
            }
            toks.push_back({TokKind::kAtom, s.substr(i, j - i)});
            i = j;
        }
    }
    return toks;
}

void replace_all(std::string *s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s->find(from, pos)) != std::string::npos) {
        s->replace(pos, from.size(), to);
        pos += to.size();
    }
}

std::string unescape_token(std::string_view atom) {
    std::string token(atom);
    replace_all(&token, "-LRB-", "(");
    replace_all(&token, "-RRB-", ")");
    return token;
}

std::string escape_token(const std::string &token) {
    std::string out = token;
    replace_all(&out, "(", "-LRB-");
    replace_all(&out, ")", "-RRB-");
    return out;
}

class BracketReader {
public:
    BracketReader(std::vector<Tok> toks, std::size_t line)
        : toks_(std::move(toks)), line_(line) {}

    Tree read() {
        if (toks_.empty()) throw ParseError("empty tree", line_);
        if (toks_.front().kind != TokKind::kOpen) {
            throw ParseError("tree must start with '('", line_);
        }
        Tree tree = read_node(/*is_root=*/true);
        if (pos_ != toks_.size()) {
            if (toks_[pos_].kind == TokKind::kClose) {
                throw ParseError("unbalanced parentheses (extra ')')", line_);
            }
            throw ParseError("trailing content after tree", line_);
        }
        // Nameless outer wrapper: `( (S ...) )`.
        if (tree.label.empty()) {
            if (tree.children.size() != 1 || tree.children.front().is_leaf()) {
                throw ParseError("unlabeled root must wrap exactly one tree", line_);
            }
            Tree inner = std::move(tree.children.front());
            return inner;
        }
        return tree;
    }

private:
    Tree read_node(bool is_root) {
        ++pos_;  // '('
        if (pos_ >= toks_.size()) throw ParseError("unbalanced parentheses", line_);
        Tree node;
        if (toks_[pos_].kind == TokKind::kClose) throw ParseError("empty tree '()'", line_);
        if (toks_[pos_].kind == TokKind::kAtom) {
            node.label = strip_function_tags(toks_[pos_].text);
            ++pos_;
        } else if (!is_root) {
            throw ParseError("missing node label", line_);
        }
        while (true) {
            if (pos_ >= toks_.size()) throw ParseError("unbalanced parentheses", line_);
            const Tok &t = toks_[pos_];
            if (t.kind == TokKind::kClose) {
                ++pos_;
                break;
            }
            if (t.kind == TokKind::kOpen) {
                node.children.push_back(read_node(false));
            } else {
                node.children.emplace_back(unescape_token(t.text));
                ++pos_;
            }
        }
        if (node.children.empty()) {
            throw ParseError("empty tree (node '" + node.label + "' has no children)", line_);
        }
        return node;
    }

    std::vector<Tok> toks_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

void serialize_into(const Tree &node, std::string *out) {
    if (node.is_leaf()) {
        out->append(escape_token(node.label));
        return;
    }
    out->push_back('(');
    out->append(node.label);
    for (const Tree &child : node.children) {
        out->push_back(' ');
        serialize_into(child, out);
    }
    out->push_back(')');
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// Unicode punctuation / symbol ranges (general categories P* and S*).
// ---------------------------------------------------------------------------

struct Range {
    char32_t lo, hi;
};

constexpr std::array kPunctRanges = std::to_array<Range>({
    {0x21, 0x2F},     {0x3A, 0x40},     {0x5B, 0x60},     {0x7B, 0x7E},
    {0xA1, 0xA9},     {0xAB, 0xAC},     {0xAE, 0xB1},     {0xB4, 0xB4},
    {0xB6, 0xB8},     {0xBB, 0xBB},     {0xBF, 0xBF},     {0xD7, 0xD7},
    {0xF7, 0xF7},     {0x2C2, 0x2C5},   {0x2D2, 0x2DF},   {0x2E5, 0x2EB},
    {0x2ED, 0x2ED},   {0x2EF, 0x2FF},   {0x375, 0x375},   {0x37E, 0x37E},
    {0x384, 0x385},   {0x387, 0x387},   {0x55A, 0x55F},   {0x589, 0x58A},
    {0x5BE, 0x5BE},   {0x5C0, 0x5C0},   {0x5C3, 0x5C3},   {0x5C6, 0x5C6},
    {0x5F3, 0x5F4},   {0x609, 0x60A},   {0x60C, 0x60D},   {0x61B, 0x61B},
    {0x61D, 0x61F},   {0x66A, 0x66D},   {0x6D4, 0x6D4},   {0x964, 0x965},
    {0x970, 0x970},   {0xE3F, 0xE3F},   {0xE4F, 0xE4F},   {0xE5A, 0xE5B},
    {0x2010, 0x2027}, {0x2030, 0x205E}, {0x207A, 0x207E}, {0x208A, 0x208E},
    {0x20A0, 0x20C0}, {0x2100, 0x2101}, {0x2103, 0x2106}, {0x2108, 0x2109},
    {0x2114, 0x2114}, {0x2116, 0x2118}, {0x211E, 0x2123}, {0x2125, 0x2125},
    {0x2127, 0x2127}, {0x2129, 0x2129}, {0x212E, 0x212E}, {0x213A, 0x213B},
    {0x2140, 0x2144}, {0x214A, 0x214D}, {0x214F, 0x214F}, {0x2190, 0x2426},
    {0x2440, 0x244A}, {0x2500, 0x2775}, {0x2794, 0x2BFF}, {0x2E00, 0x2E5D},
    {0x2E80, 0x2FFF}, {0x3001, 0x3004}, {0x3008, 0x3020}, {0x3030, 0x3030},
    {0x3036, 0x3037}, {0x303D, 0x303F}, {0x309B, 0x309C}, {0x30FB, 0x30FB},
    {0x3190, 0x3191}, {0x3196, 0x319F}, {0x31C0, 0x31E3}, {0x3200, 0x321E},
    {0x322A, 0x3247}, {0x3250, 0x3250}, {0x3260, 0x327F}, {0x328A, 0x32B0},
    {0x32C0, 0x33FF}, {0x4DC0, 0x4DFF}, {0xFE10, 0xFE19}, {0xFE30, 0xFE6B},
    {0xFF01, 0xFF0F}, {0xFF1A, 0xFF20}, {0xFF3B, 0xFF40}, {0xFF5B, 0xFF65},
    {0xFFE0, 0xFFE6}, {0xFFE8, 0xFFEE}, {0xFFFC, 0xFFFD}, {0x1D000, 0x1D0F5},
    {0x1D100, 0x1D126}, {0x1F000, 0x1F0FF}, {0x1F10D, 0x1FBEF},
});

// Decodes one UTF-8 code point starting at s[*i]; false on malformed input.
bool decode_utf8(std::string_view s, std::size_t *i, char32_t *cp) {
    const auto b0 = static_cast<unsigned char>(s[*i]);
    int extra = 0;
    char32_t value = 0;
    if (b0 < 0x80) {
        value = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        value = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        value = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        value = b0 & 0x07;
    } else {
        return false;
    }
    if (*i + static_cast<std::size_t>(extra) >= s.size() && extra > 0) return false;
    for (int k = 1; k <= extra; ++k) {
        const auto b = static_cast<unsigned char>(s[*i + static_cast<std::size_t>(k)]);
        if ((b & 0xC0) != 0x80) return false;
        value = (value << 6) | (b & 0x3F);
    }
    *i += 1 + static_cast<std::size_t>(extra);
    *cp = value;
    return true;
}

void mask_leaves(const Tree &node, const Tree *parent, const PunctuationPolicy &policy,
                 std::vector<bool> *mask) {
    if (node.is_leaf()) {
        const std::string_view parent_label =
            parent != nullptr ? std::string_view(parent->label) : std::string_view();
        mask->push_back(policy.is_punctuation(node.label, parent_label));
        return;
    }
    for (const Tree &child : node.children) mask_leaves(child, &node, policy, mask);
}

std::optional<Tree> prune(const Tree &node, const std::vector<bool> &mask, std::size_t *pos) {
    if (node.is_leaf()) {
        const bool drop = mask[(*pos)++];
        if (drop) return std::nullopt;
        return node;
    }
    Tree out(node.label);
    for (const Tree &child : node.children) {
        if (auto kept = prune(child, mask, pos)) out.children.push_back(std::move(*kept));
    }
    if (out.children.empty()) return std::nullopt;
    return out;
}

void collect_constituents(const Tree &node, std::size_t begin, std::vector<Constituent> *out,
                          std::size_t *end_out) {
    if (node.is_leaf()) {
        *end_out = begin + 1;
        return;
    }
    const std::size_t slot = out->size();
    out->push_back({begin, begin, node.label});
    std::size_t cursor = begin;
    for (const Tree &child : node.children) {
        std::size_t child_end = cursor;
        collect_constituents(child, cursor, out, &child_end);
        cursor = child_end;
    }
    (*out)[slot].end = cursor;
    *end_out = cursor;
}

void count_rules(const Tree &node, std::set<std::string> *categories,
                 std::map<std::string, std::size_t> *rules) {
    if (node.is_leaf()) return;
    categories->insert(node.label);
    std::string rule = node.label + " ->";
    for (const Tree &child : node.children) {
        rule.push_back(' ');
        rule.append(child.is_leaf() ? std::string(kTerminalMarker) : child.label);
    }
    ++(*rules)[rule];
    for (const Tree &child : node.children) count_rules(child, categories, rules);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string strip_function_tags(std::string_view label) {
    if (label.empty() || !std::isalnum(static_cast<unsigned char>(label.front()))) {
        return std::string(label);
    }
    const std::size_t cut = label.find_first_of("-=");
    return std::string(label.substr(0, cut));
}

Tree parse_tree(std::string_view text, std::size_t line) {
    return BracketReader(tokenize(text), line).read();
}

std::vector<Tree> parse_bracketed(std::string_view text) {
    std::vector<Tree> trees;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        ++line_no;
        const std::string_view line = text.substr(start, nl - start);
        if (!is_blank(line)) trees.push_back(parse_tree(line, line_no));
        start = nl + 1;
    }
    return trees;
}

std::string serialize(const Tree &tree) {
    std::string out;
    serialize_into(tree, &out);
    return out;
}

std::vector<Tree> read_treebank_file(const std::string &path) {
    try {
        return parse_bracketed(read_file(path));
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what(), e.line());
    }
}

void write_treebank_file(const std::string &path, const std::vector<Tree> &trees) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    for (const Tree &t : trees) out << serialize(t) << '\n';
}

Tree collapse_unaries(Tree tree) {
    if (tree.is_leaf()) return tree;
    while (tree.children.size() == 1 && !tree.children.front().is_leaf()) {
        std::vector<Tree> grandchildren = std::move(tree.children.front().children);
        tree.children = std::move(grandchildren);
    }
    for (Tree &child : tree.children) child = collapse_unaries(std::move(child));
    return tree;
}

// ---------------------------------------------------------------------------

PunctuationPolicy PunctuationPolicy::characters() { return PunctuationPolicy(); }

PunctuationPolicy PunctuationPolicy::tags(std::set<std::string> tags) {
    PunctuationPolicy p;
    p.mode_ = Mode::kTags;
    p.tags_ = std::move(tags);
    return p;
}

PunctuationPolicy PunctuationPolicy::none() {
    PunctuationPolicy p;
    p.mode_ = Mode::kNone;
    return p;
}

PunctuationPolicy PunctuationPolicy::from_spec(const std::string &spec) {
    if (spec == "chars") return characters();
    if (spec == "none") return none();
    if (spec.rfind("tags:", 0) == 0) {
        std::istringstream in(read_file(spec.substr(5)));
        std::set<std::string> tags;
        std::string tag;
        while (in >> tag) tags.insert(tag);
        return PunctuationPolicy::tags(std::move(tags));
    }
    throw Error("unknown punctuation policy '" + spec + "' (expected chars, none or tags:<file>)");
}

bool PunctuationPolicy::is_punctuation(std::string_view token,
                                       std::string_view preterminal_label) const {
    switch (mode_) {
    case Mode::kCharacters:
        return is_punctuation_token(token);
    case Mode::kTags:
        return tags_.count(std::string(preterminal_label)) > 0;
    case Mode::kNone:
        return false;
    }
    return false;
}

bool is_punct_or_symbol(char32_t cp) {
    auto it = std::upper_bound(kPunctRanges.begin(), kPunctRanges.end(), cp,
                               [](char32_t v, const Range &r) { return v < r.lo; });
    if (it == kPunctRanges.begin()) return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

bool is_punctuation_token(std::string_view token) {
    if (token.empty()) return false;
    std::size_t i = 0;
    while (i < token.size()) {
        char32_t cp = 0;
        if (!decode_utf8(token, &i, &cp)) return false;
        if (!is_punct_or_symbol(cp)) return false;
    }
    return true;
}

std::vector<bool> punctuation_mask(const Tree &tree, const PunctuationPolicy &policy) {
    std::vector<bool> mask;
    mask_leaves(tree, nullptr, policy, &mask);
    return mask;
}

std::optional<Tree> strip_positions(const Tree &tree, const std::vector<bool> &mask) {
    if (mask.size() != yield_length(tree)) {
        throw Error("punctuation mask length " + std::to_string(mask.size()) +
                    " does not match tree yield length " + std::to_string(yield_length(tree)));
    }
    std::size_t pos = 0;
    auto pruned = prune(tree, mask, &pos);
    if (!pruned) return std::nullopt;
    return collapse_unaries(std::move(*pruned));
}

std::optional<Tree> strip_punctuation(const Tree &tree, const PunctuationPolicy &policy) {
    return strip_positions(tree, punctuation_mask(tree, policy));
}

std::vector<Constituent> gold_constituents(const Tree &tree) {
    std::vector<Constituent> all;
    std::size_t end = 0;
    collect_constituents(tree, 0, &all, &end);
    std::vector<Constituent> out;
    out.reserve(all.size());
    for (Constituent &c : all) {
        if (c.end - c.begin >= 2) out.push_back(std::move(c));
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<Tree> &trees) {
    if (trees.empty()) throw Error("corpus_stats: empty tree sequence");
    std::set<std::string> categories;
    CorpusStats stats;
    for (const Tree &t : trees) count_rules(t, &categories, &stats.rule_histogram);
    stats.unique_categories = categories.size();
    stats.unique_rules = stats.rule_histogram.size();
    return stats;
}

// ---------------------------------------------------------------------------

int Vocabulary::add(const std::string &token) {
    auto [it, inserted] = ids_.try_emplace(token, static_cast<int>(tokens_.size()));
    if (inserted) tokens_.push_back(token);
    return it->second;
}

int Vocabulary::id(const std::string &token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) throw Error("out-of-vocabulary token '" + token + "'");
    return it->second;
}

std::optional<int> Vocabulary::find(const std::string &token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::vector<int>> Corpus::encoded() const {
    std::vector<std::vector<int>> out;
    out.reserve(sentences.size());
    for (const Sentence &s : sentences) {
        std::vector<int> ids;
        ids.reserve(s.size());
        for (const std::string &tok : s) ids.push_back(vocab.id(tok));
        out.push_back(std::move(ids));
    }
    return out;
}

std::vector<Sentence> split_sentences(std::string_view text) {
    std::vector<Sentence> sentences;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream words(line);
        Sentence s;
        std::string w;
        while (words >> w) s.push_back(w);
        if (!s.empty()) sentences.push_back(std::move(s));
    }
    return sentences;
}

std::vector<Sentence> read_raw_sentences(const std::string &path) {
    return split_sentences(read_file(path));
}

Corpus make_corpus(std::vector<Sentence> sentences, std::vector<Tree> gold) {
    if (!gold.empty() && gold.size() != sentences.size()) {
        throw Error("gold treebank has " + std::to_string(gold.size()) + " trees but corpus has " +
                    std::to_string(sentences.size()) + " sentences");
    }
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (yield(gold[i]) != sentences[i]) {
            throw Error("gold tree " + std::to_string(i + 1) +
                        " does not yield the corresponding corpus sentence");
        }
    }
    Corpus corpus;
    for (const Sentence &s : sentences) {
        for (const std::string &tok : s) corpus.vocab.add(tok);
    }
    corpus.sentences = std::move(sentences);
    corpus.gold = std::move(gold);
    return corpus;
}

}  // namespace gramlab
