#include "gramlab/grammar.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gramlab/error.h"

namespace gramlab {

namespace {

void check_shape(int num_categories, int vocab_size) {
    if (num_categories < 1) throw Error("number of categories must be >= 1");
    if (vocab_size < 1) throw Error("vocabulary size must be >= 1");
}

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error("beta must be a positive real");
}

std::string format_prob(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

std::string quote(const std::string &token) {
    std::string out = "\"";
    for (char ch : token) {
        if (ch == '"' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

double row_sum(std::span<const double> row) {
    double s = 0.0;
    for (double x : row) s += x;
    return s;
}

void check_simplex(std::span<const double> row, double tolerance, const std::string &what) {
    for (double x : row) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw Error(what + " has a negative or non-finite entry");
        }
    }
    const double s = row_sum(row);
    if (std::abs(s - 1.0) > tolerance) {
        throw Error(what + " sums to " + format_prob(s) + ", not 1");
    }
}

// Line scanner for the grammar text format.
class RuleLine {
public:
    RuleLine(std::string_view text, std::size_t line) : s_(text), line_(line) {}

    void skip_space() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= s_.size();
    }
    bool peek(char ch) {
        skip_space();
        return pos_ < s_.size() && s_[pos_] == ch;
    }
    std::string word() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '\r') ++pos_;
        if (start == pos_) fail("unexpected end of line");
        return std::string(s_.substr(start, pos_ - start));
    }
    void expect(std::string_view w) {
        if (word() != w) fail("expected '" + std::string(w) + "'");
    }
    std::string quoted() {
        skip_space();
        if (pos_ >= s_.size() || s_[pos_] != '"') fail("expected quoted token");
        ++pos_;
        std::string out;
        while (true) {
            if (pos_ >= s_.size()) fail("unterminated quoted token");
            char ch = s_[pos_++];
            if (ch == '"') break;
            if (ch == '\\') {
                if (pos_ >= s_.size()) fail("dangling escape");
                ch = s_[pos_++];
            }
            out.push_back(ch);
        }
        return out;
    }
    int integer(int limit) {
        const std::string w = word();
        int value = -1;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
        if (ec != std::errc() || p != w.data() + w.size() || value < 0 || value >= limit) {
            fail("bad category index '" + w + "'");
        }
        return value;
    }
    double probability() {
        const std::string w = word();
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(w, &used);
        } catch (const std::exception &) {
            fail("bad probability '" + w + "'");
        }
        if (used != w.size() || !(value >= 0.0)) fail("bad probability '" + w + "'");
        return value;
    }
    [[noreturn]] void fail(const std::string &msg) const {
        throw ParseError("grammar: " + msg, line_);
    }

private:
    std::string_view s_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

void renormalize_if_needed(std::span<double> row) {
    const double s = row_sum(row);
    if (std::abs(s - 1.0) > 1e-12) {
        for (double &x : row) x /= s;
    }
}

}  // namespace

// ---------------------------------------------------------------------------

Grammar::Grammar(int num_categories, int vocab_size, double beta)
    : num_categories_(num_categories), vocab_size_(vocab_size), beta_(beta) {
    check_shape(num_categories, vocab_size);
    check_beta(beta);
    row_size_ = static_cast<std::size_t>(num_categories) * static_cast<std::size_t>(num_categories) +
                static_cast<std::size_t>(vocab_size);
    probs_.assign(row_size_ * static_cast<std::size_t>(num_categories), 0.0);
    root_.assign(static_cast<std::size_t>(num_categories), 0.0);
}

std::span<const double> Grammar::row(int parent) const {
    if (parent < 0 || parent >= num_categories_) throw Error("parent category out of range");
    return std::span<const double>(probs_).subspan(offset(parent), row_size_);
}

std::span<double> Grammar::row(int parent) {
    if (parent < 0 || parent >= num_categories_) throw Error("parent category out of range");
    return std::span<double>(probs_).subspan(offset(parent), row_size_);
}

void Grammar::validate(double tolerance) const {
    for (int c = 0; c < num_categories_; ++c) {
        check_simplex(row(c), tolerance, "row " + std::to_string(c));
    }
    check_simplex(root_, tolerance, "root distribution");
}

// ---------------------------------------------------------------------------

RuleCounts::RuleCounts(int num_categories, int vocab_size)
    : num_categories_(num_categories), vocab_size_(vocab_size) {
    check_shape(num_categories, vocab_size);
    row_size_ = static_cast<std::size_t>(num_categories) * static_cast<std::size_t>(num_categories) +
                static_cast<std::size_t>(vocab_size);
    counts_.assign(row_size_ * static_cast<std::size_t>(num_categories), 0);
    root_.assign(static_cast<std::size_t>(num_categories), 0);
}

std::span<const std::uint64_t> RuleCounts::row(int parent) const {
    if (parent < 0 || parent >= num_categories_) throw Error("parent category out of range");
    return std::span<const std::uint64_t>(counts_).subspan(
        static_cast<std::size_t>(parent) * row_size_, row_size_);
}

void RuleCounts::add_binary(int parent, int left, int right, std::uint64_t n) {
    const auto C = static_cast<std::size_t>(num_categories_);
    counts_[static_cast<std::size_t>(parent) * row_size_ + static_cast<std::size_t>(left) * C +
            static_cast<std::size_t>(right)] += n;
}

void RuleCounts::add_terminal(int parent, int word, std::uint64_t n) {
    const auto C = static_cast<std::size_t>(num_categories_);
    counts_[static_cast<std::size_t>(parent) * row_size_ + C * C + static_cast<std::size_t>(word)] += n;
}

void RuleCounts::add_root(int category, std::uint64_t n) {
    root_[static_cast<std::size_t>(category)] += n;
}

std::uint64_t RuleCounts::total_expansions() const {
    std::uint64_t total = 0;
    for (std::uint64_t c : counts_) total += c;
    return total;
}

std::uint64_t RuleCounts::total_roots() const {
    std::uint64_t total = 0;
    for (std::uint64_t c : root_) total += c;
    return total;
}

RuleCounts &RuleCounts::operator+=(const RuleCounts &other) {
    if (other.num_categories_ != num_categories_ || other.vocab_size_ != vocab_size_) {
        throw Error("RuleCounts shape mismatch");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    for (std::size_t i = 0; i < root_.size(); ++i) root_[i] += other.root_[i];
    return *this;
}

RuleCounts operator+(RuleCounts a, const RuleCounts &b) {
    a += b;
    return a;
}

// ---------------------------------------------------------------------------

Grammar sample_prior(int num_categories, int vocab_size, double beta, Rng &rng) {
    check_shape(num_categories, vocab_size);
    check_beta(beta);
    return resample_posterior(RuleCounts(num_categories, vocab_size), beta, rng);
}

Grammar resample_posterior(const RuleCounts &counts, double beta, Rng &rng) {
    check_beta(beta);
    if (counts.num_categories() < 1) throw Error("resample_posterior: empty RuleCounts");
    Grammar g(counts.num_categories(), counts.vocab_size(), beta);
    std::vector<double> alpha(g.row_size());
    for (int c = 0; c < g.num_categories(); ++c) {
        const auto cnt = counts.row(c);
        for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] = beta + static_cast<double>(cnt[k]);
        sample_dirichlet(alpha, rng, g.row(c));
    }
    std::vector<double> root_alpha(static_cast<std::size_t>(g.num_categories()));
    const auto root_counts = counts.root();
    for (std::size_t k = 0; k < root_alpha.size(); ++k) {
        root_alpha[k] = beta + static_cast<double>(root_counts[k]);
    }
    sample_dirichlet(root_alpha, rng, g.root());
    return g;
}

int category_of(const std::string &label, int num_categories) {
    int value = -1;
    auto [p, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
    if (ec != std::errc() || p != label.data() + label.size() || value < 0 ||
        value >= num_categories) {
        throw Error("node label '" + label + "' is not a category index in [0, " +
                    std::to_string(num_categories) + ")");
    }
    return value;
}

void accumulate_rule_counts(const Tree &tree, const Vocabulary &vocab, RuleCounts *counts) {
    const int C = counts->num_categories();
    auto visit = [&](auto &self, const Tree &node) -> int {
        const int parent = category_of(node.label, C);
        if (node.is_preterminal()) {
            const int word = vocab.id(node.children.front().label);
            if (word >= counts->vocab_size()) throw Error("token id exceeds grammar vocabulary");
            counts->add_terminal(parent, word);
            return parent;
        }
        if (node.children.size() != 2 || node.children[0].is_leaf() || node.children[1].is_leaf()) {
            throw Error("rule counting: non-binary node '" + node.label + "'");
        }
        const int left = self(self, node.children[0]);
        const int right = self(self, node.children[1]);
        counts->add_binary(parent, left, right);
        return parent;
    };
    if (tree.is_leaf()) throw Error("rule counting: bare leaf is not a tree");
    counts->add_root(visit(visit, tree));
}

RuleCounts tree_rule_counts(std::span<const Tree> trees, const Vocabulary &vocab,
                            int num_categories) {
    RuleCounts counts(num_categories, static_cast<int>(std::max<std::size_t>(vocab.size(), 1)));
    for (const Tree &t : trees) accumulate_rule_counts(t, vocab, &counts);
    return counts;
}

double expansion_logprob(const Grammar &g, int parent, std::size_t expansion) {
    if (expansion >= g.row_size()) throw Error("expansion index out of range");
    const double p = g.row(parent)[expansion];
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double root_logprob(const Grammar &g, int category) {
    if (category < 0 || category >= g.num_categories()) throw Error("root category out of range");
    const double p = g.root()[static_cast<std::size_t>(category)];
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double tree_logprob(const Grammar &g, const Tree &tree, const Vocabulary &vocab) {
    const int C = g.num_categories();
    auto visit = [&](auto &self, const Tree &node) -> std::pair<int, double> {
        const int parent = category_of(node.label, C);
        if (node.is_preterminal()) {
            const int word = vocab.id(node.children.front().label);
            return {parent, expansion_logprob(g, parent, g.terminal_index(word))};
        }
        if (node.children.size() != 2) throw Error("tree_logprob: non-binary node");
        auto [left, lp_left] = self(self, node.children[0]);
        auto [right, lp_right] = self(self, node.children[1]);
        return {parent, lp_left + lp_right +
                            expansion_logprob(g, parent, g.binary_index(left, right))};
    };
    auto [root, lp] = visit(visit, tree);
    return lp + root_logprob(g, root);
}

SparsityReport sparsity_entropy(const Grammar &g) {
    SparsityReport report;
    const double max_entropy = std::log(static_cast<double>(g.row_size()));
    double total = 0.0;
    for (int c = 0; c < g.num_categories(); ++c) {
        double h = 0.0;
        for (double p : g.row(c)) {
            if (p > 0.0) h -= p * std::log(p);
        }
        const double normalized = max_entropy > 0.0 ? std::clamp(h / max_entropy, 0.0, 1.0) : 0.0;
        report.row_entropy.push_back(normalized);
        total += normalized;
    }
    report.mean = total / static_cast<double>(g.num_categories());
    return report;
}

// ---------------------------------------------------------------------------

void write_grammar(std::ostream &out, const Grammar &g, const Vocabulary &vocab) {
    if (static_cast<int>(vocab.size()) != g.vocab_size()) {
        throw Error("write_grammar: vocabulary size does not match grammar");
    }
    const int C = g.num_categories();
    out << C << ' ' << g.vocab_size() << ' ' << format_prob(g.beta()) << '\n';
    for (int c = 0; c < C; ++c) {
        out << "ROOT -> " << c << " : " << format_prob(g.root()[static_cast<std::size_t>(c)]) << '\n';
    }
    for (int p = 0; p < C; ++p) {
        for (int l = 0; l < C; ++l) {
            for (int r = 0; r < C; ++r) {
                out << p << " -> " << l << ' ' << r << " : " << format_prob(g.binary_prob(p, l, r))
                    << '\n';
            }
        }
        for (int w = 0; w < g.vocab_size(); ++w) {
            out << p << " -> " << quote(vocab.token(w)) << " : "
                << format_prob(g.terminal_prob(p, w)) << '\n';
        }
    }
}

std::pair<Grammar, Vocabulary> read_grammar(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    int C = 0, V = 0;
    double beta = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        std::istringstream header(line);
        if (!(header >> C >> V >> beta)) throw ParseError("grammar: bad header 'C V beta'", line_no);
        break;
    }
    if (C < 1) throw ParseError("grammar: missing header", line_no);
    Grammar g(C, V, beta);
    Vocabulary vocab;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        RuleLine r(line, line_no);
        const std::string lhs = r.word();
        r.expect("->");
        if (lhs == "ROOT") {
            const int c = r.integer(C);
            r.expect(":");
            g.root()[static_cast<std::size_t>(c)] = r.probability();
        } else {
            int parent = -1;
            try {
                parent = category_of(lhs, C);
            } catch (const Error &) {
                r.fail("bad parent category '" + lhs + "'");
            }
            if (r.peek('"')) {
                const std::string token = r.quoted();
                const int word = vocab.add(token);
                if (word >= V) r.fail("more than V distinct terminal tokens");
                r.expect(":");
                g.row(parent)[g.terminal_index(word)] = r.probability();
            } else {
                const int left = r.integer(C);
                const int right = r.integer(C);
                r.expect(":");
                g.row(parent)[g.binary_index(left, right)] = r.probability();
            }
        }
        if (!r.at_end()) r.fail("trailing content");
    }
    if (static_cast<int>(vocab.size()) != V) {
        throw ParseError("grammar: header declares V=" + std::to_string(V) + " but " +
                             std::to_string(vocab.size()) + " distinct tokens appear",
                         line_no);
    }
    g.validate(1e-6);
    for (int c = 0; c < C; ++c) renormalize_if_needed(g.row(c));
    renormalize_if_needed(g.root());
    return {std::move(g), std::move(vocab)};
}

void save_grammar(const std::string &path, const Grammar &g, const Vocabulary &vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    write_grammar(out, g, vocab);
}

std::pair<Grammar, Vocabulary> load_grammar(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_grammar(in);
}

}  // namespace gramlab
