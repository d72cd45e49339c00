#include "gramlab/chart.h"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>

#include "gramlab/error.h"

namespace gramlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Child states reachable from each parent state of a chart.
struct StateTable {
    int num_states = 1;
    std::optional<int> bound;
    std::vector<int> left_depth;   // depth a branching left child would sit at
    std::vector<int> right_state;  // state index of the right child

    explicit StateTable(std::optional<int> depth_bound) : bound(depth_bound) {
        if (!bound) {
            left_depth.push_back(1);
            right_state.push_back(0);
            return;
        }
        if (*bound < 1) throw Error("depth bound must be >= 1");
        num_states = 2 * *bound;
        for (int d = 1; d <= *bound; ++d) {
            for (Side s : {Side::kLeft, Side::kRight}) {
                left_depth.push_back(left_child_depth(d, s));
                right_state.push_back(Chart::state_index(d, Side::kRight));
            }
        }
    }

    // State index of a left child spanning `width` tokens, or -1 when the
    // child would exceed the bound. Width-1 items live in state 0.
    int left_state(int parent_state, std::size_t width) const {
        if (width == 1 || !bound) return 0;
        const int d = left_depth[static_cast<std::size_t>(parent_state)];
        if (d > *bound) return -1;
        return Chart::state_index(d, Side::kLeft);
    }
    int right_child_state(int parent_state, std::size_t width) const {
        if (width == 1 || !bound) return 0;
        return right_state[static_cast<std::size_t>(parent_state)];
    }
};

std::vector<int> encode(std::span<const std::string> sentence, const Vocabulary &vocab,
                        const Grammar &g) {
    if (sentence.empty()) throw Error("cannot parse an empty sentence");
    std::vector<int> ids;
    ids.reserve(sentence.size());
    for (const std::string &tok : sentence) {
        const int id = vocab.id(tok);
        if (id >= g.vocab_size()) {
            throw Error("token '" + tok + "' has no terminal expansion in the grammar");
        }
        ids.push_back(id);
    }
    return ids;
}

}  // namespace

// ---------------------------------------------------------------------------

CompiledGrammar::CompiledGrammar(const Grammar &g)
    : grammar_(&g), num_categories_(g.num_categories()) {
    const std::size_t n = C();
    binary_.resize(n * n * n);
    log_binary_.resize(n * n * n);
    for (int p = 0; p < num_categories_; ++p) {
        for (int l = 0; l < num_categories_; ++l) {
            for (int r = 0; r < num_categories_; ++r) {
                const double prob = g.binary_prob(p, l, r);
                const std::size_t at =
                    (static_cast<std::size_t>(l) * n + static_cast<std::size_t>(r)) * n +
                    static_cast<std::size_t>(p);
                binary_[at] = prob;
                log_binary_[at] = safe_log(prob);
            }
        }
    }
    for (double p : g.root()) log_root_.push_back(safe_log(p));
}

double CompiledGrammar::log_terminal(int parent, int word) const {
    return safe_log(grammar_->terminal_prob(parent, word));
}

double Chart::log_inside(std::size_t begin, std::size_t end, int category, int state) const {
    const double s = stored(begin, end, category, state);
    if (!(s > 0.0)) return kNegInf;
    return std::log(s) + static_cast<double>(exponent(begin, end)) * kLn2;
}

// ---------------------------------------------------------------------------

Chart inside_chart(std::span<const std::string> sentence, const Vocabulary &vocab,
                   const CompiledGrammar &cg, std::optional<int> depth_bound) {
    const Grammar &g = cg.grammar();
    const StateTable states(depth_bound);
    Chart chart;
    chart.n_ = sentence.size();
    chart.num_categories_ = g.num_categories();
    chart.num_states_ = states.num_states;
    chart.bound_ = depth_bound;
    chart.ids_ = encode(sentence, vocab, g);
    chart.tokens_.assign(sentence.begin(), sentence.end());

    const std::size_t n = chart.n_;
    const int C = chart.num_categories_;
    const auto Cs = static_cast<std::size_t>(C);
    const int S = chart.num_states_;
    const std::size_t cell_size = static_cast<std::size_t>(S) * Cs;
    chart.scores_.assign((n + 1) * (n + 1) * cell_size, 0.0);
    chart.exponents_.assign((n + 1) * (n + 1), 0);
    chart.nonzero_.assign((n + 1) * (n + 1), 0);

    // Rescale a freshly accumulated cell so its largest item lies in [0.5, 1).
    auto finish_cell = [&](std::size_t i, std::size_t j, int base_exponent) {
        double *cell = &chart.scores_[chart.item_offset(i, j, 0)];
        const double m = *std::max_element(cell, cell + cell_size);
        if (!(m > 0.0)) return;
        int e = 0;
        std::frexp(m, &e);
        for (std::size_t x = 0; x < cell_size; ++x) cell[x] = std::ldexp(cell[x], -e);
        chart.exponents_[chart.cell(i, j)] = base_exponent + e;
        chart.nonzero_[chart.cell(i, j)] = 1;
    };

    for (std::size_t i = 0; i < n; ++i) {
        double *cell = &chart.scores_[chart.item_offset(i, i + 1, 0)];
        for (int c = 0; c < C; ++c) {
            const double p = g.terminal_prob(c, chart.ids_[i]);
            for (int st = 0; st < S; ++st) cell[static_cast<std::size_t>(st) * Cs + static_cast<std::size_t>(c)] = p;
        }
        finish_cell(i, i + 1, 0);
    }

    for (std::size_t width = 2; width <= n; ++width) {
        for (std::size_t i = 0; i + width <= n; ++i) {
            const std::size_t j = i + width;
            int base = INT_MIN;
            for (std::size_t k = i + 1; k < j; ++k) {
                if (chart.nonzero(i, k) && chart.nonzero(k, j)) {
                    base = std::max(base, chart.exponent(i, k) + chart.exponent(k, j));
                }
            }
            if (base == INT_MIN) continue;
            double *out_cell = &chart.scores_[chart.item_offset(i, j, 0)];
            for (std::size_t k = i + 1; k < j; ++k) {
                if (!chart.nonzero(i, k) || !chart.nonzero(k, j)) continue;
                const double scale =
                    std::ldexp(1.0, chart.exponent(i, k) + chart.exponent(k, j) - base);
                if (scale == 0.0) continue;
                for (int st = 0; st < S; ++st) {
                    const int ls = states.left_state(st, k - i);
                    if (ls < 0) continue;
                    const int rs = states.right_child_state(st, j - k);
                    const double *left = &chart.scores_[chart.item_offset(i, k, ls)];
                    const double *right = &chart.scores_[chart.item_offset(k, j, rs)];
                    double *out = out_cell + static_cast<std::size_t>(st) * Cs;
                    for (int l = 0; l < C; ++l) {
                        if (left[l] == 0.0) continue;
                        const double a = left[l] * scale;
                        for (int r = 0; r < C; ++r) {
                            if (right[r] == 0.0) continue;
                            const double o = a * right[r];
                            const double *rule = cg.binary_by_children(l, r);
                            for (int p = 0; p < C; ++p) out[p] += rule[p] * o;
                        }
                    }
                }
            }
            finish_cell(i, j, base);
        }
    }

    double mass = 0.0;
    for (int c = 0; c < C; ++c) mass += g.root()[static_cast<std::size_t>(c)] * chart.stored(0, n, c, 0);
    chart.log_mass_ = mass > 0.0 ? std::log(mass) + chart.exponent(0, n) * kLn2 : kNegInf;
    return chart;
}

Chart inside_chart(std::span<const std::string> sentence, const Vocabulary &vocab,
                   const Grammar &g, std::optional<int> depth_bound) {
    const CompiledGrammar cg(g);
    return inside_chart(sentence, vocab, cg, depth_bound);
}

// ---------------------------------------------------------------------------

Tree sample_tree(const Chart &chart, const CompiledGrammar &cg, Rng &rng) {
    if (!(chart.log_sentence_mass() > kNegInf)) {
        throw Error("sentence has zero probability under the grammar (no legal parse)");
    }
    const Grammar &g = cg.grammar();
    const StateTable states(chart.depth_bound());
    const int C = chart.num_categories();
    const std::size_t n = chart.length();

    std::vector<double> weights(static_cast<std::size_t>(C));
    for (int c = 0; c < C; ++c) {
        weights[static_cast<std::size_t>(c)] =
            g.root()[static_cast<std::size_t>(c)] * chart.stored(0, n, c, chart.root_state());
    }
    double total = 0.0;
    for (double w : weights) total += w;
    const int root = static_cast<int>(sample_discrete(weights, total, rng));

    struct Choice {
        std::size_t k;
        int left, right;
    };
    std::vector<Choice> choices;

    auto build = [&](auto &self, std::size_t i, std::size_t j, int c, int st) -> Tree {
        if (j - i == 1) return preterminal(std::to_string(c), chart.tokens()[i]);
        int base = INT_MIN;
        for (std::size_t k = i + 1; k < j; ++k) {
            if (chart.nonzero(i, k) && chart.nonzero(k, j)) {
                base = std::max(base, chart.exponent(i, k) + chart.exponent(k, j));
            }
        }
        weights.clear();
        choices.clear();
        total = 0.0;
        for (std::size_t k = i + 1; k < j && base != INT_MIN; ++k) {
            if (!chart.nonzero(i, k) || !chart.nonzero(k, j)) continue;
            const int ls = states.left_state(st, k - i);
            if (ls < 0) continue;
            const int rs = states.right_child_state(st, j - k);
            const double scale = std::ldexp(1.0, chart.exponent(i, k) + chart.exponent(k, j) - base);
            for (int l = 0; l < C; ++l) {
                const double a = chart.stored(i, k, l, ls) * scale;
                if (a == 0.0) continue;
                for (int r = 0; r < C; ++r) {
                    const double w = g.binary_prob(c, l, r) * a * chart.stored(k, j, r, rs);
                    if (w > 0.0) {
                        weights.push_back(w);
                        choices.push_back({k, l, r});
                        total += w;
                    }
                }
            }
        }
        if (!(total > 0.0)) {
            throw Error("sample_tree: item with no expansion mass (numeric floor reached)");
        }
        const Choice pick = choices[sample_discrete(weights, total, rng)];
        Tree left = self(self, i, pick.k, pick.left, states.left_state(st, pick.k - i));
        Tree right = self(self, pick.k, j, pick.right, states.right_child_state(st, j - pick.k));
        return Tree(std::to_string(c), {std::move(left), std::move(right)});
    };
    return build(build, 0, n, root, chart.root_state());
}

Tree sample_tree(const Chart &chart, const Grammar &g, Rng &rng) {
    const CompiledGrammar cg(g);
    return sample_tree(chart, cg, rng);
}

// ---------------------------------------------------------------------------

ViterbiParse viterbi(std::span<const std::string> sentence, const Vocabulary &vocab,
                     const CompiledGrammar &cg, std::optional<int> depth_bound) {
    const Grammar &g = cg.grammar();
    const StateTable states(depth_bound);
    const std::vector<int> ids = encode(sentence, vocab, g);
    const std::size_t n = ids.size();
    const int C = g.num_categories();
    const auto Cs = static_cast<std::size_t>(C);
    const int S = states.num_states;
    const std::size_t cell_size = static_cast<std::size_t>(S) * Cs;

    struct Back {
        std::size_t k = 0;
        int left = -1, right = -1;
    };
    std::vector<double> best((n + 1) * (n + 1) * cell_size, kNegInf);
    std::vector<Back> back(best.size());
    auto at = [&](std::size_t i, std::size_t j, int st) {
        return ((i * (n + 1) + j) * static_cast<std::size_t>(S) + static_cast<std::size_t>(st)) * Cs;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < C; ++c) {
            const double lp = cg.log_terminal(c, ids[i]);
            for (int st = 0; st < S; ++st) best[at(i, i + 1, st) + static_cast<std::size_t>(c)] = lp;
        }
    }
    for (std::size_t width = 2; width <= n; ++width) {
        for (std::size_t i = 0; i + width <= n; ++i) {
            const std::size_t j = i + width;
            for (std::size_t k = i + 1; k < j; ++k) {
                for (int st = 0; st < S; ++st) {
                    const int ls = states.left_state(st, k - i);
                    if (ls < 0) continue;
                    const int rs = states.right_child_state(st, j - k);
                    const double *left = &best[at(i, k, ls)];
                    const double *right = &best[at(k, j, rs)];
                    double *out = &best[at(i, j, st)];
                    Back *bp = &back[at(i, j, st)];
                    for (int l = 0; l < C; ++l) {
                        if (left[l] == kNegInf) continue;
                        for (int r = 0; r < C; ++r) {
                            if (right[r] == kNegInf) continue;
                            const double base = left[l] + right[r];
                            const double *rule = cg.log_binary_by_children(l, r);
                            for (int p = 0; p < C; ++p) {
                                const double cand = base + rule[p];
                                if (cand > out[p]) {
                                    out[p] = cand;
                                    bp[p] = {k, l, r};
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    int root = -1;
    double best_root = kNegInf;
    for (int c = 0; c < C; ++c) {
        const double cand = cg.log_root(c) + best[at(0, n, 0) + static_cast<std::size_t>(c)];
        if (cand > best_root) {
            best_root = cand;
            root = c;
        }
    }
    if (root < 0) throw Error("viterbi: sentence has zero probability under the grammar");

    auto build = [&](auto &self, std::size_t i, std::size_t j, int c, int st) -> Tree {
        if (j - i == 1) return preterminal(std::to_string(c), sentence[i]);
        const Back b = back[at(i, j, st) + static_cast<std::size_t>(c)];
        Tree left = self(self, i, b.k, b.left, states.left_state(st, b.k - i));
        Tree right = self(self, b.k, j, b.right, states.right_child_state(st, j - b.k));
        return Tree(std::to_string(c), {std::move(left), std::move(right)});
    };
    return {build(build, 0, n, root, 0), best_root};
}

Tree viterbi_parse(std::span<const std::string> sentence, const Vocabulary &vocab,
                   const Grammar &g, std::optional<int> depth_bound) {
    const CompiledGrammar cg(g);
    return viterbi(sentence, vocab, cg, depth_bound).tree;
}

}  // namespace gramlab
