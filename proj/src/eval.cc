#include "gramlab/eval.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "gramlab/error.h"

namespace gramlab {

namespace {

using SpanKey = std::pair<std::size_t, std::size_t>;
using SpanLabels = std::map<SpanKey, std::vector<std::string>>;

void check_aligned(std::span<const Tree> gold, std::span<const Tree> pred) {
    if (gold.size() != pred.size()) {
        throw Error("gold has " + std::to_string(gold.size()) + " trees but prediction has " +
                    std::to_string(pred.size()));
    }
}

SpanLabels span_labels(const Tree &tree) {
    SpanLabels out;
    for (Constituent &c : gold_constituents(tree)) {
        out[{c.begin, c.end}].push_back(std::move(c.label));
    }
    return out;
}

// Matches spans of one sentence, calling `on_match` for each matched pair.
template <typename OnMatch>
SentenceCounts match_sentence(const Tree &gold, const Tree &pred, std::size_t index,
                              OnMatch &&on_match) {
    if (yield(gold) != yield(pred)) {
        throw Error("sentence " + std::to_string(index + 1) +
                    ": gold and predicted trees have different yields");
    }
    const SpanLabels g = span_labels(gold);
    const SpanLabels p = span_labels(pred);
    SentenceCounts counts;
    for (const auto &[span, labels] : g) counts.gold_total += labels.size();
    for (const auto &[span, labels] : p) counts.pred_total += labels.size();
    for (const auto &[span, gold_labels] : g) {
        auto it = p.find(span);
        if (it == p.end()) continue;
        const std::size_t m = std::min(gold_labels.size(), it->second.size());
        for (std::size_t x = 0; x < m; ++x) on_match(gold_labels[x], it->second[x]);
        counts.matched += m;
    }
    return counts;
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

}  // namespace

BracketScores BracketScores::from_counts(std::size_t matched, std::size_t gold_total,
                                         std::size_t pred_total) {
    BracketScores s;
    s.matched = matched;
    s.gold_total = gold_total;
    s.pred_total = pred_total;
    s.precision = ratio(matched, pred_total);
    s.recall = ratio(matched, gold_total);
    s.f1 = harmonic(s.precision, s.recall);
    return s;
}

std::vector<SentenceCounts> sentence_counts(std::span<const Tree> gold, std::span<const Tree> pred) {
    check_aligned(gold, pred);
    std::vector<SentenceCounts> out;
    out.reserve(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        out.push_back(match_sentence(gold[i], pred[i], i, [](const auto &, const auto &) {}));
    }
    return out;
}

BracketScores pool(std::span<const SentenceCounts> counts) {
    std::size_t m = 0, g = 0, p = 0;
    for (const SentenceCounts &c : counts) {
        m += c.matched;
        g += c.gold_total;
        p += c.pred_total;
    }
    return BracketScores::from_counts(m, g, p);
}

BracketScores bracket_prf(std::span<const Tree> gold, std::span<const Tree> pred) {
    const auto counts = sentence_counts(gold, pred);
    return pool(counts);
}

LabelPairs matched_label_pairs(std::span<const Tree> gold, std::span<const Tree> pred) {
    check_aligned(gold, pred);
    LabelPairs pairs;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        match_sentence(gold[i], pred[i], i, [&](const std::string &g, const std::string &p) {
            pairs.emplace_back(g, p);
        });
    }
    return pairs;
}

ClusterScores homogeneity_completeness_v(const LabelPairs &pairs) {
    ClusterScores s;
    if (pairs.empty()) return s;
    std::map<std::string, double> classes, clusters;
    std::map<std::pair<std::string, std::string>, double> joint;
    for (const auto &pr : pairs) {
        classes[pr.first] += 1.0;
        clusters[pr.second] += 1.0;
        joint[pr] += 1.0;
    }
    const double n = static_cast<double>(pairs.size());
    auto entropy = [n](const std::map<std::string, double> &marginal) {
        double h = 0.0;
        for (const auto &[label, count] : marginal) h -= count / n * std::log(count / n);
        return h;
    };
    const double h_class = entropy(classes);
    const double h_cluster = entropy(clusters);
    double h_class_given_cluster = 0.0;
    double h_cluster_given_class = 0.0;
    for (const auto &[key, count] : joint) {
        h_class_given_cluster -= count / n * std::log(count / clusters[key.second]);
        h_cluster_given_class -= count / n * std::log(count / classes[key.first]);
    }
    s.homogeneity = h_class == 0.0 ? 1.0 : std::clamp(1.0 - h_class_given_cluster / h_class, 0.0, 1.0);
    s.completeness =
        h_cluster == 0.0 ? 1.0 : std::clamp(1.0 - h_cluster_given_class / h_cluster, 0.0, 1.0);
    s.v_measure = harmonic(s.homogeneity, s.completeness);
    return s;
}

double rh(std::span<const Tree> gold, std::span<const Tree> pred) {
    return evaluate(gold, pred).rh;
}

double rvm(std::span<const Tree> gold, std::span<const Tree> pred) {
    return evaluate(gold, pred).rvm;
}

EvalReport evaluate(std::span<const Tree> gold, std::span<const Tree> pred) {
    check_aligned(gold, pred);
    EvalReport report;
    LabelPairs pairs;
    std::size_t m = 0, g = 0, p = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const SentenceCounts c =
            match_sentence(gold[i], pred[i], i, [&](const std::string &gl, const std::string &pl) {
                pairs.emplace_back(gl, pl);
            });
        m += c.matched;
        g += c.gold_total;
        p += c.pred_total;
    }
    report.brackets = BracketScores::from_counts(m, g, p);
    report.labels = homogeneity_completeness_v(pairs);
    report.rh = report.brackets.recall * report.labels.homogeneity;
    report.rvm = report.brackets.recall * report.labels.v_measure;
    report.sentences = gold.size();
    return report;
}

NormalizedPairs normalize_for_eval(std::span<const Tree> gold, std::span<const Tree> pred,
                                   const PunctuationPolicy &policy) {
    check_aligned(gold, pred);
    NormalizedPairs out;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (yield(gold[i]) != yield(pred[i])) {
            throw Error("sentence " + std::to_string(i + 1) +
                        ": gold and predicted trees have different yields");
        }
        const std::vector<bool> mask = punctuation_mask(gold[i], policy);
        auto g = strip_positions(gold[i], mask);
        auto p = strip_positions(pred[i], mask);
        if (!g || !p) {
            ++out.skipped;
            continue;
        }
        out.gold.push_back(std::move(*g));
        out.pred.push_back(std::move(*p));
    }
    return out;
}

EvalReport evaluate_raw(std::span<const Tree> gold, std::span<const Tree> pred,
                        const PunctuationPolicy &policy) {
    const NormalizedPairs norm = normalize_for_eval(gold, pred, policy);
    EvalReport report = evaluate(norm.gold, norm.pred);
    report.skipped = norm.skipped;
    return report;
}

double micro_f1(std::span<const SentenceCounts> counts) { return pool(counts).f1; }

PermutationResult permutation_test(std::span<const SentenceCounts> a,
                                   std::span<const SentenceCounts> b, std::size_t iterations,
                                   Rng &rng) {
    if (a.size() != b.size()) {
        throw Error("permutation_test: systems cover different numbers of sentences");
    }
    if (iterations < 1) throw Error("permutation_test: iterations must be >= 1");
    PermutationResult result;
    result.iterations = iterations;
    result.observed = std::abs(micro_f1(a) - micro_f1(b));

    const std::uint64_t base = rng();
    std::size_t at_least = 0;
    for (std::size_t r = 0; r < iterations; ++r) {
        Rng stream = make_rng(base, {r});
        std::size_t am = 0, ag = 0, ap = 0, bm = 0, bg = 0, bp = 0;
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i % 64 == 0) bits = stream();
            const bool swap = (bits >> (i % 64)) & 1U;
            const SentenceCounts &x = swap ? b[i] : a[i];
            const SentenceCounts &y = swap ? a[i] : b[i];
            am += x.matched;
            ag += x.gold_total;
            ap += x.pred_total;
            bm += y.matched;
            bg += y.gold_total;
            bp += y.pred_total;
        }
        const double stat = std::abs(BracketScores::from_counts(am, ag, ap).f1 -
                                     BracketScores::from_counts(bm, bg, bp).f1);
        if (stat >= result.observed) ++at_least;
    }
    result.p_value = static_cast<double>(1 + at_least) / static_cast<double>(1 + iterations);
    return result;
}

}  // namespace gramlab
