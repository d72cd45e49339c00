#include "gramlab/report.h"

#include <cstdio>

namespace gramlab {

nlohmann::json to_json(const BracketScores &s) {
    return {{"matched", s.matched},     {"gold_total", s.gold_total}, {"pred_total", s.pred_total},
            {"precision", s.precision}, {"recall", s.recall},         {"f1", s.f1}};
}

nlohmann::json to_json(const EvalReport &r) {
    nlohmann::json j = to_json(r.brackets);
    j["h"] = r.labels.homogeneity;
    j["c"] = r.labels.completeness;
    j["v"] = r.labels.v_measure;
    j["rh"] = r.rh;
    j["rvm"] = r.rvm;
    j["sentences"] = r.sentences;
    j["skipped"] = r.skipped;
    return j;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace gramlab
