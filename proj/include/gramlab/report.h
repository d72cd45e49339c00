#ifndef GRAMLAB_REPORT_H_
#define GRAMLAB_REPORT_H_

#include <string>

#include "json.hpp"

#include "gramlab/eval.h"

namespace gramlab {

nlohmann::json to_json(const BracketScores &s);
nlohmann::json to_json(const EvalReport &r);

// %.17g, the format every CSV/JSON score is written with.
std::string format_double(double x);

// RFC 4180 quoting when the field needs it.
std::string csv_field(const std::string &s);

}  // namespace gramlab

#endif  // GRAMLAB_REPORT_H_
