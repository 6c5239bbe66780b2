#include "report.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace psg::cli {

using nlohmann::json;

std::string write_report(const EvalReport& r) {
  json j;
  j["status"] = r.status;
  j["results"] = r.results;
  j["steps"] = r.steps;
  if (r.failure) {
    j["failure"] = {{"reason", r.failure->reason},   {"graph", r.failure->graph},
                    {"node", r.failure->node},       {"goal", r.failure->goal},
                    {"message", r.failure->message}};
  } else {
    j["failure"] = nullptr;
  }
  if (r.outcomes) {
    j["outcomes"] = *r.outcomes;
    j["truncated"] = r.truncated;
  }
  return j.dump(2) + "\n";
}

EvalReport parse_report(std::string_view text) {
  try {
    json j = json::parse(text.begin(), text.end());
    EvalReport r;
    r.status = j.at("status").get<std::string>();
    r.results = j.at("results").get<std::vector<std::string>>();
    r.steps = j.at("steps").get<std::size_t>();
    if (const json& f = j.at("failure"); !f.is_null()) {
      r.failure = FailureInfo{f.at("reason").get<std::string>(), f.at("graph").get<std::string>(),
                              f.at("node").get<std::string>(), f.at("goal").get<std::string>(),
                              f.at("message").get<std::string>()};
    }
    if (auto it = j.find("outcomes"); it != j.end()) {
      r.outcomes = it->get<std::vector<std::vector<std::string>>>();
      r.truncated = j.at("truncated").get<bool>();
    }
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed eval report: ") + e.what());
  }
}

}  // namespace psg::cli
