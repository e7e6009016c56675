#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmbt/core/trace.hpp"
#include "mmbt/errors.hpp"
#include "mmbt/harness/runner.hpp"

namespace mmbt::harness {

// Canonical report body: fixed field set, keys sorted by the JSON writer,
// no timestamps, so identical (config, seed) runs are byte-identical.
inline nlohmann::json report_json(const RunSummary& s) {
  nlohmann::json j;
  j["config_digest"] = s.config_digest;
  j["seed"] = s.seed;
  j["trials"] = s.trials;
  j["success_rate"] = s.success_rate;
  j["wilson_95"] = {s.wilson_95.lo, s.wilson_95.hi};
  j["mean_duration_s"] = s.mean_duration_s;
  j["outcome_histogram"] = s.outcome_histogram;
  nlohmann::json acc = nlohmann::json::object();
  for (const auto& [condition, a] : s.condition_accuracy) acc[condition] = a.rate();
  j["per_condition_fused_empirical_accuracy"] = acc;
  return j;
}

inline std::string render_report(const RunSummary& s) { return report_json(s).dump(2) + "\n"; }

// One event per line: node visits as
//   {trial, tick, node_id, kind, status, t_enter, t_exit}
// and fused votes as {condition, votes, weighted_sum, verdict}, emitted
// immediately after their condition's visit record.
inline std::string render_trace(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const TraceEvent& event : events) {
    nlohmann::json j;
    if (const TickRecord* rec = std::get_if<TickRecord>(&event)) {
      j["trial"] = rec->trial;
      j["tick"] = rec->tick;
      j["node_id"] = rec->node_id;
      j["kind"] = rec->kind;
      j["status"] = to_string(rec->status);
      j["t_enter"] = rec->t_enter;
      j["t_exit"] = rec->t_exit;
    } else {
      const VoteRecord& vote = std::get<VoteRecord>(event);
      j["condition"] = vote.condition;
      j["votes"] = vote.votes;
      j["weighted_sum"] = vote.weighted_sum;
      j["verdict"] = vote.verdict ? "success" : "failure";
    }
    out += j.dump();
    out += "\n";
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::config, "cannot open '" + path + "' for writing");
  out << body;
  if (!out) raise(Errc::config, "failed writing '" + path + "'");
}

}  // namespace mmbt::harness
