#pragma once

// JSON forms of plans, SESE trees and the reports the command line prints.

#include "bpmn.hpp"
#include "closure.hpp"
#include "lowerbound.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "solver.hpp"
#include "word.hpp"

#include <json.hpp>

#include <string>

namespace eagertl {

using json = nlohmann::ordered_json;

// ----------------------------------------------------------------------------
// Plans: {"horizon": N, "timelines": {"x": [{"value": "v", "duration": d}]}}
// ----------------------------------------------------------------------------

inline json plan_to_json(const Plan &plan) {
  json tls = json::object();
  for (const auto &[var, tl] : plan.timelines) {
    json toks = json::array();
    for (const auto &t : tl.tokens)
      toks.push_back({{"value", t.value}, {"duration", t.duration}});
    tls[var] = std::move(toks);
  }
  return {{"horizon", plan.horizon}, {"timelines", std::move(tls)}};
}

inline Plan plan_from_json(const json &j) {
  if (!j.is_object())
    throw error("plan must be a JSON object");
  if (!j.contains("timelines") || !j["timelines"].is_object())
    throw error("plan needs a 'timelines' object");
  Plan plan;
  for (const auto &[var, toks] : j["timelines"].items()) {
    if (!toks.is_array())
      throw error("timeline '" + var + "' must be an array");
    Timeline tl{var, {}};
    for (const auto &t : toks) {
      if (!t.is_object() || !t.contains("value") || !t["value"].is_string() ||
          !t.contains("duration") || !t["duration"].is_number_integer())
        throw error("token of '" + var +
                    "' needs a string 'value' and an integer 'duration'");
      const auto d = t["duration"].get<std::int64_t>();
      if (d < 1)
        throw error("token of '" + var + "' has non-positive duration");
      tl.tokens.push_back({var, t["value"].get<std::string>(),
                           static_cast<std::uint64_t>(d)});
    }
    plan.timelines.emplace(var, std::move(tl));
  }
  if (j.contains("horizon")) {
    if (!j["horizon"].is_number_integer() || j["horizon"].get<std::int64_t>() < 0)
      throw error("'horizon' must be a non-negative integer");
    plan.horizon = j["horizon"].get<std::uint64_t>();
  } else if (!plan.timelines.empty()) {
    plan.horizon = plan.timelines.begin()->second.horizon();
  }
  return plan;
}

inline Plan parse_plan(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw error(std::string("malformed plan JSON: ") + e.what());
  }
  return plan_from_json(j);
}

// ----------------------------------------------------------------------------
// SESE trees: {"id": .., "type": "FLOW", "before": {..}, "after": {..}}
// ----------------------------------------------------------------------------

inline SeseBlock sese_from_json(const json &j) {
  if (!j.is_object())
    throw error("block must be a JSON object");
  if (!j.contains("id") || !j["id"].is_string())
    throw error("block needs a string 'id'");
  if (!j.contains("type") || !j["type"].is_string())
    throw error("block '" + j["id"].get<std::string>() + "' needs a string 'type'");
  SeseBlock b;
  b.id = j["id"].get<std::string>();
  const auto kind = parse_block_kind(j["type"].get<std::string>());
  if (!kind)
    throw error("block '" + b.id + "' has unknown type '" +
                j["type"].get<std::string>() + "'");
  b.kind = *kind;
  auto roles = child_roles(b.kind);
  for (const auto &role : roles) {
    if (!j.contains(role))
      throw error("block '" + b.id + "' of type " + to_string(b.kind) +
                  " lacks child '" + role + "'");
    b.children.push_back(sese_from_json(j[role]));
  }
  for (const auto &[key, _] : j.items())
    if (key != "id" && key != "type" &&
        std::find(roles.begin(), roles.end(), key) == roles.end())
      throw error("block '" + b.id + "' has unexpected field '" + key + "'");
  validate_tree(b);
  return b;
}

inline json sese_to_json(const SeseBlock &b) {
  json j = {{"id", b.id}, {"type", to_string(b.kind)}};
  const auto roles = child_roles(b.kind);
  for (std::size_t i = 0; i < roles.size(); ++i)
    j[roles[i]] = sese_to_json(b.children[i]);
  return j;
}

inline SeseBlock parse_sese(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw error(std::string("malformed SESE JSON: ") + e.what());
  }
  return sese_from_json(j);
}

// ----------------------------------------------------------------------------
// Reports
// ----------------------------------------------------------------------------

inline json violations_to_json(const ValidationReport &r) {
  json out = json::array();
  for (const auto &v : r)
    out.push_back({{"where", v.where},
                   {"message", v.what},
                   {"severity", v.warning ? "warning" : "error"}});
  return out;
}

inline json classification_to_json(const SynchronizationRule &r,
                                   const RuleClassification &c) {
  json flags = json::array();
  for (std::size_t d = 0; d < c.flags.size(); ++d)
    for (const auto &f : c.flags[d])
      flags.push_back({{"disjunct", d},
                       {"token", f.token},
                       {"trigger", f.trigger},
                       {"left_ambiguous", f.left},
                       {"right_ambiguous", f.right},
                       {"ambiguous", f.ambiguous}});
  return {{"rule", r.name},
          {"eager", c.eager},
          {"reasons", c.reasons},
          {"ambiguous_tokens", c.ambiguous_tokens()},
          {"tokens", std::move(flags)}};
}

inline json solution_report_to_json(const SolutionReport &rep) {
  json rules = json::array();
  for (const auto &r : rep.rules) {
    json e = {{"rule", r.rule}, {"satisfied", r.satisfied}};
    if (r.failing_trigger)
      e["failing_trigger"] = *r.failing_trigger;
    rules.push_back(std::move(e));
  }
  return {{"solution", rep.solution},
          {"failing_rules", rep.failing_rules()},
          {"rules", std::move(rules)}};
}

inline json solve_result_to_json(const Signature &sig, const SolveResult &r,
                                 bool timing) {
  json stats = {{"states", r.stats.states},
                {"expanded", r.stats.expanded},
                {"frontier_peak", r.stats.frontier_peak},
                {"plan_states", r.stats.plan_states},
                {"rule_states", r.stats.rule_states},
                {"depth", r.stats.depth}};
  if (timing)
    stats["wall_ms"] = r.stats.wall_ms;
  json j = {{"status", to_string(r.status)}};
  if (!r.reason.empty())
    j["reason"] = r.reason;
  if (r.word) {
    json w = json::array();
    for (const auto &s : *r.word)
      w.push_back(symbol_text(sig, s));
    j["word"] = std::move(w);
  }
  if (r.plan)
    j["plan"] = plan_to_json(*r.plan);
  j["stats"] = std::move(stats);
  return j;
}

inline json lowerbound_to_json(const LowerBoundReport &r, bool timing) {
  json j = {{"n", r.n},
            {"classes", r.classes},
            {"two_pow_n", std::uint64_t{1} << r.n},
            {"exceeds", r.classes > (std::uint64_t{1} << r.n)},
            {"pairs", r.pairs},
            {"verified_pairs", r.verified_pairs},
            {"oracle_calls", r.oracle_calls},
            {"disagreements", r.disagreements}};
  if (timing)
    j["wall_ms"] = r.wall_ms;
  return j;
}

} // namespace eagertl
