#pragma once

// Shared helpers: scripted leaf handlers for engine tests and a seeded
// random-tree generator for DSL round-trip checks.

#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmbt/core/engine.hpp"
#include "mmbt/dsl/serialize.hpp"
#include "mmbt/rng.hpp"

namespace testsupport {

// Leaves scripted by name: each call consumes the next status from the
// script (the last entry repeats). `dur` args advance the clock, so
// parallel time composition can be exercised with plain scripts.
struct ScriptedLeaves {
  std::map<std::string, std::vector<mmbt::NodeStatus>> scripts;
  std::map<std::string, int> calls;

  mmbt::NodeStatus next(const std::string& name) {
    auto it = scripts.find(name);
    if (it == scripts.end()) mmbt::raise(mmbt::Errc::unknown_handler, "no script for '" + name + "'");
    const int n = calls[name]++;
    const auto& seq = it->second;
    return seq[static_cast<std::size_t>(n) < seq.size() ? n : seq.size() - 1];
  }

  void bind(mmbt::Env& env) {
    env.action = [this](const std::string& name, const mmbt::Args& args, mmbt::Env& e) {
      auto it = args.find("dur");
      if (it != args.end()) e.clock.advance(std::get<double>(it->second));
      return next(name);
    };
    env.condition = [this](const std::string& name, const mmbt::fusion::FusionPolicy&, mmbt::Env&) {
      return next(name);
    };
  }
};

inline mmbt::fusion::FusionPolicy single_modality_policy() {
  mmbt::fusion::FusionPolicy p;
  p.modalities = {"m"};
  p.weights = {1.0};
  return p;
}

// Quantize through the serialized text form so generated trees survive
// parse(serialize(t)) exactly.
inline double quantized(double x) { return std::strtod(mmbt::dsl::format_number(x).c_str(), nullptr); }

// Random valid tree: depth <= 6, fan-out <= 4, occasional skills.
class TreeGenerator {
 public:
  explicit TreeGenerator(std::uint64_t seed) : rng_(seed) {}

  mmbt::TreeDef generate() {
    mmbt::TreeDef t;
    t.name = fresh_name("tree");
    const int n_skills = static_cast<int>(rng_.uniform_int(0, 2));
    for (int i = 0; i < n_skills; ++i)
      skill_names_.push_back(fresh_name("skill"));
    // Bodies may reference earlier skills only, keeping resolution acyclic.
    for (int i = 0; i < n_skills; ++i) {
      usable_skills_ = i;
      t.skills.emplace(skill_names_[i], node(0));
    }
    usable_skills_ = n_skills;
    t.root = node(0);
    reassign_ids(t);
    return t;
  }

 private:
  mmbt::Node node(int depth) {
    namespace b = mmbt::build;
    const bool leaf = depth >= 5 || rng_.uniform() < 0.35;
    if (leaf) {
      switch (rng_.uniform_int(0, usable_skills_ > 0 ? 2 : 1)) {
        case 0: {
          mmbt::Args args;
          if (rng_.bernoulli(0.4)) args["dur"] = quantized(rng_.uniform(0.0, 10.0));
          if (rng_.bernoulli(0.2)) args["mode"] = std::string("fast");
          return b::action(fresh_name("act"), args);
        }
        case 1: {
          mmbt::fusion::FusionPolicy p;
          const int n = static_cast<int>(rng_.uniform_int(1, 4));
          std::vector<double> raw;
          for (int i = 0; i < n; ++i) {
            p.modalities.push_back(fresh_name("mod"));
            raw.push_back(rng_.uniform(0.1, 1.0));
          }
          double sum = 0.0;
          for (double w : raw) sum += w;
          double acc = 0.0;
          for (int i = 0; i < n - 1; ++i) {
            double w = quantized(raw[i] / sum);
            p.weights.push_back(w);
            acc += w;
          }
          p.weights.push_back(quantized(1.0 - acc));
          p.threshold = quantized(rng_.uniform(0.0, 1.0));
          return b::condition(fresh_name("cond"), p);
        }
        default:
          return b::use_skill(skill_names_[rng_.uniform_int(0, usable_skills_ - 1)]);
      }
    }
    const int kids = static_cast<int>(rng_.uniform_int(1, 4));
    std::vector<mmbt::Node> children;
    for (int i = 0; i < kids; ++i) children.push_back(node(depth + 1));
    switch (rng_.uniform_int(0, 3)) {
      case 0: return b::sequence(std::move(children));
      case 1: return b::fallback(std::move(children));
      case 2: return b::parallel(std::move(children));
      default: {
        std::vector<mmbt::Node> one;
        one.push_back(std::move(children.front()));
        const int which = static_cast<int>(rng_.uniform_int(0, 2));
        if (which == 0) return b::decorator(mmbt::DecoratorKind::Inverter, std::move(one.front()));
        if (which == 1) return b::decorator(mmbt::DecoratorKind::ForceSuccess, std::move(one.front()));
        std::optional<std::uint32_t> max;
        if (rng_.bernoulli(0.7)) max = static_cast<std::uint32_t>(rng_.uniform_int(1, 9));
        return b::decorator(mmbt::DecoratorKind::RepeatUntilSuccess, std::move(one.front()), max);
      }
    }
  }

  std::string fresh_name(const std::string& prefix) {
    return prefix + "_" + std::to_string(counter_++);
  }

  mmbt::Rng rng_;
  std::vector<std::string> skill_names_;
  int usable_skills_ = 0;
  int counter_ = 0;
};

}  // namespace testsupport
