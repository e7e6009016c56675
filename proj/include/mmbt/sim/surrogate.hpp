#pragma once

#include <map>
#include <string>
#include <vector>

#include "mmbt/errors.hpp"
#include "mmbt/fusion/fusion.hpp"
#include "mmbt/rng.hpp"

namespace mmbt::sim {

// Confusion-matrix stand-in for one deployed classifier. Each query draws
// independently: the vote matches the ground truth with probability
// sensitivity (truth = success) or specificity (truth = failure).
struct SensorSurrogate {
  fusion::ModalityAccuracy accuracy;

  int sample(bool truth, Rng& rng) const {
    if (truth) return rng.bernoulli(accuracy.sensitivity) ? 1 : 0;
    return rng.bernoulli(accuracy.specificity) ? 0 : 1;
  }
};

// Reserved modality id for deterministic world reads (guards such as the
// fasten iteration check); it consumes no randomness and needs no
// configured surrogate.
inline constexpr const char* kStateModality = "state";

using SurrogateTable = std::map<std::string, SensorSurrogate>;

// One prediction per policy modality, drawn in policy order against the
// given ground truth. Pure with respect to the world: callers pass only
// the truth value, so sensing can never mutate state.
inline std::vector<fusion::ModalityPrediction> sense(bool truth,
                                                     const fusion::FusionPolicy& policy,
                                                     const SurrogateTable& surrogates, Rng& rng) {
  std::vector<fusion::ModalityPrediction> out;
  out.reserve(policy.size());
  for (const std::string& modality : policy.modalities) {
    fusion::ModalityPrediction p;
    p.modality = modality;
    if (modality == kStateModality) {
      p.vote = truth ? 1 : 0;
    } else {
      auto it = surrogates.find(modality);
      if (it == surrogates.end()) raise(Errc::no_surrogate, "modality '" + modality + "'");
      p.vote = it->second.sample(truth, rng);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace mmbt::sim
