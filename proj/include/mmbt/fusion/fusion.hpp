#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mmbt/errors.hpp"
#include "mmbt/rng.hpp"

namespace mmbt::fusion {

// Tolerances used by the voting rule. The tie tolerance guards against
// decimal-literal representation error (0.3 + 0.2 style sums); the weight
// tolerance admits human-written thirds.
inline constexpr double kVoteTolerance = 1e-12;
inline constexpr double kWeightSumTolerance = 1e-9;

// Weighted-vote decision rule for one condition: modality ids, their
// weights (summing to one) and the acceptance threshold.
struct FusionPolicy {
  std::vector<std::string> modalities;
  std::vector<double> weights;
  double threshold = 0.5;

  std::size_t size() const { return modalities.size(); }
};

// One binary vote: 1 = the modality's model says the phase succeeded.
struct ModalityPrediction {
  std::string modality;
  int vote = 0;
};

// Confusion model for one deployed classifier. The symmetric case
// (sensitivity == specificity == deployment accuracy) is the default;
// asymmetric values describe class-skewed failure modes.
struct ModalityAccuracy {
  std::string modality;
  double sensitivity = 1.0;  // P(vote = 1 | phase succeeded)
  double specificity = 1.0;  // P(vote = 0 | phase failed)

  double balanced() const { return 0.5 * (sensitivity + specificity); }
};

struct FusedAccuracy {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double accuracy = 0.0;
};

inline void check_policy(const FusionPolicy& policy) {
  if (policy.modalities.empty()) raise(Errc::empty_input, "fusion policy has no modalities");
  if (policy.modalities.size() != policy.weights.size())
    raise(Errc::modality_mismatch, "modalities and weights differ in length");
  double sum = 0.0;
  for (double w : policy.weights) {
    if (w < 0.0) raise(Errc::modality_mismatch, "negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance)
    raise(Errc::modality_mismatch, "weights must sum to 1");
  if (policy.threshold < 0.0 || policy.threshold > 1.0)
    raise(Errc::modality_mismatch, "threshold outside [0, 1]");
}

inline double weighted_sum(const std::vector<ModalityPrediction>& predictions,
                           const FusionPolicy& policy) {
  if (predictions.size() != policy.size())
    raise(Errc::modality_mismatch, "prediction count does not match policy");
  double sum = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (predictions[i].modality != policy.modalities[i])
      raise(Errc::modality_mismatch,
            "expected vote for '" + policy.modalities[i] + "', got '" + predictions[i].modality + "'");
    if (predictions[i].vote != 0 && predictions[i].vote != 1)
      raise(Errc::modality_mismatch, "votes must be 0 or 1");
    sum += policy.weights[i] * predictions[i].vote;
  }
  return sum;
}

// Decision rule: success iff the weighted vote sum meets or exceeds the
// threshold. With weights summing to one the extra division by N makes
// the default threshold unreachable for N >= 2, so the normalised sum is
// the default behaviour; strict_printed_rule keeps the divided form
// available for auditing.
inline bool vote(const std::vector<ModalityPrediction>& predictions, const FusionPolicy& policy,
                 bool strict_printed_rule = false) {
  check_policy(policy);
  double sum = weighted_sum(predictions, policy);
  if (strict_printed_rule) sum /= static_cast<double>(policy.size());
  return sum >= policy.threshold - kVoteTolerance;
}

// Accuracy-proportional default weights: w_i = a_i / sum(a_j) with a_i the
// balanced accuracy. Order is preserved.
inline std::vector<double> default_weights(const std::vector<ModalityAccuracy>& accuracies) {
  if (accuracies.empty()) raise(Errc::empty_input, "no modality accuracies");
  double total = 0.0;
  for (const auto& a : accuracies) {
    if (a.balanced() <= 0.0) raise(Errc::empty_input, "balanced accuracy must be positive");
    total += a.balanced();
  }
  std::vector<double> weights;
  weights.reserve(accuracies.size());
  for (const auto& a : accuracies) weights.push_back(a.balanced() / total);
  return weights;
}

inline constexpr std::size_t kMaxOracleModalities = 20;

// Exact fused sensitivity/specificity/accuracy of a policy under mutually
// independent modality errors: enumerate all 2^N joint vote outcomes for
// each ground truth, weigh each by its probability and apply the decision
// rule. O(2^N * N); N is capped.
inline FusedAccuracy fused_accuracy(const FusionPolicy& policy,
                                    const std::vector<ModalityAccuracy>& accuracies,
                                    double prior_success = 0.5,
                                    bool strict_printed_rule = false) {
  check_policy(policy);
  const std::size_t n = policy.size();
  if (n > kMaxOracleModalities) raise(Errc::too_many_modalities, "oracle supports N <= 20");
  if (accuracies.size() != n) raise(Errc::modality_mismatch, "accuracy table does not match policy");
  for (std::size_t i = 0; i < n; ++i) {
    if (accuracies[i].modality != policy.modalities[i])
      raise(Errc::modality_mismatch, "accuracy entry order must match the policy");
  }

  double p_success_given_success = 0.0;  // fused says success | truth success
  double p_success_given_failure = 0.0;  // fused says success | truth failure
  std::vector<ModalityPrediction> votes(n);
  for (std::size_t i = 0; i < n; ++i) votes[i].modality = policy.modalities[i];

  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    double p_given_success = 1.0;
    double p_given_failure = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool one = (mask >> i) & 1u;
      votes[i].vote = one ? 1 : 0;
      p_given_success *= one ? accuracies[i].sensitivity : 1.0 - accuracies[i].sensitivity;
      p_given_failure *= one ? 1.0 - accuracies[i].specificity : accuracies[i].specificity;
    }
    if (vote(votes, policy, strict_printed_rule)) {
      p_success_given_success += p_given_success;
      p_success_given_failure += p_given_failure;
    }
  }

  FusedAccuracy out;
  out.sensitivity = p_success_given_success;
  out.specificity = 1.0 - p_success_given_failure;
  out.accuracy = prior_success * out.sensitivity + (1.0 - prior_success) * out.specificity;
  return out;
}

}  // namespace mmbt::fusion
