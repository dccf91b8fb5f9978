#pragma once

// Comparison uncertainty metrics computable from stored generations:
// predictive entropy (raw and length-normalized), semantic entropy over
// entailment clusters, lexical similarity and token-level statistics.
// Every score is oriented so that larger means more uncertain.

#include <vector>

#include "shapunc/core_data.hpp"

namespace shapunc {

struct ClusterSet {
    std::vector<std::vector<int>> clusters;  // disjoint, covering 0..n-1
    std::vector<double> probs;               // normalized cluster mass
};

enum class PeEstimator {
    discrete,     // entropy of the renormalized sample distribution
    monte_carlo,  // -(1/n) sum_i log p(s_i)
};

enum class TokenStat { maxl, avgl, maxe, avge };

double sequence_logprob(const Sample& sample, bool normalized);

double predictive_entropy(const GenerationRecord& record, bool normalized,
                          PeEstimator estimator = PeEstimator::discrete);

/// Greedy pass in sample order: a sample joins the first cluster whose first
/// member entails it and is entailed by it with probability >= threshold.
ClusterSet semantic_clusters(const GenerationRecord& record, const EntailmentMatrix& e,
                             double threshold);

double semantic_entropy(const ClusterSet& clusters);

/// Entropy modes throw UnsupportedMethod when any sample lacks token_entropies.
double token_stat(const GenerationRecord& record, TokenStat mode);

/// Negated mean pairwise Rouge-L.
double lexical_similarity_score(const GenerationRecord& record);

}  // namespace shapunc
