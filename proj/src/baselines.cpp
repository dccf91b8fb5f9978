#include "shapunc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "shapunc/text_metrics.hpp"

namespace shapunc {

double sequence_logprob(const Sample& sample, bool normalized) {
    if (sample.token_logprobs.empty()) throw ValidationError("sample has no token log-probabilities");
    const double sum =
        std::accumulate(sample.token_logprobs.begin(), sample.token_logprobs.end(), 0.0);
    return normalized ? sum / static_cast<double>(sample.token_logprobs.size()) : sum;
}

double predictive_entropy(const GenerationRecord& record, bool normalized, PeEstimator estimator) {
    if (record.samples.empty()) throw ValidationError("record '" + record.id + "' has no samples");
    std::vector<double> logp;
    logp.reserve(record.size());
    for (const auto& s : record.samples) logp.push_back(sequence_logprob(s, normalized));

    if (estimator == PeEstimator::monte_carlo) {
        return -std::accumulate(logp.begin(), logp.end(), 0.0) / static_cast<double>(logp.size());
    }

    const double top = *std::max_element(logp.begin(), logp.end());
    if (!std::isfinite(top)) {
        throw ValidationError("record '" + record.id + "': all sample probabilities are zero");
    }
    double z = 0.0;
    for (double lp : logp) z += std::exp(lp - top);
    const double log_z = top + std::log(z);
    double h = 0.0;
    for (double lp : logp) {
        const double log_q = lp - log_z;
        const double q = std::exp(log_q);
        if (q > 0.0) h -= q * log_q;
    }
    return h;
}

ClusterSet semantic_clusters(const GenerationRecord& record, const EntailmentMatrix& e,
                             double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ValidationError("clustering threshold must lie in (0, 1]");
    }
    const int n = static_cast<int>(record.size());
    if (e.size() != n) {
        throw ValidationError("entailment matrix for '" + record.id + "' does not match the record");
    }
    ClusterSet out;
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (auto& cluster : out.clusters) {
            const int rep = cluster.front();
            if (e.p(rep, i) >= threshold && e.p(i, rep) >= threshold) {
                cluster.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) out.clusters.push_back({i});
    }

    std::vector<double> logp;
    for (const auto& s : record.samples) logp.push_back(sequence_logprob(s, true));
    const double top = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (const auto& cluster : out.clusters) {
        double mass = 0.0;
        for (int i : cluster) mass += std::exp(logp[static_cast<std::size_t>(i)] - top);
        out.probs.push_back(mass);
        total += mass;
    }
    for (double& p : out.probs) p /= total;
    return out;
}

double semantic_entropy(const ClusterSet& clusters) {
    double h = 0.0;
    for (double p : clusters.probs) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double token_stat(const GenerationRecord& record, TokenStat mode) {
    if (record.samples.empty()) throw ValidationError("record '" + record.id + "' has no samples");
    const bool entropy_mode = mode == TokenStat::maxe || mode == TokenStat::avge;
    const bool take_max = mode == TokenStat::maxl || mode == TokenStat::maxe;
    double acc = 0.0;
    for (const auto& s : record.samples) {
        std::vector<double> values;
        if (entropy_mode) {
            if (!s.token_entropies) {
                throw UnsupportedMethod("record '" + record.id +
                                        "': token entropies unavailable for maxe/avge");
            }
            values = *s.token_entropies;
        } else {
            for (double lp : s.token_logprobs) values.push_back(-lp);
        }
        if (values.empty()) throw ValidationError("record '" + record.id + "': empty token list");
        acc += take_max ? *std::max_element(values.begin(), values.end())
                        : std::accumulate(values.begin(), values.end(), 0.0) /
                              static_cast<double>(values.size());
    }
    return acc / static_cast<double>(record.size());
}

double lexical_similarity_score(const GenerationRecord& record) {
    std::vector<std::string> texts;
    for (const auto& s : record.samples) texts.push_back(s.text);
    return 0.0 - pairwise_mean_similarity(texts);  // avoids -0.0
}

}  // namespace shapunc
