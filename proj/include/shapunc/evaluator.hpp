#pragma once

// Correctness labeling, AUROC, end-to-end scoring and the beta sweep.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shapunc/core_data.hpp"
#include "shapunc/kernel_correlation.hpp"
#include "shapunc/shapley.hpp"

namespace shapunc {

/// Rouge-L (qa) or BLEU (mt) must strictly exceed this for an answer to count as correct.
inline constexpr double kCorrectnessThreshold = 0.3;

struct LabeledScore {
    std::string id;
    Method method = Method::shapley;
    double score = 0.0;
    bool correct = false;
};

struct EvaluationResult {
    Method method = Method::shapley;
    double auroc = 0.0;
    std::size_t n_correct = 0;
    std::size_t n_incorrect = 0;
};

struct Dataset {
    std::vector<GenerationRecord> records;
    EntailmentMap entailments;
};

struct SweepRow {
    double beta = 0.0;
    double mean_auroc = 0.0;
};

/// Max over references of the task metric, compared against kCorrectnessThreshold.
bool label_correctness(const GenerationRecord& record, std::string_view answer);

/// Labels the record's first sample, which by file convention is the model's answer.
bool label_record(const GenerationRecord& record);

/// Probability that a random incorrect item scores higher than a random
/// correct one, ties counted 1/2. Throws ValidationError unless both classes
/// are present.
double auroc(std::span<const LabeledScore> labeled);

/// Correlation -> safe beta -> kernel -> exact or Monte-Carlo Shapley.
/// force_mc selects permutation sampling regardless of n.
ShapleyReport shapley_for_record(const GenerationRecord& record, const EntailmentMatrix& e,
                                 const Config& config, bool force_mc = false);

/// Methods computable for every record (maxe/avge need token entropies).
std::vector<Method> available_methods(std::span<const GenerationRecord> records);

/// One ScoreRecord per (record, method), records in input order. A shapley
/// request on a record with n > mc_threshold_n is scored and labeled shapley_mc.
std::vector<ScoreRecord> score_all(std::span<const GenerationRecord> records,
                                   const EntailmentMap& entailments, const Config& config,
                                   std::span<const Method> methods);

/// AUROC per method, methods in order of first appearance in scores.
/// Throws ValidationError naming any score id absent from records.
std::vector<EvaluationResult> evaluate(std::span<const GenerationRecord> records,
                                       std::span<const ScoreRecord> scores);

/// For each beta, mean over datasets of the Shapley AUROC.
std::vector<SweepRow> beta_sweep(std::span<const Dataset> datasets, const Config& config,
                                 std::span<const double> grid);

}  // namespace shapunc
