#pragma once

// Rouge-L and sentence-level BLEU over one frozen tokenizer.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shapunc {

/// Lowercases, splits on whitespace, and strips leading/trailing ASCII
/// punctuation from each token. Tokens that become empty are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// LCS-based F1. 0 when either side has no tokens.
double rouge_l(std::string_view candidate, std::string_view reference);

/// BLEU with n-grams up to 4, uniform weights and the standard brevity
/// penalty. Orders n >= 2 with zero clipped matches use (0 + 1) / (count + 1).
/// 0 for an empty candidate or zero unigram matches.
double bleu(std::string_view candidate, std::string_view reference);

/// Mean rouge_l over all unordered pairs. Requires at least two samples.
double pairwise_mean_similarity(std::span<const std::string> samples);

}  // namespace shapunc
