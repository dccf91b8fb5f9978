#include "shapunc/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "shapunc/core_data.hpp"

namespace shapunc {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        auto is_punct = [](unsigned char ch) { return std::ispunct(ch) != 0; };
        auto first = std::find_if_not(current.begin(), current.end(), is_punct);
        auto last = std::find_if_not(current.rbegin(), std::make_reverse_iterator(first), is_punct);
        if (first != current.end() && first < last.base()) tokens.emplace_back(first, last.base());
        current.clear();
    };
    for (char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (std::isspace(uc)) {
            flush();
        } else {
            current.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    flush();
    return tokens;
}

namespace {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t order) {
    NgramCounts counts;
    if (tokens.size() < order) return counts;
    for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + order))];
    }
    return counts;
}

}  // namespace

double rouge_l(std::string_view candidate, std::string_view reference) {
    const auto c = tokenize(candidate);
    const auto r = tokenize(reference);
    if (c.empty() || r.empty()) return 0.0;
    const auto lcs = static_cast<double>(lcs_length(c, r));
    if (lcs == 0.0) return 0.0;
    const double precision = lcs / static_cast<double>(c.size());
    const double recall = lcs / static_cast<double>(r.size());
    return 2.0 * precision * recall / (precision + recall);
}

double bleu(std::string_view candidate, std::string_view reference) {
    constexpr std::size_t kMaxOrder = 4;
    const auto c = tokenize(candidate);
    const auto r = tokenize(reference);
    if (c.empty()) return 0.0;

    double log_precision_sum = 0.0;
    for (std::size_t order = 1; order <= kMaxOrder; ++order) {
        const NgramCounts cand = ngrams(c, order);
        const NgramCounts ref = ngrams(r, order);
        int total = 0;
        int matched = 0;
        for (const auto& [gram, count] : cand) {
            total += count;
            if (auto it = ref.find(gram); it != ref.end()) matched += std::min(count, it->second);
        }
        double precision;
        if (order == 1) {
            if (matched == 0) return 0.0;
            precision = static_cast<double>(matched) / total;
        } else if (matched == 0) {
            precision = 1.0 / (total + 1);
        } else {
            precision = static_cast<double>(matched) / total;
        }
        log_precision_sum += std::log(precision);
    }

    const auto clen = static_cast<double>(c.size());
    const auto rlen = static_cast<double>(r.size());
    const double brevity = clen > rlen ? 1.0 : std::exp(1.0 - rlen / clen);
    return brevity * std::exp(log_precision_sum / kMaxOrder);
}

double pairwise_mean_similarity(std::span<const std::string> samples) {
    if (samples.size() < 2) {
        throw ValidationError("pairwise similarity needs at least two samples");
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            sum += rouge_l(samples[i], samples[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

}  // namespace shapunc
