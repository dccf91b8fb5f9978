#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "shapunc/core_data.hpp"
#include "shapunc/text_metrics.hpp"

using namespace shapunc;
using doctest::Approx;

namespace {

// Exponential-time LCS over all subsequences of a.
std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t best = 0;
    for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
        std::vector<std::string> sub;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (mask & (1u << i)) sub.push_back(a[i]);
        }
        std::size_t pos = 0;
        for (const auto& t : b) {
            if (pos < sub.size() && sub[pos] == t) ++pos;
        }
        if (pos == sub.size()) best = std::max(best, sub.size());
    }
    return best;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
    return out;
}

}  // namespace

TEST_CASE("tokenize") {
    CHECK(tokenize("The Cat, sat.") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(tokenize("  ...  ").empty());
    CHECK(tokenize("") .empty());
    CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize("a\tb\nc") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("rouge_l examples") {
    CHECK(rouge_l("the cat sat", "the cat sat") == 1.0);
    CHECK(rouge_l("the cat sat", "a dog ran") == 0.0);
    CHECK(rouge_l("the cat sat", "the cat ran") == Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(rouge_l("", "the cat") == 0.0);
    CHECK(rouge_l("the cat", "") == 0.0);
    CHECK(rouge_l("Mozart.", "mozart") == 1.0);
    // LCS 2 of lengths 2 and 4: P = 1, R = 1/2.
    CHECK(rouge_l("cat sat", "the cat sat down") == Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("rouge_l properties against brute-force LCS") {
    const std::vector<std::string> vocab{"a", "b", "c", "d"};
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> len(0, 7);
    std::uniform_int_distribution<int> word(0, 3);
    int mismatches = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> a(len(rng)), b(len(rng));
        for (auto& t : a) t = vocab[word(rng)];
        for (auto& t : b) t = vocab[word(rng)];
        const double ab = rouge_l(join(a), join(b));
        const double ba = rouge_l(join(b), join(a));
        double expected = 0.0;
        if (!a.empty() && !b.empty()) {
            const auto l = static_cast<double>(brute_lcs(a, b));
            expected = l == 0.0 ? 0.0 : 2.0 * l / static_cast<double>(a.size() + b.size());
        }
        if (std::abs(ab - expected) > 1e-12 || std::abs(ab - ba) > 1e-15 || ab < 0.0 || ab > 1.0) {
            ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("bleu") {
    CHECK(bleu("one two three four five six", "one two three four five six") == Approx(1.0).epsilon(1e-15));
    CHECK(bleu("", "the cat") == 0.0);
    CHECK(bleu("dog", "the cat") == 0.0);

    // Unigram 3/4, bigram 1/3, trigram 0 -> 1/3, 4-gram 0 -> 1/2; brevity exp(1 - 6/4).
    const double expected =
        std::exp(1.0 - 6.0 / 4.0) * std::pow(0.75 * (1.0 / 3.0) * (1.0 / 3.0) * 0.5, 0.25);
    CHECK(bleu("the cat sat down", "the cat is down there now") == Approx(expected).epsilon(1e-12));
    CHECK(expected == Approx(0.27404).epsilon(1e-4));

    // Longer candidate than reference: no brevity penalty.
    const double long_c = bleu("the cat sat on the mat today", "the cat sat on the mat");
    CHECK(long_c > 0.0);
    CHECK(long_c <= 1.0);

    // Clipping: repeated unigrams only count up to the reference count.
    CHECK(bleu("the the the the", "the cat") < bleu("the cat", "the cat"));
}

TEST_CASE("pairwise_mean_similarity") {
    const std::vector<std::string> same{"a b", "a b", "a b"};
    CHECK(pairwise_mean_similarity(same) == 1.0);
    const std::vector<std::string> disjoint{"a", "b", "c"};
    CHECK(pairwise_mean_similarity(disjoint) == 0.0);
    const std::vector<std::string> mixed{"x", "x", "y", "y"};
    // 2 of 6 pairs match.
    CHECK(pairwise_mean_similarity(mixed) == Approx(1.0 / 3.0).epsilon(1e-15));
    const std::vector<std::string> one{"a"};
    CHECK_THROWS_AS(pairwise_mean_similarity(one), ValidationError);
}
