#include "shapunc/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "shapunc/baselines.hpp"
#include "shapunc/text_metrics.hpp"

namespace shapunc {

bool label_correctness(const GenerationRecord& record, std::string_view answer) {
    if (record.references.empty()) {
        throw ValidationError("record '" + record.id + "' has no references");
    }
    double best = 0.0;
    for (const auto& ref : record.references) {
        best = std::max(best, record.task == Task::qa ? rouge_l(answer, ref) : bleu(answer, ref));
    }
    return best > kCorrectnessThreshold;
}

bool label_record(const GenerationRecord& record) {
    if (record.samples.empty()) throw ValidationError("record '" + record.id + "' has no samples");
    return label_correctness(record, record.samples.front().text);
}

double auroc(std::span<const LabeledScore> labeled) {
    std::vector<double> scores;
    std::vector<bool> correct;
    for (const auto& l : labeled) {
        if (!std::isfinite(l.score)) throw ValidationError("non-finite score for '" + l.id + "'");
        scores.push_back(l.score);
        correct.push_back(l.correct);
    }
    const std::size_t n = scores.size();
    const auto n_correct = static_cast<std::size_t>(std::count(correct.begin(), correct.end(), true));
    const std::size_t n_incorrect = n - n_correct;
    if (n_correct == 0 || n_incorrect == 0) {
        throw ValidationError("AUROC undefined: need at least one correct and one incorrect item");
    }

    // Mann-Whitney U from mid-ranks.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_incorrect = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            if (!correct[order[t]]) rank_sum_incorrect += mid_rank;
        }
        i = j + 1;
    }
    const double ni = static_cast<double>(n_incorrect);
    const double u = rank_sum_incorrect - ni * (ni + 1.0) / 2.0;
    return u / (ni * static_cast<double>(n_correct));
}

namespace {

std::uint64_t record_seed(std::uint64_t base, const std::string& id) {
    // FNV-1a, stable across platforms.
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : id) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h ^ (base * 0x9E3779B97F4A7C15ULL);
}

const EntailmentMatrix& entailment_for(const EntailmentMap& entailments,
                                       const GenerationRecord& record) {
    auto it = entailments.find(record.id);
    if (it == entailments.end()) {
        throw ValidationError("no entailment matrix for record '" + record.id + "'");
    }
    if (it->second.size() != static_cast<Eigen::Index>(record.size())) {
        throw ValidationError("entailment matrix for '" + record.id + "' has the wrong shape");
    }
    return it->second;
}

}  // namespace

ShapleyReport shapley_for_record(const GenerationRecord& record, const EntailmentMatrix& e,
                                 const Config& config, bool force_mc) {
    const CorrelationMatrix c = symmetrize(e);
    const KernelMatrix k = certified_kernel(c, config.beta, config.kernel, config.psd_tolerance);
    const bool use_mc = force_mc || static_cast<int>(record.size()) > config.mc_threshold_n;
    ShapleyReport report = use_mc ? mc_shapley(k, config.mc_permutations,
                                               record_seed(config.rng_seed, record.id))
                                  : exact_shapley(k, config.mc_threshold_n);
    report.id = record.id;
    return report;
}

std::vector<Method> available_methods(std::span<const GenerationRecord> records) {
    bool has_entropies = !records.empty();
    for (const auto& r : records) {
        for (const auto& s : r.samples) has_entropies = has_entropies && s.token_entropies.has_value();
    }
    std::vector<Method> out;
    for (Method m : kAllMethods) {
        if ((m == Method::maxe || m == Method::avge) && !has_entropies) continue;
        out.push_back(m);
    }
    return out;
}

std::vector<ScoreRecord> score_all(std::span<const GenerationRecord> records,
                                   const EntailmentMap& entailments, const Config& config,
                                   std::span<const Method> methods) {
    const bool wants_mc = std::find(methods.begin(), methods.end(), Method::shapley_mc) != methods.end();
    std::vector<ScoreRecord> out;
    for (const auto& record : records) {
        for (Method method : methods) {
            ScoreRecord s;
            s.id = record.id;
            s.method = method;
            switch (method) {
                case Method::shapley:
                case Method::shapley_mc: {
                    const bool force_mc = method == Method::shapley_mc;
                    const bool falls_back = static_cast<int>(record.size()) > config.mc_threshold_n;
                    if (method == Method::shapley && falls_back && wants_mc) continue;
                    ShapleyReport r =
                        shapley_for_record(record, entailment_for(entailments, record), config, force_mc);
                    s.method = r.method == ShapleyMethod::exact ? Method::shapley : Method::shapley_mc;
                    s.score = r.total;
                    s.detail = std::move(r.per_element);
                    break;
                }
                case Method::pe: s.score = predictive_entropy(record, false); break;
                case Method::lnpe: s.score = predictive_entropy(record, true); break;
                case Method::lexsim: s.score = lexical_similarity_score(record); break;
                case Method::se:
                    s.score = semantic_entropy(semantic_clusters(
                        record, entailment_for(entailments, record), config.se_threshold));
                    break;
                case Method::maxl: s.score = token_stat(record, TokenStat::maxl); break;
                case Method::avgl: s.score = token_stat(record, TokenStat::avgl); break;
                case Method::maxe: s.score = token_stat(record, TokenStat::maxe); break;
                case Method::avge: s.score = token_stat(record, TokenStat::avge); break;
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<EvaluationResult> evaluate(std::span<const GenerationRecord> records,
                                       std::span<const ScoreRecord> scores) {
    std::unordered_map<std::string, bool> labels;
    for (const auto& r : records) labels.emplace(r.id, label_record(r));

    std::vector<Method> order;
    std::unordered_map<int, std::vector<LabeledScore>> by_method;
    for (const auto& s : scores) {
        auto it = labels.find(s.id);
        if (it == labels.end()) {
            throw ValidationError("score id '" + s.id + "' has no generation record");
        }
        auto& bucket = by_method[static_cast<int>(s.method)];
        if (bucket.empty()) order.push_back(s.method);
        bucket.push_back({s.id, s.method, s.score, it->second});
    }

    std::vector<EvaluationResult> out;
    for (Method m : order) {
        const auto& bucket = by_method[static_cast<int>(m)];
        EvaluationResult res;
        res.method = m;
        for (const auto& l : bucket) (l.correct ? res.n_correct : res.n_incorrect) += 1;
        try {
            res.auroc = auroc(bucket);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(to_string(m)) + ": " + e.what());
        }
        out.push_back(res);
    }
    return out;
}

std::vector<SweepRow> beta_sweep(std::span<const Dataset> datasets, const Config& config,
                                 std::span<const double> grid) {
    if (grid.empty()) throw ValidationError("beta grid is empty");
    if (datasets.empty()) throw ValidationError("beta sweep needs at least one dataset");
    for (double beta : grid) {
        if (!(beta > 0.0 && beta <= 1.0)) {
            throw ValidationError("grid value " + std::to_string(beta) + " outside (0, 1]");
        }
    }
    for (const auto& ds : datasets) {
        if (ds.records.empty()) throw ValidationError("beta sweep dataset has no records");
    }
    const Method shapley[] = {Method::shapley};
    std::vector<SweepRow> rows;
    for (double beta : grid) {
        Config cfg = config;
        cfg.beta = beta;
        double sum = 0.0;
        for (const auto& ds : datasets) {
            auto scores = score_all(ds.records, ds.entailments, cfg, shapley);
            // Exact and sampled totals estimate the same quantity; pool them.
            for (auto& s : scores) s.method = Method::shapley;
            sum += evaluate(ds.records, scores).front().auroc;
        }
        rows.push_back({beta, sum / static_cast<double>(datasets.size())});
    }
    return rows;
}

}  // namespace shapunc
