#pragma once

// Data model for sampled generations, entailment scores and uncertainty
// scores, plus the newline-delimited JSON readers and writers for them.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace shapunc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number of the offending record.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Internal contract violated (e.g. a kernel that should be positive definite is not).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Method that exists in the literature but cannot be computed from stored generations.
class UnsupportedMethod : public Error {
public:
    using Error::Error;
};

enum class Task { qa, mt };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

struct Sample {
    std::string text;
    std::vector<double> token_logprobs;                  // nats, each <= 0
    std::optional<std::vector<double>> token_entropies;  // nats, each >= 0

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct GenerationRecord {
    std::string id;
    std::string question;
    std::vector<std::string> references;
    Task task = Task::qa;
    std::vector<Sample> samples;

    std::size_t size() const noexcept { return samples.size(); }

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

/// Directed entailment probabilities; p(i, j) = P(s_i => s_j | x). Diagonal is 1.
struct EntailmentMatrix {
    std::string id;
    Eigen::MatrixXd p;

    Eigen::Index size() const noexcept { return p.rows(); }
};

using EntailmentMap = std::unordered_map<std::string, EntailmentMatrix>;

enum class Method { shapley, shapley_mc, pe, lnpe, lexsim, se, maxl, avgl, maxe, avge };

inline constexpr Method kAllMethods[] = {
    Method::shapley, Method::shapley_mc, Method::pe,   Method::lnpe, Method::lexsim,
    Method::se,      Method::maxl,       Method::avgl, Method::maxe, Method::avge,
};

std::string_view to_string(Method method);

/// Throws UnsupportedMethod for ptrue/a4c and ValidationError for unknown names.
Method parse_method(std::string_view name);

struct ScoreRecord {
    std::string id;
    Method method = Method::shapley;
    double score = 0.0;
    std::optional<std::vector<double>> detail;

    friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

enum class KernelKind { gaussian };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel(std::string_view name);

struct Config {
    double beta = 0.5;
    KernelKind kernel = KernelKind::gaussian;
    double se_threshold = 0.5;
    double psd_tolerance = 1e-10;
    int mc_threshold_n = 12;
    int mc_permutations = 20000;
    std::uint64_t rng_seed = 0;
};

/// Builds a Config from string key/value pairs. Missing keys take defaults.
/// Recognized keys: beta, kernel, se_threshold, psd_tolerance, mc_threshold_n,
/// mc_permutations, rng_seed.
Config validate_config(const std::map<std::string, std::string>& raw);

std::vector<GenerationRecord> parse_generations(std::istream& in);
std::vector<GenerationRecord> load_generations(const std::filesystem::path& path);
void write_generations(std::ostream& out, const std::vector<GenerationRecord>& records);

/// Reads entailment matrices and checks each against its generation record.
EntailmentMap parse_entailments(std::istream& in, const std::vector<GenerationRecord>& records);
EntailmentMap load_entailments(const std::filesystem::path& path,
                               const std::vector<GenerationRecord>& records);

/// Same, without a generations file: only the per-matrix invariants are checked.
/// Matrices are returned in file order.
std::vector<EntailmentMatrix> parse_entailments(std::istream& in);
std::vector<EntailmentMatrix> load_entailments(const std::filesystem::path& path);

void write_scores(std::ostream& out, const std::vector<ScoreRecord>& scores);
void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& scores);
std::vector<ScoreRecord> parse_scores(std::istream& in);
std::vector<ScoreRecord> load_scores(const std::filesystem::path& path);

}  // namespace shapunc
