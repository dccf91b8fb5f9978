#include "shapunc/core_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace shapunc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string_view to_string(Task task) {
    switch (task) {
        case Task::qa: return "qa";
        case Task::mt: return "mt";
    }
    return "?";
}

Task parse_task(std::string_view name) {
    if (name == "qa") return Task::qa;
    if (name == "mt") return Task::mt;
    throw ValidationError("unknown task '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::shapley: return "shapley";
        case Method::shapley_mc: return "shapley_mc";
        case Method::pe: return "pe";
        case Method::lnpe: return "lnpe";
        case Method::lexsim: return "lexsim";
        case Method::se: return "se";
        case Method::maxl: return "maxl";
        case Method::avgl: return "avgl";
        case Method::maxe: return "maxe";
        case Method::avge: return "avge";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (to_string(m) == name) return m;
    }
    if (name == "ptrue" || name == "a4c") {
        throw UnsupportedMethod("unsupported method '" + std::string(name) +
                                "': requires live model access");
    }
    throw ValidationError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::gaussian: return "gaussian";
    }
    return "?";
}

KernelKind parse_kernel(std::string_view name) {
    if (name == "gaussian") return KernelKind::gaussian;
    throw ValidationError("unknown kernel '" + std::string(name) + "'");
}

namespace {

double parse_real(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ValidationError(key + ": not a finite number: '" + text + "'");
    }
    return value;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
    Int value{};
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ValidationError(key + ": not an integer: '" + text + "'");
    }
    return value;
}

}  // namespace

Config validate_config(const std::map<std::string, std::string>& raw) {
    Config cfg;
    for (const auto& [key, value] : raw) {
        if (key == "beta") {
            cfg.beta = parse_real(key, value);
        } else if (key == "kernel") {
            cfg.kernel = parse_kernel(value);
        } else if (key == "se_threshold") {
            cfg.se_threshold = parse_real(key, value);
        } else if (key == "psd_tolerance") {
            cfg.psd_tolerance = parse_real(key, value);
        } else if (key == "mc_threshold_n") {
            cfg.mc_threshold_n = parse_integer<int>(key, value);
        } else if (key == "mc_permutations") {
            cfg.mc_permutations = parse_integer<int>(key, value);
        } else if (key == "rng_seed") {
            cfg.rng_seed = parse_integer<std::uint64_t>(key, value);
        } else {
            throw ValidationError("unknown config key '" + key + "'");
        }
    }
    if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) {
        throw ValidationError("beta must lie in (0, 1], got " + std::to_string(cfg.beta));
    }
    if (!(cfg.se_threshold > 0.0 && cfg.se_threshold <= 1.0)) {
        throw ValidationError("se_threshold must lie in (0, 1]");
    }
    if (cfg.psd_tolerance < 0.0) throw ValidationError("psd_tolerance must be non-negative");
    if (cfg.mc_threshold_n < 1) throw ValidationError("mc_threshold_n must be positive");
    if (cfg.mc_permutations < 1) throw ValidationError("mc_permutations must be positive");
    return cfg;
}

// ---------------------------------------------------------------------------
// Line-oriented JSON reading

namespace {

template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ParseError(lineno, "record is not a JSON object");
        try {
            fn(j, lineno);
        } catch (const ParseError&) {
            throw;
        } catch (const json::exception& e) {
            throw ParseError(lineno, e.what());
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    return in;
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
    return *it;
}

std::vector<double> real_array(const json& j, const char* what) {
    if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError(std::string(what) + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Sample sample_from_json(const json& j) {
    Sample s;
    s.text = require(j, "text").get<std::string>();
    s.token_logprobs = real_array(require(j, "token_logprobs"), "token_logprobs");
    for (double lp : s.token_logprobs) {
        if (!(lp <= 0.0)) {
            throw ValidationError("token log-probability must be <= 0, got " + std::to_string(lp));
        }
    }
    if (auto it = j.find("token_entropies"); it != j.end() && !it->is_null()) {
        auto ent = real_array(*it, "token_entropies");
        if (ent.size() != s.token_logprobs.size()) {
            throw ValidationError("token_entropies length " + std::to_string(ent.size()) +
                                  " does not match token_logprobs length " +
                                  std::to_string(s.token_logprobs.size()));
        }
        for (double e : ent) {
            if (!(e >= 0.0) || !std::isfinite(e)) {
                throw ValidationError("token entropy must be finite and >= 0");
            }
        }
        s.token_entropies = std::move(ent);
    }
    return s;
}

}  // namespace

std::vector<GenerationRecord> parse_generations(std::istream& in) {
    std::vector<GenerationRecord> records;
    std::set<std::string> seen;
    for_each_json_line(in, [&](const json& j, std::size_t lineno) {
        GenerationRecord r;
        r.id = require(j, "id").get<std::string>();
        r.question = require(j, "question").get<std::string>();
        r.references = require(j, "references").get<std::vector<std::string>>();
        r.task = parse_task(require(j, "task").get<std::string>());
        const json& samples = require(j, "samples");
        if (!samples.is_array()) throw ValidationError("samples must be an array");
        for (const auto& s : samples) r.samples.push_back(sample_from_json(s));

        if (r.references.empty()) throw ValidationError("record '" + r.id + "' has no references");
        if (r.samples.empty()) throw ValidationError("record '" + r.id + "' has no samples");
        if (!seen.insert(r.id).second) {
            throw ParseError(lineno, "duplicate id '" + r.id + "'");
        }
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<GenerationRecord> load_generations(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_generations(in);
}

void write_generations(std::ostream& out, const std::vector<GenerationRecord>& records) {
    for (const auto& r : records) {
        ordered_json j;
        j["id"] = r.id;
        j["question"] = r.question;
        j["references"] = r.references;
        j["task"] = std::string(to_string(r.task));
        j["samples"] = ordered_json::array();
        for (const auto& s : r.samples) {
            ordered_json js;
            js["text"] = s.text;
            js["token_logprobs"] = s.token_logprobs;
            if (s.token_entropies) js["token_entropies"] = *s.token_entropies;
            j["samples"].push_back(std::move(js));
        }
        out << j.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// Entailment matrices

namespace {

EntailmentMatrix entailment_from_json(const json& j) {
    EntailmentMatrix e;
    e.id = require(j, "id").get<std::string>();
    const auto n = require(j, "n").get<long long>();
    if (n < 1) throw ValidationError("matrix '" + e.id + "': n must be positive");
    const json& rows = require(j, "p_entail");
    if (!rows.is_array() || static_cast<long long>(rows.size()) != n) {
        throw ValidationError("matrix '" + e.id + "': p_entail must have n = " +
                              std::to_string(n) + " rows");
    }
    e.p.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = real_array(rows[static_cast<std::size_t>(i)], "p_entail row");
        if (static_cast<long long>(row.size()) != n) {
            throw ValidationError("matrix '" + e.id + "': row " + std::to_string(i) + " has " +
                                  std::to_string(row.size()) + " entries, expected " +
                                  std::to_string(n));
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            const double v = row[static_cast<std::size_t>(k)];
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ValidationError("matrix '" + e.id + "': entry (" + std::to_string(i) + ", " +
                                      std::to_string(k) + ") = " + std::to_string(v) +
                                      " outside [0, 1]");
            }
            e.p(i, k) = v;
        }
    }
    e.p.diagonal().setOnes();
    return e;
}

}  // namespace

std::vector<EntailmentMatrix> parse_entailments(std::istream& in) {
    std::vector<EntailmentMatrix> out;
    std::set<std::string> seen;
    for_each_json_line(in, [&](const json& j, std::size_t lineno) {
        auto e = entailment_from_json(j);
        if (!seen.insert(e.id).second) throw ParseError(lineno, "duplicate id '" + e.id + "'");
        out.push_back(std::move(e));
    });
    return out;
}

std::vector<EntailmentMatrix> load_entailments(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_entailments(in);
}

EntailmentMap parse_entailments(std::istream& in, const std::vector<GenerationRecord>& records) {
    std::unordered_map<std::string, std::size_t> sizes;
    for (const auto& r : records) sizes.emplace(r.id, r.size());

    EntailmentMap out;
    for_each_json_line(in, [&](const json& j, std::size_t lineno) {
        auto e = entailment_from_json(j);
        auto it = sizes.find(e.id);
        if (it == sizes.end()) {
            throw ParseError(lineno, "matrix id '" + e.id + "' has no generation record");
        }
        if (static_cast<std::size_t>(e.size()) != it->second) {
            throw ParseError(lineno, "matrix '" + e.id + "' is " + std::to_string(e.size()) + "x" +
                                         std::to_string(e.size()) + " but the record has " +
                                         std::to_string(it->second) + " samples");
        }
        std::string id = e.id;
        if (!out.emplace(id, std::move(e)).second) {
            throw ParseError(lineno, "duplicate id '" + id + "'");
        }
    });
    return out;
}

EntailmentMap load_entailments(const std::filesystem::path& path,
                               const std::vector<GenerationRecord>& records) {
    auto in = open_input(path);
    return parse_entailments(in, records);
}

// ---------------------------------------------------------------------------
// Scores

void write_scores(std::ostream& out, const std::vector<ScoreRecord>& scores) {
    for (const auto& s : scores) {
        if (!std::isfinite(s.score)) {
            throw ValidationError("score for '" + s.id + "' (" + std::string(to_string(s.method)) +
                                  ") is not finite");
        }
        if (s.detail) {
            for (double d : *s.detail) {
                if (!std::isfinite(d)) {
                    throw ValidationError("detail for '" + s.id + "' holds a non-finite value");
                }
            }
        }
    }
    for (const auto& s : scores) {
        ordered_json j;
        j["id"] = s.id;
        j["method"] = std::string(to_string(s.method));
        j["score"] = s.score;
        if (s.detail) j["detail"] = *s.detail;
        out << j.dump() << '\n';
    }
}

void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& scores) {
    // Serialize first so that a validation failure leaves no partial file behind.
    std::ostringstream buffer;
    write_scores(buffer, scores);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << buffer.str();
    if (!out.flush()) throw Error("failed writing '" + path.string() + "'");
}

std::vector<ScoreRecord> parse_scores(std::istream& in) {
    std::vector<ScoreRecord> out;
    for_each_json_line(in, [&](const json& j, std::size_t) {
        ScoreRecord s;
        s.id = require(j, "id").get<std::string>();
        s.method = parse_method(require(j, "method").get<std::string>());
        const json& score = require(j, "score");
        if (!score.is_number()) throw ValidationError("score must be a number");
        s.score = score.get<double>();
        if (auto it = j.find("detail"); it != j.end() && !it->is_null()) {
            s.detail = real_array(*it, "detail");
        }
        out.push_back(std::move(s));
    });
    return out;
}

std::vector<ScoreRecord> load_scores(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_scores(in);
}

}  // namespace shapunc
