#include "shapunc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapunc/core_data.hpp"
#include "shapunc/evaluator.hpp"
#include "shapunc/gaussian_entropy.hpp"
#include "shapunc/kernel_correlation.hpp"

namespace shapunc {

using ordered_json = nlohmann::ordered_json;

std::vector<double> parse_grid(std::string_view text) {
    std::vector<double> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t colon = text.find(':', pos);
        const std::string piece(text.substr(pos, colon == std::string_view::npos ? text.npos : colon - pos));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(piece, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != piece.size() || !std::isfinite(v)) {
            throw ValidationError("invalid grid '" + std::string(text) + "'");
        }
        parts.push_back(v);
        if (colon == std::string_view::npos) break;
        pos = colon + 1;
    }
    if (parts.size() != 3) throw ValidationError("grid must be start:stop:step");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || stop < start) {
        throw ValidationError("grid needs step > 0 and start <= stop");
    }
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (long long i = 0; i < count; ++i) {
        const double v = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
        if (!(v > 0.0 && v <= 1.0)) {
            throw ValidationError("grid value " + std::to_string(v) + " outside (0, 1]");
        }
        grid.push_back(v);
    }
    return grid;
}

namespace {

enum class OutputFormat { jsonl, csv };

std::string number(double v) { return ordered_json(v).dump(); }

struct CommonOptions {
    std::optional<std::string> beta;
    std::optional<std::string> kernel;
    std::optional<std::string> se_threshold;
    std::optional<std::string> mc_permutations;
    std::optional<std::string> mc_threshold;
    std::string seed = "0";

    Config build() const {
        std::map<std::string, std::string> raw;
        if (beta) raw["beta"] = *beta;
        if (kernel) raw["kernel"] = *kernel;
        if (se_threshold) raw["se_threshold"] = *se_threshold;
        if (mc_permutations) raw["mc_permutations"] = *mc_permutations;
        if (mc_threshold) raw["mc_threshold_n"] = *mc_threshold;
        raw["rng_seed"] = seed;
        return validate_config(raw);
    }

    void attach(CLI::App& app, bool with_beta = true) {
        if (with_beta) app.add_option("--beta", beta, "kernel scale beta in (0, 1] (default 0.5)");
        app.add_option("--kernel", kernel, "kernel function (gaussian)");
        app.add_option("--se-threshold", se_threshold, "semantic clustering threshold (default 0.5)");
        app.add_option("--mc-permutations", mc_permutations, "permutations for sampled Shapley (default 20000)");
        app.add_option("--mc-threshold", mc_threshold, "largest n scored exactly (default 12)");
        app.add_option("--seed", seed, "random seed (default 0)");
    }
};

OutputFormat parse_format(const std::string& name) {
    if (name == "jsonl") return OutputFormat::jsonl;
    if (name == "csv") return OutputFormat::csv;
    throw ValidationError("unknown format '" + name + "' (expected jsonl or csv)");
}

std::vector<Method> parse_method_list(const std::string& list,
                                      std::span<const GenerationRecord> records) {
    if (list == "all") return available_methods(records);
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        const Method m = parse_method(name);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw ValidationError("no methods given");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw Error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
    std::string input, entail, out, method = "shapley";
    CommonOptions common;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
    const Config cfg = a.common.build();
    const auto records = load_generations(a.input);
    const auto methods = parse_method_list(a.method, records);
    EntailmentMap entailments;
    if (!a.entail.empty()) entailments = load_entailments(a.entail, records);

    const auto scores = score_all(records, entailments, cfg, methods);
    write_scores(std::filesystem::path(a.out), scores);

    std::map<std::string, std::size_t> counts;
    for (const auto& s : scores) ++counts[std::string(to_string(s.method))];
    out << "scored " << records.size() << " records -> " << a.out << '\n';
    for (const auto& [m, c] : counts) out << "  " << m << ": " << c << '\n';
    return 0;
}

struct EvalArgs {
    std::string input, scores, out, format = "jsonl";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const OutputFormat fmt = parse_format(a.format);
    const auto records = load_generations(a.input);
    const auto scores = load_scores(a.scores);
    const auto results = evaluate(records, scores);

    std::ostringstream report;
    if (fmt == OutputFormat::csv) report << "method,auroc,n_correct,n_incorrect\n";
    for (const auto& r : results) {
        if (fmt == OutputFormat::csv) {
            report << to_string(r.method) << ',' << number(r.auroc) << ',' << r.n_correct << ','
                   << r.n_incorrect << '\n';
        } else {
            ordered_json j;
            j["method"] = std::string(to_string(r.method));
            j["auroc"] = r.auroc;
            j["n_correct"] = r.n_correct;
            j["n_incorrect"] = r.n_incorrect;
            report << j.dump() << '\n';
        }
    }
    if (!a.out.empty()) write_text(a.out, report.str());
    out << report.str();
    return 0;
}

struct SweepArgs {
    std::vector<std::string> inputs, entails;
    std::string grid, out, format = "jsonl";
    CommonOptions common;
};

int cmd_sweep_beta(const SweepArgs& a, std::ostream& out) {
    const OutputFormat fmt = parse_format(a.format);
    const Config cfg = a.common.build();
    const auto grid = parse_grid(a.grid);
    if (a.inputs.size() != a.entails.size()) {
        throw ValidationError("--input and --entail must be given the same number of times");
    }
    std::vector<Dataset> datasets;
    for (std::size_t i = 0; i < a.inputs.size(); ++i) {
        Dataset ds;
        ds.records = load_generations(a.inputs[i]);
        ds.entailments = load_entailments(a.entails[i], ds.records);
        datasets.push_back(std::move(ds));
    }
    const auto rows = beta_sweep(datasets, cfg, grid);

    std::ostringstream table;
    if (fmt == OutputFormat::csv) table << "beta,mean_auroc\n";
    for (const auto& r : rows) {
        if (fmt == OutputFormat::csv) {
            table << number(r.beta) << ',' << number(r.mean_auroc) << '\n';
        } else {
            ordered_json j;
            j["beta"] = r.beta;
            j["mean_auroc"] = r.mean_auroc;
            table << j.dump() << '\n';
        }
    }
    if (!a.out.empty()) write_text(a.out, table.str());
    out << table.str();
    const auto best = std::max_element(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
        return x.mean_auroc < y.mean_auroc;
    });
    out << "best beta " << number(best->beta) << " (mean AUROC " << number(best->mean_auroc) << ")\n";
    return 0;
}

struct PsdArgs {
    std::string input, entail, out, format = "jsonl";
    bool raw_entropy = false;
    CommonOptions common;
};

int cmd_psd_check(const PsdArgs& a, std::ostream& out) {
    const OutputFormat fmt = parse_format(a.format);
    const Config cfg = a.common.build();
    std::vector<EntailmentMatrix> matrices;
    if (a.input.empty()) {
        matrices = load_entailments(a.entail);
    } else {
        const auto records = load_generations(a.input);
        auto by_id = load_entailments(a.entail, records);
        for (const auto& r : records) {
            if (auto it = by_id.find(r.id); it != by_id.end()) matrices.push_back(it->second);
        }
    }

    std::ostringstream table;
    if (fmt == OutputFormat::csv) {
        table << "id,n,raw_min_eigenvalue,raw_psd,beta,kernel_min_eigenvalue,kernel_psd";
        if (a.raw_entropy) table << ",raw_entropy";
        table << '\n';
    }
    std::size_t raw_failures = 0;
    for (const auto& e : matrices) {
        const CorrelationMatrix c = symmetrize(e);
        const PsdCheck raw = is_psd(c.c, cfg.psd_tolerance);
        const double beta = safe_beta(c, cfg.beta, cfg.kernel, cfg.psd_tolerance);
        const KernelMatrix k = kernelize(c, beta, cfg.kernel, cfg.psd_tolerance);
        if (!k.psd_certified) {
            throw ContractViolation("kernel for '" + e.id + "' failed PSD certification");
        }
        if (!raw.psd) ++raw_failures;
        const double h_raw = a.raw_entropy ? raw_differential_entropy(c.c) : 0.0;
        if (fmt == OutputFormat::csv) {
            table << e.id << ',' << e.size() << ',' << number(raw.min_eigenvalue) << ','
                  << (raw.psd ? "true" : "false") << ',' << number(beta) << ','
                  << number(k.min_eigenvalue) << ',' << (k.psd_certified ? "true" : "false");
            if (a.raw_entropy) table << ',' << number(h_raw);
            table << '\n';
        } else {
            ordered_json j;
            j["id"] = e.id;
            j["n"] = e.size();
            j["raw_min_eigenvalue"] = raw.min_eigenvalue;
            j["raw_psd"] = raw.psd;
            j["beta"] = beta;
            j["kernel_min_eigenvalue"] = k.min_eigenvalue;
            j["kernel_psd"] = k.psd_certified;
            if (a.raw_entropy) j["raw_entropy"] = h_raw;  // non-finite values serialize as null
            table << j.dump() << '\n';
        }
    }
    if (!a.out.empty()) write_text(a.out, table.str());
    out << table.str();
    out << matrices.size() << " matrices, " << raw_failures
        << " raw correlation matrices not PSD, all kernels certified\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shapley uncertainty for sampled language-model answers"};
    app.require_subcommand(1);

    ScoreArgs score;
    auto* score_cmd = app.add_subcommand("score", "score generations with uncertainty methods");
    score_cmd->add_option("--input", score.input, "generations file (jsonl)")->required();
    score_cmd->add_option("--entail", score.entail, "entailment file (jsonl)");
    score_cmd->add_option("--out", score.out, "scores file to write")->required();
    score_cmd->add_option("--method", score.method, "comma-separated methods or 'all'");
    score.common.attach(*score_cmd);

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "AUROC per method against correctness labels");
    eval_cmd->add_option("--input", eval.input, "generations file (jsonl)")->required();
    eval_cmd->add_option("--scores", eval.scores, "scores file (jsonl)")->required();
    eval_cmd->add_option("--out", eval.out, "report file to write");
    eval_cmd->add_option("--format", eval.format, "jsonl or csv");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep-beta", "mean Shapley AUROC over a beta grid");
    sweep_cmd->add_option("--input", sweep.inputs, "generations file(s)")->required();
    sweep_cmd->add_option("--entail", sweep.entails, "entailment file(s), paired with --input")->required();
    sweep_cmd->add_option("--grid", sweep.grid, "start:stop:step")->required();
    sweep_cmd->add_option("--out", sweep.out, "sweep table to write");
    sweep_cmd->add_option("--format", sweep.format, "jsonl or csv");
    sweep.common.attach(*sweep_cmd, false);

    PsdArgs psd;
    auto* psd_cmd = app.add_subcommand("psd-check", "smallest eigenvalues before and after kernelization");
    psd_cmd->add_option("--entail", psd.entail, "entailment file (jsonl)")->required();
    psd_cmd->add_option("--input", psd.input, "generations file to validate shapes against");
    psd_cmd->add_option("--out", psd.out, "table to write");
    psd_cmd->add_option("--format", psd.format, "jsonl or csv");
    psd_cmd->add_flag("--raw-entropy", psd.raw_entropy,
                      "also report the Gaussian entropy of the raw correlation matrix");
    psd.common.attach(*psd_cmd);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*score_cmd) return cmd_score(score, out);
        if (*eval_cmd) return cmd_eval(eval, out);
        if (*sweep_cmd) return cmd_sweep_beta(sweep, out);
        if (*psd_cmd) return cmd_psd_check(psd, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace shapunc
