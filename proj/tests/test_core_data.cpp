#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "shapunc/core_data.hpp"

using namespace shapunc;

namespace {

const std::string kRecord3 =
    R"({"id":"r1","question":"q?","references":["a"],"task":"qa","samples":[)"
    R"({"text":"a","token_logprobs":[-0.1,-0.2]},)"
    R"({"text":"b","token_logprobs":[-1.0],"token_entropies":[0.5]},)"
    R"({"text":"c","token_logprobs":[0]}]})";

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("shapunc_core_" + name);
}

}  // namespace

TEST_CASE("load_generations reads a valid record") {
    std::istringstream in(kRecord3 + "\n");
    const auto records = parse_generations(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].id == "r1");
    CHECK(records[0].size() == 3);
    CHECK(records[0].task == Task::qa);
    CHECK_FALSE(records[0].samples[0].token_entropies.has_value());
    REQUIRE(records[0].samples[1].token_entropies.has_value());
    CHECK((*records[0].samples[1].token_entropies)[0] == 0.5);
}

TEST_CASE("load_generations on an empty file is empty") {
    std::istringstream in("");
    CHECK(parse_generations(in).empty());
}

TEST_CASE("load_generations rejects bad records with a line number") {
    SUBCASE("positive log-probability") {
        std::istringstream in(
            "\n" R"({"id":"x","question":"q","references":["a"],"task":"qa","samples":[{"text":"a","token_logprobs":[0.5]}]})");
        try {
            parse_generations(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("duplicate id") {
        std::istringstream in(kRecord3 + "\n" + kRecord3 + "\n");
        CHECK_THROWS_AS(parse_generations(in), ParseError);
    }
    SUBCASE("mismatched entropy length") {
        std::istringstream in(
            R"({"id":"x","question":"q","references":["a"],"task":"qa","samples":[{"text":"a","token_logprobs":[-0.5,-1],"token_entropies":[0.1]}]})");
        CHECK_THROWS_AS(parse_generations(in), ParseError);
    }
    SUBCASE("negative entropy") {
        std::istringstream in(
            R"({"id":"x","question":"q","references":["a"],"task":"qa","samples":[{"text":"a","token_logprobs":[-0.5],"token_entropies":[-0.1]}]})");
        CHECK_THROWS_AS(parse_generations(in), ParseError);
    }
    SUBCASE("no samples") {
        std::istringstream in(R"({"id":"x","question":"q","references":["a"],"task":"qa","samples":[]})");
        CHECK_THROWS_AS(parse_generations(in), ParseError);
    }
    SUBCASE("no references") {
        std::istringstream in(
            R"({"id":"x","question":"q","references":[],"task":"qa","samples":[{"text":"a","token_logprobs":[-1]}]})");
        CHECK_THROWS_AS(parse_generations(in), ParseError);
    }
    SUBCASE("unknown task") {
        std::istringstream in(
            R"({"id":"x","question":"q","references":["a"],"task":"summarize","samples":[{"text":"a","token_logprobs":[-1]}]})");
        CHECK_THROWS_AS(parse_generations(in), ParseError);
    }
    SUBCASE("malformed JSON") {
        std::istringstream in("{\"id\": ");
        CHECK_THROWS_AS(parse_generations(in), ParseError);
    }
}

TEST_CASE("load_entailments validates against records") {
    std::istringstream gin(kRecord3 + "\n");
    const auto records = parse_generations(gin);

    SUBCASE("3x3 accepted, diagonal filled") {
        std::istringstream in(R"({"id":"r1","n":3,"p_entail":[[0,0.8,0.1],[0.6,0,0.2],[0.3,0.4,0]]})");
        const auto m = parse_entailments(in, records);
        const auto& e = m.at("r1");
        CHECK(e.size() == 3);
        CHECK(e.p(0, 0) == 1.0);
        CHECK(e.p(2, 2) == 1.0);
        CHECK(e.p(0, 1) == 0.8);  // P(s_0 => s_1)
        CHECK(e.p(1, 0) == 0.6);
    }
    SUBCASE("entry 1.3 is a range error") {
        std::istringstream in(R"({"id":"r1","n":3,"p_entail":[[1,1.3,0],[0,1,0],[0,0,1]]})");
        CHECK_THROWS_AS(parse_entailments(in, records), ParseError);
    }
    SUBCASE("2x2 for a 3-sample record is a shape error") {
        std::istringstream in(R"({"id":"r1","n":2,"p_entail":[[1,0.5],[0.5,1]]})");
        CHECK_THROWS_AS(parse_entailments(in, records), ParseError);
    }
    SUBCASE("ragged rows") {
        std::istringstream in(R"({"id":"r1","n":3,"p_entail":[[1,0.5,0],[0.5,1],[0,0,1]]})");
        CHECK_THROWS_AS(parse_entailments(in, records), ParseError);
    }
    SUBCASE("unknown id") {
        std::istringstream in(R"({"id":"nope","n":1,"p_entail":[[1]]})");
        CHECK_THROWS_WITH_AS(parse_entailments(in, records), doctest::Contains("nope"), ParseError);
    }
}

TEST_CASE("write_scores round-trips and rejects non-finite scores") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<ScoreRecord> scores;
    for (int i = 0; i < 5; ++i) {
        ScoreRecord s{"id" + std::to_string(i), kAllMethods[i], u(rng), std::nullopt};
        if (i % 2 == 0) s.detail = std::vector<double>{u(rng), u(rng), 1.0 / 3.0};
        scores.push_back(s);
    }
    const auto path = temp_path("scores.jsonl");
    write_scores(path, scores);
    CHECK(load_scores(path) == scores);

    write_scores(path, {});
    CHECK(std::filesystem::file_size(path) == 0);

    std::vector<ScoreRecord> bad{{"x", Method::pe, std::nan(""), std::nullopt}};
    const auto bad_path = temp_path("bad.jsonl");
    std::filesystem::remove(bad_path);
    CHECK_THROWS_AS(write_scores(bad_path, bad), ValidationError);
    CHECK_FALSE(std::filesystem::exists(bad_path));

    CHECK_THROWS(write_scores(std::filesystem::path("/nonexistent-dir/x/scores.jsonl"), scores));
}

TEST_CASE("generation records round-trip through the writer") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lp(-4.0, 0.0);
    std::vector<GenerationRecord> records;
    for (int r = 0; r < 4; ++r) {
        GenerationRecord g;
        g.id = "g" + std::to_string(r);
        g.question = "question \"" + std::to_string(r) + "\"?";
        g.references = {"ref a", "ref b"};
        g.task = r % 2 ? Task::mt : Task::qa;
        for (int s = 0; s < 3; ++s) {
            Sample smp;
            smp.text = "answer " + std::to_string(s);
            for (int t = 0; t < 1 + s; ++t) smp.token_logprobs.push_back(lp(rng));
            if (r % 2) smp.token_entropies = std::vector<double>(smp.token_logprobs.size(), 0.25);
            g.samples.push_back(smp);
        }
        records.push_back(g);
    }
    std::stringstream buf;
    write_generations(buf, records);
    CHECK(parse_generations(buf) == records);
}

TEST_CASE("validate_config") {
    SUBCASE("empty map gives defaults") {
        const Config c = validate_config({});
        CHECK(c.beta == 0.5);
        CHECK(c.kernel == KernelKind::gaussian);
        CHECK(c.se_threshold == 0.5);
        CHECK(c.psd_tolerance == 1e-10);
        CHECK(c.mc_threshold_n == 12);
        CHECK(c.mc_permutations == 20000);
        CHECK(c.rng_seed == 0);
    }
    SUBCASE("beta = 0.25 keeps other defaults") {
        const Config c = validate_config({{"beta", "0.25"}});
        CHECK(c.beta == 0.25);
        CHECK(c.mc_permutations == 20000);
    }
    SUBCASE("range and name errors") {
        CHECK_THROWS_AS(validate_config({{"beta", "0"}}), ValidationError);
        CHECK_THROWS_AS(validate_config({{"beta", "1.5"}}), ValidationError);
        CHECK_THROWS_AS(validate_config({{"beta", "abc"}}), ValidationError);
        CHECK_THROWS_AS(validate_config({{"kernel", "laplace"}}), ValidationError);
        CHECK_THROWS_AS(validate_config({{"mc_permutations", "0"}}), ValidationError);
        CHECK_THROWS_AS(validate_config({{"colour", "red"}}), ValidationError);
    }
    SUBCASE("beta = 1 is allowed") { CHECK(validate_config({{"beta", "1"}}).beta == 1.0); }
}

TEST_CASE("method names") {
    for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("ptrue"), UnsupportedMethod);
    CHECK_THROWS_AS(parse_method("a4c"), UnsupportedMethod);
    CHECK_THROWS_AS(parse_method("bogus"), ValidationError);
}

TEST_CASE("shipped fixtures load") {
    const std::filesystem::path dir = SHAPUNC_FIXTURE_DIR;
    const auto records = load_generations(dir / "generations.jsonl");
    CHECK(records.size() >= 20);
    const auto ent = load_entailments(dir / "entailments.jsonl", records);
    CHECK(ent.size() == records.size());
    for (const auto& r : records) CHECK(ent.at(r.id).size() == static_cast<Eigen::Index>(r.size()));
}
