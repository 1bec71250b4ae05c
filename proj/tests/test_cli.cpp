#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qakit/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qakit::scenario;

namespace {

fs::path scenario_dir() {
    const char* dir = std::getenv("QAKIT_SCENARIO_DIR");
    REQUIRE(dir != nullptr);
    return fs::path(dir);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool any_problem_contains(const ScenarioError& e, const std::string& needle) {
    for (const auto& p : e.problems())
        if (p.find(needle) != std::string::npos) return true;
    return false;
}

// A QuasiLimit document that passes validation; tests mutate it to trigger
// specific diagnostics.
json valid_quasi_limit() {
    return json{
        {"name", "unit"},
        {"kind", "QuasiLimit"},
        {"alpha", 0.5},
        {"terms",
         json::array({json{{"order", 0},
                           {"fn", json{{"type", "power_law"},
                                       {"c_plus", 1.0},
                                       {"c_minus", 0.0},
                                       {"parity", 0},
                                       {"exponent", 0.5},
                                       {"cutoff", 1.0},
                                       {"window", "Smooth"}}}}})},
        {"test_functions", json::array({json{{"type", "bump"}, {"center", 2.0}, {"radius", 1.0}}})},
        {"ladder", json{{"base", 100.0}, {"ratio", 10.0}, {"count", 3}}},
        {"structure",
         json{{"rows", json::array({json{{"m", 0}, {"c_plus", 1.0}, {"c_minus", 0.0}}})}}}};
}

}  // namespace

TEST_CASE("minimal scenario file fills every default", "[cli][parse]") {
    const auto s = parse_scenario((scenario_dir() / "comb-minimal.json").string());
    CHECK(s.name == "comb-minimal");
    CHECK(s.kind == Kind::CombVerify);
    CHECK(s.locus == qakit::svf::Locus::Infinity);
    CHECK(s.gevrey_s == 2.0);
    CHECK(s.L == "1");
    CHECK(s.comb_m_max == 12);
    CHECK(s.method == qakit::qa::Method::PlainLast);
    CHECK(s.ladder.base == 100.0);
    CHECK(s.ladder.ratio == 10.0);
    CHECK(s.ladder.count == 5);
    CHECK(s.tol.rel_limit == 1e-3);
    CHECK(s.tol.residual == 1e-3);
    CHECK(s.tol.quadrature == 1e-10);
    CHECK(s.tol.tail == 1e-12);
    CHECK_FALSE(s.weights.has_value());
    CHECK_FALSE(s.structure.has_value());
}

TEST_CASE("explicit fields override defaults", "[cli][parse]") {
    const auto s =
        parse_scenario((scenario_dir() / "quasi-limit-alpha-half-log.json").string());
    CHECK(s.kind == Kind::QuasiLimit);
    CHECK(s.L == "log");
    CHECK(s.method == qakit::qa::Method::RichardsonLog);
    CHECK(s.tol.rel_limit == 5e-2);
    CHECK(s.alpha == 0.5);
    CHECK(s.terms.size() == 3);
    CHECK(s.test_functions.size() == 2);
}

TEST_CASE("missing alpha is reported by field path", "[cli][parse]") {
    json root = valid_quasi_limit();
    root.erase("alpha");
    try {
        parse_scenario_json(root, "unit");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(any_problem_contains(e, "/alpha"));
        CHECK(any_problem_contains(e, "required"));
    }
}

TEST_CASE("unknown keys are fatal and carry their path", "[cli][parse]") {
    json root = valid_quasi_limit();
    root["bogus"] = 1;
    root["ladder"]["stride"] = 2;
    try {
        parse_scenario_json(root, "unit");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(any_problem_contains(e, "/bogus"));
        CHECK(any_problem_contains(e, "/ladder/stride"));
        CHECK(any_problem_contains(e, "unknown key"));
    }
}

TEST_CASE("every problem is collected, not just the first", "[cli][parse]") {
    json root = valid_quasi_limit();
    root.erase("alpha");
    root.erase("structure");
    root["bogus"] = 1;
    try {
        parse_scenario_json(root, "unit");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(e.problems().size() >= 3);
        CHECK(any_problem_contains(e, "/alpha"));
        CHECK(any_problem_contains(e, "/structure"));
        CHECK(any_problem_contains(e, "/bogus"));
    }
}

TEST_CASE("unsafe scenario names are rejected", "[cli][parse]") {
    json root = valid_quasi_limit();
    root["name"] = "a/b";
    CHECK_THROWS_MATCHES(parse_scenario_json(root, "unit"), ScenarioError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("/name")));
}

TEST_CASE("ladder base beyond floating range fails at parse time", "[cli][parse]") {
    SECTION("literal past DBL_MAX never reaches the runner") {
        const fs::path p = fs::temp_directory_path() / "qakit-test-overflow.json";
        std::string text = valid_quasi_limit().dump(2);
        const auto at = text.find("\"base\": 100.0");
        REQUIRE(at != std::string::npos);
        text.replace(at, 13, "\"base\": 1e400");
        std::ofstream(p) << text;
        CHECK_THROWS_MATCHES(parse_scenario(p.string()), ScenarioError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("overflow")));
        fs::remove(p);
    }
    SECTION("finite base outside the trusted ladder range") {
        json root = valid_quasi_limit();
        root["ladder"]["base"] = 1e300;
        try {
            parse_scenario_json(root, "unit");
            FAIL("expected ScenarioError");
        } catch (const ScenarioError& e) {
            CHECK(any_problem_contains(e, "/ladder"));
            CHECK(any_problem_contains(e, "trusted range"));
        }
    }
}

TEST_CASE("syntactically broken files raise a parse diagnostic", "[cli][parse]") {
    const fs::path p = fs::temp_directory_path() / "qakit-test-broken.json";
    std::ofstream(p) << "{ not json";
    CHECK_THROWS_MATCHES(parse_scenario(p.string()), ScenarioError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not valid JSON")));
    fs::remove(p);
}

TEST_CASE("cookbook extension scenario round-trips byte for byte", "[cli][serialize]") {
    const fs::path p = scenario_dir() / "extension-iii-harmonic-tail.json";
    const std::string original = read_file(p);
    const auto s = parse_scenario(p.string());
    CHECK(serialize_scenario(s) == original);

    const auto reparsed = parse_scenario_json(json::parse(serialize_scenario(s)), "roundtrip");
    CHECK(scenario_json(reparsed) == scenario_json(s));
}

TEST_CASE("serializer output reparses for every cookbook file", "[cli][serialize]") {
    for (const auto& entry : fs::directory_iterator(scenario_dir())) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path().filename().string());
        const auto s = parse_scenario(entry.path().string());
        const auto back = parse_scenario_json(json::parse(serialize_scenario(s)), "roundtrip");
        CHECK(scenario_json(back) == scenario_json(s));
    }
}

TEST_CASE("reports are deterministic across reruns and job counts", "[cli][report]") {
    const auto s = parse_scenario((scenario_dir() / "quasi-limit-alpha-half.json").string());

    auto rep1 = run_scenario(s, 1);
    auto rep2 = run_scenario(s, 1);
    auto rep4 = run_scenario(s, 4);
    rep1.wall_clock_seconds = rep2.wall_clock_seconds = rep4.wall_clock_seconds = 0.0;

    const std::string d1 = report_json(rep1).dump(2);
    CHECK(d1 == report_json(rep2).dump(2));
    CHECK(d1 == report_json(rep4).dump(2));
    CHECK(rep1.pass);
}

TEST_CASE("report files land atomically with the ladder csv schema", "[cli][report]") {
    const auto s = parse_scenario((scenario_dir() / "quasi-limit-alpha-half.json").string());
    const auto rep = run_scenario(s, 1);

    const fs::path out = fs::temp_directory_path() / "qakit-test-cli-report";
    fs::remove_all(out);
    const auto written = write_report_files(rep, out.string());

    REQUIRE(written.size() == 1 + rep.items.size());
    CHECK(fs::exists(out / (s.name + ".json")));
    for (const auto& item : rep.items) {
        const fs::path csv = out / (s.name + "-" + item.label + ".csv");
        REQUIRE(fs::exists(csv));
        std::ifstream in(csv);
        std::string line;
        REQUIRE(std::getline(in, line));
        CHECK(line == "scale,ratio,predicted,abs_err,rel_err");
        std::size_t rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == s.ladder.count);
    }
    for (const auto& entry : fs::directory_iterator(out))
        CHECK(entry.path().extension() != ".tmp");

    // The summary must reparse and echo the scenario it came from.
    const json summary = json::parse(read_file(out / (s.name + ".json")));
    CHECK(summary["pass"].get<bool>() == rep.pass);
    CHECK(summary["scenario"] == scenario_json(s));
    fs::remove_all(out);
}

TEST_CASE("kind validation pins section and locus pairings", "[cli][parse]") {
    SECTION("extension case iii rejects k above one") {
        json root = valid_quasi_limit();
        root["kind"] = "Extension";
        root.erase("structure");
        root["extension"] = json{{"kind", "NegIntOrder"}, {"big_n", 0}, {"k", 2},
                                 {"c", 1.0},              {"a", json::array({0.0, 0.0})}};
        try {
            parse_scenario_json(root, "unit");
            FAIL("expected ScenarioError");
        } catch (const ScenarioError& e) {
            CHECK(any_problem_contains(e, "/extension/k"));
        }
    }
    SECTION("zlocality insists on the origin locus") {
        json root = valid_quasi_limit();
        root["kind"] = "ZLocality";
        root.erase("structure");
        root.erase("alpha");
        root["zlocality"] = json{{"n_cap", 2}};
        root["ladder"] = json{{"base", 0.1}, {"ratio", 0.1}, {"count", 3}};
        try {
            parse_scenario_json(root, "unit");
            FAIL("expected ScenarioError");
        } catch (const ScenarioError& e) {
            CHECK(any_problem_contains(e, "/locus"));
        }
    }
}
