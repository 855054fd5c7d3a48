#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qfdiv/cli.hpp"

using namespace qfdiv;
using namespace qfdiv::cli;

namespace {

namespace fs = std::filesystem;

struct Output {
    int code;
    std::string out;
    std::string err;
};

Output invoke(std::vector<std::string> args) {
    std::vector<const char*> argv{"qfdiv"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "qfdiv_cli_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("argument parsing") {
    const auto c = parse_args({"compute", "--f", "entropy", "--a", "a.json", "--b", "b.json"});
    CHECK(c.command == Command::compute);
    CHECK(c.generator == "entropy");
    CHECK(c.a_path == "a.json");
    CHECK(c.route == "spectral");
    CHECK(c.seed == kDefaultSeed);
    CHECK(c.format == OutputFormat::text);

    const auto t = parse_args({"verify", "--f", "tsallis:0.5", "--transform", "unitary:3", "--dim", "4", "--trials",
                               "20", "--tol", "1e-8", "--seed", "99", "--format", "json"});
    CHECK(t.command == Command::verify);
    CHECK(t.generator == "tsallis:0.5");
    CHECK(t.dim == 4);
    CHECK(t.trials == 20);
    CHECK(t.tol == 1e-8);
    CHECK(t.seed == 99);
    CHECK(t.format == OutputFormat::json);

    CHECK_THROWS_AS(parse_args({"compute", "--f", "tsallis:1", "--a", "a", "--b", "b"}), UsageError);
    CHECK_THROWS_AS(parse_args({"compute", "--f", "entropy", "--a", "a"}), UsageError);
    CHECK_THROWS_AS(parse_args({"compute", "--f", "entropy", "--a", "a", "--b", "b", "--route", "fast"}), UsageError);
    CHECK_THROWS_AS(parse_args({"verify", "--f", "entropy", "--transform", "rotate"}), UsageError);
    CHECK_THROWS_AS(parse_args({"verify", "--f", "entropy", "--transform", "pinching", "--trials", "0"}), UsageError);
    CHECK_THROWS_AS(parse_args({"launch"}), UsageError);
    CHECK_THROWS_AS(parse_args({}), UsageError);

    try {
        parse_args({"compute", "--f", "renyi", "--a", "a", "--b", "b"});
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("tsallis:<q>") != std::string::npos);
    }
}

TEST_CASE("compute") {
    const auto a = write_file("a.json", R"({"dim": 2, "re": [[2, 0], [0, 1]]})");
    const auto b = write_file("b.json", R"({"dim": 2, "re": [[1, 0], [0, 1]]})");
    const auto p = write_file("p.json", R"({"dim": 2, "re": [[1, 0], [0, 0]]})");

    for (const char* route : {"spectral", "superop", "limit"}) {
        const auto r = invoke({"compute", "--f", "entropy", "--a", a, "--b", b, "--route", route, "--format", "json"});
        CHECK(r.code == kExitExpected);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["value"].get<double>() == doctest::Approx(1.3862943611198906).epsilon(1e-6));
        CHECK(j["route"] == route);
        CHECK(j["seed"] == "1234567891011");
        CHECK(j["generator"]["label"] == "entropy");
    }

    const auto inf = invoke({"compute", "--f", "entropy", "--a", b, "--b", p, "--format", "json"});
    CHECK(inf.code == kExitExpected);
    CHECK(nlohmann::json::parse(inf.out)["value"] == "inf");

    const auto text = invoke({"compute", "--f", "entropy", "--a", b, "--b", p, "--breakdown"});
    CHECK(text.code == kExitExpected);
    CHECK(text.out.find("value: inf") != std::string::npos);
    CHECK(text.out.find("a,b,weight,contribution\n") != std::string::npos);
    CHECK(text.out.find("1.0,0.0,1.0,inf") != std::string::npos);

    const auto sup = invoke({"compute", "--f", "entropy", "--a", b, "--b", p, "--route", "superop"});
    CHECK(sup.code == kExitUsage);
}

TEST_CASE("compute input errors exit with 2") {
    const auto good = write_file("good.json", R"({"dim": 2, "re": [[1, 0], [0, 1]]})");
    const auto bad = write_file("bad.json", R"({"dim": 2, "re": [[1, 0)");
    const auto skew = write_file("skew.json", R"({"dim": 2, "re": [[1, 1], [0, 1]]})");
    const auto neg = write_file("neg.json", R"({"dim": 2, "re": [[1, 0], [0, -1]]})");
    const auto three = write_file("three.json", R"({"dim": 3, "re": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})");

    for (const auto& other : {std::string("/nonexistent/m.json"), bad, skew, neg, three}) {
        const auto r = invoke({"compute", "--f", "entropy", "--a", good, "--b", other});
        INFO(other);
        CHECK(r.code == kExitUsage);
        CHECK_FALSE(r.err.empty());
    }
    CHECK(invoke({"compute", "--f", "tsallis:1", "--a", good, "--b", good}).code == kExitUsage);
    CHECK(invoke({"--help"}).code == kExitExpected);
}

TEST_CASE("verify") {
    const auto ok = invoke({"verify", "--f", "sqrt-dev", "--transform", "unitary:11", "--dim", "3", "--trials", "100",
                            "--format", "json"});
    CHECK(ok.code == kExitExpected);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["deviation"]["max_rel"].get<double>() <= 1e-9);
    CHECK(j["held"] == true);

    const auto pinch = invoke({"verify", "--f", "entropy", "--transform", "pinching", "--dim", "3"});
    CHECK(pinch.code == kExitUnexpected);
}

TEST_CASE("recover and falsify") {
    const auto r = invoke({"recover", "--phi", "antiunitary:5", "--dim", "3", "--format", "json"});
    CHECK(r.code == kExitExpected);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["kind"] == "antiunitary");
    CHECK(j["residuals"]["action"].get<double>() <= 1e-8);

    const auto pinch = invoke({"recover", "--phi", "pinching", "--dim", "3"});
    CHECK(pinch.code == kExitUnexpected);
    CHECK(pinch.err.find("not a conjugation") != std::string::npos);

    const auto f = invoke({"falsify", "--f", "tsallis:2", "--transform", "averaging", "--dim", "3", "--budget", "1000",
                           "--threshold", "1e-3", "--format", "json"});
    CHECK(f.code == kExitExpected);
    const auto w = nlohmann::json::parse(f.out)["witness"];
    REQUIRE(w.is_object());
    CHECK((w["deviation"] == "inf" || w["deviation"].get<double>() > 1e-3));

    const auto none = invoke({"falsify", "--f", "entropy", "--transform", "unitary:2", "--dim", "3", "--budget", "200",
                              "--threshold", "1e-6"});
    CHECK(none.code == kExitUnexpected);
}

TEST_CASE("reports are byte-identical across runs") {
    const std::vector<std::string> args{"falsify", "--f",      "sqrt-dev", "--transform", "pinching", "--dim",
                                        "4",       "--budget", "500",      "--seed",      "17",       "--format",
                                        "json"};
    const auto first = invoke(args);
    const auto second = invoke(args);
    CHECK(first.out == second.out);
    CHECK(first.out.find("\"seed\": \"17\"") != std::string::npos);

    const std::vector<std::string> v{"verify", "--f", "entropy", "--transform", "antiunitary:4", "--dim", "5",
                                     "--format", "json"};
    CHECK(invoke(v).out == invoke(v).out);
}
