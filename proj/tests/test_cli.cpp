#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

struct Run {
    int code;
    std::string out;
    std::string err;

    json report() const { return json::parse(out); }
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = toposval::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(TOPOSVAL_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / ("toposval_test_" + name);
    std::ofstream(path) << contents;
    return path.string();
}

}  // namespace

TEST_CASE("build-poset on the chain file") {
    const Run r = invoke({"build-poset", "--input", data("chain.json"), "--add-trivial"});
    REQUIRE(r.code == 0);
    const json j = r.report();
    CHECK(j["tool"] == "toposval");
    CHECK(j["command"] == "build-poset");
    CHECK(j["inputs"]["input"]["sha256"].get<std::string>().size() == 64);
    CHECK(j["tolerances"].contains("group"));
    CHECK(j["result"]["contextCount"] == 3);
    CHECK(j["result"]["covers"] == 2);
}

TEST_CASE("build-poset edge cases") {
    CHECK(invoke({"build-poset", "--input", data("empty3.json"), "--add-trivial"}).report()["result"]
              ["contextCount"] == 1);
    CHECK(invoke({"build-poset", "--input", data("empty3.json")}).code == 2);
    const std::string mixed = temp_file("mixed.json", R"([
      {"id": "a", "dim": 2, "atoms": [[[1,0],[0,0]], [[0,0],[0,1]]]},
      {"id": "b", "dim": 1, "atoms": [[[1]]]}])");
    const Run m = invoke({"build-poset", "--input", mixed, "--add-trivial"});
    CHECK(m.code == 2);
    CHECK_FALSE(m.err.empty());
    const Run bad = invoke({"build-poset", "--input", temp_file("bad.json", "[\n{\"id\": }")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find(":2:") != std::string::npos);
}

TEST_CASE("unknown subcommands and options are input errors") {
    CHECK(invoke({"bogus"}).code == 2);
    CHECK(invoke({"ks", "--format", "xml"}).code == 2);
    CHECK(invoke({}).code == 2);
}

TEST_CASE("check-iso passes on the chain") {
    const Run r = invoke({"check-iso", "--input", data("chain.json"), "--add-trivial"});
    CHECK(r.code == 0);
    CHECK(r.report()["result"]["failures"].empty());
}

TEST_CASE("valuate returns principal sieves for the unit proposition") {
    const Run r = invoke(
        {"valuate", "--input", data("chain.json"), "--add-trivial", "--state", data("state_chain.json")});
    REQUIRE(r.code == 0);
    const json v = r.report()["result"]["values"];
    CHECK(v["V1"]["0x7"] == json::array({"V1", "V2", "triv"}));
    CHECK(v["V2"]["0x3"] == json::array({"V2", "triv"}));
    CHECK(v["triv"]["0x1"] == json::array({"triv"}));
    CHECK(v["V1"]["0x0"].empty());
}

TEST_CASE("verify-theorems passes for a state valuation on the chain") {
    const Run r = invoke(
        {"verify-theorems", "--input", data("chain.json"), "--add-trivial", "--state", data("state_chain.json")});
    CHECK(r.code == 0);
    CHECK(r.report()["passed"] == true);
}

TEST_CASE("supports reports the matching-law failure at r = 0.6") {
    const Run r = invoke({"supports", "--input", data("chain.json"), "--add-trivial", "--state",
                          data("state_uniform3.json"), "--r", "0.6"});
    REQUIRE(r.code == 0);
    const json j = r.report()["result"];
    CHECK(j["supportsMatch"]["holds"] == false);
    CHECK(j["supportsIncrease"]["holds"] == true);
}

TEST_CASE("survey-relations is self-consistent") {
    const Run r = invoke({"survey-relations", "--input", data("chain.json"), "--add-trivial", "--state",
                          data("state_chain.json")});
    CHECK(r.code == 0);
    const json rel = r.report()["result"]["relations"];
    CHECK(rel.size() == 6);
    CHECK(rel[0]["G"]["relation"] == "leq");
    const Run one = invoke({"survey-relations", "--input", data("chain.json"), "--add-trivial", "--relation",
                            "random:3"});
    CHECK(one.code == 0);
    CHECK(one.report()["result"]["relations"].size() == 1);
    CHECK(invoke({"survey-relations", "--input", data("chain.json"), "--relation", "nope"}).code == 2);
}

TEST_CASE("ks on the bundled fixture finds no section") {
    const Run r = invoke({"ks"});
    REQUIRE(r.code == 0);
    CHECK(r.report()["result"]["exists"] == false);
    const Run f = invoke({"ks", "--input", data("ks18.json")});
    CHECK(f.code == 0);
    CHECK(f.report()["result"]["exists"] == false);
    const Run broken = invoke({"ks", "--input", temp_file("ks_bad.json", R"({"dim": 2, "bases": [[[1, 1], [1, 0]]]})")});
    CHECK(broken.code == 1);
    CHECK(broken.report()["result"]["validation"]["orthogonal"] == false);
}

TEST_CASE("ocat checks pass with a given state and with seeded states") {
    const Run r = invoke({"ocat", "--input", data("operators.json"), "--state", data("state_psi3.json")});
    CHECK(r.code == 0);
    CHECK(r.report()["result"]["failures"] == 0);
    const Run s = invoke({"ocat", "--input", data("operators.json"), "--seed", "9"});
    CHECK(s.code == 0);
    CHECK(s.report()["result"]["states"] == 20);
}

TEST_CASE("reports are byte-identical across runs") {
    const std::vector<std::vector<std::string>> runs = {
        {"survey-relations", "--input", data("chain.json"), "--add-trivial", "--seed", "5"},
        {"ocat", "--input", data("operators.json"), "--seed", "5"},
        {"ks", "--format", "table"},
    };
    for (const auto& args : runs) {
        CHECK(invoke(args).out == invoke(args).out);
    }
}

TEST_CASE("reports can be written to a file") {
    const auto path = (std::filesystem::temp_directory_path() / "toposval_test_out.json").string();
    const Run r = invoke({"ks", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    const json j = json::parse(in);
    CHECK(j["result"]["exists"] == false);
}
