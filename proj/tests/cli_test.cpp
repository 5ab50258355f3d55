// End-to-end tests of the command line front end: spawn the real binary,
// check exit codes, and probe text and JSON output shapes.
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "chorm/printer.hpp"
#include "helpers.hpp"

using namespace chorm;
using namespace chorm::testing;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(CHORM_CLI_BIN) + " " + args +
                      (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int status = pclose(p);
    CliResult r;
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = std::move(out);
    return r;
}

std::string q(const std::string& path) { return "\"" + path + "\""; }

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/" + name;
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
    return path;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("cli: parse round-trips both file kinds") {
    SUBCASE("choreography, text") {
        CliResult r = run_cli("parse " + q(data_path("chor1.gc")));
        CHECK(r.code == 0);
        CHECK(chor_equal(must_parse_chor(r.out), chor_file("chor1.gc")));
    }
    SUBCASE("choreography, json") {
        CliResult r = run_cli("--format json parse " + q(data_path("chor1.gc")));
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["node"] == "rec");
        CHECK(doc["var"] == "X");
    }
    SUBCASE("protocols, text") {
        CliResult r = run_cli("parse " + q(data_path("ab.gt")));
        CHECK(r.code == 0);
        auto protos = must_parse_types(r.out);
        REQUIRE(protos.size() == 2);
        CHECK(type_equal(protos.at("Ga"), build_ga()));
        CHECK(type_equal(protos.at("Gb"), build_gb()));
    }
    SUBCASE("protocols, json") {
        CliResult r = run_cli("--format json parse " + q(data_path("ab.gt")));
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        REQUIRE(doc.contains("protocols"));
        CHECK(doc["protocols"].size() == 2);
        CHECK(doc["protocols"]["Ga"]["type"] == "com");
    }
    SUBCASE("syntax errors exit 2 and carry a position") {
        std::string bad = write_temp("chorm_cli_bad.gc", "com u[U].x ->\n");
        CliResult r = run_cli("parse " + q(bad), true);
        CHECK(r.code == 2);
        CHECK(contains(r.out, "1:"));
        CHECK(contains(r.out, "expected"));
    }
    SUBCASE("missing files exit 2") {
        CliResult r = run_cli("parse /tmp/chorm_no_such_file.gc", true);
        CHECK(r.code == 2);
        CHECK(contains(r.out, "cannot open file"));
    }
}

TEST_CASE("cli: check typechecks against protocols") {
    std::string chor1 = q(data_path("chor1.gc"));
    std::string ab = q(data_path("ab.gt"));
    std::string env = q(data_path("env.json"));

    SUBCASE("the worked example is well-typed") {
        CliResult r = run_cli("check " + chor1 + " --protocols " + ab + " --env " + env);
        CHECK(r.code == 0);
        CHECK(contains(r.out, "well-typed"));
        CHECK(contains(r.out, "completed sessions: k k'"));
    }
    SUBCASE("json report") {
        CliResult r = run_cli("--format json check " + chor1 + " --protocols " + ab +
                              " --env " + env);
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["ok"] == true);
        CHECK(doc["errors"].empty());
        CHECK(doc["completedSessions"] == json::array({"k", "k'"}));
    }
    SUBCASE("a sort error fails with exit 1") {
        std::string text = read_data("chor1.gc");
        auto pos = text.find("c[C].file");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 9, "c[C].42");
        std::string mutated = write_temp("chorm_cli_badsort.gc", text);
        CliResult r = run_cli("--format json check " + q(mutated) + " --protocols " + ab +
                              " --env " + env);
        CHECK(r.code == 1);
        json doc = json::parse(r.out);
        CHECK(doc["ok"] == false);
        REQUIRE(!doc["errors"].empty());
        CHECK(contains(doc["errors"][0]["message"].get<std::string>(), "sort mismatch"));
    }
    SUBCASE("explicit binds override pairing") {
        CliResult r = run_cli("check " + chor1 + " --protocols " + ab +
                              " --bind a=Gb --bind b=Ga --env " + env);
        CHECK(r.code == 1);
        CHECK(contains(r.out, "type errors:"));
        CHECK(contains(r.out, "start roles do not match"));
    }
    SUBCASE("an ambiguous pairing is a usage error") {
        std::string three = write_temp("chorm_cli_three.gt",
                                       read_data("ab.gt") + "\n" + read_data("gc.gt"));
        CliResult r = run_cli("check " + chor1 + " --protocols " + q(three), true);
        CHECK(r.code == 2);
        CHECK(contains(r.out, "cannot pair"));
    }
}

TEST_CASE("cli: run executes under a scripted environment") {
    std::string chor1 = q(data_path("chor1.gc"));

    SUBCASE("text trace plus summary line") {
        CliResult r = run_cli("run " + chor1 + " --env " + q(data_path("env.json")));
        CHECK(r.code == 0);
        auto ls = lines_of(r.out);
        REQUIRE(ls.size() == 8);
        CHECK(ls[0] == "start c[C] u[U] on a as k");
        CHECK(ls[1] == "com u -> c : \"pwd123\" over k");
        CHECK(ls[7] == "events: 7, starts: 2, fuel exhausted: false");
    }
    SUBCASE("json trace") {
        CliResult r = run_cli("--format json run " + chor1 + " --env " +
                              q(data_path("env.json")));
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["steps"].size() == 7);
        CHECK(doc["startCount"] == 2);
        CHECK(doc["fuelExhausted"] == false);
        CHECK(doc["error"].is_null());
        CHECK(doc["steps"][1]["event"]["kind"] == "com");
        CHECK(doc["steps"][1]["event"]["value"]["value"] == "pwd123");
    }
    SUBCASE("fuel exhaustion is reported but not an error") {
        CliResult r = run_cli("--format json run " + chor1 + " --env " +
                              q(data_path("env_false.json")) + " --fuel 12");
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["steps"].size() == 12);
        CHECK(doc["fuelExhausted"] == true);
    }
    SUBCASE("a missing builtin is a runtime error with exit 1") {
        CliResult r = run_cli("run " + chor1);
        CHECK(r.code == 1);
        CHECK(contains(r.out, "error at"));
    }
}

TEST_CASE("cli: merge rewrites onto a single session") {
    std::string chor1 = q(data_path("chor1.gc"));

    SUBCASE("explicit session name") {
        CliResult r = run_cli("merge " + chor1 + " --session s --chan c");
        CHECK(r.code == 0);
        CHECK(chor_equal(must_parse_chor(r.out), build_chor2("s", "c")));
    }
    SUBCASE("default session is fresh for the input") {
        CliResult r = run_cli("--format json merge " + chor1);
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["session"] == "k_1"); // k and k' are taken
        CHECK(doc["ast"]["node"] == "seq");
        CHECK(chor_equal(must_parse_chor(doc["merged"].get<std::string>()),
                         build_chor2("k_1", "c")));
    }
    SUBCASE("-o writes the merged term to a file") {
        std::string out_path = "/tmp/chorm_cli_merged.gc";
        CliResult r = run_cli("merge " + chor1 + " --session s --chan c -o " + q(out_path));
        CHECK(r.code == 0);
        std::ifstream in(out_path, std::ios::binary);
        REQUIRE(in.good());
        std::string written((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(written == r.out);
        CHECK(chor_equal(must_parse_chor(written), build_chor2("s", "c")));
    }
    SUBCASE("a taken session name is rejected") {
        CliResult r = run_cli("merge " + chor1 + " --session k", true);
        CHECK(r.code == 1);
        CHECK(contains(r.out, "not fresh"));
    }
}

TEST_CASE("cli: extract reads the type off a merged term") {
    std::string merged_path = "/tmp/chorm_cli_for_extract.gc";
    {
        CliResult m = run_cli("merge " + q(data_path("chor1.gc")) +
                              " --session s --chan c -o " + q(merged_path));
        REQUIRE(m.code == 0);
    }

    SUBCASE("text output is the pretty type") {
        CliResult r = run_cli("extract " + q(merged_path) + " --env " +
                              q(data_path("env.json")));
        CHECK(r.code == 0);
        auto protos = must_parse_types("protocol T {\n" + r.out + "\n}");
        CHECK(alpha_equal_type(protos.at("T"), build_g_merged()));
    }
    SUBCASE("json output") {
        CliResult r = run_cli("--format json extract " + q(merged_path) + " --env " +
                              q(data_path("env.json")));
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["type"]["type"] == "rec");
        auto protos = must_parse_types("protocol T {\n" + doc["pretty"].get<std::string>() + "\n}");
        CHECK(alpha_equal_type(protos.at("T"), build_g_merged()));
    }
    SUBCASE("multi-session inputs are rejected") {
        CliResult r = run_cli("extract " + q(data_path("chor1.gc")), true);
        CHECK(r.code == 1);
        CHECK(contains(r.out, "extraction failed"));
    }
}

TEST_CASE("cli: mesh decides bounded membership") {
    SUBCASE("the merged protocol is a member") {
        CliResult r = run_cli("mesh --candidate " + q(data_path("gc.gt")) +
                              " --against " + q(data_path("ab.gt")));
        CHECK(r.code == 0);
        CHECK(contains(r.out,
                       "member: true (checked 3 maximal path(s) at depth 8, base length 5, "
                       "components 2)"));
        CHECK(contains(r.out, "witness components"));
    }
    SUBCASE("json report") {
        CliResult r = run_cli("--format json mesh --candidate " + q(data_path("gc.gt")) +
                              " --against " + q(data_path("ab.gt")));
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["member"] == true);
        CHECK(doc["checkedPaths"] == 3);
        CHECK(doc["bounds"] == json({{"D", 8}, {"L", 5}, {"M", 2}}));
        CHECK(doc["failing"].is_null());
        REQUIRE(!doc["witness"].is_null());
        CHECK(doc["witness"]["components"].size() <= 2);
    }
    SUBCASE("a foreign protocol is not a member") {
        CliResult r = run_cli("--format json mesh --candidate " + q(data_path("bad.gt")) +
                              " --against " + q(data_path("ab.gt")));
        CHECK(r.code == 1);
        json doc = json::parse(r.out);
        CHECK(doc["member"] == false);
        REQUIRE(doc["failing"].is_array());
        CHECK(doc["failing"].size() == 1);
        CHECK(doc["witness"].is_null());
    }
}

TEST_CASE("cli: verify checks the merge behaviourally") {
    std::string chor1 = q(data_path("chor1.gc"));
    std::string env = q(data_path("env.json"));

    SUBCASE("passes on the worked example") {
        CliResult r = run_cli("verify " + chor1 + " --env " + env + " --session s");
        CHECK(r.code == 0);
        CHECK(contains(r.out, "soundness: passed (depth 5)"));
        CHECK(contains(r.out, "completeness: passed (depth 7)"));
    }
    SUBCASE("json verdicts") {
        CliResult r = run_cli("--format json verify " + chor1 + " --env " + env +
                              " --session s --depth 12");
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["soundness"]["passed"] == true);
        CHECK(doc["soundness"]["depthChecked"] == 5);
        CHECK(doc["completeness"]["passed"] == true);
        CHECK(doc["completeness"]["depthChecked"] == 7);
        CHECK(doc["soundness"]["counterexample"].is_null());
    }
    SUBCASE("the default session is picked fresh") {
        // Under the retrying environment the walk unfolds the loop, whose
        // freshened copies land next to the default merge session's name.
        std::string looping = q(data_path("env_false.json"));
        CliResult r = run_cli("verify " + chor1 + " --env " + looping);
        CHECK(r.code == 0);
        CHECK(contains(r.out, "soundness: passed"));
        CHECK(contains(r.out, "completeness: passed"));
    }
    SUBCASE("a non-fresh session fails with exit 1") {
        CliResult r = run_cli("verify " + chor1 + " --env " + env + " --session k");
        CHECK(r.code == 1);
        CHECK(contains(r.out, "FAILED"));
    }
}

TEST_CASE("cli: pipeline chains every stage") {
    std::string base = "pipeline " + q(data_path("chor1.gc")) + " --protocols " +
                       q(data_path("ab.gt")) + " --env " + q(data_path("env.json")) +
                       " --session s --chan c";

    SUBCASE("text stages") {
        CliResult r = run_cli(base);
        CHECK(r.code == 0);
        CHECK(contains(r.out, "[check] well-typed"));
        CHECK(contains(r.out, "[merge] ok (session s)"));
        CHECK(contains(r.out, "[extract] "));
        CHECK(contains(r.out, "[mesh] member: true"));
        CHECK(contains(r.out, "soundness: passed"));
        CHECK(contains(r.out, "completeness: passed"));
        auto ls = lines_of(r.out);
        REQUIRE(!ls.empty());
        CHECK(ls.back() == "pipeline: ok");
    }
    SUBCASE("json document") {
        CliResult r = run_cli("--format json " + base);
        CHECK(r.code == 0);
        json doc = json::parse(r.out);
        CHECK(doc["check"]["ok"] == true);
        CHECK(doc["merge"]["ok"] == true);
        CHECK(doc["merge"]["session"] == "s");
        CHECK(doc["extract"]["ok"] == true);
        CHECK(doc["mesh"]["member"] == true);
        CHECK(doc["mesh"]["checkedPaths"] == 3);
        CHECK(doc["soundness"]["passed"] == true);
        CHECK(doc["completeness"]["passed"] == true);
    }
    SUBCASE("a failing stage flips the exit code but later stages still run") {
        CliResult r = run_cli("--format json " + base + " --bind a=Gb --bind b=Ga");
        CHECK(r.code == 1);
        json doc = json::parse(r.out);
        CHECK(doc["check"]["ok"] == false);
        CHECK(doc["merge"]["ok"] == true);
        CHECK(doc["mesh"]["member"] == true);
        CHECK(doc["soundness"]["passed"] == true);
    }
}

TEST_CASE("cli: usage errors exit with 2") {
    CHECK(run_cli("", true).code == 2);                       // no subcommand
    CHECK(run_cli("frobnicate", true).code == 2);             // unknown subcommand
    CHECK(run_cli("parse", true).code == 2);                  // missing argument
    CHECK(run_cli("check " + q(data_path("chor1.gc")), true).code == 2); // no --protocols
    CHECK(run_cli("--format yaml parse " + q(data_path("chor1.gc")), true).code == 2);
}
