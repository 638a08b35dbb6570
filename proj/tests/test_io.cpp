#include "doctest.h"

#include "hypotor/runner.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>

using namespace hypotor;

namespace {

std::string fixture_path(const std::string& name) {
    const char* dir = std::getenv("HYPOTOR_FIXTURES");
    return std::string(dir ? dir : "tests/fixtures") + "/" + name;
}

std::string strip_wall_clock(const std::string& report) {
    return std::regex_replace(report, std::regex("\"wall_clock_ms\": \\d+"),
                              "\"wall_clock_ms\": 0");
}

}  // namespace

TEST_CASE("spec file parses with exact literals") {
    SpecFile spec = parse_spec_file(fixture_path("suite.json"));
    CHECK(spec.version == "hypotor-spec/1");
    CHECK(spec.operators.size() == 4);
    CHECK(spec.tubes.size() == 2);
    CHECK(spec.tasks.size() == 10);
    // sqrt closure derived atoms present
    CHECK(spec.basis->find("sqrt6").has_value());
    // golden ratio parsed exactly: coords (1/2, ..., 1/2 on sqrt5, ...)
    const OperatorSpec& golden = spec.operators.at("golden");
    CHECK(golden.alphas[0].re.coords()[0] == Rat(1, 2));
}

TEST_CASE("bare float literals are rejected") {
    Json j;
    j["version"] = "hypotor-spec/1";
    j["operators"] = Json::array(
        {Json{{"id", "x"},
              {"type", "constant"},
              {"alphas", Json::array({Json{{"re", 0.5}, {"im", "0"}}})}}});
    CHECK_THROWS_AS(parse_spec_json(j), ParseError);
}

TEST_CASE("malformed literals carry context") {
    Json j;
    j["version"] = "hypotor-spec/1";
    j["operators"] = Json::array(
        {Json{{"id", "x"},
              {"type", "constant"},
              {"alphas", Json::array({Json{{"re", "1/0"}, {"im", "0"}}})}}});
    CHECK_THROWS_AS(parse_spec_json(j), ParseError);
    Json missing;
    missing["version"] = "hypotor-spec/0";
    CHECK_THROWS_AS(parse_spec_json(missing), ParseError);
}

TEST_CASE("budgets are mandatory") {
    SpecFile spec = parse_spec_file(fixture_path("suite.json"));
    Json j = spec_to_json(spec);
    // drop r_max from the scan task
    for (auto& t : j["tasks"])
        if (t["kind"] == "scan") t.erase("r_max");
    CHECK_THROWS_AS(parse_spec_json(j), ParseError);
}

TEST_CASE("spec round-trips through its serialization") {
    SpecFile spec = parse_spec_file(fixture_path("suite.json"));
    Json once = spec_to_json(spec);
    SpecFile again = parse_spec_json(once);
    Json twice = spec_to_json(again);
    CHECK(once == twice);
}

TEST_CASE("runner produces the expected outcomes") {
    SpecFile spec = parse_spec_file(fixture_path("suite.json"));
    RunOptions opts;
    opts.only = {"classify-rational", "witness-liouville-j1", "approx-example"};
    RunResult res = run_spec(spec, opts);
    REQUIRE(res.exit_code == kExitOk);
    const Json& tasks = res.report.at("tasks");
    REQUIRE(tasks.size() == 3);

    CHECK(tasks[0].at("outcome").at("mn").at("kind") == "discrete-lattice");
    CHECK(tasks[0].at("outcome").at("mn").at("step") == "1/6");

    CHECK(tasks[1].at("outcome").at("found") == true);
    CHECK(tasks[1].at("outcome").at("point").at("tau") == "-11");
    CHECK(tasks[1].at("outcome").at("point").at("xi")[0] == "100");
    CHECK(tasks[1].at("outcome").at("verified") == true);

    CHECK(tasks[2].at("outcome").at("found") == true);
}

TEST_CASE("determinism: identical reports modulo wall clock") {
    SpecFile spec = parse_spec_file(fixture_path("suite.json"));
    RunOptions opts;
    opts.only = {"classify-rational", "classify-example", "scan-golden", "fit-golden"};
    RunResult a = run_spec(spec, opts);
    RunResult b = run_spec(spec, opts);
    CHECK(strip_wall_clock(report_to_string(a.report)) ==
          strip_wall_clock(report_to_string(b.report)));
}

TEST_CASE("parallel execution merges deterministically") {
    SpecFile spec = parse_spec_file(fixture_path("suite.json"));
    RunOptions seq_opts, par_opts;
    seq_opts.only = par_opts.only = {"classify-rational", "classify-example", "gh-example",
                                     "scan-golden"};
    par_opts.parallel = true;
    RunResult a = run_spec(spec, seq_opts);
    RunResult b = run_spec(spec, par_opts);
    CHECK(strip_wall_clock(report_to_string(a.report)) ==
          strip_wall_clock(report_to_string(b.report)));
}

TEST_CASE("csv rendering") {
    SpecFile spec = parse_spec_file(fixture_path("suite.json"));
    RunOptions opts;
    opts.only = {"scan-golden", "fit-golden", "construct-liouville"};
    RunResult res = run_spec(spec, opts);

    std::string shells = render_csv(res.report, CsvTable::Shells);
    CHECK(shells.rfind("r,min_modulus_sq_lo,min_modulus_sq_hi,tau,xi1,is_zero\n", 0) == 0);
    // shell rows carry exact decimal or p/q strings
    CHECK(shells.find("\n2,") != std::string::npos);

    std::string fits = render_csv(res.report, CsvTable::Fits);
    CHECK(fits.rfind("C_hat,M_hat,residual,R_used\n", 0) == 0);

    std::string modes = render_csv(res.report, CsvTable::Modes);
    CHECK(modes.rfind("n,eta1,sup_f,sup_u,u_at_tn\n", 0) == 0);
    CHECK(modes.find("100") != std::string::npos);

    // missing table errors
    RunOptions only_classify;
    only_classify.only = {"classify-rational"};
    RunResult rc = run_spec(spec, only_classify);
    CHECK_THROWS_AS(render_csv(rc.report, CsvTable::Shells), PreconditionViolation);
}

TEST_CASE("empty task list yields a valid empty report") {
    Json j;
    j["version"] = "hypotor-spec/1";
    SpecFile spec = parse_spec_json(j);
    RunResult res = run_spec(spec, RunOptions{});
    CHECK(res.exit_code == kExitOk);
    CHECK(res.report.at("tasks").empty());
    CHECK(res.report.at("schema") == "hypotor-report/1");
}

TEST_CASE("precondition violations surface with the dedicated exit code") {
    Json j;
    j["version"] = "hypotor-spec/1";
    j["operators"] = Json::array({Json{
        {"id", "op"},
        {"type", "constant"},
        {"alphas", Json::array({Json{{"re", "1/2"}, {"im", "0"}}})}}});
    j["tasks"] = Json::array(
        {Json{{"id", "s"}, {"kind", "scan"}, {"op", "op"}, {"r_max", 1}}});  // r_max < 2
    SpecFile spec = parse_spec_json(j);
    RunResult res = run_spec(spec, RunOptions{});
    CHECK(res.exit_code == kExitPrecondition);
    CHECK(res.report.contains("error"));
}

TEST_CASE("required budget misses map to the dedicated exit code") {
    Json j;
    j["version"] = "hypotor-spec/1";
    j["basis"] = Json::array({Json{{"name", "sqrt5"}, {"kind", "sqrt"}, {"arg", 5}}});
    j["operators"] = Json::array({Json{
        {"id", "golden"},
        {"type", "constant"},
        {"alphas",
         Json::array({Json{{"re", Json{{"1", "1/2"}, {"sqrt5", "1/2"}}}, {"im", "0"}}})}}});
    j["tasks"] = Json::array({Json{{"id", "w"},
                                   {"kind", "witness"},
                                   {"op", "golden"},
                                   {"j", 1},
                                   {"r_max", 200},
                                   {"cf_depth", 8},
                                   {"truncation_depth", 4},
                                   {"require", true}}});
    SpecFile spec = parse_spec_json(j);
    RunResult res = run_spec(spec, RunOptions{});
    CHECK(res.exit_code == kExitNoneWithinBudget);
}
