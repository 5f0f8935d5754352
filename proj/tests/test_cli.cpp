#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "support/subprocess.hpp"
#include "support/testutil.hpp"
#include "xtt/xtt.hpp"

namespace fs = std::filesystem;
using testutil::run_command;

namespace {

const std::string kBin = XTTC_BIN;
const std::string kThermostat = std::string(XTT_SAMPLES_DIR) + "/thermostat.model";
const std::string kGolden = XTT_GOLDEN_DIR;

}  // namespace

TEST_CASE("run prints the sorted final valuation") {
    auto r = run_command(kBin + " run " + kThermostat + " --set today=workday --set hour=18");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "hour=18\noperation=nbizhrs\ntoday=workday\n");
    CHECK(r.err.empty());
}

TEST_CASE("run --trace prepends the step lines") {
    auto r = run_command(kBin + " run " + kThermostat +
                         " --set today=workday --set hour=18 --trace");
    CHECK(r.exit_code == 0);
    CHECK(r.out ==
          "1 start entered\n"
          "2 thermostat entered\n"
          "3 thermostat fired-rows(1)\n"
          "4 end entered\n"
          "hour=18\noperation=nbizhrs\ntoday=workday\n");
}

TEST_CASE("run rejects out-of-domain bindings") {
    auto r = run_command(kBin + " run " + kThermostat + " --set hour=99");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("value-out-of-domain") != std::string::npos);
    CHECK(r.out.empty());

    r = run_command(kBin + " run " + kThermostat + " --set today=holiday");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("value-out-of-domain") != std::string::npos);

    r = run_command(kBin + " run " + kThermostat + " --set hour=abc");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("bad-value") != std::string::npos);

    r = run_command(kBin + " run " + kThermostat + " --set nothere=1");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("unknown-attribute") != std::string::npos);
}

TEST_CASE("goal-driven run through the CLI") {
    auto r = run_command(kBin + " run " + kThermostat +
                         " --goal operation --set today=weekend --set hour=1");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "hour=1\noperation=nbizhrs\ntoday=weekend\n");

    r = run_command(kBin + " run " + kThermostat + " --goal operation");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("goal-undetermined") != std::string::npos);

    r = run_command(kBin + " run " + kThermostat + " --goal today");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("unknown-goal") != std::string::npos);
}

TEST_CASE("validate reports diagnostics and sets the exit code") {
    auto r = run_command(kBin + " validate " + kThermostat);
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());

    std::string doc = testutil::slurp(kThermostat);
    const std::string needle = "\"tableName\": \"thermostat\"";
    doc.replace(doc.find(needle), needle.size(), "\"tableName\": \"foo\"");
    const std::string bad = testutil::write_temp_file("bad.model", doc);
    r = run_command(kBin + " validate " + bad);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("unknown-table-ref") != std::string::npos);
}

TEST_CASE("validate on a missing file fails gracefully") {
    auto r = run_command(kBin + " validate /nonexistent/path.model");
    CHECK(r.exit_code == 1);
}

TEST_CASE("analyze is quiet on a clean model and loud on defects") {
    auto r = run_command(kBin + " analyze " + kThermostat);
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());

    // Drop the weekend row: 24 uncovered states.
    std::string doc = testutil::slurp(kThermostat);
    const std::string row2 =
        "        {\n"
        "          \"conditions\": [\n"
        "            {\"attribute\": \"today\", \"op\": \"eq\", \"operand\": \"weekend\"},\n"
        "            {\"attribute\": \"hour\", \"op\": \"any\"}\n"
        "          ],\n"
        "          \"decisions\": [{\"attribute\": \"operation\", \"value\": \"nbizhrs\"}]\n"
        "        },\n";
    const auto pos = doc.find(row2);
    REQUIRE(pos != std::string::npos);
    doc.erase(pos, row2.size());
    const std::string gappy = testutil::write_temp_file("gappy.model", doc);
    r = run_command(kBin + " analyze " + gappy);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("thermostat incomplete today=weekend,hour=0\n") == 0);
}

TEST_CASE("the analysis state bound comes from the environment") {
    auto r = run_command("XTTC_STATE_BOUND=10 " + kBin + " analyze " + kThermostat);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("state-space-too-large") != std::string::npos);

    r = run_command("XTTC_STATE_BOUND=banana " + kBin + " analyze " + kThermostat);
    CHECK(r.exit_code == 2);
}

TEST_CASE("export-drools writes the three files") {
    const auto out_dir = testutil::scratch_dir() / "drools_out";
    fs::remove_all(out_dir);
    auto r = run_command(kBin + " export-drools " + kThermostat + " --out " + out_dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(testutil::slurp((out_dir / "thermostat.dtable.csv").string()) ==
          testutil::slurp(kGolden + "/thermostat.dtable.csv"));
    CHECK(testutil::slurp((out_dir / "thermostat.rf.xml").string()) ==
          testutil::slurp(kGolden + "/thermostat.rf.xml"));
    CHECK(testutil::slurp((out_dir / "Workspace.java").string()) ==
          testutil::slurp(kGolden + "/Workspace.java"));
}

TEST_CASE("export-drools reports unsupported features and writes nothing") {
    std::string doc = testutil::slurp(kThermostat);
    const std::string needle = "{\"from\": \"start\", \"to\": \"thermostat\"}";
    REQUIRE(doc.find(needle) != std::string::npos);
    doc.replace(doc.find(needle), needle.size(),
                "{\"from\": \"start\", \"to\": \"thermostat\", \"targetRow\": 2}");
    const std::string rowlink = testutil::write_temp_file("rowlink.model", doc);
    const auto out_dir = testutil::scratch_dir() / "drools_rowlink";
    fs::remove_all(out_dir);
    auto r = run_command(kBin + " export-drools " + rowlink + " --out " + out_dir.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("row-link-unsupported") != std::string::npos);
    CHECK_FALSE(fs::exists(out_dir / "thermostat.rf.xml"));
}

TEST_CASE("export-bpmn writes the table-map document") {
    const auto out_dir = testutil::scratch_dir() / "bpmn_out";
    fs::remove_all(out_dir);
    auto r = run_command(kBin + " export-bpmn " + kThermostat + " --out " + out_dir.string());
    CHECK(r.exit_code == 0);
    CHECK(testutil::slurp((out_dir / "thermostat.bpmn").string()) ==
          testutil::slurp(kGolden + "/thermostat.bpmn"));
}

TEST_CASE("export-bpmn rule-level needs a table") {
    auto r = run_command(kBin + " export-bpmn " + kThermostat +
                         " --scenario rule-level --out /tmp/unused");
    CHECK(r.exit_code == 2);

    const auto out_file = testutil::scratch_dir() / "rulelevel.bpmn";
    r = run_command(kBin + " export-bpmn " + kThermostat +
                    " --scenario rule-level --table thermostat --out-file " + out_file.string());
    CHECK(r.exit_code == 0);
    const std::string xml = testutil::slurp(out_file.string());
    CHECK(xml.find("row1: set operation=nbizhrs") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_command(kBin).exit_code == 2);
    CHECK(run_command(kBin + " frobnicate x.model").exit_code == 2);
    CHECK(run_command(kBin + " run").exit_code == 2);
    CHECK(run_command(kBin + " export-drools " + kThermostat).exit_code == 2);
    CHECK(run_command(kBin + " export-bpmn " + kThermostat).exit_code == 2);
    CHECK(run_command(kBin + " export-bpmn " + kThermostat + " --table thermostat --out /tmp/x")
              .exit_code == 2);
    CHECK(run_command(kBin + " run " + kThermostat + " --set oops").exit_code == 2);
}

TEST_CASE("help is not an error") {
    CHECK(run_command(kBin + " --help").exit_code == 0);
}

TEST_CASE("commands leave the model file untouched") {
    const std::string before = testutil::slurp(kThermostat);
    run_command(kBin + " validate " + kThermostat);
    run_command(kBin + " run " + kThermostat + " --set today=weekend");
    run_command(kBin + " analyze " + kThermostat);
    const auto out_dir = testutil::scratch_dir() / "no_mutate";
    run_command(kBin + " export-drools " + kThermostat + " --out " + out_dir.string());
    run_command(kBin + " export-bpmn " + kThermostat + " --out " + out_dir.string());
    CHECK(testutil::slurp(kThermostat) == before);
}
