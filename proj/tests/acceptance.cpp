// Acceptance suite: every check prints one PASS/FAIL line; the process exits
// with the number of failed checks.

#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "support/testutil.hpp"
#include "xtt/xtt.hpp"

using namespace xtt;

namespace {

// An empty result means the criterion passed; otherwise it carries the
// failure description.
using Criterion = std::function<std::optional<std::string>()>;

std::optional<std::string> fail(const std::string& why) { return why; }

Value sv(const char* s) { return Value{std::string(s)}; }

std::string golden(const std::string& name) {
    return testutil::slurp(std::string(XTT_GOLDEN_DIR) + "/" + name);
}

// 1. Forward runs over the thermostat model reproduce the reference
//    predicate on all 48 input states.
std::optional<std::string> thermostat_fidelity() {
    const Model m = testutil::thermostat_model();
    int checked = 0;
    for (const char* today : {"workday", "weekend"}) {
        for (std::int64_t hour = 0; hour <= 23; ++hour) {
            Valuation init;
            init.set("today", sv(today));
            init.set("hour", Value{hour});
            RunResult r = run_forward(m, init);
            if (!r.ok()) return fail("run failed at today=" + std::string(today));
            const Value* op = r.final_valuation.get("operation");
            const std::string expected = testutil::thermostat_reference(today, hour);
            if (!op || as_symbol(*op) != expected)
                return fail("mismatch at today=" + std::string(today) +
                            " hour=" + std::to_string(hour) + ": expected " + expected);
            ++checked;
        }
    }
    if (checked != 48) return fail("expected 48 states, checked " + std::to_string(checked));
    return std::nullopt;
}

// 2. The emitted decision table is byte-identical to the committed golden
//    file, including the four data rows.
std::optional<std::string> translation_fidelity() {
    const Model m = testutil::thermostat_model();
    DroolsBundle bundle = export_drools(m);
    if (!bundle.ok()) return fail("export reported errors");
    const std::string expected = golden("thermostat.dtable.csv");
    if (bundle.decision_table_csv != expected)
        return fail("decision table differs from the golden file");
    for (const char* row : {"workday,17,,,,nbizhrs", "weekend,,,,,nbizhrs", "workday,,9,,,nbizhrs",
                            "workday,,,9,17,bizhrs"}) {
        if (expected.find(row) == std::string::npos)
            return fail(std::string("golden file lost data row ") + row);
    }
    return std::nullopt;
}

// 3. Decomposition equivalence holds for the thermostat table and for 100
//    random tables (domains <= 12 values, <= 5 columns, <= 8 rows).
std::optional<std::string> decomposition_soundness() {
    const Model thermo = testutil::thermostat_model();
    EquivalenceResult r = oracle_equivalence(thermo.tables[0],
                                             plan_decomposition(thermo.tables[0]), thermo);
    if (!r.equivalent) return fail("thermostat plan not equivalent");

    testutil::Rng rng(3001);
    for (int i = 0; i < 100; ++i) {
        const Model m = testutil::random_table_model(rng);
        const ColumnPlan plan = plan_decomposition(m.tables[0]);
        if (!plan.ok()) return fail("plan rejected a supported table, case " + std::to_string(i));
        EquivalenceResult eq = oracle_equivalence(m.tables[0], plan, m);
        if (!eq.equivalent) {
            std::string witness = eq.witness ? render_witness(*eq.witness, m) : "<none>";
            return fail("case " + std::to_string(i) + " inequivalent, witness: " + witness +
                        "; model: " + serialize_model(m));
        }
    }
    return std::nullopt;
}

// 4. After normalization every table-ref node has in/out degree <= 1, and
//    forward runs agree with the original flow on every enumerable initial
//    valuation; 100 random flows.
std::optional<std::string> normalization_contract() {
    testutil::Rng rng(3002);
    for (int i = 0; i < 100; ++i) {
        const Model m = testutil::random_flow_model(rng);
        if (!validate_model(m).empty()) return fail("generator produced an invalid model");
        NormalizedFlow flow = normalize_flow(m);
        if (!flow.ok()) return fail("normalization failed, case " + std::to_string(i));
        for (const auto& n : flow.nodes) {
            if (n.kind != NodeKind::table_ref) continue;
            std::size_t in = 0, out = 0;
            for (const auto& l : flow.links) {
                in += l.to == n.id;
                out += l.from == n.id;
            }
            if (in > 1 || out > 1)
                return fail("degree contract broken at " + n.id + ", case " + std::to_string(i));
        }
        Model normalized = m;
        normalized.nodes = flow.nodes;
        normalized.links = flow.links;
        for (const Valuation& init : testutil::initial_valuations(m)) {
            RunResult a = run_forward(m, init);
            RunResult b = run_forward(normalized, init);
            if (!a.ok() || !b.ok()) return fail("run failed, case " + std::to_string(i));
            if (!(a.final_valuation == b.final_valuation))
                return fail("normalized run diverged, case " + std::to_string(i));
        }
    }
    return std::nullopt;
}

// 5. On random diamond flows, N-OF-M(1) traces match OR and N-OF-M(m)
//    traces match AND, case for case.
std::optional<std::string> join_algebra() {
    for (unsigned seed = 4000; seed < 4100; ++seed) {
        testutil::Rng pick_rng(seed);
        const int branches = testutil::pick(pick_rng, 2, 5);
        testutil::Rng r1(seed), r2(seed), r3(seed), r4(seed);
        const Model with_or = testutil::random_diamond_model(r1, branches, JoinKind::OR);
        const Model with_one = testutil::random_diamond_model(r2, branches, JoinKind::N_OF_M, 1);
        const Model with_and = testutil::random_diamond_model(r3, branches, JoinKind::AND);
        const Model with_all =
            testutil::random_diamond_model(r4, branches, JoinKind::N_OF_M, branches);
        for (const Valuation& init : testutil::initial_valuations(with_or)) {
            if (render_trace(run_forward(with_or, init).trace) !=
                render_trace(run_forward(with_one, init).trace))
                return fail("N-OF-M(1) != OR at seed " + std::to_string(seed));
            if (render_trace(run_forward(with_and, init).trace) !=
                render_trace(run_forward(with_all, init).trace))
                return fail("N-OF-M(m) != AND at seed " + std::to_string(seed));
        }
    }
    return std::nullopt;
}

// 6. Exportable models produce exactly three nonempty artifacts; row-targeted
//    links, neq and notin produce their error codes and no texts.
std::optional<std::string> three_file_contract() {
    testutil::Rng rng(3003);
    for (int i = 0; i < 20; ++i) {
        const Model m = testutil::random_flow_model(rng);
        DroolsBundle bundle = export_drools(m);
        if (!bundle.ok()) return fail("bundle errored on a clean model, case " + std::to_string(i));
        if (bundle.ruleflow_xml.empty() || bundle.decision_table_csv.empty() ||
            bundle.workspace_source.empty())
            return fail("missing artifact text, case " + std::to_string(i));
    }

    auto expect_error = [](Model m, const std::string& code) -> std::optional<std::string> {
        DroolsBundle bundle = export_drools(m);
        if (bundle.ok()) return fail("expected error " + code);
        bool seen = false;
        for (const auto& d : bundle.diagnostics) seen |= d.code == code;
        if (!seen) return fail("missing diagnostic " + code);
        if (!bundle.ruleflow_xml.empty() || !bundle.decision_table_csv.empty() ||
            !bundle.workspace_source.empty())
            return fail("artifacts present despite " + code);
        return std::nullopt;
    };
    Model rowlink = testutil::thermostat_model();
    rowlink.links[0].target_row = 2;
    if (auto err = expect_error(rowlink, "row-link-unsupported")) return err;

    Model with_neq = testutil::thermostat_model();
    with_neq.tables[0].rows[0].conditions[0] =
        testutil::cc("today", Operator::neq, sv("weekend"));
    if (auto err = expect_error(with_neq, "neq-unsupported")) return err;

    Model with_notin = testutil::thermostat_model();
    with_notin.tables[0].rows[3].conditions[1] =
        testutil::cc("hour", Operator::notin, Interval{9, 17});
    if (auto err = expect_error(with_notin, "notin-unsupported")) return err;
    return std::nullopt;
}

// 7. Scenario B: one task per table, referentially intact flows, golden match
//    for the thermostat.
std::optional<std::string> bpmn_scenario_b() {
    testutil::Rng rng(3004);
    for (int i = 0; i < 50; ++i) {
        const Model m = testutil::random_flow_model(rng);
        BpmnDocument doc = export_bpmn_tablemap(m);
        if (!doc.ok()) return fail("export failed, case " + std::to_string(i));
        std::size_t tasks = 0;
        std::set<std::string> ids;
        for (const auto& e : doc.elements) {
            tasks += e.kind == BpmnKind::task;
            ids.insert(e.id);
        }
        if (tasks != m.tables.size())
            return fail("task count != table count, case " + std::to_string(i));
        for (const auto& f : doc.flows)
            if (!ids.count(f.from) || !ids.count(f.to))
                return fail("dangling sequenceFlow, case " + std::to_string(i));
    }
    const std::string xml = render_bpmn_xml(export_bpmn_tablemap(testutil::thermostat_model()));
    if (xml != golden("thermostat.bpmn")) return fail("thermostat BPMN differs from golden file");
    return std::nullopt;
}

// 8. The thermostat table is complete and overlap-free; deleting row 2
//    leaves exactly the 24 weekend states uncovered.
std::optional<std::string> analysis_correctness() {
    const Model m = testutil::thermostat_model();
    if (!check_completeness(m.tables[0], m).empty()) return fail("thermostat incomplete");
    if (!check_overlap(m.tables[0], m).empty()) return fail("thermostat overlaps");

    Model gappy = m;
    gappy.tables[0].rows.erase(gappy.tables[0].rows.begin() + 1);
    for (std::size_t i = 0; i < gappy.tables[0].rows.size(); ++i)
        gappy.tables[0].rows[i].row_id = static_cast<int>(i + 1);
    auto witnesses = check_completeness(gappy.tables[0], gappy);
    if (witnesses.size() != 24)
        return fail("expected 24 witnesses, got " + std::to_string(witnesses.size()));
    for (const Valuation& w : witnesses)
        if (!(*w.get("today") == sv("weekend"))) return fail("non-weekend witness reported");
    return std::nullopt;
}

// 9. Every emitter and every run is byte-deterministic.
std::optional<std::string> determinism() {
    const Model thermo = testutil::thermostat_model();
    if (serialize_model(thermo) != serialize_model(thermo)) return fail("serializer varies");
    DroolsBundle b1 = export_drools(thermo);
    DroolsBundle b2 = export_drools(thermo);
    if (b1.ruleflow_xml != b2.ruleflow_xml || b1.decision_table_csv != b2.decision_table_csv ||
        b1.workspace_source != b2.workspace_source)
        return fail("drools export varies");
    if (render_bpmn_xml(export_bpmn_tablemap(thermo)) !=
        render_bpmn_xml(export_bpmn_tablemap(thermo)))
        return fail("bpmn table-map export varies");
    if (render_bpmn_xml(export_bpmn_rulelevel(thermo, "thermostat")) !=
        render_bpmn_xml(export_bpmn_rulelevel(thermo, "thermostat")))
        return fail("bpmn rule-level export varies");

    testutil::Rng rng(3005);
    for (int i = 0; i < 20; ++i) {
        const Model m = testutil::random_flow_model(rng);
        for (const Valuation& init : testutil::initial_valuations(m)) {
            RunResult a = run_forward(m, init);
            RunResult b = run_forward(m, init);
            if (render_trace(a.trace) != render_trace(b.trace))
                return fail("trace varies, case " + std::to_string(i));
            if (!(a.final_valuation == b.final_valuation))
                return fail("final valuation varies, case " + std::to_string(i));
        }
    }
    return std::nullopt;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, Criterion>> criteria = {
        {"thermostat-fidelity", thermostat_fidelity},
        {"translation-fidelity", translation_fidelity},
        {"decomposition-soundness", decomposition_soundness},
        {"normalization-contract", normalization_contract},
        {"join-algebra", join_algebra},
        {"three-file-contract", three_file_contract},
        {"bpmn-scenario-b", bpmn_scenario_b},
        {"analysis-correctness", analysis_correctness},
        {"determinism", determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::optional<std::string> error;
        try {
            error = criteria[i].second();
        } catch (const std::exception& e) {
            error = std::string("exception: ") + e.what();
        }
        if (error) {
            ++failures;
            std::cout << "FAIL " << (i + 1) << " " << criteria[i].first << ": " << *error << "\n";
        } else {
            std::cout << "PASS " << (i + 1) << " " << criteria[i].first << "\n";
        }
    }
    return failures;
}
