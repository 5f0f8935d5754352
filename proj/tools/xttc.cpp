// xttc: validate, run, analyze and cross-compile XTT2 models.
//
// Exit codes: 0 success, 1 model or semantic error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xtt/xtt.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitModelError = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void print_diagnostics(const std::vector<xtt::Diagnostic>& diags, std::ostream& out) {
    for (const auto& d : diags) out << xtt::render_diagnostic(d) << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot read model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write file: " + path.string());
    out << text;
}

xtt::Model load_model(const std::string& path) {
    xtt::ParseResult parsed = xtt::parse_model(read_file(path));
    if (!parsed.ok()) {
        print_diagnostics(parsed.diagnostics, std::cerr);
        throw ModelError("model \"" + path + "\" did not parse");
    }
    return std::move(*parsed.model);
}

xtt::Valuation parse_bindings(const xtt::Model& model, const std::vector<std::string>& sets) {
    xtt::Valuation v;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--set expects attribute=value, got \"" + s + "\"");
        const std::string name = s.substr(0, eq);
        const std::string text = s.substr(eq + 1);
        const xtt::AttributeDef* attr = model.find_attribute(name);
        if (!attr) throw ModelError("unknown-attribute: no attribute \"" + name + "\"");
        xtt::Value value;
        if (attr->domain.kind == xtt::DomainKind::integer_range) {
            try {
                std::size_t used = 0;
                const long long n = std::stoll(text, &used);
                if (used != text.size()) throw std::invalid_argument(text);
                value = static_cast<std::int64_t>(n);
            } catch (const std::exception&) {
                throw ModelError("bad-value: \"" + text + "\" is not an integer for attribute \"" +
                                 name + "\"");
            }
        } else {
            value = text;
        }
        if (!attr->domain.contains(value))
            throw ModelError("value-out-of-domain: " + text + " is outside the domain of \"" +
                             name + "\"");
        v.set(name, std::move(value));
    }
    return v;
}

std::size_t state_bound_from_env() {
    const char* env = std::getenv("XTTC_STATE_BOUND");
    if (!env) return xtt::kDefaultStateBound;
    try {
        std::size_t used = 0;
        const unsigned long long n = std::stoull(env, &used);
        if (used != std::string(env).size() || n == 0) throw std::invalid_argument(env);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw UsageError(std::string("XTTC_STATE_BOUND must be a positive integer, got \"") + env +
                         "\"");
    }
}

int cmd_validate(const std::string& model_path) {
    xtt::ParseResult parsed = xtt::parse_model(read_file(model_path));
    print_diagnostics(parsed.diagnostics, std::cout);
    return xtt::has_errors(parsed.diagnostics) ? kExitModelError : kExitOk;
}

int cmd_run(const std::string& model_path, const std::vector<std::string>& sets,
            const std::optional<std::string>& goal, bool trace) {
    const xtt::Model model = load_model(model_path);
    const xtt::Valuation initial = parse_bindings(model, sets);

    xtt::Valuation final_valuation;
    xtt::InferenceTrace run_trace;
    std::vector<xtt::Diagnostic> diags;
    if (goal) {
        xtt::GoalRunResult r = xtt::run_goal_driven(model, *goal, initial);
        final_valuation = std::move(r.final_valuation);
        run_trace = std::move(r.trace);
        diags = std::move(r.diagnostics);
    } else {
        xtt::RunResult r = xtt::run_forward(model, initial);
        final_valuation = std::move(r.final_valuation);
        run_trace = std::move(r.trace);
        diags = std::move(r.diagnostics);
    }
    if (xtt::has_errors(diags)) {
        print_diagnostics(diags, std::cerr);
        return kExitModelError;
    }
    if (trace) std::cout << xtt::render_trace(run_trace);
    for (const auto& [attr, value] : final_valuation.bindings)
        std::cout << attr << "=" << xtt::value_text(value) << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& model_path) {
    const xtt::Model model = load_model(model_path);
    const std::size_t bound = state_bound_from_env();
    bool defects = false;
    for (const xtt::Table& table : model.tables) {
        const xtt::AnalysisReport report = xtt::analyze_table(table, model, bound);
        defects |= !report.clean();
        std::cout << xtt::render_report(report, model);
    }
    for (const std::string& table : xtt::check_reachability(model)) {
        defects = true;
        std::cout << table << " unreachable\n";
    }
    return defects ? kExitModelError : kExitOk;
}

int cmd_export_drools(const std::string& model_path, const std::string& out_dir) {
    const xtt::Model model = load_model(model_path);
    const xtt::DroolsBundle bundle = xtt::export_drools(model);
    if (!bundle.ok()) {
        print_diagnostics(bundle.diagnostics, std::cerr);
        return kExitModelError;
    }
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / (model.name + ".rf.xml"), bundle.ruleflow_xml);
    write_file(fs::path(out_dir) / (model.name + ".dtable.csv"), bundle.decision_table_csv);
    write_file(fs::path(out_dir) / "Workspace.java", bundle.workspace_source);
    return kExitOk;
}

int cmd_export_bpmn(const std::string& model_path, const std::string& scenario,
                    const std::optional<std::string>& table, const std::string& out_dir,
                    const std::string& out_file) {
    const xtt::Model model = load_model(model_path);
    xtt::BpmnDocument doc = scenario == "rule-level" ? xtt::export_bpmn_rulelevel(model, *table)
                                                     : xtt::export_bpmn_tablemap(model);
    if (!doc.ok()) {
        print_diagnostics(doc.diagnostics, std::cerr);
        return kExitModelError;
    }
    fs::path target;
    if (!out_file.empty()) {
        target = out_file;
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
    } else {
        fs::create_directories(out_dir);
        target = fs::path(out_dir) / (model.name + ".bpmn");
    }
    write_file(target, xtt::render_bpmn_xml(doc));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"XTT2 modular rulebase compiler"};
    app.require_subcommand(1);

    std::string model_path;
    std::vector<std::string> sets;
    std::string goal;
    bool trace = false;
    std::string out_dir;
    std::string out_file;
    std::string scenario = "table-map";
    std::string table;

    CLI::App* validate = app.add_subcommand("validate", "check a model file");
    validate->add_option("model", model_path, "model file")->required();

    CLI::App* run = app.add_subcommand("run", "run inference over a model");
    run->add_option("model", model_path, "model file")->required();
    run->add_option("--set", sets, "initial binding attribute=value");
    run->add_option("--goal", goal, "goal attribute (backward slice + forward run)");
    run->add_flag("--trace", trace, "print the inference trace");

    CLI::App* analyze = app.add_subcommand("analyze", "completeness/overlap/reachability report");
    analyze->add_option("model", model_path, "model file")->required();

    CLI::App* drools = app.add_subcommand("export-drools", "emit ruleflow, decision table, workspace");
    drools->add_option("model", model_path, "model file")->required();
    drools->add_option("--out", out_dir, "output directory")->required();

    CLI::App* bpmn = app.add_subcommand("export-bpmn", "emit a BPMN process");
    bpmn->add_option("model", model_path, "model file")->required();
    bpmn->add_option("--out", out_dir, "output directory");
    bpmn->add_option("--out-file", out_file, "output file path");
    bpmn->add_option("--scenario", scenario, "table-map (default) or rule-level")
        ->check(CLI::IsMember({"table-map", "rule-level"}));
    bpmn->add_option("--table", table, "table name (rule-level only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cout, std::cerr);
        return kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(model_path);
        if (run->parsed()) {
            std::optional<std::string> goal_opt;
            if (!goal.empty()) goal_opt = goal;
            return cmd_run(model_path, sets, goal_opt, trace);
        }
        if (analyze->parsed()) return cmd_analyze(model_path);
        if (drools->parsed()) return cmd_export_drools(model_path, out_dir);
        if (bpmn->parsed()) {
            if (scenario == "rule-level" && table.empty())
                throw UsageError("--scenario rule-level requires --table");
            if (table.size() && scenario != "rule-level")
                throw UsageError("--table is only valid with --scenario rule-level");
            if (out_dir.empty() && out_file.empty())
                throw UsageError("export-bpmn needs --out or --out-file");
            if (!out_dir.empty() && !out_file.empty())
                throw UsageError("--out and --out-file are mutually exclusive");
            std::optional<std::string> table_opt;
            if (!table.empty()) table_opt = table;
            return cmd_export_bpmn(model_path, scenario, table_opt, out_dir, out_file);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const xtt::StateSpaceTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModelError;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModelError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModelError;
    }
    return kExitUsage;
}
