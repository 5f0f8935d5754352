#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xtt/model.hpp"
#include "xtt/validate.hpp"

namespace xtt {

/// Flow rewritten to Drools constraints: every ruleset (table-ref) node has
/// at most one incoming and one outgoing connection, and no link is
/// row-targeted.
struct NormalizedFlow {
    std::vector<FlowNode> nodes;
    std::vector<Link> links;
    std::map<std::string, std::string> provenance;  // inserted node id -> original site
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

namespace detail {

inline std::string unique_node_id(const std::string& base, const std::set<std::string>& taken) {
    if (!taken.count(base)) return base;
    for (int k = 2;; ++k) {
        std::string candidate = base + std::to_string(k);
        if (!taken.count(candidate)) return candidate;
    }
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

/// Inserts AND join / AND split nodes in front of and behind table-ref nodes
/// with several incoming or outgoing connections. Ids are `<table>_join` and
/// `<table>_split` (suffixed only on collision). Row-targeted links have no
/// Drools counterpart and fail the export.
inline NormalizedFlow normalize_flow(const Model& model) {
    NormalizedFlow out;
    for (std::size_t li = 0; li < model.links.size(); ++li) {
        if (model.links[li].target_row)
            out.diagnostics.push_back(
                {Severity::error, "row-link-unsupported",
                 "row-targeted links cannot be expressed in a ruleflow",
                 "flow.links[" + std::to_string(li + 1) + "]"});
    }
    if (!out.diagnostics.empty()) return out;

    std::set<std::string> taken;
    for (const auto& n : model.nodes) taken.insert(n.id);

    out.links = model.links;
    struct Insertion {
        std::string join_id, split_id;  // empty when not needed
    };
    std::map<std::string, Insertion> plan;  // node id -> inserted ids
    for (const auto& n : model.nodes) {
        if (n.kind != NodeKind::table_ref) continue;
        Insertion ins;
        if (model.incoming_links(n.id).size() > 1) {
            ins.join_id = detail::unique_node_id(n.table_name + "_join", taken);
            taken.insert(ins.join_id);
        }
        if (model.outgoing_links(n.id).size() > 1) {
            ins.split_id = detail::unique_node_id(n.table_name + "_split", taken);
            taken.insert(ins.split_id);
        }
        if (!ins.join_id.empty() || !ins.split_id.empty()) plan[n.id] = ins;
    }

    for (const auto& n : model.nodes) {
        auto it = plan.find(n.id);
        if (it == plan.end()) {
            out.nodes.push_back(n);
            continue;
        }
        const Insertion& ins = it->second;
        if (!ins.join_id.empty()) {
            FlowNode join;
            join.id = ins.join_id;
            join.kind = NodeKind::join;
            join.join_kind = JoinKind::AND;
            out.nodes.push_back(join);
            out.provenance[ins.join_id] = "collects the incoming links of " + n.id;
            for (auto& l : out.links)
                if (l.to == n.id) l.to = ins.join_id;
        }
        out.nodes.push_back(n);
        if (!ins.split_id.empty()) {
            FlowNode split;
            split.id = ins.split_id;
            split.kind = NodeKind::split;
            split.split_kind = SplitKind::AND;
            out.nodes.push_back(split);
            out.provenance[ins.split_id] = "fans out the outgoing links of " + n.id;
            for (auto& l : out.links)
                if (l.from == n.id) l.from = ins.split_id;
        }
    }
    // Reconnect each table through its inserted nodes, in node order.
    for (const auto& n : model.nodes) {
        auto it = plan.find(n.id);
        if (it == plan.end()) continue;
        if (!it->second.join_id.empty()) out.links.push_back({it->second.join_id, n.id, {}, {}, false});
        if (!it->second.split_id.empty()) out.links.push_back({n.id, it->second.split_id, {}, {}, false});
    }
    return out;
}

/// Drools decision-table column operators. XTT2 keeps the operator in the
/// cell; a spreadsheet decision table keeps it in the column header, so one
/// source column becomes up to five output columns.
enum class OutputOp { eq_template, gt, lt, geq, leq };

inline int output_op_rank(OutputOp op) { return static_cast<int>(op); }

struct PlanColumn {
    std::string attribute;
    OutputOp op = OutputOp::eq_template;
    std::set<Operator> source_ops;

    bool operator==(const PlanColumn&) const = default;
};

struct ColumnPlan {
    std::string table_name;
    std::vector<PlanColumn> columns;
    // Per rule row, one optional literal per output column; absent cells emit
    // as empty (no constraint). ANY cells claim no column at all.
    std::vector<std::vector<std::optional<Value>>> row_cells;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Decomposes a table's condition columns by operator. `eq` cells share the
/// eq-template column, relational cells claim their operator's column, and an
/// interval claims the (geq, leq) pair. neq / notin / set-membership cells
/// have no spreadsheet rendering and are rejected.
inline ColumnPlan plan_decomposition(const Table& table) {
    ColumnPlan plan;
    plan.table_name = table.name;

    for (std::size_t ci = 0; ci < table.condition_columns.size(); ++ci) {
        std::set<OutputOp> wanted;
        std::map<OutputOp, std::set<Operator>> sources;
        for (const RuleRow& row : table.rows) {
            if (ci >= row.conditions.size()) continue;
            const ConditionCell& cell = row.conditions[ci];
            const std::string cell_loc = "tables[" + table.name + "].rows[" +
                                         std::to_string(row.row_id) + "].conditions[" +
                                         std::to_string(ci + 1) + "]";
            switch (cell.op) {
                case Operator::any: break;
                case Operator::eq:
                    wanted.insert(OutputOp::eq_template);
                    sources[OutputOp::eq_template].insert(Operator::eq);
                    break;
                case Operator::gt:
                    wanted.insert(OutputOp::gt);
                    sources[OutputOp::gt].insert(Operator::gt);
                    break;
                case Operator::lt:
                    wanted.insert(OutputOp::lt);
                    sources[OutputOp::lt].insert(Operator::lt);
                    break;
                case Operator::geq:
                    wanted.insert(OutputOp::geq);
                    sources[OutputOp::geq].insert(Operator::geq);
                    break;
                case Operator::leq:
                    wanted.insert(OutputOp::leq);
                    sources[OutputOp::leq].insert(Operator::leq);
                    break;
                case Operator::in:
                    if (std::holds_alternative<Interval>(cell.operand)) {
                        wanted.insert(OutputOp::geq);
                        wanted.insert(OutputOp::leq);
                        sources[OutputOp::geq].insert(Operator::in);
                        sources[OutputOp::leq].insert(Operator::in);
                    } else {
                        plan.diagnostics.push_back({Severity::error, "in-set-unsupported",
                                                    "set membership has no decision-table column form",
                                                    cell_loc});
                    }
                    break;
                case Operator::neq:
                    plan.diagnostics.push_back({Severity::error, "neq-unsupported",
                                                "neq has no decision-table column form", cell_loc});
                    break;
                case Operator::notin:
                    plan.diagnostics.push_back({Severity::error, "notin-unsupported",
                                                "notin has no decision-table column form", cell_loc});
                    break;
            }
        }
        for (OutputOp op : {OutputOp::eq_template, OutputOp::gt, OutputOp::lt, OutputOp::geq,
                            OutputOp::leq}) {
            if (!wanted.count(op)) continue;
            plan.columns.push_back({table.condition_columns[ci], op, sources[op]});
        }
    }
    if (!plan.ok()) return plan;

    // Second pass: place each cell's literal(s) into its output column(s).
    std::map<std::pair<std::string, OutputOp>, std::size_t> column_index;
    for (std::size_t i = 0; i < plan.columns.size(); ++i)
        column_index[{plan.columns[i].attribute, plan.columns[i].op}] = i;
    for (const RuleRow& row : table.rows) {
        std::vector<std::optional<Value>> cells(plan.columns.size());
        for (const ConditionCell& cell : row.conditions) {
            auto put = [&](OutputOp op, Value v) {
                cells[column_index.at({cell.attribute, op})] = std::move(v);
            };
            switch (cell.op) {
                case Operator::any: break;
                case Operator::eq: put(OutputOp::eq_template, std::get<Value>(cell.operand)); break;
                case Operator::gt: put(OutputOp::gt, std::get<Value>(cell.operand)); break;
                case Operator::lt: put(OutputOp::lt, std::get<Value>(cell.operand)); break;
                case Operator::geq: put(OutputOp::geq, std::get<Value>(cell.operand)); break;
                case Operator::leq: put(OutputOp::leq, std::get<Value>(cell.operand)); break;
                case Operator::in: {
                    const Interval& iv = std::get<Interval>(cell.operand);
                    put(OutputOp::geq, Value{iv.lo});
                    put(OutputOp::leq, Value{iv.hi});
                    break;
                }
                default: break;
            }
        }
        plan.row_cells.push_back(std::move(cells));
    }
    return plan;
}

struct Emitted {
    std::string text;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

inline std::string output_op_template(const PlanColumn& col) {
    switch (col.op) {
        case OutputOp::eq_template: return col.attribute + " == \"$param\"";
        case OutputOp::gt: return col.attribute + " > $param";
        case OutputOp::lt: return col.attribute + " < $param";
        case OutputOp::geq: return col.attribute + " >= $param";
        case OutputOp::leq: return col.attribute + " <= $param";
    }
    return {};
}

/// One spreadsheet block per table: RuleSet/Import preamble, RuleTable
/// header, CONDITION/ACTION kind row, Workspace binding row, operator
/// template row, then one data row per rule. Blocks are separated by a blank
/// line; cells a rule does not constrain stay empty.
inline Emitted emit_decision_table_csv(const Model& model, const std::vector<ColumnPlan>& plans) {
    Emitted out;
    if (model.tables.empty()) {
        out.diagnostics.push_back(
            {Severity::error, "no-tables", "model has no tables to emit", "tables"});
        return out;
    }
    std::ostringstream csv;
    for (std::size_t ti = 0; ti < model.tables.size(); ++ti) {
        const Table& t = model.tables[ti];
        const ColumnPlan& plan = plans.at(ti);
        if (ti > 0) csv << "\n";
        csv << "RuleSet," << model.name << "\n";
        csv << "Import,\n";
        csv << "\n";
        csv << "RuleTable " << t.name << "\n";
        const std::size_t width = plan.columns.size() + t.decision_columns.size();
        for (std::size_t c = 0; c < width; ++c)
            csv << (c ? "," : "") << (c < plan.columns.size() ? "CONDITION" : "ACTION");
        csv << "\n";
        for (std::size_t c = 0; c < width; ++c) csv << (c ? "," : "") << "Workspace";
        csv << "\n";
        for (std::size_t c = 0; c < width; ++c) {
            csv << (c ? "," : "");
            if (c < plan.columns.size())
                csv << output_op_template(plan.columns[c]);
            else
                csv << "set" << capitalize(t.decision_columns[c - plan.columns.size()])
                    << "(\"$param\")";
        }
        csv << "\n";
        for (std::size_t ri = 0; ri < t.rows.size(); ++ri) {
            std::size_t cell_no = 0;
            for (std::size_t c = 0; c < plan.columns.size(); ++c) {
                const auto& cell = plan.row_cells[ri][c];
                csv << (cell_no++ ? "," : "") << (cell ? value_text(*cell) : "");
            }
            for (const DecisionCell& d : t.rows[ri].decisions)
                csv << (cell_no++ ? "," : "") << value_text(d.value);
            csv << "\n";
        }
    }
    out.text = csv.str();
    return out;
}

/// Slim ruleflow document: the blocks defined in the flow and the
/// connections between them, nothing else.
inline std::string emit_ruleflow_xml(const NormalizedFlow& flow, const std::string& model_name) {
    using detail::xml_escape;
    std::ostringstream xml;
    xml << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    xml << "<process id=\"" << xml_escape(model_name) << "\" name=\"" << xml_escape(model_name)
        << "\">\n";
    xml << "  <nodes>\n";
    for (const FlowNode& n : flow.nodes) {
        const std::string id = xml_escape(n.id);
        switch (n.kind) {
            case NodeKind::start: xml << "    <start id=\"" << id << "\"/>\n"; break;
            case NodeKind::end: xml << "    <end id=\"" << id << "\"/>\n"; break;
            case NodeKind::table_ref:
                xml << "    <ruleSet id=\"" << id << "\" name=\"" << xml_escape(n.table_name)
                    << "\" ruleFlowGroup=\"" << xml_escape(n.table_name) << "\"/>\n";
                break;
            case NodeKind::split:
                xml << "    <split id=\"" << id << "\" type=\""
                    << (n.split_kind == SplitKind::AND ? "AND" : "XOR") << "\"/>\n";
                break;
            case NodeKind::join:
                xml << "    <join id=\"" << id << "\" type=\""
                    << (n.join_kind == JoinKind::AND  ? "AND"
                        : n.join_kind == JoinKind::OR ? "OR"
                                                      : "N_OF_M")
                    << "\"";
                if (n.join_kind == JoinKind::N_OF_M && n.n) xml << " n=\"" << *n.n << "\"";
                xml << "/>\n";
                break;
        }
    }
    xml << "  </nodes>\n";
    xml << "  <connections>\n";
    for (const Link& l : flow.links)
        xml << "    <connection from=\"" << xml_escape(l.from) << "\" to=\"" << xml_escape(l.to)
            << "\"/>\n";
    xml << "  </connections>\n";
    xml << "</process>\n";
    return xml.str();
}

namespace detail {

inline const std::set<std::string>& java_reserved_words() {
    static const std::set<std::string> words = {
        "abstract", "assert",    "boolean",  "break",      "byte",      "case",      "catch",
        "char",     "class",     "const",    "continue",   "default",   "do",        "double",
        "else",     "enum",      "extends",  "final",      "finally",   "float",     "for",
        "goto",     "if",        "implements", "import",   "instanceof", "int",      "interface",
        "long",     "native",    "new",      "package",    "private",   "protected", "public",
        "return",   "short",     "static",   "strictfp",   "super",     "switch",    "synchronized",
        "this",     "throw",     "throws",   "transient",  "try",       "void",      "volatile",
        "while",    "true",      "false",    "null"};
    return words;
}

}  // namespace detail

/// The generated fact class: one field per attribute plus getters and
/// setters, no other logic.
inline Emitted emit_workspace_source(const Model& model) {
    Emitted out;
    if (model.attributes.empty()) {
        out.diagnostics.push_back(
            {Severity::error, "no-attributes", "model declares no attributes", "attributes"});
        return out;
    }
    for (const auto& a : model.attributes)
        if (detail::java_reserved_words().count(a.name))
            out.diagnostics.push_back({Severity::error, "reserved-word",
                                       "attribute name \"" + a.name +
                                       "\" is a reserved word in the target syntax",
                                       "attributes[" + a.name + "]"});
    if (!out.ok()) return out;

    auto java_type = [](const Domain& d) {
        return d.kind == DomainKind::symbolic ? "String" : "int";
    };
    std::ostringstream src;
    src << "public class Workspace {\n\n";
    for (const auto& a : model.attributes)
        src << "    private " << java_type(a.domain) << " " << a.name << ";\n";
    for (const auto& a : model.attributes) {
        const std::string type = java_type(a.domain);
        const std::string cap = capitalize(a.name);
        src << "\n    public " << type << " get" << cap << "() {\n"
            << "        return " << a.name << ";\n"
            << "    }\n";
        src << "\n    public void set" << cap << "(" << type << " " << a.name << ") {\n"
            << "        this." << a.name << " = " << a.name << ";\n"
            << "    }\n";
    }
    src << "}\n";
    out.text = src.str();
    return out;
}

/// The three generated artifacts. Texts are present exactly when no error
/// diagnostic was raised anywhere in the pipeline.
struct DroolsBundle {
    std::string ruleflow_xml;
    std::string decision_table_csv;
    std::string workspace_source;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Full translation: validate, normalize the flow, plan every table's column
/// decomposition, and emit the ruleflow, decision-table and workspace texts.
inline DroolsBundle export_drools(const Model& model) {
    DroolsBundle bundle;
    auto validation = validate_model(model);
    if (has_errors(validation)) {
        bundle.diagnostics = std::move(validation);
        return bundle;
    }

    NormalizedFlow flow = normalize_flow(model);
    bundle.diagnostics.insert(bundle.diagnostics.end(), flow.diagnostics.begin(),
                              flow.diagnostics.end());
    std::vector<ColumnPlan> plans;
    for (const Table& t : model.tables) {
        plans.push_back(plan_decomposition(t));
        bundle.diagnostics.insert(bundle.diagnostics.end(), plans.back().diagnostics.begin(),
                                  plans.back().diagnostics.end());
    }
    if (has_errors(bundle.diagnostics)) return bundle;

    Emitted csv = emit_decision_table_csv(model, plans);
    bundle.diagnostics.insert(bundle.diagnostics.end(), csv.diagnostics.begin(),
                              csv.diagnostics.end());
    Emitted workspace = emit_workspace_source(model);
    bundle.diagnostics.insert(bundle.diagnostics.end(), workspace.diagnostics.begin(),
                              workspace.diagnostics.end());
    if (has_errors(bundle.diagnostics)) return bundle;

    bundle.ruleflow_xml = emit_ruleflow_xml(flow, model.name);
    bundle.decision_table_csv = std::move(csv.text);
    bundle.workspace_source = std::move(workspace.text);
    return bundle;
}

}  // namespace xtt
