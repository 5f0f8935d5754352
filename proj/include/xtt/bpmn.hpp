#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xtt/drools.hpp"
#include "xtt/model.hpp"
#include "xtt/validate.hpp"

namespace xtt {

enum class BpmnKind { start_event, end_event, task, parallel_gateway, exclusive_gateway };

struct BpmnElement {
    std::string id;
    BpmnKind kind = BpmnKind::task;
    std::string name;
    // OR and N-OF-M joins have no native BPMN gateway; the original semantics
    // ride along as an annotation so nothing is lost in the mapping.
    std::optional<JoinKind> join_semantics;
    std::optional<int> n;

    bool operator==(const BpmnElement&) const = default;
};

struct BpmnFlow {
    std::string id;
    std::string from;
    std::string to;
    std::optional<std::string> condition_text;
    bool is_default = false;
    std::optional<int> target_row;

    bool operator==(const BpmnFlow&) const = default;
};

struct BpmnDocument {
    std::string process_id;
    std::string process_name;
    std::vector<BpmnElement> elements;
    std::vector<BpmnFlow> flows;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Infix rendering of a condition cell, e.g. `hour > 17` or `hour in [9,17]`.
inline std::string render_condition(const ConditionCell& cell) {
    auto operand_value = [&]() { return value_text(std::get<Value>(cell.operand)); };
    auto operand_collection = [&]() {
        if (const Interval* iv = std::get_if<Interval>(&cell.operand))
            return "[" + std::to_string(iv->lo) + "," + std::to_string(iv->hi) + "]";
        std::string s = "{";
        const ValueSet& vs = std::get<ValueSet>(cell.operand);
        for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? "," : "") + value_text(vs[i]);
        return s + "}";
    };
    switch (cell.op) {
        case Operator::eq: return cell.attribute + " == " + operand_value();
        case Operator::neq: return cell.attribute + " != " + operand_value();
        case Operator::lt: return cell.attribute + " < " + operand_value();
        case Operator::gt: return cell.attribute + " > " + operand_value();
        case Operator::leq: return cell.attribute + " <= " + operand_value();
        case Operator::geq: return cell.attribute + " >= " + operand_value();
        case Operator::in: return cell.attribute + " in " + operand_collection();
        case Operator::notin: return cell.attribute + " notin " + operand_collection();
        case Operator::any: return "true";
    }
    return {};
}

/// Conjunction of cells with vacuous ANY cells dropped; `true` when nothing
/// remains.
inline std::string render_condition_list(const std::vector<ConditionCell>& cells) {
    std::string text;
    for (const ConditionCell& c : cells) {
        if (c.op == Operator::any) continue;
        if (!text.empty()) text += " && ";
        text += render_condition(c);
    }
    return text.empty() ? "true" : text;
}

/// Scenario "BPMN as a table map": one task per table, events for start/end
/// nodes, gateways for splits and joins, XOR guards as flow conditions. The
/// raw (unnormalized) flow is exported; BPMN allows multiple connections.
inline BpmnDocument export_bpmn_tablemap(const Model& model) {
    BpmnDocument doc;
    auto validation = validate_model(model);
    if (has_errors(validation)) {
        doc.diagnostics = std::move(validation);
        return doc;
    }
    doc.process_id = model.name;
    doc.process_name = model.name;
    for (const FlowNode& n : model.nodes) {
        BpmnElement e;
        e.id = n.id;
        switch (n.kind) {
            case NodeKind::start: e.kind = BpmnKind::start_event; break;
            case NodeKind::end: e.kind = BpmnKind::end_event; break;
            case NodeKind::table_ref:
                e.kind = BpmnKind::task;
                e.name = n.table_name;
                break;
            case NodeKind::split:
                e.kind = n.split_kind == SplitKind::AND ? BpmnKind::parallel_gateway
                                                        : BpmnKind::exclusive_gateway;
                break;
            case NodeKind::join:
                if (n.join_kind == JoinKind::AND) {
                    e.kind = BpmnKind::parallel_gateway;
                } else {
                    e.kind = BpmnKind::exclusive_gateway;
                    e.join_semantics = n.join_kind;
                    e.n = n.n;
                }
                break;
        }
        doc.elements.push_back(std::move(e));
    }
    for (std::size_t li = 0; li < model.links.size(); ++li) {
        const Link& l = model.links[li];
        BpmnFlow f;
        f.id = "flow_" + std::to_string(li + 1);
        f.from = l.from;
        f.to = l.to;
        if (l.guard) f.condition_text = render_condition_list(*l.guard);
        f.is_default = l.is_default;
        f.target_row = l.target_row;
        doc.flows.push_back(std::move(f));
    }
    return doc;
}

/// Scenario "BPMN representation of one table": an exclusive gateway fans out
/// one branch per rule row; each branch carries the row's conditions on its
/// flow, runs a task describing the row's decisions, and merges again.
inline BpmnDocument export_bpmn_rulelevel(const Model& model, const std::string& table_name) {
    BpmnDocument doc;
    auto validation = validate_model(model);
    if (has_errors(validation)) {
        doc.diagnostics = std::move(validation);
        return doc;
    }
    const Table* table = model.find_table(table_name);
    if (!table) {
        doc.diagnostics.push_back({Severity::error, "unknown-table",
                                   "model has no table \"" + table_name + "\"", "tables"});
        return doc;
    }
    doc.process_id = model.name + "_" + table->name;
    doc.process_name = doc.process_id;

    doc.elements.push_back({"start", BpmnKind::start_event, "", {}, {}});
    doc.elements.push_back({"split", BpmnKind::exclusive_gateway, "", {}, {}});
    for (const RuleRow& row : table->rows) {
        std::string decisions;
        for (std::size_t i = 0; i < row.decisions.size(); ++i)
            decisions += (i ? ", " : "") + row.decisions[i].attribute + "=" +
                         value_text(row.decisions[i].value);
        doc.elements.push_back({"row" + std::to_string(row.row_id), BpmnKind::task,
                                "row" + std::to_string(row.row_id) + ": set " + decisions,
                                {}, {}});
    }
    doc.elements.push_back({"merge", BpmnKind::exclusive_gateway, "", {}, {}});
    doc.elements.push_back({"end", BpmnKind::end_event, "", {}, {}});

    int flow_no = 1;
    auto flow_id = [&]() { return "flow_" + std::to_string(flow_no++); };
    doc.flows.push_back({flow_id(), "start", "split", {}, false, {}});
    for (const RuleRow& row : table->rows) {
        const std::string task = "row" + std::to_string(row.row_id);
        doc.flows.push_back({flow_id(), "split", task, render_condition_list(row.conditions),
                             false, {}});
        doc.flows.push_back({flow_id(), task, "merge", {}, false, {}});
    }
    doc.flows.push_back({flow_id(), "merge", "end", {}, false, {}});
    return doc;
}

/// Deterministic BPMN XML: a single process under `<definitions>`.
inline std::string render_bpmn_xml(const BpmnDocument& doc) {
    using detail::xml_escape;
    std::ostringstream xml;
    xml << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    xml << "<definitions>\n";
    xml << "  <process id=\"" << xml_escape(doc.process_id) << "\" name=\""
        << xml_escape(doc.process_name) << "\">\n";
    for (const BpmnElement& e : doc.elements) {
        const char* tag = nullptr;
        switch (e.kind) {
            case BpmnKind::start_event: tag = "startEvent"; break;
            case BpmnKind::end_event: tag = "endEvent"; break;
            case BpmnKind::task: tag = "task"; break;
            case BpmnKind::parallel_gateway: tag = "parallelGateway"; break;
            case BpmnKind::exclusive_gateway: tag = "exclusiveGateway"; break;
        }
        xml << "    <" << tag << " id=\"" << xml_escape(e.id) << "\"";
        if (!e.name.empty()) xml << " name=\"" << xml_escape(e.name) << "\"";
        if (e.join_semantics) {
            xml << " joinSemantics=\""
                << (*e.join_semantics == JoinKind::OR ? "OR" : "N_OF_M") << "\"";
            if (e.n) xml << " n=\"" << *e.n << "\"";
        }
        xml << "/>\n";
    }
    for (const BpmnFlow& f : doc.flows) {
        xml << "    <sequenceFlow id=\"" << xml_escape(f.id) << "\" sourceRef=\""
            << xml_escape(f.from) << "\" targetRef=\"" << xml_escape(f.to) << "\"";
        if (f.is_default) xml << " isDefault=\"true\"";
        if (f.target_row) xml << " targetRow=\"" << *f.target_row << "\"";
        if (!f.condition_text) {
            xml << "/>\n";
        } else {
            xml << ">\n      <conditionExpression>" << xml_escape(*f.condition_text)
                << "</conditionExpression>\n    </sequenceFlow>\n";
        }
    }
    xml << "  </process>\n";
    xml << "</definitions>\n";
    return xml.str();
}

}  // namespace xtt
