#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "xtt/xtt.hpp"

namespace testutil {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Compact builders for hand-made models.

inline xtt::FlowNode node_start(std::string id) {
    xtt::FlowNode n;
    n.id = std::move(id);
    n.kind = xtt::NodeKind::start;
    return n;
}

inline xtt::FlowNode node_end(std::string id) {
    xtt::FlowNode n;
    n.id = std::move(id);
    n.kind = xtt::NodeKind::end;
    return n;
}

inline xtt::FlowNode node_table(std::string id, std::string table) {
    xtt::FlowNode n;
    n.id = std::move(id);
    n.kind = xtt::NodeKind::table_ref;
    n.table_name = std::move(table);
    return n;
}

inline xtt::FlowNode node_split(std::string id, xtt::SplitKind kind) {
    xtt::FlowNode n;
    n.id = std::move(id);
    n.kind = xtt::NodeKind::split;
    n.split_kind = kind;
    return n;
}

inline xtt::FlowNode node_join(std::string id, xtt::JoinKind kind, std::optional<int> n_of_m = {}) {
    xtt::FlowNode n;
    n.id = std::move(id);
    n.kind = xtt::NodeKind::join;
    n.join_kind = kind;
    n.n = n_of_m;
    return n;
}

inline xtt::Link link(std::string from, std::string to) {
    xtt::Link l;
    l.from = std::move(from);
    l.to = std::move(to);
    return l;
}

inline xtt::Link link_row(std::string from, std::string to, int row) {
    xtt::Link l = link(std::move(from), std::move(to));
    l.target_row = row;
    return l;
}

inline xtt::Link link_guard(std::string from, std::string to,
                            std::vector<xtt::ConditionCell> guard) {
    xtt::Link l = link(std::move(from), std::move(to));
    l.guard = std::move(guard);
    return l;
}

inline xtt::Link link_default(std::string from, std::string to) {
    xtt::Link l = link(std::move(from), std::move(to));
    l.is_default = true;
    return l;
}

inline xtt::ConditionCell cc(std::string attr, xtt::Operator op, xtt::Operand operand = {}) {
    return {std::move(attr), op, std::move(operand)};
}

inline xtt::ConditionCell cc_any(std::string attr) { return cc(std::move(attr), xtt::Operator::any); }

inline xtt::RuleRow rule(int id, std::vector<xtt::ConditionCell> conds,
                         std::vector<xtt::DecisionCell> decs) {
    return {std::move(conds), std::move(decs), id};
}

/// The four-row thermostat table model, built directly.
inline xtt::Model thermostat_model() {
    using namespace xtt;
    Model m;
    m.name = "thermostat";
    m.attributes = {
        {"today", Domain::make_symbolic({"workday", "weekend"})},
        {"hour", Domain::make_range(0, 23)},
        {"operation", Domain::make_symbolic({"nbizhrs", "bizhrs"})},
    };
    Table t;
    t.name = "thermostat";
    t.condition_columns = {"today", "hour"};
    t.decision_columns = {"operation"};
    t.rows = {
        rule(1, {cc("today", Operator::eq, Value{"workday"}), cc("hour", Operator::gt, Value{std::int64_t{17}})},
             {{"operation", Value{"nbizhrs"}}}),
        rule(2, {cc("today", Operator::eq, Value{"weekend"}), cc_any("hour")},
             {{"operation", Value{"nbizhrs"}}}),
        rule(3, {cc("today", Operator::eq, Value{"workday"}), cc("hour", Operator::lt, Value{std::int64_t{9}})},
             {{"operation", Value{"nbizhrs"}}}),
        rule(4, {cc("today", Operator::eq, Value{"workday"}), cc("hour", Operator::in, Interval{9, 17})},
             {{"operation", Value{"bizhrs"}}}),
    };
    m.tables = {t};
    m.nodes = {node_start("start"), node_table("thermostat", "thermostat"), node_end("end")};
    m.links = {link("start", "thermostat"), link("thermostat", "end")};
    return m;
}

/// Reference predicate for the thermostat table, written down independently
/// before the engine: non-business hours exactly on weekends and outside
/// 9..17 on workdays.
inline std::string thermostat_reference(const std::string& today, std::int64_t hour) {
    if (today == "weekend" || hour < 9 || hour > 17) return "nbizhrs";
    return "bizhrs";
}

}  // namespace testutil
