#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "xtt/model.hpp"

namespace xtt {

namespace detail {

// Diagnostics are emitted in model order: attributes, tables (columns, then
// rows, then cells), flow nodes, links, then model-level cross checks anchored
// back at the offending table or node. The sort key mirrors that order so the
// final list is stable regardless of check order.
struct OrderedDiag {
    std::tuple<int, std::size_t, std::size_t, std::size_t> key;
    Diagnostic diag;
};

class DiagSink {
public:
    void add(std::tuple<int, std::size_t, std::size_t, std::size_t> key, std::string code,
             std::string message, std::string location) {
        entries_.push_back({key, Diagnostic{Severity::error, std::move(code), std::move(message),
                                            std::move(location)}});
    }

    std::vector<Diagnostic> sorted() {
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const OrderedDiag& a, const OrderedDiag& b) { return a.key < b.key; });
        std::vector<Diagnostic> out;
        out.reserve(entries_.size());
        for (auto& e : entries_) out.push_back(std::move(e.diag));
        return out;
    }

private:
    std::vector<OrderedDiag> entries_;
};

inline std::string loc_attribute(const AttributeDef& a, std::size_t index) {
    if (is_identifier(a.name)) return "attributes[" + a.name + "]";
    return "attributes[#" + std::to_string(index + 1) + "]";
}

inline std::string loc_table(const Table& t, std::size_t index) {
    if (is_identifier(t.name)) return "tables[" + t.name + "]";
    return "tables[#" + std::to_string(index + 1) + "]";
}

inline std::string loc_node(const FlowNode& n, std::size_t index) {
    if (is_identifier(n.id)) return "flow.nodes[" + n.id + "]";
    return "flow.nodes[#" + std::to_string(index + 1) + "]";
}

inline std::string loc_link(std::size_t index) {
    return "flow.links[" + std::to_string(index + 1) + "]";
}

// Shared by table cells and link guards.
inline void check_condition_cell(const Model& m, const ConditionCell& cell,
                                 const std::string& loc, DiagSink& sink,
                                 std::tuple<int, std::size_t, std::size_t, std::size_t> key) {
    const AttributeDef* attr = m.find_attribute(cell.attribute);
    if (!attr) {
        sink.add(key, "unknown-attribute", "condition refers to undeclared attribute \"" +
                 cell.attribute + "\"", loc);
        return;
    }
    const Domain& dom = attr->domain;
    const bool relational = cell.op == Operator::lt || cell.op == Operator::gt ||
                            cell.op == Operator::leq || cell.op == Operator::geq;
    if (relational && dom.kind != DomainKind::integer_range) {
        sink.add(key, "operator-domain-mismatch",
                 std::string(operator_name(cell.op)) + " requires an integer-range domain", loc);
        return;
    }
    switch (cell.op) {
        case Operator::any:
            if (!operand_absent(cell.operand))
                sink.add(key, "unexpected-operand", "operator any takes no operand", loc);
            break;
        case Operator::eq:
        case Operator::neq:
        case Operator::lt:
        case Operator::gt:
        case Operator::leq:
        case Operator::geq: {
            const Value* v = std::get_if<Value>(&cell.operand);
            if (!v) {
                sink.add(key, operand_absent(cell.operand) ? "missing-operand" : "bad-operand-shape",
                         std::string(operator_name(cell.op)) + " requires a single value operand",
                         loc);
                break;
            }
            if (!dom.contains(*v))
                sink.add(key, "value-out-of-domain",
                         "value " + value_text(*v) + " outside domain of " + cell.attribute, loc);
            break;
        }
        case Operator::in:
        case Operator::notin: {
            if (const Interval* iv = std::get_if<Interval>(&cell.operand)) {
                if (dom.kind != DomainKind::integer_range)
                    sink.add(key, "bad-interval",
                             "interval operand requires an integer-range domain", loc);
                else if (iv->lo > iv->hi)
                    sink.add(key, "bad-interval", "interval bounds must satisfy lo <= hi", loc);
                else if (iv->lo < dom.lo || iv->hi > dom.hi)
                    sink.add(key, "bad-interval",
                             "interval [" + std::to_string(iv->lo) + "," + std::to_string(iv->hi) +
                             "] outside domain of " + cell.attribute, loc);
            } else if (const ValueSet* vs = std::get_if<ValueSet>(&cell.operand)) {
                for (const Value& v : *vs)
                    if (!dom.contains(v))
                        sink.add(key, "value-out-of-domain",
                                 "value " + value_text(v) + " outside domain of " + cell.attribute,
                                 loc);
            } else {
                sink.add(key, operand_absent(cell.operand) ? "missing-operand" : "bad-operand-shape",
                         std::string(operator_name(cell.op)) +
                         " requires a value set or interval operand", loc);
            }
            break;
        }
    }
}

}  // namespace detail

/// Structural validation. Returns an empty list exactly when every model
/// invariant holds; all diagnostics are errors, deterministic, and ordered
/// by model location.
inline std::vector<Diagnostic> validate_model(const Model& m) {
    using detail::DiagSink;
    DiagSink sink;
    const std::size_t kLast = 9999;

    // Attributes.
    {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < m.attributes.size(); ++i) {
            const AttributeDef& a = m.attributes[i];
            const std::string loc = detail::loc_attribute(a, i);
            auto key = std::make_tuple(0, i, std::size_t{0}, std::size_t{0});
            if (!is_identifier(a.name))
                sink.add(key, "bad-attribute-name",
                         "attribute name \"" + a.name + "\" is not an identifier", loc);
            else if (!seen.insert(a.name).second)
                sink.add(key, "duplicate-attribute", "attribute \"" + a.name + "\" declared twice",
                         loc);
            const Domain& d = a.domain;
            if (d.kind == DomainKind::symbolic) {
                if (d.symbols.empty())
                    sink.add(key, "empty-domain", "symbolic domain needs at least one symbol", loc);
                std::set<std::string> syms;
                for (const auto& s : d.symbols) {
                    if (!is_identifier(s))
                        sink.add(key, "bad-symbol", "symbol \"" + s + "\" is not an identifier",
                                 loc);
                    else if (!syms.insert(s).second)
                        sink.add(key, "duplicate-symbol", "symbol \"" + s + "\" listed twice", loc);
                }
            } else if (d.lo > d.hi) {
                sink.add(key, "bad-range", "integer range needs lo <= hi", loc);
            }
        }
    }

    // Tables.
    {
        std::set<std::string> seen;
        for (std::size_t ti = 0; ti < m.tables.size(); ++ti) {
            const Table& t = m.tables[ti];
            const std::string loc = detail::loc_table(t, ti);
            auto tkey = [&](std::size_t a, std::size_t b) { return std::make_tuple(1, ti, a, b); };
            if (!is_identifier(t.name))
                sink.add(tkey(0, 0), "bad-table-name",
                         "table name \"" + t.name + "\" is not an identifier", loc);
            else if (!seen.insert(t.name).second)
                sink.add(tkey(0, 0), "duplicate-table", "table \"" + t.name + "\" declared twice",
                         loc);
            if (t.decision_columns.empty())
                sink.add(tkey(0, 1), "no-decision-columns",
                         "table needs at least one decision column", loc);
            if (t.rows.empty())
                sink.add(tkey(0, 2), "no-rows", "table needs at least one row", loc);

            std::set<std::string> cols;
            for (const auto& c : t.condition_columns) {
                if (!m.find_attribute(c))
                    sink.add(tkey(1, 0), "unknown-attribute",
                             "condition column refers to undeclared attribute \"" + c + "\"", loc);
                if (!cols.insert(c).second)
                    sink.add(tkey(1, 0), "duplicate-column",
                             "attribute \"" + c + "\" appears in two columns", loc);
            }
            for (const auto& c : t.decision_columns) {
                if (!m.find_attribute(c))
                    sink.add(tkey(1, 1), "unknown-attribute",
                             "decision column refers to undeclared attribute \"" + c + "\"", loc);
                if (!cols.insert(c).second)
                    sink.add(tkey(1, 1), "duplicate-column",
                             "attribute \"" + c + "\" appears in two columns", loc);
            }

            for (std::size_t ri = 0; ri < t.rows.size(); ++ri) {
                const RuleRow& row = t.rows[ri];
                const std::string rloc = loc + ".rows[" + std::to_string(ri + 1) + "]";
                auto rkey = [&](std::size_t b) { return std::make_tuple(1, ti, 2 + ri, b); };
                if (row.row_id != static_cast<int>(ri + 1))
                    sink.add(rkey(0), "bad-row-id",
                             "rowId " + std::to_string(row.row_id) + " does not match position " +
                             std::to_string(ri + 1), rloc);
                if (row.conditions.size() != t.condition_columns.size() ||
                    row.decisions.size() != t.decision_columns.size()) {
                    sink.add(rkey(0), "row-arity", "cell counts do not match the table schema",
                             rloc);
                    continue;  // aligned checks below assume matching arity
                }
                for (std::size_t ci = 0; ci < row.conditions.size(); ++ci) {
                    const ConditionCell& cell = row.conditions[ci];
                    const std::string cloc = rloc + ".conditions[" + std::to_string(ci + 1) + "]";
                    if (cell.attribute != t.condition_columns[ci]) {
                        sink.add(rkey(1 + ci), "cell-attribute-mismatch",
                                 "cell attribute \"" + cell.attribute +
                                 "\" does not match column \"" + t.condition_columns[ci] + "\"",
                                 cloc);
                        continue;
                    }
                    detail::check_condition_cell(m, cell, cloc, sink, rkey(1 + ci));
                }
                for (std::size_t di = 0; di < row.decisions.size(); ++di) {
                    const DecisionCell& cell = row.decisions[di];
                    const std::string dloc = rloc + ".decisions[" + std::to_string(di + 1) + "]";
                    auto dkey = rkey(1 + row.conditions.size() + di);
                    if (cell.attribute != t.decision_columns[di]) {
                        sink.add(dkey, "cell-attribute-mismatch",
                                 "cell attribute \"" + cell.attribute +
                                 "\" does not match column \"" + t.decision_columns[di] + "\"",
                                 dloc);
                        continue;
                    }
                    const AttributeDef* attr = m.find_attribute(cell.attribute);
                    if (!attr) continue;  // reported at the column
                    if (!attr->domain.contains(cell.value))
                        sink.add(dkey, "value-out-of-domain",
                                 "value " + value_text(cell.value) + " outside domain of " +
                                 cell.attribute, dloc);
                }
            }
        }
    }

    // Flow nodes.
    {
        std::set<std::string> seen;
        std::size_t starts = 0, ends = 0;
        std::map<std::string, std::vector<std::size_t>> refs_per_table;
        for (std::size_t ni = 0; ni < m.nodes.size(); ++ni) {
            const FlowNode& n = m.nodes[ni];
            const std::string loc = detail::loc_node(n, ni);
            auto key = std::make_tuple(2, ni, std::size_t{0}, std::size_t{0});
            if (!is_identifier(n.id))
                sink.add(key, "bad-node-id", "node id \"" + n.id + "\" is not an identifier", loc);
            else if (!seen.insert(n.id).second)
                sink.add(key, "duplicate-node", "node id \"" + n.id + "\" declared twice", loc);

            const bool is_table_ref = n.kind == NodeKind::table_ref;
            const bool is_split = n.kind == NodeKind::split;
            const bool is_join = n.kind == NodeKind::join;
            if (is_table_ref) {
                if (!m.find_table(n.table_name))
                    sink.add(key, "unknown-table-ref",
                             "table-ref names unknown table \"" + n.table_name + "\"", loc);
                else
                    refs_per_table[n.table_name].push_back(ni);
            } else if (!n.table_name.empty()) {
                sink.add(key, "bad-node-shape", "tableName is only valid on table-ref nodes", loc);
            }
            if (is_split != n.split_kind.has_value())
                sink.add(key, "bad-node-shape", "splitKind is required on split nodes only", loc);
            if (is_join != n.join_kind.has_value())
                sink.add(key, "bad-node-shape", "joinKind is required on join nodes only", loc);
            const bool n_of_m = is_join && n.join_kind == JoinKind::N_OF_M;
            if (n.n.has_value() != n_of_m)
                sink.add(key, "bad-node-shape", "n is required on N-OF-M joins only", loc);
            else if (n_of_m && *n.n < 1)
                sink.add(key, "bad-n", "n must be positive", loc);

            if (n.kind == NodeKind::start) ++starts;
            if (n.kind == NodeKind::end) ++ends;
            if (n.kind == NodeKind::start && starts > 1)
                sink.add(key, "multiple-start", "model has more than one start node", loc);
        }
        if (starts == 0)
            sink.add(std::make_tuple(2, kLast, std::size_t{0}, std::size_t{0}), "missing-start",
                     "model has no start node", "flow");
        if (ends == 0)
            sink.add(std::make_tuple(2, kLast, std::size_t{0}, std::size_t{1}), "missing-end",
                     "model has no end node", "flow");

        // Every table is the target of exactly one table-ref node.
        for (std::size_t ti = 0; ti < m.tables.size(); ++ti) {
            const Table& t = m.tables[ti];
            auto it = refs_per_table.find(t.name);
            const std::size_t count = it == refs_per_table.end() ? 0 : it->second.size();
            auto key = std::make_tuple(1, ti, kLast, std::size_t{0});
            if (count == 0)
                sink.add(key, "table-unreferenced",
                         "table \"" + t.name + "\" has no table-ref node",
                         detail::loc_table(t, ti));
            else if (count > 1)
                sink.add(key, "table-multiply-referenced",
                         "table \"" + t.name + "\" is referenced by " + std::to_string(count) +
                         " nodes", detail::loc_table(t, ti));
        }
    }

    // Links.
    {
        std::map<std::string, std::size_t> defaults_per_split;
        for (std::size_t li = 0; li < m.links.size(); ++li) {
            const Link& l = m.links[li];
            const std::string loc = detail::loc_link(li);
            auto key = [&](std::size_t b) { return std::make_tuple(3, li, b, std::size_t{0}); };
            const FlowNode* from = m.find_node(l.from);
            const FlowNode* to = m.find_node(l.to);
            if (!from)
                sink.add(key(0), "unknown-node-ref", "link from unknown node \"" + l.from + "\"",
                         loc);
            if (!to)
                sink.add(key(0), "unknown-node-ref", "link to unknown node \"" + l.to + "\"", loc);
            if (!from || !to) continue;

            if (to->kind == NodeKind::start)
                sink.add(key(1), "start-incoming", "start node cannot have incoming links", loc);
            if (from->kind == NodeKind::end)
                sink.add(key(1), "end-outgoing", "end node cannot have outgoing links", loc);

            if (l.target_row) {
                const Table* t =
                    to->kind == NodeKind::table_ref ? m.find_table(to->table_name) : nullptr;
                if (!t)
                    sink.add(key(2), "bad-target-row",
                             "targetRow is only valid on links into table-ref nodes", loc);
                else if (*l.target_row < 1 || *l.target_row > static_cast<int>(t->rows.size()))
                    sink.add(key(2), "bad-target-row",
                             "targetRow " + std::to_string(*l.target_row) +
                             " is not a row of table \"" + t->name + "\"", loc);
            }

            const bool from_xor = from->kind == NodeKind::split && from->split_kind == SplitKind::XOR;
            if (l.guard && !from_xor)
                sink.add(key(3), "guard-not-xor", "guards are only valid on XOR split branches",
                         loc);
            else if (l.guard) {
                for (std::size_t gi = 0; gi < l.guard->size(); ++gi)
                    detail::check_condition_cell(
                        m, (*l.guard)[gi], loc + ".guard[" + std::to_string(gi + 1) + "]", sink,
                        std::make_tuple(3, li, std::size_t{4}, gi));
            }
            if (l.is_default) {
                if (!from_xor)
                    sink.add(key(5), "default-not-xor",
                             "isDefault is only valid on XOR split branches", loc);
                else if (++defaults_per_split[from->id] > 1)
                    sink.add(key(5), "multiple-default",
                             "XOR split \"" + from->id + "\" has more than one default branch",
                             loc);
            }
        }
    }

    // N-OF-M bounds need link in-degrees, so they come after the link table is known valid-ish.
    for (std::size_t ni = 0; ni < m.nodes.size(); ++ni) {
        const FlowNode& n = m.nodes[ni];
        if (n.kind != NodeKind::join || n.join_kind != JoinKind::N_OF_M || !n.n || *n.n < 1)
            continue;
        const std::size_t in_degree = m.incoming_links(n.id).size();
        if (static_cast<std::size_t>(*n.n) > in_degree)
            sink.add(std::make_tuple(2, ni, std::size_t{1}, std::size_t{0}), "n-exceeds-in-degree",
                     "n=" + std::to_string(*n.n) + " exceeds in-degree " +
                     std::to_string(in_degree), detail::loc_node(n, ni));
    }

    return sink.sorted();
}

}  // namespace xtt
