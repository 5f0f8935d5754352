#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xtt/model.hpp"

namespace xtt {

/// Partial assignment of attribute values; the runtime workspace.
struct Valuation {
    std::map<std::string, Value> bindings;

    bool bound(const std::string& attribute) const { return bindings.count(attribute) > 0; }

    const Value* get(const std::string& attribute) const {
        auto it = bindings.find(attribute);
        return it == bindings.end() ? nullptr : &it->second;
    }

    void set(const std::string& attribute, Value v) { bindings[attribute] = std::move(v); }

    bool operator==(const Valuation&) const = default;
};

/// ANY holds vacuously, even for unbound attributes; every other operator
/// fails on an unbound attribute.
inline bool eval_condition(const ConditionCell& cell, const Valuation& v) {
    if (cell.op == Operator::any) return true;
    const Value* bound = v.get(cell.attribute);
    if (!bound) return false;

    switch (cell.op) {
        case Operator::eq:
        case Operator::neq: {
            const Value* operand = std::get_if<Value>(&cell.operand);
            if (!operand) return false;
            const bool equal = *bound == *operand;
            return cell.op == Operator::eq ? equal : !equal;
        }
        case Operator::lt:
        case Operator::gt:
        case Operator::leq:
        case Operator::geq: {
            const Value* operand = std::get_if<Value>(&cell.operand);
            if (!operand || !is_int(*bound) || !is_int(*operand)) return false;
            const std::int64_t a = as_int(*bound), b = as_int(*operand);
            switch (cell.op) {
                case Operator::lt: return a < b;
                case Operator::gt: return a > b;
                case Operator::leq: return a <= b;
                default: return a >= b;
            }
        }
        case Operator::in:
        case Operator::notin: {
            bool member = false;
            if (const Interval* iv = std::get_if<Interval>(&cell.operand))
                member = is_int(*bound) && iv->contains(as_int(*bound));
            else if (const ValueSet* vs = std::get_if<ValueSet>(&cell.operand))
                member = std::find(vs->begin(), vs->end(), *bound) != vs->end();
            else
                return false;
            return cell.op == Operator::in ? member : !member;
        }
        default: return false;
    }
}

inline bool row_matches(const RuleRow& row, const Valuation& v) {
    return std::all_of(row.conditions.begin(), row.conditions.end(),
                       [&](const ConditionCell& c) { return eval_condition(c, v); });
}

struct TableResult {
    std::vector<int> fired_rows;
    Valuation valuation_after;
};

/// Tests rows in document order against the entering valuation (intermediate
/// decision writes never feed back into condition tests within one call).
/// Decisions of fired rows apply in row order, then decision-column order;
/// later writes overwrite earlier ones.
inline TableResult evaluate_table(const Table& table, const Valuation& v,
                                  const std::optional<std::set<int>>& restrict_to = std::nullopt) {
    TableResult result;
    result.valuation_after = v;
    for (const RuleRow& row : table.rows) {
        if (restrict_to && !restrict_to->count(row.row_id)) continue;
        if (!row_matches(row, v)) continue;
        result.fired_rows.push_back(row.row_id);
        for (const DecisionCell& d : row.decisions)
            result.valuation_after.set(d.attribute, d.value);
        if (table.match_policy == MatchPolicy::first_hit) break;
    }
    return result;
}

enum class EventKind { entered, fired_rows, split_dispatch, join_satisfied, absorbed };

struct TraceStep {
    std::string node_id;
    EventKind kind = EventKind::entered;
    std::vector<int> rows;              // fired_rows only
    std::vector<std::string> targets;   // split_dispatch only: to-node ids in dispatch order

    bool operator==(const TraceStep&) const = default;
};

struct InferenceTrace {
    std::vector<TraceStep> steps;

    bool operator==(const InferenceTrace&) const = default;
};

/// One line per step: `<stepNo> <nodeId> <event>`.
inline std::string render_trace(const InferenceTrace& trace) {
    std::ostringstream out;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& s = trace.steps[i];
        out << (i + 1) << ' ' << s.node_id << ' ';
        switch (s.kind) {
            case EventKind::entered: out << "entered"; break;
            case EventKind::fired_rows: {
                out << "fired-rows(";
                for (std::size_t k = 0; k < s.rows.size(); ++k)
                    out << (k ? "," : "") << s.rows[k];
                out << ")";
                break;
            }
            case EventKind::split_dispatch: {
                out << "split-dispatch(";
                for (std::size_t k = 0; k < s.targets.size(); ++k)
                    out << (k ? "," : "") << s.targets[k];
                out << ")";
                break;
            }
            case EventKind::join_satisfied: out << "join-satisfied"; break;
            case EventKind::absorbed: out << "absorbed"; break;
        }
        out << '\n';
    }
    return out.str();
}

struct RunResult {
    Valuation final_valuation;
    InferenceTrace trace;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

namespace detail {

// Deterministic token interpreter. Branches fork depth-first in link
// declaration order against one shared valuation; table-ref nodes with
// several incoming links synchronize like AND joins (connections are AND by
// default), and several outgoing links replicate the token like an AND split.
class TokenEngine {
public:
    TokenEngine(const Model& model, Valuation initial, std::set<std::string> passive_tables = {})
        : model_(model), valuation_(std::move(initial)), passive_(std::move(passive_tables)) {
        for (const auto& n : model.nodes) {
            incoming_[n.id] = model.incoming_links(n.id);
            outgoing_[n.id] = model.outgoing_links(n.id);
        }
    }

    RunResult run() {
        const FlowNode* start = nullptr;
        for (const auto& n : model_.nodes)
            if (n.kind == NodeKind::start) start = &n;
        if (!start) {
            diag("missing-start", "model has no start node", "flow");
            return finish();
        }
        arrive(*start, nullptr);
        // Tokens still parked at an unsatisfied join (or stranded before an
        // end node) mean the run did not complete.
        if (!aborted_) {
            for (const auto& n : model_.nodes) {
                auto it = gates_.find(n.id);
                if (it != gates_.end() && !it->second.fired && !it->second.arrived.empty())
                    diag("deadlock", "join \"" + n.id + "\" never satisfied", "flow.nodes[" + n.id + "]");
            }
            for (const auto& id : stranded_)
                diag("deadlock", "token stranded at \"" + id + "\" with no outgoing link",
                     "flow.nodes[" + id + "]");
        }
        return finish();
    }

private:
    struct GateState {
        std::set<std::size_t> arrived;  // link indices seen so far
        bool fired = false;
    };

    void diag(std::string code, std::string message, std::string location) {
        result_.diagnostics.push_back(
            {Severity::error, std::move(code), std::move(message), std::move(location)});
    }

    void step(const std::string& node_id, EventKind kind, std::vector<int> rows = {},
              std::vector<std::string> targets = {}) {
        result_.trace.steps.push_back({node_id, kind, std::move(rows), std::move(targets)});
    }

    RunResult finish() {
        result_.final_valuation = valuation_;
        return result_;
    }

    void dispatch(const FlowNode& node, const std::vector<std::size_t>& link_indices,
                  bool always_announce) {
        if (link_indices.empty()) {
            if (node.kind != NodeKind::end) stranded_.push_back(node.id);
            return;
        }
        if (always_announce || link_indices.size() > 1) {
            std::vector<std::string> targets;
            for (std::size_t li : link_indices) targets.push_back(model_.links[li].to);
            step(node.id, EventKind::split_dispatch, {}, std::move(targets));
        }
        for (std::size_t li : link_indices) {
            if (aborted_) return;
            const FlowNode* to = model_.find_node(model_.links[li].to);
            if (to) arrive(*to, &model_.links[li]);
        }
    }

    void arrive(const FlowNode& node, const Link* via) {
        if (aborted_) return;
        step(node.id, EventKind::entered);
        switch (node.kind) {
            case NodeKind::start:
            case NodeKind::end:
                dispatch(node, outgoing_[node.id], false);
                return;
            case NodeKind::table_ref: arrive_table(node, via); return;
            case NodeKind::split: arrive_split(node); return;
            case NodeKind::join: arrive_join(node, via); return;
        }
    }

    std::size_t link_index(const Link* link) const {
        return static_cast<std::size_t>(link - model_.links.data());
    }

    void arrive_table(const FlowNode& node, const Link* via) {
        const auto& in = incoming_[node.id];
        std::optional<std::set<int>> restrict_to;
        if (in.size() > 1) {
            GateState& gate = gates_[node.id];
            if (gate.fired) {
                step(node.id, EventKind::absorbed);
                return;
            }
            if (via) gate.arrived.insert(link_index(via));
            if (gate.arrived.size() < in.size()) return;  // wait for the remaining links
            gate.fired = true;
            // Row restriction only applies when every synchronized link is
            // row-targeted; one untargeted link already asks for the whole table.
            std::set<int> rows;
            bool all_targeted = true;
            for (std::size_t li : gate.arrived) {
                if (model_.links[li].target_row)
                    rows.insert(*model_.links[li].target_row);
                else
                    all_targeted = false;
            }
            if (all_targeted && !rows.empty()) restrict_to = std::move(rows);
        } else if (via && via->target_row) {
            restrict_to = std::set<int>{*via->target_row};
        }

        if (!passive_.count(node.table_name)) {
            const Table* table = model_.find_table(node.table_name);
            if (table) {
                TableResult r = evaluate_table(*table, valuation_, restrict_to);
                step(node.id, EventKind::fired_rows, r.fired_rows);
                valuation_ = std::move(r.valuation_after);
            }
        }
        dispatch(node, outgoing_[node.id], false);
    }

    void arrive_split(const FlowNode& node) {
        const auto& out = outgoing_[node.id];
        if (node.split_kind == SplitKind::AND) {
            dispatch(node, out, true);
            return;
        }
        // XOR: first branch (declaration order) whose guard holds; a branch
        // without a guard counts as unconditionally satisfied; otherwise the
        // default branch.
        std::optional<std::size_t> chosen;
        for (std::size_t li : out) {
            const Link& l = model_.links[li];
            if (l.is_default) continue;
            const bool satisfied =
                !l.guard || std::all_of(l.guard->begin(), l.guard->end(), [&](const ConditionCell& c) {
                    return eval_condition(c, valuation_);
                });
            if (satisfied) {
                chosen = li;
                break;
            }
        }
        if (!chosen) {
            for (std::size_t li : out)
                if (model_.links[li].is_default) {
                    chosen = li;
                    break;
                }
        }
        if (!chosen) {
            diag("xor-stuck", "no guard satisfied and no default branch at \"" + node.id + "\"",
                 "flow.nodes[" + node.id + "]");
            aborted_ = true;
            return;
        }
        dispatch(node, {*chosen}, true);
    }

    void arrive_join(const FlowNode& node, const Link* via) {
        GateState& gate = gates_[node.id];
        if (gate.fired) {
            step(node.id, EventKind::absorbed);
            return;
        }
        if (via) gate.arrived.insert(link_index(via));
        const std::size_t in_degree = incoming_[node.id].size();
        const std::size_t needed = node.join_kind == JoinKind::AND ? in_degree
                                   : node.join_kind == JoinKind::OR
                                       ? 1
                                       : static_cast<std::size_t>(node.n.value_or(1));
        if (gate.arrived.size() < needed) return;
        gate.fired = true;
        step(node.id, EventKind::join_satisfied);
        dispatch(node, outgoing_[node.id], false);
    }

    const Model& model_;
    Valuation valuation_;
    std::set<std::string> passive_;
    std::map<std::string, std::vector<std::size_t>> incoming_, outgoing_;
    std::map<std::string, GateState> gates_;
    std::vector<std::string> stranded_;
    RunResult result_;
    bool aborted_ = false;
};

}  // namespace detail

/// Forward (data-driven) run over the whole flow.
inline RunResult run_forward(const Model& model, const Valuation& initial) {
    return detail::TokenEngine(model, initial).run();
}

struct GoalRunResult {
    Valuation final_valuation;
    InferenceTrace trace;
    std::vector<std::string> slice;  // sliced table names, model order
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Computes the backward slice of tables that can contribute to binding
/// `goal` (through decision -> condition dependencies, plus the guard
/// attributes of XOR splits that route towards sliced tables), then runs
/// forward with every other table passed through unevaluated.
inline GoalRunResult run_goal_driven(const Model& model, const std::string& goal,
                                     const Valuation& initial) {
    GoalRunResult result;

    bool decided_somewhere = false;
    for (const auto& t : model.tables)
        decided_somewhere |= std::find(t.decision_columns.begin(), t.decision_columns.end(),
                                       goal) != t.decision_columns.end();
    if (!decided_somewhere) {
        result.diagnostics.push_back({Severity::error, "unknown-goal",
                                      "no table decides attribute \"" + goal + "\"", "goal"});
        return result;
    }

    // Node reachability, for pulling XOR guard attributes into the slice.
    std::map<std::string, std::set<std::string>> reachable;
    for (const auto& n : model.nodes) {
        std::set<std::string>& seen = reachable[n.id];
        std::vector<std::string> frontier{n.id};
        while (!frontier.empty()) {
            std::string cur = frontier.back();
            frontier.pop_back();
            for (std::size_t li : model.outgoing_links(cur))
                if (seen.insert(model.links[li].to).second) frontier.push_back(model.links[li].to);
        }
    }
    std::map<std::string, std::string> node_of_table;
    for (const auto& n : model.nodes)
        if (n.kind == NodeKind::table_ref) node_of_table[n.table_name] = n.id;

    std::set<std::string> needed{goal};
    std::set<std::string> sliced;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& t : model.tables) {
            if (sliced.count(t.name)) continue;
            const bool decides_needed =
                std::any_of(t.decision_columns.begin(), t.decision_columns.end(),
                            [&](const std::string& c) { return needed.count(c) > 0; });
            if (!decides_needed) continue;
            sliced.insert(t.name);
            changed = true;
            for (const auto& c : t.condition_columns) needed.insert(c);
        }
        for (const auto& n : model.nodes) {
            if (n.kind != NodeKind::split || n.split_kind != SplitKind::XOR) continue;
            const bool routes_to_slice =
                std::any_of(sliced.begin(), sliced.end(), [&](const std::string& t) {
                    auto it = node_of_table.find(t);
                    return it != node_of_table.end() && reachable[n.id].count(it->second) > 0;
                });
            if (!routes_to_slice) continue;
            for (std::size_t li : model.outgoing_links(n.id)) {
                if (!model.links[li].guard) continue;
                for (const auto& cell : *model.links[li].guard)
                    changed |= needed.insert(cell.attribute).second;
            }
        }
    }

    std::set<std::string> passive;
    for (const auto& t : model.tables) {
        if (sliced.count(t.name))
            result.slice.push_back(t.name);
        else
            passive.insert(t.name);
    }

    RunResult run = detail::TokenEngine(model, initial, std::move(passive)).run();
    result.final_valuation = std::move(run.final_valuation);
    result.trace = std::move(run.trace);
    result.diagnostics = std::move(run.diagnostics);
    if (!result.final_valuation.bound(goal))
        result.diagnostics.push_back({Severity::error, "goal-undetermined",
                                      "run finished without binding \"" + goal + "\"", "goal"});
    return result;
}

}  // namespace xtt
