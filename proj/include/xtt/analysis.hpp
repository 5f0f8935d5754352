#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xtt/drools.hpp"
#include "xtt/inference.hpp"
#include "xtt/model.hpp"

namespace xtt {

inline constexpr std::size_t kDefaultStateBound = 1'000'000;

/// Raised when a table's condition state space exceeds the configured bound.
/// Analysis is exhaustive by contract; it never falls back to sampling.
class StateSpaceTooLarge : public std::runtime_error {
public:
    StateSpaceTooLarge(std::string table, std::size_t size, std::size_t bound)
        : std::runtime_error("state-space-too-large: table \"" + table + "\" has " +
                             std::to_string(size) + " states (bound " + std::to_string(bound) +
                             ")"),
          table_name(std::move(table)),
          size(size) {}

    std::string table_name;
    std::size_t size;
};

namespace detail {

// Odometer over the cross-product of a table's condition-attribute domains,
// in attribute declaration order (first attribute most significant), domain
// values in enumeration order. Visiting order is therefore lexicographic.
class ConditionSpace {
public:
    ConditionSpace(const Table& table, const Model& model, std::size_t bound) {
        for (const auto& a : model.attributes) {
            const bool used = std::find(table.condition_columns.begin(),
                                        table.condition_columns.end(),
                                        a.name) != table.condition_columns.end();
            if (used) attrs_.push_back(&a);
        }
        size_ = 1;
        for (const AttributeDef* a : attrs_) {
            const std::size_t card = a->domain.cardinality();
            if (card != 0 && size_ > std::numeric_limits<std::size_t>::max() / card) {
                size_ = std::numeric_limits<std::size_t>::max();  // saturate
                break;
            }
            size_ *= card;
        }
        if (size_ > bound) throw StateSpaceTooLarge(table.name, size_, bound);
    }

    std::size_t size() const { return size_; }

    /// Calls fn(state) for every state, lexicographically.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        std::vector<std::size_t> odometer(attrs_.size(), 0);
        Valuation state;
        for (std::size_t i = 0; i < attrs_.size(); ++i)
            state.set(attrs_[i]->name, attrs_[i]->domain.value_at(0));
        for (std::size_t count = 0; count < size_; ++count) {
            fn(static_cast<const Valuation&>(state));
            for (std::size_t i = attrs_.size(); i-- > 0;) {
                if (++odometer[i] < attrs_[i]->domain.cardinality()) {
                    state.set(attrs_[i]->name, attrs_[i]->domain.value_at(odometer[i]));
                    break;
                }
                odometer[i] = 0;
                state.set(attrs_[i]->name, attrs_[i]->domain.value_at(0));
            }
        }
    }

private:
    std::vector<const AttributeDef*> attrs_;
    std::size_t size_ = 1;
};

}  // namespace detail

/// All condition states no rule row covers; empty exactly when the table is
/// complete. Exhaustive over the condition cross-product.
inline std::vector<Valuation> check_completeness(const Table& table, const Model& model,
                                                 std::size_t bound = kDefaultStateBound) {
    detail::ConditionSpace space(table, model, bound);
    std::vector<Valuation> witnesses;
    space.for_each([&](const Valuation& state) {
        for (const RuleRow& row : table.rows)
            if (row_matches(row, state)) return;
        witnesses.push_back(state);
    });
    return witnesses;
}

struct Overlap {
    int row_a = 0;
    int row_b = 0;
    Valuation witness;  // lexicographically smallest state matching both rows

    bool operator==(const Overlap&) const = default;
};

/// One entry per unordered row pair that some condition state matches
/// simultaneously, ordered by (rowA, rowB).
inline std::vector<Overlap> check_overlap(const Table& table, const Model& model,
                                          std::size_t bound = kDefaultStateBound) {
    detail::ConditionSpace space(table, model, bound);
    std::map<std::pair<int, int>, Valuation> found;
    std::vector<int> matching;
    space.for_each([&](const Valuation& state) {
        matching.clear();
        for (const RuleRow& row : table.rows)
            if (row_matches(row, state)) matching.push_back(row.row_id);
        for (std::size_t i = 0; i < matching.size(); ++i)
            for (std::size_t j = i + 1; j < matching.size(); ++j)
                found.try_emplace({matching[i], matching[j]}, state);
    });
    std::vector<Overlap> overlaps;
    for (auto& [pair, witness] : found) overlaps.push_back({pair.first, pair.second, witness});
    return overlaps;
}

/// Tables whose table-ref node cannot be reached from the start node.
inline std::vector<std::string> check_reachability(const Model& model) {
    std::set<std::string> reached;
    std::vector<std::string> frontier;
    for (const auto& n : model.nodes)
        if (n.kind == NodeKind::start) {
            reached.insert(n.id);
            frontier.push_back(n.id);
        }
    while (!frontier.empty()) {
        const std::string cur = frontier.back();
        frontier.pop_back();
        for (std::size_t li : model.outgoing_links(cur))
            if (reached.insert(model.links[li].to).second) frontier.push_back(model.links[li].to);
    }
    std::vector<std::string> unreachable;
    for (const auto& t : model.tables) {
        bool ok = false;
        for (const auto& n : model.nodes)
            if (n.kind == NodeKind::table_ref && n.table_name == t.name && reached.count(n.id))
                ok = true;
        if (!ok) unreachable.push_back(t.name);
    }
    return unreachable;
}

struct EquivalenceResult {
    bool equivalent = true;
    std::optional<Valuation> witness;  // first state whose row-match sets differ
};

namespace detail {

// A row under the decomposed plan: conjunction of its populated output-column
// predicates. Empty cells constrain nothing.
inline bool plan_row_matches(const ColumnPlan& plan, std::size_t row_index,
                             const Valuation& state) {
    const auto& cells = plan.row_cells.at(row_index);
    for (std::size_t c = 0; c < plan.columns.size(); ++c) {
        if (!cells[c]) continue;
        const PlanColumn& col = plan.columns[c];
        const Value* bound = state.get(col.attribute);
        if (!bound) return false;
        const Value& lit = *cells[c];
        switch (col.op) {
            case OutputOp::eq_template:
                if (!(*bound == lit)) return false;
                break;
            case OutputOp::gt:
                if (!(is_int(*bound) && is_int(lit) && as_int(*bound) > as_int(lit))) return false;
                break;
            case OutputOp::lt:
                if (!(is_int(*bound) && is_int(lit) && as_int(*bound) < as_int(lit))) return false;
                break;
            case OutputOp::geq:
                if (!(is_int(*bound) && is_int(lit) && as_int(*bound) >= as_int(lit))) return false;
                break;
            case OutputOp::leq:
                if (!(is_int(*bound) && is_int(lit) && as_int(*bound) <= as_int(lit))) return false;
                break;
        }
    }
    return true;
}

}  // namespace detail

/// Exhaustive decomposition oracle: compares, for every condition state, the
/// set of rows matched by the original cells against the set matched by the
/// plan's reconstructed predicates. The first mismatching state is the
/// witness.
inline EquivalenceResult oracle_equivalence(const Table& table, const ColumnPlan& plan,
                                            const Model& model,
                                            std::size_t bound = kDefaultStateBound) {
    detail::ConditionSpace space(table, model, bound);
    EquivalenceResult result;
    space.for_each([&](const Valuation& state) {
        if (!result.equivalent) return;
        for (std::size_t ri = 0; ri < table.rows.size(); ++ri) {
            const bool original = row_matches(table.rows[ri], state);
            const bool reconstructed = detail::plan_row_matches(plan, ri, state);
            if (original != reconstructed) {
                result.equivalent = false;
                result.witness = state;
                return;
            }
        }
    });
    return result;
}

struct AnalysisReport {
    std::string table_name;
    std::vector<Valuation> completeness_witnesses;
    std::vector<Overlap> overlaps;
    std::size_t state_space_size = 0;

    bool clean() const { return completeness_witnesses.empty() && overlaps.empty(); }
};

inline AnalysisReport analyze_table(const Table& table, const Model& model,
                                    std::size_t bound = kDefaultStateBound) {
    AnalysisReport report;
    report.table_name = table.name;
    report.state_space_size = detail::ConditionSpace(table, model, bound).size();
    report.completeness_witnesses = check_completeness(table, model, bound);
    report.overlaps = check_overlap(table, model, bound);
    return report;
}

/// Witness text in attribute declaration order: `attr=value,...`.
inline std::string render_witness(const Valuation& witness, const Model& model) {
    std::string out;
    for (const auto& a : model.attributes) {
        const Value* v = witness.get(a.name);
        if (!v) continue;
        if (!out.empty()) out += ",";
        out += a.name + "=" + value_text(*v);
    }
    return out;
}

/// One line per defect: `<table> <kind> <witness>`.
inline std::string render_report(const AnalysisReport& report, const Model& model) {
    std::ostringstream out;
    for (const Valuation& w : report.completeness_witnesses)
        out << report.table_name << " incomplete " << render_witness(w, model) << "\n";
    for (const Overlap& o : report.overlaps)
        out << report.table_name << " overlap[" << o.row_a << "," << o.row_b << "] "
            << render_witness(o.witness, model) << "\n";
    return out.str();
}

}  // namespace xtt
