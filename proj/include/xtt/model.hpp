#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace xtt {

/// A domain value: an integer or a symbol name.
using Value = std::variant<std::int64_t, std::string>;

inline bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v); }
inline std::int64_t as_int(const Value& v) { return std::get<std::int64_t>(v); }
inline const std::string& as_symbol(const Value& v) { return std::get<std::string>(v); }

inline std::string value_text(const Value& v) {
    return is_int(v) ? std::to_string(as_int(v)) : as_symbol(v);
}

enum class DomainKind { symbolic, integer_range };

/// Finite attribute domain: an ordered symbol list or a closed integer range.
struct Domain {
    DomainKind kind = DomainKind::symbolic;
    std::vector<std::string> symbols;  // symbolic only
    std::int64_t lo = 0;               // integer_range only
    std::int64_t hi = 0;

    static Domain make_symbolic(std::vector<std::string> syms) {
        Domain d;
        d.kind = DomainKind::symbolic;
        d.symbols = std::move(syms);
        return d;
    }

    static Domain make_range(std::int64_t lo, std::int64_t hi) {
        Domain d;
        d.kind = DomainKind::integer_range;
        d.lo = lo;
        d.hi = hi;
        return d;
    }

    std::size_t cardinality() const {
        if (kind == DomainKind::symbolic) return symbols.size();
        return hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0;
    }

    bool contains(const Value& v) const {
        if (kind == DomainKind::symbolic) {
            if (is_int(v)) return false;
            return std::find(symbols.begin(), symbols.end(), as_symbol(v)) != symbols.end();
        }
        return is_int(v) && as_int(v) >= lo && as_int(v) <= hi;
    }

    /// Value at `index` in enumeration order (symbol order, or lo..hi ascending).
    Value value_at(std::size_t index) const {
        if (kind == DomainKind::symbolic) return symbols.at(index);
        return lo + static_cast<std::int64_t>(index);
    }

    bool operator==(const Domain&) const = default;
};

struct AttributeDef {
    std::string name;
    Domain domain;

    bool operator==(const AttributeDef&) const = default;
};

enum class Operator { eq, neq, lt, gt, leq, geq, in, notin, any };

inline const char* operator_name(Operator op) {
    switch (op) {
        case Operator::eq: return "eq";
        case Operator::neq: return "neq";
        case Operator::lt: return "lt";
        case Operator::gt: return "gt";
        case Operator::leq: return "leq";
        case Operator::geq: return "geq";
        case Operator::in: return "in";
        case Operator::notin: return "notin";
        case Operator::any: return "any";
    }
    return "?";
}

inline std::optional<Operator> operator_from_name(const std::string& name) {
    static const std::map<std::string, Operator> table = {
        {"eq", Operator::eq},   {"neq", Operator::neq},     {"lt", Operator::lt},
        {"gt", Operator::gt},   {"leq", Operator::leq},     {"geq", Operator::geq},
        {"in", Operator::in},   {"notin", Operator::notin}, {"any", Operator::any},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

/// Closed integer interval [lo, hi].
struct Interval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    bool contains(std::int64_t v) const { return v >= lo && v <= hi; }
    bool operator==(const Interval&) const = default;
};

using ValueSet = std::vector<Value>;

/// Condition operand: absent (any), a single value, a value set, or an interval.
using Operand = std::variant<std::monostate, Value, ValueSet, Interval>;

inline bool operand_absent(const Operand& o) { return std::holds_alternative<std::monostate>(o); }

struct ConditionCell {
    std::string attribute;
    Operator op = Operator::any;
    Operand operand;

    bool operator==(const ConditionCell&) const = default;
};

struct DecisionCell {
    std::string attribute;
    Value value;

    bool operator==(const DecisionCell&) const = default;
};

/// One rule: condition cells aligned to the table's condition columns,
/// decision cells aligned to its decision columns.
struct RuleRow {
    std::vector<ConditionCell> conditions;
    std::vector<DecisionCell> decisions;
    int row_id = 0;  // 1-based position in the table

    bool operator==(const RuleRow&) const = default;
};

enum class MatchPolicy { first_hit, all_hit };

/// A decision table; the unit of modularization (one ruleflow-group on export).
struct Table {
    std::string name;
    std::vector<std::string> condition_columns;
    std::vector<std::string> decision_columns;
    std::vector<RuleRow> rows;
    MatchPolicy match_policy = MatchPolicy::all_hit;

    bool operator==(const Table&) const = default;
};

enum class NodeKind { start, end, table_ref, split, join };
enum class SplitKind { AND, XOR };
enum class JoinKind { AND, OR, N_OF_M };

struct FlowNode {
    std::string id;
    NodeKind kind = NodeKind::start;
    std::string table_name;               // table_ref only
    std::optional<SplitKind> split_kind;  // split only
    std::optional<JoinKind> join_kind;    // join only
    std::optional<int> n;                 // N_OF_M joins only

    bool operator==(const FlowNode&) const = default;
};

struct Link {
    std::string from;
    std::string to;
    std::optional<int> target_row;                     // row-targeted link (to a table-ref)
    std::optional<std::vector<ConditionCell>> guard;   // XOR split branches only
    bool is_default = false;                           // XOR default branch

    bool operator==(const Link&) const = default;
};

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    std::string message;
    std::string location;

    bool operator==(const Diagnostic&) const = default;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

inline std::string render_diagnostic(const Diagnostic& d) {
    std::string s = d.severity == Severity::error ? "error" : "warning";
    s += " " + d.code;
    if (!d.location.empty()) s += " " + d.location;
    s += ": " + d.message;
    return s;
}

/// A complete XTT2 model: attributes, linked tables, and the inference flow.
struct Model {
    std::string name;
    std::vector<AttributeDef> attributes;
    std::vector<Table> tables;
    std::vector<FlowNode> nodes;
    std::vector<Link> links;

    const AttributeDef* find_attribute(const std::string& name) const {
        for (const auto& a : attributes)
            if (a.name == name) return &a;
        return nullptr;
    }

    const Table* find_table(const std::string& name) const {
        for (const auto& t : tables)
            if (t.name == name) return &t;
        return nullptr;
    }

    const FlowNode* find_node(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }

    std::vector<std::size_t> outgoing_links(const std::string& node_id) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < links.size(); ++i)
            if (links[i].from == node_id) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> incoming_links(const std::string& node_id) const {
        std::vector<std::size_t> in;
        for (std::size_t i = 0; i < links.size(); ++i)
            if (links[i].to == node_id) in.push_back(i);
        return in;
    }

    bool operator==(const Model&) const = default;
};

/// Identifier syntax shared by attribute names, symbols, table names and node ids:
/// letters, digits and underscore, starting with a letter.
inline bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

inline std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

}  // namespace xtt
