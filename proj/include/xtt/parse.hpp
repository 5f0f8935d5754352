#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xtt/model.hpp"
#include "xtt/validate.hpp"

namespace xtt {

struct ParseResult {
    std::optional<Model> model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return model.has_value(); }
};

/// Thrown when an operation is handed a model that fails validation.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Diagnostic> diags)
        : std::runtime_error(diags.empty() ? "invalid model"
                                           : "invalid model: " + render_diagnostic(diags.front())),
          diagnostics(std::move(diags)) {}

    std::vector<Diagnostic> diagnostics;
};

namespace detail {

using json = nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_col_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class ModelReader {
public:
    explicit ModelReader(std::vector<Diagnostic>& diags) : diags_(diags) {}

    void error(const std::string& loc, const std::string& msg) {
        diags_.push_back({Severity::error, "schema-error", msg, loc});
    }

    const json* object(const json& j, const std::string& loc) {
        if (!j.is_object()) {
            error(loc, "expected an object");
            return nullptr;
        }
        return &j;
    }

    const json* field(const json& j, const char* key, const std::string& loc, bool required) {
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) error(loc, std::string("missing key \"") + key + "\"");
            return nullptr;
        }
        return &*it;
    }

    std::string str(const json& j, const char* key, const std::string& loc) {
        const json* f = field(j, key, loc, true);
        if (!f) return {};
        if (!f->is_string()) {
            error(loc, std::string("key \"") + key + "\" must be a string");
            return {};
        }
        return f->get<std::string>();
    }

    std::optional<std::int64_t> integer(const json& j, const std::string& loc) {
        if (!j.is_number_integer()) {
            error(loc, "expected an integer");
            return std::nullopt;
        }
        return j.get<std::int64_t>();
    }

    std::optional<Value> value(const json& j, const std::string& loc) {
        if (j.is_string()) return Value{j.get<std::string>()};
        if (j.is_number_integer()) return Value{j.get<std::int64_t>()};
        error(loc, "expected a symbol or an integer");
        return std::nullopt;
    }

    Domain domain(const json& j, const std::string& loc) {
        Domain d;
        if (!object(j, loc)) return d;
        const std::string kind = str(j, "kind", loc);
        if (kind == "symbolic") {
            d.kind = DomainKind::symbolic;
            const json* syms = field(j, "symbols", loc, true);
            if (syms && syms->is_array()) {
                for (const auto& s : *syms) {
                    if (s.is_string())
                        d.symbols.push_back(s.get<std::string>());
                    else
                        error(loc, "symbols must be strings");
                }
            } else if (syms) {
                error(loc, "symbols must be an array");
            }
        } else if (kind == "integer-range") {
            d.kind = DomainKind::integer_range;
            if (const json* lo = field(j, "lo", loc, true))
                if (auto v = integer(*lo, loc)) d.lo = *v;
            if (const json* hi = field(j, "hi", loc, true))
                if (auto v = integer(*hi, loc)) d.hi = *v;
        } else if (!kind.empty()) {
            error(loc, "domain kind must be \"symbolic\" or \"integer-range\"");
        }
        return d;
    }

    ConditionCell condition_cell(const json& j, const std::string& loc) {
        ConditionCell cell;
        if (!object(j, loc)) return cell;
        cell.attribute = str(j, "attribute", loc);
        const std::string opname = str(j, "op", loc);
        auto op = operator_from_name(opname);
        if (!op) {
            if (!opname.empty()) error(loc, "unknown operator \"" + opname + "\"");
            return cell;
        }
        cell.op = *op;
        const json* operand = field(j, "operand", loc, false);
        if (cell.op == Operator::any) {
            if (operand) error(loc, "operator any takes no operand");
            return cell;
        }
        if (!operand) {
            error(loc, std::string("operator ") + operator_name(cell.op) + " needs an operand");
            return cell;
        }
        if (cell.op == Operator::in || cell.op == Operator::notin) {
            if (operand->is_array()) {
                ValueSet set;
                for (const auto& e : *operand)
                    if (auto v = value(e, loc)) set.push_back(*v);
                cell.operand = std::move(set);
            } else if (operand->is_object()) {
                Interval iv;
                if (const json* lo = field(*operand, "lo", loc, true))
                    if (auto v = integer(*lo, loc)) iv.lo = *v;
                if (const json* hi = field(*operand, "hi", loc, true))
                    if (auto v = integer(*hi, loc)) iv.hi = *v;
                cell.operand = iv;
            } else {
                error(loc, "operand must be a value array or an interval object {lo,hi}");
            }
        } else {
            if (auto v = value(*operand, loc)) cell.operand = *v;
        }
        return cell;
    }

    Table table(const json& j, const std::string& loc) {
        Table t;
        if (!object(j, loc)) return t;
        t.name = str(j, "name", loc);
        auto names = [&](const char* key, std::vector<std::string>& out) {
            const json* arr = field(j, key, loc, true);
            if (!arr) return;
            if (!arr->is_array()) {
                error(loc, std::string("key \"") + key + "\" must be an array");
                return;
            }
            for (const auto& e : *arr) {
                if (e.is_string())
                    out.push_back(e.get<std::string>());
                else
                    error(loc, std::string(key) + " entries must be strings");
            }
        };
        names("conditionColumns", t.condition_columns);
        names("decisionColumns", t.decision_columns);
        if (const json* mp = field(j, "matchPolicy", loc, false)) {
            const std::string p = mp->is_string() ? mp->get<std::string>() : std::string();
            if (p == "first-hit")
                t.match_policy = MatchPolicy::first_hit;
            else if (p == "all-hit")
                t.match_policy = MatchPolicy::all_hit;
            else
                error(loc, "matchPolicy must be \"first-hit\" or \"all-hit\"");
        }
        const json* rows = field(j, "rows", loc, true);
        if (rows && rows->is_array()) {
            int row_id = 1;
            for (const auto& rj : *rows) {
                const std::string rloc = loc + ".rows[" + std::to_string(row_id) + "]";
                RuleRow row;
                row.row_id = row_id++;
                if (!object(rj, rloc)) {
                    t.rows.push_back(std::move(row));
                    continue;
                }
                if (const json* conds = field(rj, "conditions", rloc, true)) {
                    if (conds->is_array()) {
                        int ci = 1;
                        for (const auto& cj : *conds)
                            row.conditions.push_back(condition_cell(
                                cj, rloc + ".conditions[" + std::to_string(ci++) + "]"));
                    } else {
                        error(rloc, "conditions must be an array");
                    }
                }
                if (const json* decs = field(rj, "decisions", rloc, true)) {
                    if (decs->is_array()) {
                        int di = 1;
                        for (const auto& dj : *decs) {
                            const std::string dloc =
                                rloc + ".decisions[" + std::to_string(di++) + "]";
                            DecisionCell cell;
                            if (object(dj, dloc)) {
                                cell.attribute = str(dj, "attribute", dloc);
                                if (const json* v = field(dj, "value", dloc, true))
                                    if (auto val = value(*v, dloc)) cell.value = *val;
                            }
                            row.decisions.push_back(std::move(cell));
                        }
                    } else {
                        error(rloc, "decisions must be an array");
                    }
                }
                t.rows.push_back(std::move(row));
            }
        } else if (rows) {
            error(loc, "rows must be an array");
        }
        return t;
    }

    FlowNode node(const json& j, const std::string& loc) {
        FlowNode n;
        if (!object(j, loc)) return n;
        n.id = str(j, "id", loc);
        const std::string kind = str(j, "kind", loc);
        if (kind == "start") {
            n.kind = NodeKind::start;
        } else if (kind == "end") {
            n.kind = NodeKind::end;
        } else if (kind == "table-ref") {
            n.kind = NodeKind::table_ref;
            n.table_name = str(j, "tableName", loc);
        } else if (kind == "split") {
            n.kind = NodeKind::split;
            const std::string sk = str(j, "splitKind", loc);
            if (sk == "AND")
                n.split_kind = SplitKind::AND;
            else if (sk == "XOR")
                n.split_kind = SplitKind::XOR;
            else if (!sk.empty())
                error(loc, "splitKind must be \"AND\" or \"XOR\"");
        } else if (kind == "join") {
            n.kind = NodeKind::join;
            const std::string jk = str(j, "joinKind", loc);
            if (jk == "AND")
                n.join_kind = JoinKind::AND;
            else if (jk == "OR")
                n.join_kind = JoinKind::OR;
            else if (jk == "N-OF-M")
                n.join_kind = JoinKind::N_OF_M;
            else if (!jk.empty())
                error(loc, "joinKind must be \"AND\", \"OR\" or \"N-OF-M\"");
            if (n.join_kind == JoinKind::N_OF_M) {
                if (const json* nn = field(j, "n", loc, true))
                    if (auto v = integer(*nn, loc)) n.n = static_cast<int>(*v);
            } else if (j.contains("n")) {
                error(loc, "n is only valid on N-OF-M joins");
            }
        } else if (!kind.empty()) {
            error(loc, "unknown node kind \"" + kind + "\"");
        }
        return n;
    }

    Link link(const json& j, const std::string& loc) {
        Link l;
        if (!object(j, loc)) return l;
        l.from = str(j, "from", loc);
        l.to = str(j, "to", loc);
        if (const json* tr = field(j, "targetRow", loc, false)) {
            if (auto v = integer(*tr, loc)) l.target_row = static_cast<int>(*v);
        }
        if (const json* g = field(j, "guard", loc, false)) {
            if (!g->is_array()) {
                error(loc, "guard must be an array of condition cells");
            } else {
                std::vector<ConditionCell> cells;
                int gi = 1;
                for (const auto& cj : *g)
                    cells.push_back(
                        condition_cell(cj, loc + ".guard[" + std::to_string(gi++) + "]"));
                l.guard = std::move(cells);
            }
        }
        if (const json* d = field(j, "isDefault", loc, false)) {
            if (d->is_boolean())
                l.is_default = d->get<bool>();
            else
                error(loc, "isDefault must be a boolean");
        }
        return l;
    }

    Model model(const json& j) {
        Model m;
        if (!object(j, "model")) return m;
        m.name = str(j, "name", "model");
        if (const json* attrs = field(j, "attributes", "model", true)) {
            if (attrs->is_array()) {
                int ai = 1;
                for (const auto& aj : *attrs) {
                    const std::string loc = "attributes[#" + std::to_string(ai++) + "]";
                    AttributeDef a;
                    if (object(aj, loc)) {
                        a.name = str(aj, "name", loc);
                        const std::string aloc =
                            a.name.empty() ? loc : "attributes[" + a.name + "]";
                        if (const json* d = field(aj, "domain", aloc, true))
                            a.domain = domain(*d, aloc + ".domain");
                    }
                    m.attributes.push_back(std::move(a));
                }
            } else {
                error("model", "attributes must be an array");
            }
        }
        if (const json* tables = field(j, "tables", "model", true)) {
            if (tables->is_array()) {
                int ti = 1;
                for (const auto& tj : *tables) {
                    std::string loc = "tables[#" + std::to_string(ti++) + "]";
                    if (tj.is_object() && tj.contains("name") && tj["name"].is_string())
                        loc = "tables[" + tj["name"].get<std::string>() + "]";
                    m.tables.push_back(table(tj, loc));
                }
            } else {
                error("model", "tables must be an array");
            }
        }
        if (const json* flow = field(j, "flow", "model", true)) {
            if (flow->is_object()) {
                if (const json* nodes = field(*flow, "nodes", "flow", true)) {
                    if (nodes->is_array()) {
                        int ni = 1;
                        for (const auto& nj : *nodes) {
                            std::string loc = "flow.nodes[#" + std::to_string(ni++) + "]";
                            if (nj.is_object() && nj.contains("id") && nj["id"].is_string())
                                loc = "flow.nodes[" + nj["id"].get<std::string>() + "]";
                            m.nodes.push_back(node(nj, loc));
                        }
                    } else {
                        error("flow", "nodes must be an array");
                    }
                }
                if (const json* links = field(*flow, "links", "flow", true)) {
                    if (links->is_array()) {
                        int li = 1;
                        for (const auto& lj : *links) {
                            const std::string loc = "flow.links[" + std::to_string(li++) + "]";
                            m.links.push_back(link(lj, loc));
                        }
                    } else {
                        error("flow", "links must be an array");
                    }
                }
            } else {
                error("model", "flow must be an object");
            }
        }
        return m;
    }

private:
    std::vector<Diagnostic>& diags_;
};

inline nlohmann::ordered_json value_to_json(const Value& v) {
    if (is_int(v)) return as_int(v);
    return as_symbol(v);
}

inline nlohmann::ordered_json condition_to_json(const ConditionCell& c) {
    nlohmann::ordered_json j;
    j["attribute"] = c.attribute;
    j["op"] = operator_name(c.op);
    if (const Value* v = std::get_if<Value>(&c.operand)) {
        j["operand"] = value_to_json(*v);
    } else if (const ValueSet* vs = std::get_if<ValueSet>(&c.operand)) {
        auto arr = nlohmann::ordered_json::array();
        for (const Value& v : *vs) arr.push_back(value_to_json(v));
        j["operand"] = std::move(arr);
    } else if (const Interval* iv = std::get_if<Interval>(&c.operand)) {
        j["operand"] = {{"lo", iv->lo}, {"hi", iv->hi}};
    }
    return j;
}

}  // namespace detail

/// Parses a canonical-format document. On failure the result carries the
/// diagnostics (syntax, schema, or validation) and no model; on success the
/// model additionally passed validate_model.
inline ParseResult parse_model(std::string_view document) {
    ParseResult result;
    const bool blank = document.find_first_not_of(" \t\r\n") == std::string_view::npos;
    if (blank) {
        result.diagnostics.push_back({Severity::error, "empty-model", "empty model", "document"});
        return result;
    }

    detail::json root;
    try {
        root = detail::json::parse(document);
    } catch (const detail::json::parse_error& e) {
        auto [line, col] = detail::line_col_of(document, e.byte > 0 ? e.byte - 1 : 0);
        result.diagnostics.push_back(
            {Severity::error, "syntax-error", e.what(),
             "line " + std::to_string(line) + ", column " + std::to_string(col)});
        return result;
    }

    detail::ModelReader reader(result.diagnostics);
    Model m = reader.model(root);
    if (has_errors(result.diagnostics)) return result;

    auto validation = validate_model(m);
    if (has_errors(validation)) {
        result.diagnostics = std::move(validation);
        return result;
    }
    result.model = std::move(m);
    return result;
}

/// Serializes a valid model to the canonical format. The output is
/// byte-deterministic (fixed key order) and re-parses to an equal model.
/// Throws ValidationError when the model does not validate.
inline std::string serialize_model(const Model& m) {
    auto validation = validate_model(m);
    if (has_errors(validation)) throw ValidationError(std::move(validation));

    using ojson = nlohmann::ordered_json;
    ojson j;
    j["name"] = m.name;

    auto attrs = ojson::array();
    for (const auto& a : m.attributes) {
        ojson aj;
        aj["name"] = a.name;
        ojson dj;
        if (a.domain.kind == DomainKind::symbolic) {
            dj["kind"] = "symbolic";
            dj["symbols"] = a.domain.symbols;
        } else {
            dj["kind"] = "integer-range";
            dj["lo"] = a.domain.lo;
            dj["hi"] = a.domain.hi;
        }
        aj["domain"] = std::move(dj);
        attrs.push_back(std::move(aj));
    }
    j["attributes"] = std::move(attrs);

    auto tables = ojson::array();
    for (const auto& t : m.tables) {
        ojson tj;
        tj["name"] = t.name;
        tj["conditionColumns"] = t.condition_columns;
        tj["decisionColumns"] = t.decision_columns;
        tj["matchPolicy"] = t.match_policy == MatchPolicy::first_hit ? "first-hit" : "all-hit";
        auto rows = ojson::array();
        for (const auto& row : t.rows) {
            ojson rj;
            auto conds = ojson::array();
            for (const auto& c : row.conditions) conds.push_back(detail::condition_to_json(c));
            rj["conditions"] = std::move(conds);
            auto decs = ojson::array();
            for (const auto& d : row.decisions) {
                ojson dj;
                dj["attribute"] = d.attribute;
                dj["value"] = detail::value_to_json(d.value);
                decs.push_back(std::move(dj));
            }
            rj["decisions"] = std::move(decs);
            rows.push_back(std::move(rj));
        }
        tj["rows"] = std::move(rows);
        tables.push_back(std::move(tj));
    }
    j["tables"] = std::move(tables);

    ojson flow;
    auto nodes = ojson::array();
    for (const auto& n : m.nodes) {
        ojson nj;
        nj["id"] = n.id;
        switch (n.kind) {
            case NodeKind::start: nj["kind"] = "start"; break;
            case NodeKind::end: nj["kind"] = "end"; break;
            case NodeKind::table_ref:
                nj["kind"] = "table-ref";
                nj["tableName"] = n.table_name;
                break;
            case NodeKind::split:
                nj["kind"] = "split";
                nj["splitKind"] = n.split_kind == SplitKind::AND ? "AND" : "XOR";
                break;
            case NodeKind::join:
                nj["kind"] = "join";
                nj["joinKind"] = n.join_kind == JoinKind::AND  ? "AND"
                                 : n.join_kind == JoinKind::OR ? "OR"
                                                               : "N-OF-M";
                if (n.n) nj["n"] = *n.n;
                break;
        }
        nodes.push_back(std::move(nj));
    }
    flow["nodes"] = std::move(nodes);
    auto links = ojson::array();
    for (const auto& l : m.links) {
        ojson lj;
        lj["from"] = l.from;
        lj["to"] = l.to;
        if (l.target_row) lj["targetRow"] = *l.target_row;
        if (l.guard) {
            auto cells = ojson::array();
            for (const auto& c : *l.guard) cells.push_back(detail::condition_to_json(c));
            lj["guard"] = std::move(cells);
        }
        if (l.is_default) lj["isDefault"] = true;
        links.push_back(std::move(lj));
    }
    flow["links"] = std::move(links);
    j["flow"] = std::move(flow);

    return j.dump(2) + "\n";
}

}  // namespace xtt
