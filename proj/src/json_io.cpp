#include "rsld/json_io.hpp"

#include <sstream>

namespace rsld {

using nlohmann::json;

namespace {

json goal_json(const PriorityGoal& g, bool list_mode) {
    json out = json::array();
    for (const PriorityAtom& a : g.atoms()) {
        out.push_back(list_mode ? to_string(a.atom) : to_string(a));
    }
    return out;
}

json subst_json(const Substitution& s) {
    json out = json::object();
    for (const auto& [var, value] : s.bindings()) out[var] = to_string(value);
    return out;
}

json reduction_json(const ReductionCertificate& cert, bool list_mode) {
    if (cert.is_identity()) return nullptr;
    json eliminated = json::array();
    json advanced = json::object();
    for (const auto& e : cert.eliminations) {
        for (const PriorityAtom& b : e.eliminated) {
            eliminated.push_back({{"atom", list_mode ? to_string(b.atom) : to_string(b)},
                                  {"by", list_mode ? to_string(e.eliminator.atom)
                                                   : to_string(e.eliminator)}});
        }
        if (cert.advancement && e.new_priority != e.eliminator.priority) {
            advanced[to_string(e.eliminator.atom)] = to_string(e.new_priority);
        }
    }
    return json{{"tau", subst_json(cert.tau)},
                {"eliminated", eliminated},
                {"advanced", advanced}};
}

} // namespace

json trace_json(const DerivationRecord& d, const Rule& rule) {
    const bool list_mode = is_list_mode(d.mode);
    json steps = json::array();
    for (std::size_t j = 0; j < d.entries.size(); ++j) {
        const DerivationEntry& e = d.entries[j];
        Resultant rs = d.resultant_at(j);
        json step = {
            {"index", j},
            {"reduction", reduction_json(e.reduction, list_mode)},
            {"resolvent", goal_json(e.reduced, list_mode)},
            {"resultant",
             {{"reduced", goal_json(rs.reduced, list_mode)},
              {"instance", goal_json(rs.instance, list_mode)}}},
        };
        if (e.step) {
            step["selected"] = {{"atom", to_string(e.step->selected.atom)},
                                {"priority", to_string(e.step->selected.priority)}};
            step["clause"] = e.step->clause_id;
            step["mgu"] = subst_json(e.step->unifier);
        } else {
            step["selected"] = nullptr;
            step["clause"] = nullptr;
            step["mgu"] = nullptr;
        }
        steps.push_back(std::move(step));
    }
    json out = {{"mode", to_string(d.mode)},
                {"rule", rule.name()},
                {"initial", goal_json(d.initial, list_mode)},
                {"status", to_string(d.status)},
                {"steps", std::move(steps)}};
    if (d.prune) {
        out["prune"] = {{"i", d.prune->i}, {"j", d.prune->j}};
    } else {
        out["prune"] = nullptr;
    }
    return out;
}

std::string validate_trace(const json& trace) {
    auto need = [&](const json& obj, const char* key, const char* where) -> std::string {
        if (!obj.contains(key)) return std::string("missing '") + key + "' in " + where;
        return "";
    };
    for (const char* key : {"mode", "rule", "initial", "status", "steps", "prune"}) {
        if (auto err = need(trace, key, "trace"); !err.empty()) return err;
    }
    if (!trace["steps"].is_array()) return "'steps' is not an array";
    for (const json& step : trace["steps"]) {
        for (const char* key :
             {"index", "selected", "clause", "mgu", "reduction", "resolvent", "resultant"}) {
            if (auto err = need(step, key, "step"); !err.empty()) return err;
        }
        if (!step["resolvent"].is_array()) return "'resolvent' is not an array";
        const json& rs = step["resultant"];
        if (!rs.contains("reduced") || !rs.contains("instance")) {
            return "resultant lacks reduced/instance";
        }
    }
    return "";
}

std::string render_text_trace(const DerivationRecord& d) {
    const bool list_mode = is_list_mode(d.mode);
    auto show = [&](const PriorityGoal& g) {
        if (g.empty()) return std::string("<empty>");
        return list_mode ? to_string(std::span<const Atom>(g.atom_list())) : to_string(g);
    };
    std::ostringstream out;
    for (std::size_t j = 0; j < d.entries.size(); ++j) {
        const DerivationEntry& e = d.entries[j];
        out << j << ": " << show(e.goal) << "\n";
        if (!e.reduction.is_identity()) {
            out << "   >> " << show(e.reduced) << "   tau = " << to_string(e.reduction.tau)
                << "\n";
        }
        if (e.step) {
            out << "   -> " << e.step->clause_id << " on " << to_string(e.step->selected.atom)
                << "  mgu " << to_string(e.step->unifier) << "\n";
        }
    }
    out << to_string(d.status);
    if (d.prune) out << " (" << d.prune->i << "," << d.prune->j << ")";
    out << "\n";
    return out.str();
}

namespace {

void dot_node(std::ostream& out, const TreeNode& node, std::size_t& counter,
              std::size_t id) {
    std::string label = node.reduced.empty() ? "<empty>" : to_string(node.reduced);
    std::string style;
    switch (node.kind) {
    case TreeNode::Kind::Refuted: style = ",shape=doublecircle"; break;
    case TreeNode::Kind::Failed: style = ",color=red"; break;
    case TreeNode::Kind::Truncated: style = ",style=dashed,color=gray"; break;
    case TreeNode::Kind::Pruned: style = ",style=filled,fillcolor=lightyellow"; break;
    case TreeNode::Kind::Inner: break;
    }
    out << "  n" << id << " [label=\"" << label << "\"" << style << "];\n";
    for (const auto& edge : node.children) {
        std::size_t child_id = ++counter;
        out << "  n" << id << " -> n" << child_id << " [label=\"" << edge.clause_id
            << "\"];\n";
        dot_node(out, *edge.child, counter, child_id);
    }
}

} // namespace

std::string render_dot(const DerivationTree& tree) {
    std::ostringstream out;
    out << "digraph derivation {\n  node [shape=box];\n";
    std::size_t counter = 0;
    dot_node(out, *tree.root, counter, 0);
    out << "}\n";
    return out.str();
}

} // namespace rsld
