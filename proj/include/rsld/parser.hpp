#pragma once

#include "rsld/priority.hpp"
#include "rsld/term.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rsld {

/// An ordered clause list with ids and per-clause stack/queue splits.
/// Arity is fixed per predicate across the whole program (checked at load).
struct Program {
    std::vector<Clause> clauses;

    bool function_free() const;
    std::string print() const;
};

/// Parses program text. Clauses end with '.', bodies are comma-separated with
/// an optional single '|' marking the stack/queue split (`head <- a, b | c.`);
/// facts are `head.` or `head <-.`; '%' starts a line comment.
Program parse_program(const std::string& text);

/// One goal entry: an atom plus its optional explicit priority tag.
using GoalEntry = std::pair<Atom, std::optional<Rational>>;

/// Parses `p(z)[1], q(w)[2]`-style goal text; ',' and '|' both separate atoms.
std::vector<GoalEntry> parse_goal(const std::string& text);

/// Goal text parsed in list mode: priority tags are rejected.
std::vector<Atom> parse_list_goal(const std::string& text);

/// Priority-mode goal: textual order gives default priorities 1..k.
PriorityGoal parse_priority_goal(const std::string& text);

Atom parse_atom(const std::string& text);
Term parse_term(const std::string& text);

} // namespace rsld
