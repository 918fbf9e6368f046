#include "rsld/parser.hpp"

#include "rsld/errors.hpp"

#include <cctype>
#include <map>

namespace rsld {

namespace {

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    void skip_space() {
        while (at_ < text_.size()) {
            char c = text_[at_];
            if (c == '%') {
                while (at_ < text_.size() && text_[at_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool done() {
        skip_space();
        return at_ >= text_.size();
    }

    char peek() {
        skip_space();
        return at_ < text_.size() ? text_[at_] : '\0';
    }

    bool accept(char c) {
        if (peek() != c) return false;
        advance();
        return true;
    }

    bool accept(const std::string& token) {
        skip_space();
        if (text_.compare(at_, token.size(), token) != 0) return false;
        for (std::size_t i = 0; i < token.size(); ++i) advance();
        return true;
    }

    void expect(char c, const std::string& what) {
        if (!accept(c)) fail("expected '" + std::string(1, c) + "' " + what);
    }

    std::string identifier() {
        skip_space();
        std::size_t start = at_;
        while (at_ < text_.size()) {
            char c = text_[at_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') advance();
            else break;
        }
        if (start == at_) fail("expected an identifier");
        return text_.substr(start, at_ - start);
    }

    std::string number_token() {
        skip_space();
        std::size_t start = at_;
        if (at_ < text_.size() && text_[at_] == '-') advance();
        bool seen_digit = false;
        while (at_ < text_.size()) {
            char c = text_[at_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                seen_digit = true;
                advance();
            } else if ((c == '/' || c == '.') && seen_digit) {
                advance();
            } else {
                break;
            }
        }
        if (!seen_digit) fail("expected a number");
        return text_.substr(start, at_ - start);
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

private:
    void advance() {
        if (text_[at_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++at_;
    }

    const std::string& text_;
    std::size_t at_ = 0;
    int line_ = 1;
    int col_ = 1;
};

Term parse_term_at(Lexer& lex);

std::vector<Term> parse_arguments(Lexer& lex) {
    std::vector<Term> args;
    if (!lex.accept('(')) return args;
    args.push_back(parse_term_at(lex));
    while (lex.accept(',')) args.push_back(parse_term_at(lex));
    lex.expect(')', "to close the argument list");
    return args;
}

Term parse_term_at(Lexer& lex) {
    std::string name = lex.identifier();
    if (Term::is_variable_name(name)) {
        if (lex.peek() == '(') lex.fail("variable '" + name + "' cannot take arguments");
        return Term::variable(name);
    }
    return Term::compound(name, parse_arguments(lex));
}

Atom parse_atom_at(Lexer& lex) {
    std::string name = lex.identifier();
    if (Term::is_variable_name(name)) {
        lex.fail("'" + name + "' is a variable, not a predicate");
    }
    return Atom{name, parse_arguments(lex)};
}

std::optional<Rational> parse_priority_tag(Lexer& lex) {
    if (!lex.accept('[')) return std::nullopt;
    std::string token = lex.number_token();
    auto value = parse_rational(token);
    if (!value) lex.fail("bad rational '" + token + "'");
    lex.expect(']', "to close the priority tag");
    return value;
}

} // namespace

Program parse_program(const std::string& text) {
    Lexer lex(text);
    Program program;
    std::map<std::string, std::size_t> arities;
    auto check_arity = [&](const Atom& a) {
        auto [it, inserted] = arities.emplace(a.predicate, a.args.size());
        if (!inserted && it->second != a.args.size()) {
            lex.fail("predicate '" + a.predicate + "' used with arity " +
                     std::to_string(a.args.size()) + " and " + std::to_string(it->second));
        }
    };
    while (!lex.done()) {
        Clause clause;
        clause.head = parse_atom_at(lex);
        check_arity(clause.head);
        bool saw_split = false;
        if (lex.accept("<-")) {
            if (lex.peek() != '.') {
                for (;;) {
                    if (lex.accept('|')) {
                        if (saw_split) lex.fail("more than one '|' split in a clause body");
                        saw_split = true;
                        clause.stack_split = clause.body.size();
                        if (lex.peek() == '.') break;
                        continue;
                    }
                    clause.body.push_back(parse_atom_at(lex));
                    check_arity(clause.body.back());
                    // Body priority tags are accepted and ignored; textual
                    // order already carries the body's internal scheduling.
                    parse_priority_tag(lex);
                    if (!lex.accept(',')) {
                        if (lex.peek() == '|') continue;
                        break;
                    }
                }
            }
        }
        if (!saw_split) clause.stack_split = clause.body.size();
        lex.expect('.', "to end the clause");
        clause.id = "c" + std::to_string(program.clauses.size() + 1);
        program.clauses.push_back(std::move(clause));
    }
    return program;
}

std::vector<GoalEntry> parse_goal(const std::string& text) {
    Lexer lex(text);
    std::vector<GoalEntry> entries;
    if (lex.done()) return entries;
    for (;;) {
        Atom atom = parse_atom_at(lex);
        entries.emplace_back(std::move(atom), parse_priority_tag(lex));
        if (lex.accept(',') || lex.accept('|')) continue;
        break;
    }
    if (!lex.done()) lex.fail("trailing input after goal");
    return entries;
}

std::vector<Atom> parse_list_goal(const std::string& text) {
    std::vector<Atom> atoms;
    for (auto& [atom, tag] : parse_goal(text)) {
        if (tag) throw ParseError("priority tags are not allowed in list mode", 1, 1);
        atoms.push_back(std::move(atom));
    }
    return atoms;
}

PriorityGoal parse_priority_goal(const std::string& text) {
    return goal_from_tagged(parse_goal(text));
}

Atom parse_atom(const std::string& text) {
    Lexer lex(text);
    Atom atom = parse_atom_at(lex);
    if (!lex.done()) lex.fail("trailing input after atom");
    return atom;
}

Term parse_term(const std::string& text) {
    Lexer lex(text);
    Term term = parse_term_at(lex);
    if (!lex.done()) lex.fail("trailing input after term");
    return term;
}

bool Program::function_free() const {
    auto flat = [](const Atom& a) {
        for (const Term& t : a.args) {
            if (t.is_compound() && !t.args().empty()) return false;
        }
        return true;
    };
    for (const Clause& c : clauses) {
        if (!flat(c.head)) return false;
        for (const Atom& a : c.body) {
            if (!flat(a)) return false;
        }
    }
    return true;
}

std::string Program::print() const {
    std::string out;
    for (const Clause& c : clauses) {
        out += to_string(c);
        out += "\n";
    }
    return out;
}

} // namespace rsld
