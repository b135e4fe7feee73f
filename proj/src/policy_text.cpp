#include "relplan/pddl/policy_text.hpp"

#include <cctype>

#include "relplan/pddl/sexpr.hpp"

namespace relplan {

namespace {

std::string render_rel(const RelExprPtr& r) {
    switch (r->kind) {
    case RelExpr::Kind::Primitive:
        return "?"; // replaced by caller
    case RelExpr::Kind::Inverse:
        return render_rel(r->inner) + "^-1";
    case RelExpr::Kind::Star:
        // (R^-1)* renders with the conventional ^-* shorthand.
        if (r->inner->kind == RelExpr::Kind::Inverse)
            return render_rel(r->inner->inner) + "^-*";
        return render_rel(r->inner) + "*";
    }
    return "?";
}

std::string rel_to_string(const RelExprPtr& r, const RelationalMDP& model) {
    const RelExpr* base = r.get();
    while (base->kind != RelExpr::Kind::Primitive) base = base->inner.get();
    std::string suffixes = render_rel(r);
    return model.predicates()[base->pred].name + suffixes.substr(1);
}

} // namespace

std::string render_class(const ClassExprPtr& e, const RelationalMDP& model) {
    switch (e->kind) {
    case ClassExpr::Kind::Primitive:
        return model.predicates()[e->pred].name;
    case ClassExpr::Kind::Var:
        return "x" + std::to_string(e->var + 1);
    case ClassExpr::Kind::AThing:
        return "a-thing";
    case ClassExpr::Kind::Not:
        return "(not " + render_class(e->inner, model) + ")";
    case ClassExpr::Kind::RelApply:
        return "(" + rel_to_string(e->rel, model) + " " + render_class(e->inner, model) + ")";
    case ClassExpr::Kind::MinRel:
        return "(min " + rel_to_string(e->rel, model) + ")";
    }
    return "?";
}

std::string render_rule(const Rule& rule, const RelationalMDP& model) {
    std::string out = model.schemas()[rule.action_type].name + ":";
    for (std::size_t i = 0; i < rule.literals.size(); ++i) {
        out += i == 0 ? " " : " & ";
        out += "(x" + std::to_string(rule.literals[i].var_index + 1) + " in " +
               render_class(rule.literals[i].expr, model) + ")";
    }
    return out;
}

std::string render_policy(const DecisionList& list, const RelationalMDP& model) {
    std::string out;
    for (const Rule& r : list.rules) out += render_rule(r, model) + "\n";
    return out;
}

namespace {

// Policy-expression tokenizer: parentheses, '&', and atoms. The unicode
// connectives ∈ (E2 88 88) and ∧ (E2 88 A7) are folded to "in" and "&";
// superscript ⁻¹ / ⁻* (E2 81 BB + C2 B9 / '*') fold to ^-1 / ^-*.
struct Token {
    std::string text; // "(", ")", "&", or an atom
    int column;
};

std::vector<Token> tokenize_line(const std::string& line, int line_no) {
    std::vector<Token> out;
    std::string cur;
    int cur_col = 0;
    auto flush = [&]() {
        if (!cur.empty()) {
            out.push_back({cur, cur_col});
            cur.clear();
        }
    };
    std::size_t i = 0;
    auto col = [&]() { return static_cast<int>(i) + 1; };
    while (i < line.size()) {
        unsigned char c = static_cast<unsigned char>(line[i]);
        if (std::isspace(c)) {
            flush();
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == '&') {
            flush();
            out.push_back({std::string(1, static_cast<char>(c)), col()});
            ++i;
            continue;
        }
        if (line.compare(i, 3, "\xE2\x88\x88") == 0) { // ∈
            flush();
            out.push_back({"in", col()});
            i += 3;
            continue;
        }
        if (line.compare(i, 3, "\xE2\x88\xA7") == 0) { // ∧
            flush();
            out.push_back({"&", col()});
            i += 3;
            continue;
        }
        if (line.compare(i, 3, "\xE2\x81\xBB") == 0) { // superscript minus
            if (cur.empty()) throw ParseError("dangling superscript", {line_no, col()});
            i += 3;
            if (line.compare(i, 2, "\xC2\xB9") == 0) { // ¹
                cur += "^-1";
                i += 2;
            } else if (i < line.size() && line[i] == '*') {
                cur += "^-*";
                ++i;
            } else {
                throw ParseError("expected 1 or * after superscript minus", {line_no, col()});
            }
            continue;
        }
        if (cur.empty()) cur_col = col();
        cur.push_back(static_cast<char>(std::tolower(c)));
        ++i;
    }
    flush();
    return out;
}

struct PolicyParser {
    const RelationalMDP& model;
    const std::vector<Token>& tokens;
    std::size_t pos = 0;
    int line_no;
    int action_arity;

    SourceSpan here() const {
        int c = pos < tokens.size() ? tokens[pos].column : (tokens.empty() ? 1 : tokens.back().column);
        return {line_no, c};
    }
    const Token& peek() const {
        if (pos >= tokens.size())
            throw ParseError("unexpected end of rule", {line_no, tokens.back().column});
        return tokens[pos];
    }
    Token take() {
        Token t = peek();
        ++pos;
        return t;
    }
    void expect(const std::string& text) {
        if (peek().text != text)
            throw ParseError("unexpected token '" + peek().text + "'", here(), "'" + text + "'");
        ++pos;
    }

    // Trailing relation operators attached to a primitive name:
    // on, on^-1, on*, on^*, on^-*, and chains thereof (applied left to right).
    RelExprPtr parse_rel(const Token& t) {
        std::string name = t.text;
        std::vector<std::string> ops;
        for (;;) {
            if (name.size() > 3 && name.compare(name.size() - 3, 3, "^-1") == 0) {
                ops.push_back("^-1");
                name.resize(name.size() - 3);
            } else if (name.size() > 3 && name.compare(name.size() - 3, 3, "^-*") == 0) {
                ops.push_back("^-*");
                name.resize(name.size() - 3);
            } else if (name.size() > 2 && name.compare(name.size() - 2, 2, "^*") == 0) {
                ops.push_back("*");
                name.resize(name.size() - 2);
            } else if (name.size() > 1 && name.back() == '*') {
                ops.push_back("*");
                name.resize(name.size() - 1);
            } else {
                break;
            }
        }
        auto pred = model.predicates().find(name);
        if (!pred)
            throw ParseError("unknown relation '" + name + "'", {line_no, t.column},
                             "a binary predicate");
        if (model.predicates()[*pred].arity != 2)
            throw ParseError("'" + name + "' is not a binary predicate", {line_no, t.column});
        RelExprPtr r = RelExpr::primitive(*pred);
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
            if (*it == "^-1")
                r = RelExpr::inverse(r);
            else if (*it == "^-*")
                r = RelExpr::star(RelExpr::inverse(r));
            else
                r = RelExpr::star(r);
        }
        return r;
    }

    ClassExprPtr parse_class() {
        Token t = take();
        if (t.text == "(") {
            Token head = take();
            ClassExprPtr result;
            if (head.text == "not") {
                result = ClassExpr::negation(parse_class());
            } else if (head.text == "min") {
                result = ClassExpr::min_rel(parse_rel(take()));
            } else {
                result = ClassExpr::rel_apply(parse_rel(head), parse_class());
            }
            expect(")");
            return result;
        }
        if (t.text == ")" || t.text == "&")
            throw ParseError("unexpected '" + t.text + "'", {line_no, t.column}, "an expression");
        if (t.text == "a-thing" || t.text == "universal") return ClassExpr::a_thing();
        if (t.text.size() >= 2 && t.text[0] == 'x' &&
            std::all_of(t.text.begin() + 1, t.text.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            int index = 0;
            try {
                index = std::stoi(t.text.substr(1)) - 1;
            } catch (const std::exception&) {
                throw ParseError("variable index out of range", {line_no, t.column});
            }
            if (index < 0 || index >= action_arity)
                throw ParseError("variable '" + t.text + "' exceeds the action arity of " +
                                     std::to_string(action_arity),
                                 {line_no, t.column});
            return ClassExpr::variable(index);
        }
        auto pred = model.predicates().find(t.text);
        if (!pred)
            throw ParseError("unknown class '" + t.text + "'", {line_no, t.column},
                             "a unary predicate, xN, or a-thing");
        if (model.predicates()[*pred].arity != 1)
            throw ParseError("'" + t.text + "' is not a unary predicate", {line_no, t.column});
        return ClassExpr::primitive(*pred);
    }

    Literal parse_literal() {
        expect("(");
        Token v = take();
        if (v.text.size() < 2 || v.text[0] != 'x')
            throw ParseError("expected a variable 'xN'", {line_no, v.column});
        int index = 0;
        try {
            index = std::stoi(v.text.substr(1)) - 1;
        } catch (const std::exception&) {
            throw ParseError("expected a variable 'xN'", {line_no, v.column});
        }
        if (index < 0 || index >= action_arity)
            throw ParseError("variable '" + v.text + "' exceeds the action arity of " +
                                 std::to_string(action_arity),
                             {line_no, v.column});
        expect("in");
        ClassExprPtr expr = parse_class();
        expect(")");
        return Literal{index, expr};
    }
};

} // namespace

DecisionList parse_policy(std::string_view text, const RelationalMDP& model) {
    DecisionList list;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        // Strip rule-number prefixes like "3." that appear in listings.
        std::size_t firstch = line.find_first_not_of(" \t");
        if (firstch == std::string::npos) {
            if (start > text.size()) break;
            continue;
        }
        if (line[firstch] == '#') continue;

        std::size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError("rule line without ':'", {line_no, 1}, "ACTIONNAME: literals");
        std::string head = line.substr(0, colon);
        // Trim and drop a leading "N." numbering token.
        std::string name;
        for (char c : head)
            if (!std::isspace(static_cast<unsigned char>(c)))
                name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (std::size_t dot = name.find('.'); dot != std::string::npos &&
                                              std::all_of(name.begin(), name.begin() + static_cast<long>(dot),
                                                          [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            name = name.substr(dot + 1);
        std::uint16_t schema = 0;
        bool found = false;
        for (std::uint16_t i = 0; i < model.schemas().size(); ++i)
            if (model.schemas()[i].name == name) {
                schema = i;
                found = true;
            }
        if (!found)
            throw ParseError("unknown action '" + name + "'", {line_no, 1},
                             "a declared action name");

        Rule rule;
        rule.action_type = schema;
        std::vector<Token> tokens = tokenize_line(line.substr(colon + 1), line_no);
        PolicyParser parser{model, tokens, 0, line_no,
                            static_cast<int>(model.schemas()[schema].params.size())};
        bool first = true;
        while (parser.pos < tokens.size()) {
            if (!first) {
                if (parser.peek().text == "&")
                    parser.take();
                // Listings occasionally omit the connective; accept adjacency.
            }
            rule.literals.push_back(parser.parse_literal());
            first = false;
        }
        list.rules.push_back(std::move(rule));
        if (start > text.size()) break;
    }
    return list;
}

} // namespace relplan
