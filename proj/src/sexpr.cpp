#include "relplan/pddl/sexpr.hpp"

#include <cctype>

namespace relplan {

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    SourceSpan span;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') {
            ++span.line;
            span.column = 1;
        } else {
            ++span.column;
        }
        return c;
    }
    void skip_ws_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n') take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                return;
            }
        }
    }
};

bool is_atom_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ';';
}

Sexpr read_form(Cursor& cur) {
    cur.skip_ws_and_comments();
    if (cur.eof()) throw ParseError("unexpected end of input", cur.span, "'(' or an atom");
    SourceSpan start = cur.span;
    char c = cur.peek();
    if (c == ')') throw ParseError("unmatched ')'", cur.span);
    if (c == '(') {
        cur.take();
        Sexpr list;
        list.kind = Sexpr::Kind::List;
        list.span = start;
        for (;;) {
            cur.skip_ws_and_comments();
            if (cur.eof()) throw ParseError("unbalanced parentheses", start, "')'");
            if (cur.peek() == ')') {
                cur.take();
                return list;
            }
            list.items.push_back(read_form(cur));
        }
    }
    Sexpr atom;
    atom.kind = Sexpr::Kind::Atom;
    atom.span = start;
    while (!cur.eof() && is_atom_char(cur.peek()))
        atom.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(cur.take()))));
    return atom;
}

} // namespace

std::vector<Sexpr> parse_sexprs(std::string_view text) {
    Cursor cur{text, 0, {1, 1}};
    std::vector<Sexpr> forms;
    for (;;) {
        cur.skip_ws_and_comments();
        if (cur.eof()) return forms;
        forms.push_back(read_form(cur));
    }
}

Sexpr parse_sexpr(std::string_view text) {
    std::vector<Sexpr> forms = parse_sexprs(text);
    if (forms.empty()) throw ParseError("empty input", {1, 1}, "one s-expression");
    if (forms.size() > 1)
        throw ParseError("expected a single s-expression", forms[1].span);
    return std::move(forms.front());
}

} // namespace relplan
