#include "modchat/rules/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <set>

#include "modchat/rules/builtins.hpp"

namespace modchat::rules {

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::string token,
                         const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message + " (at '" + token + "')"),
      line_(line), column_(column), token_(std::move(token))
{
}

namespace {

enum class Tok {
    Symbol, Variable, Integer, Decimal, String,
    LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Comma, Dot, Neck, Arrow, Bang, End,
};

struct Token {
    Tok kind;
    std::string text;   // raw spelling, used in error messages
    std::string value;  // decoded string contents for Tok::String
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next()
    {
        skip_space_and_comments();
        Token t{Tok::End, "<eof>", {}, line_, col_};
        if (pos_ >= src_.size())
            return t;

        const std::size_t start = pos_;
        const char c = src_[pos_];
        auto single = [&](Tok kind) {
            advance();
            t.kind = kind;
            t.text = std::string(1, c);
            return t;
        };

        if (std::islower(static_cast<unsigned char>(c))) {
            read_identifier();
            t.kind = Tok::Symbol;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            read_identifier();
            t.kind = Tok::Variable;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            advance();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                advance();
            t.kind = Tok::Integer;
            if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
                std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    advance();
                t.kind = Tok::Decimal;
            }
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (c == '"')
            return read_string(t);
        if (c == ':' && peek(1) == '-') {
            advance();
            advance();
            t.kind = Tok::Neck;
            t.text = ":-";
            return t;
        }
        if (c == '-' && peek(1) == '>') {
            advance();
            advance();
            t.kind = Tok::Arrow;
            t.text = "->";
            return t;
        }
        switch (c) {
        case '(': return single(Tok::LParen);
        case ')': return single(Tok::RParen);
        case '[': return single(Tok::LBracket);
        case ']': return single(Tok::RBracket);
        case '{': return single(Tok::LBrace);
        case '}': return single(Tok::RBrace);
        case ',': return single(Tok::Comma);
        case '.': return single(Tok::Dot);
        case '!': return single(Tok::Bang);
        default:
            throw SyntaxError(line_, col_, std::string(1, c), "unexpected character");
        }
    }

private:
    char peek(std::size_t ahead) const
    {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments()
    {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    void read_identifier()
    {
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            advance();
    }

    Token read_string(Token t)
    {
        const std::size_t start = pos_;
        advance(); // opening quote
        std::string value;
        while (true) {
            if (pos_ >= src_.size())
                throw SyntaxError(t.line, t.column, std::string(src_.substr(start)),
                                  "unterminated string");
            const char c = src_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size())
                    continue;
                const char e = src_[pos_];
                switch (e) {
                case 'n': value += '\n'; break;
                case 't': value += '\t'; break;
                case '"': value += '"'; break;
                case '\\': value += '\\'; break;
                default:
                    throw SyntaxError(line_, col_, std::string("\\") + e, "unknown escape sequence");
                }
                advance();
                continue;
            }
            value += c;
            advance();
        }
        t.kind = Tok::String;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.value = std::move(value);
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { cur_ = lexer_.next(); }

    std::vector<Clause> program()
    {
        std::vector<Clause> clauses;
        while (cur_.kind != Tok::End)
            clauses.push_back(clause());
        return clauses;
    }

    Literal goal()
    {
        Literal l = literal(/*in_guard=*/false);
        if (cur_.kind == Tok::Dot)
            shift();
        expect_end();
        return l;
    }

    Term lone_term()
    {
        Term t = term();
        expect_end();
        return t;
    }

private:
    [[noreturn]] void fail(const Token& at, const std::string& message)
    {
        throw SyntaxError(at.line, at.column, at.text, message);
    }

    Token shift()
    {
        Token t = std::move(cur_);
        cur_ = lexer_.next();
        return t;
    }

    Token expect(Tok kind, const char* what)
    {
        if (cur_.kind != kind)
            fail(cur_, std::string("expected ") + what);
        return shift();
    }

    void expect_end()
    {
        if (cur_.kind != Tok::End)
            fail(cur_, "unexpected trailing input");
    }

    Clause clause()
    {
        const Token head_start = cur_;
        Clause c;
        c.head = literal(/*in_guard=*/false);
        if (!c.head.guard.empty())
            fail(head_start, "guard not allowed on a clause head");
        if (c.head.is_cut() || is_control_construct(c.head.key()))
            fail(head_start, "cannot redefine control construct " + c.head.key());
        if (cur_.kind == Tok::Neck) {
            shift();
            c.body.push_back(literal(false));
            while (cur_.kind == Tok::Comma) {
                shift();
                c.body.push_back(literal(false));
            }
        }
        expect(Tok::Dot, "'.' at end of clause");
        return c;
    }

    Literal literal(bool in_guard)
    {
        if (cur_.kind == Tok::Bang) {
            shift();
            return Literal{"!", {}, {}};
        }
        const Token name = expect(Tok::Symbol, "predicate name");
        Literal l;
        l.predicate = name.text;
        expect(Tok::LParen, "'(' after predicate name");
        if (cur_.kind != Tok::RParen)
            l.args = term_list();
        expect(Tok::RParen, "')'");
        if (in_guard && !allowed_in_guard(l.key()))
            fail(name, l.key() + " is not allowed inside a guard");
        if (cur_.kind == Tok::LBracket) {
            if (in_guard)
                fail(cur_, "guards cannot be nested");
            shift();
            l.guard.push_back(literal(true));
            while (cur_.kind == Tok::Comma) {
                shift();
                l.guard.push_back(literal(true));
            }
            expect(Tok::RBracket, "']' closing the guard");
        }
        return l;
    }

    std::vector<Term> term_list()
    {
        std::vector<Term> out;
        out.push_back(term());
        while (cur_.kind == Tok::Comma) {
            shift();
            out.push_back(term());
        }
        return out;
    }

    Term term()
    {
        switch (cur_.kind) {
        case Tok::Symbol: {
            Token name = shift();
            if (cur_.kind != Tok::LParen)
                return Term::atom(std::move(name.text));
            shift();
            std::vector<Term> args;
            if (cur_.kind != Tok::RParen)
                args = term_list();
            expect(Tok::RParen, "')'");
            return Term::compound(std::move(name.text), std::move(args));
        }
        case Tok::Variable:
            return Term::var(shift().text);
        case Tok::Integer: {
            Token t = shift();
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc{} || p != t.text.data() + t.text.size())
                fail(t, "integer out of range");
            return Term::integer(v);
        }
        case Tok::Decimal: {
            Token t = shift();
            return Term::decimal(std::strtod(t.text.c_str(), nullptr));
        }
        case Tok::String:
            return Term::text(shift().value);
        case Tok::LBrace:
            return slot_map();
        default:
            fail(cur_, "expected a term");
        }
    }

    Term slot_map()
    {
        shift(); // '{'
        std::vector<std::pair<std::string, Term>> entries;
        std::set<std::string> keys;
        if (cur_.kind == Tok::RBrace) {
            shift();
            return Term::slots({});
        }
        while (true) {
            const Token key = expect(Tok::Symbol, "slot key");
            if (!keys.insert(key.text).second)
                fail(key, "duplicate slot key");
            expect(Tok::Arrow, "'->' after slot key");
            entries.emplace_back(key.text, term());
            if (cur_.kind == Tok::Comma) {
                shift();
                continue;
            }
            expect(Tok::RBrace, "'}' closing the slot map");
            break;
        }
        return Term(SlotMap{std::move(entries)});
    }

    Lexer lexer_;
    Token cur_;
};

} // namespace

Rulebase parse_rulebase(std::string_view source, std::string name)
{
    Parser p(source);
    return Rulebase(std::move(name), p.program());
}

Literal parse_literal(std::string_view source)
{
    Parser p(source);
    return p.goal();
}

Term parse_term(std::string_view source)
{
    Parser p(source);
    return p.lone_term();
}

} // namespace modchat::rules
