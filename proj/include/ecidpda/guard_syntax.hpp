#pragma once

#include "constraint.hpp"
#include "errors.hpp"

#include <cctype>
#include <string>
#include <string_view>

namespace ecidpda {

// Guard text grammar:
//
//   guard   := disj
//   disj    := conj ("or" conj)*
//   conj    := unary ("and" unary)*
//   unary   := "not" unary | "(" guard ")" | "true" | "false" | clock rel rational
//   clock   := "hist(" symbol ")" | "pred(" symbol ")" | "stackhist" | "stackpred"
//   rel     := "<=" | ">=" | "=" | "<" | ">"
//
// A symbol inside hist(...)/pred(...) is at least one character long and ends
// at the first ')' after its first character.

namespace detail {

class GuardParser {
public:
    explicit GuardParser(std::string_view text) : text_(text) {}

    Constraint parse()
    {
        Constraint out = disjunction();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, 1, pos_ + 1); }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool at_word(std::string_view word)
    {
        skip_space();
        if (text_.substr(pos_, word.size()) != word)
            return false;
        const std::size_t end = pos_ + word.size();
        if (end < text_.size()) {
            const unsigned char next = static_cast<unsigned char>(text_[end]);
            if (std::isalnum(next) || next == '_')
                return false;
        }
        return true;
    }

    bool accept_word(std::string_view word)
    {
        if (!at_word(word))
            return false;
        pos_ += word.size();
        return true;
    }

    bool accept(char ch)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    Constraint disjunction()
    {
        Constraint out = conjunction();
        while (accept_word("or"))
            out = Constraint::disj(out, conjunction());
        return out;
    }

    Constraint conjunction()
    {
        Constraint out = unary();
        while (accept_word("and"))
            out = Constraint::conj(out, unary());
        return out;
    }

    Constraint unary()
    {
        if (accept_word("not"))
            return Constraint::negate(unary());
        if (accept('(')) {
            Constraint inner = disjunction();
            if (!accept(')'))
                fail("expected ')'");
            return inner;
        }
        if (accept_word("true"))
            return Constraint::top();
        if (accept_word("false"))
            return Constraint::bottom();
        return comparison();
    }

    std::string symbol_argument()
    {
        if (pos_ >= text_.size() || text_[pos_] != '(')
            fail("expected '(' after clock name");
        ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= text_.size() || std::isspace(static_cast<unsigned char>(text_[pos_])))
            fail("expected a symbol");
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != ')' && !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ >= text_.size() || text_[pos_] != ')')
            fail("expected ')' after symbol");
        std::string symbol(text_.substr(start, pos_ - start));
        ++pos_;
        return symbol;
    }

    Clock clock()
    {
        skip_space();
        if (accept_word("stackhist"))
            return Clock::stack_history();
        if (accept_word("stackpred"))
            return Clock::stack_prediction();
        if (text_.substr(pos_, 5) == "hist(") {
            pos_ += 4;
            return Clock::history(symbol_argument());
        }
        if (text_.substr(pos_, 5) == "pred(") {
            pos_ += 4;
            return Clock::prediction(symbol_argument());
        }
        fail("expected a clock, 'true', 'false', 'not' or '('");
    }

    Relation relation()
    {
        skip_space();
        auto next = [this](std::size_t k) { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; };
        if (next(0) == '<' && next(1) == '=') {
            pos_ += 2;
            return Relation::le;
        }
        if (next(0) == '>' && next(1) == '=') {
            pos_ += 2;
            return Relation::ge;
        }
        if (next(0) == '<') {
            ++pos_;
            return Relation::lt;
        }
        if (next(0) == '>') {
            ++pos_;
            return Relation::gt;
        }
        if (next(0) == '=') {
            ++pos_;
            return Relation::eq;
        }
        fail("expected one of <= >= = < >");
    }

    Rational constant()
    {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == '/'))
            ++pos_;
        if (start == pos_)
            fail("expected a nonnegative rational constant");
        try {
            return parse_rational(text_.substr(start, pos_ - start));
        } catch (const std::invalid_argument& e) {
            pos_ = start;
            fail(e.what());
        }
    }

    Constraint comparison()
    {
        const Clock c = clock();
        const Relation r = relation();
        return desugar(r, c, constant());
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::string clock_text(const Clock& c)
{
    switch (c.kind) {
    case ClockKind::symbol_history:
        return "hist(" + c.symbol + ")";
    case ClockKind::symbol_prediction:
        return "pred(" + c.symbol + ")";
    case ClockKind::stack_history:
        return "stackhist";
    case ClockKind::stack_prediction:
        return "stackpred";
    }
    return {};
}

inline void print(const Constraint& phi, std::string& out);

inline void print_child(const Constraint& child, bool parenthesize, std::string& out)
{
    if (parenthesize)
        out += '(';
    print(child, out);
    if (parenthesize)
        out += ')';
}

inline void print(const Constraint& phi, std::string& out)
{
    using Kind = Constraint::Kind;
    switch (phi.kind()) {
    case Kind::truth:
        out += "true";
        break;
    case Kind::falsity:
        out += "false";
        break;
    case Kind::atom: {
        const auto& a = phi.atomic();
        out += clock_text(a.clock);
        out += a.op == Comparison::at_most ? " <= " : " >= ";
        out += format_rational(a.bound);
        break;
    }
    case Kind::negation: {
        const auto inner = phi.operand().kind();
        out += "not ";
        print_child(phi.operand(), inner == Kind::conjunction || inner == Kind::disjunction, out);
        break;
    }
    case Kind::conjunction:
        print_child(phi.lhs(), phi.lhs().kind() == Kind::disjunction, out);
        out += " and ";
        print_child(phi.rhs(), phi.rhs().kind() == Kind::disjunction || phi.rhs().kind() == Kind::conjunction, out);
        break;
    case Kind::disjunction:
        print(phi.lhs(), out);
        out += " or ";
        print_child(phi.rhs(), phi.rhs().kind() == Kind::disjunction, out);
        break;
    }
}

} // namespace detail

/// Parses guard text; throws ParseError with the 1-based column of the problem.
inline Constraint parse_guard(std::string_view text) { return detail::GuardParser(text).parse(); }

/// Prints a guard so that parse_guard reproduces the same tree.
inline std::string to_string(const Constraint& phi)
{
    std::string out;
    detail::print(phi, out);
    return out;
}

inline std::string to_string(const AtomicConstraint& a) { return to_string(Constraint::atom(a)); }

inline std::string to_string(const Clock& c) { return detail::clock_text(c); }

} // namespace ecidpda
