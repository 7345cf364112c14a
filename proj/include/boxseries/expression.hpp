#pragma once

// Recursive-descent parser for univariate polynomial expressions.
//
//   expression := term (('+' | '-') term)*
//   term       := factor (('*' | '/') factor)*
//   factor     := ('+' | '-') factor | base ('^' integer)?
//   base       := number | variable | '(' expression ')'
//
// Numbers are parsed exactly ("0.5" is 1/2). Division needs a constant
// divisor; powers need a non-negative integer exponent.

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "boxseries/polynomial.hpp"

namespace boxseries {

class Expr {
public:
    enum class Op { Number, Variable, Add, Sub, Mul, Div, Neg, Pow };

    static Expr number(ExactRational v) { return Expr(Op::Number, std::move(v)); }
    static Expr variable() { return Expr(Op::Variable, ExactRational(0)); }
    static Expr binary(Op op, Expr lhs, Expr rhs) {
        Expr e(op, ExactRational(0));
        e.lhs_ = std::make_shared<Expr>(std::move(lhs));
        e.rhs_ = std::make_shared<Expr>(std::move(rhs));
        return e;
    }
    static Expr negate(Expr operand) {
        Expr e(Op::Neg, ExactRational(0));
        e.lhs_ = std::make_shared<Expr>(std::move(operand));
        return e;
    }
    static Expr power(Expr base, unsigned exponent) {
        Expr e(Op::Pow, ExactRational(0));
        e.lhs_ = std::make_shared<Expr>(std::move(base));
        e.exponent_ = exponent;
        return e;
    }

    Op op() const { return op_; }

    bool has_variable() const {
        switch (op_) {
        case Op::Number: return false;
        case Op::Variable: return true;
        case Op::Neg:
        case Op::Pow: return lhs_->has_variable();
        default: return lhs_->has_variable() || rhs_->has_variable();
        }
    }

    /// Direct evaluation of the tree at an exact point.
    ExactRational evaluate(const ExactRational& q) const {
        switch (op_) {
        case Op::Number: return value_;
        case Op::Variable: return q;
        case Op::Add: return lhs_->evaluate(q) + rhs_->evaluate(q);
        case Op::Sub: return lhs_->evaluate(q) - rhs_->evaluate(q);
        case Op::Mul: return lhs_->evaluate(q) * rhs_->evaluate(q);
        case Op::Div: return lhs_->evaluate(q) / rhs_->evaluate(q);
        case Op::Neg: return -lhs_->evaluate(q);
        case Op::Pow: return pow(lhs_->evaluate(q), exponent_);
        }
        return ExactRational(0);
    }

    /// Fully expanded polynomial. Callers guarantee divisors are constant.
    Polynomial expand() const {
        switch (op_) {
        case Op::Number: return Polynomial::constant(value_);
        case Op::Variable: return Polynomial::monomial(1);
        case Op::Add: return lhs_->expand() + rhs_->expand();
        case Op::Sub: return lhs_->expand() - rhs_->expand();
        case Op::Mul: return lhs_->expand() * rhs_->expand();
        case Op::Div: {
            ExactRational d = rhs_->evaluate(ExactRational(0));
            return lhs_->expand() * (ExactRational(1) / d);
        }
        case Op::Neg: return -lhs_->expand();
        case Op::Pow: return pow(lhs_->expand(), exponent_);
        }
        return {};
    }

    /// Canonical fully-parenthesised rendering, re-parseable.
    std::string to_string(const std::string& var = "q") const {
        switch (op_) {
        case Op::Number: return "(" + value_.to_fraction_string() + ")";
        case Op::Variable: return var;
        case Op::Add: return "(" + lhs_->to_string(var) + "+" + rhs_->to_string(var) + ")";
        case Op::Sub: return "(" + lhs_->to_string(var) + "-" + rhs_->to_string(var) + ")";
        case Op::Mul: return "(" + lhs_->to_string(var) + "*" + rhs_->to_string(var) + ")";
        case Op::Div: return "(" + lhs_->to_string(var) + "/" + rhs_->to_string(var) + ")";
        case Op::Neg: return "(-" + lhs_->to_string(var) + ")";
        case Op::Pow: return "(" + lhs_->to_string(var) + "^" + std::to_string(exponent_) + ")";
        }
        return {};
    }

private:
    Expr(Op op, ExactRational v) : op_(op), value_(std::move(v)) {}

    Op op_;
    ExactRational value_;
    std::shared_ptr<const Expr> lhs_;
    std::shared_ptr<const Expr> rhs_;
    unsigned exponent_ = 0;
};

struct ParsedExpression {
    Expr tree;
    std::string variable;  // empty when the expression is constant
};

namespace detail {

class ExpressionParser {
public:
    static constexpr unsigned kMaxExponent = 64;

    ExpressionParser(std::string_view text, std::optional<std::string> expected_var)
        : src_(normalise(text)), expected_(std::move(expected_var)) {}

    ParsedExpression parse() {
        skip_ws();
        if (at_end()) throw ParseError("empty expression", pos_);
        Expr e = parse_expression();
        skip_ws();
        if (!at_end()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return {std::move(e), var_};
    }

private:
    // Maps the Unicode minus sign to ASCII so positions stay byte offsets
    // of a simple string.
    static std::string normalise(std::string_view t) {
        std::string out;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i + 2 < t.size() && static_cast<unsigned char>(t[i]) == 0xE2 &&
                static_cast<unsigned char>(t[i + 1]) == 0x88 && static_cast<unsigned char>(t[i + 2]) == 0x92) {
                out += '-';
                i += 2;
            } else {
                out += t[i];
            }
        }
        return out;
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return at_end() ? '\0' : src_[pos_]; }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    Expr parse_expression() {
        Expr lhs = parse_term();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            Expr rhs = parse_term();
            lhs = Expr::binary(c == '+' ? Expr::Op::Add : Expr::Op::Sub, std::move(lhs), std::move(rhs));
        }
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            skip_ws();
            std::size_t divisor_pos = pos_;
            Expr rhs = parse_factor();
            if (c == '/') {
                if (rhs.has_variable())
                    throw NonPolynomialError("variable in divisor", divisor_pos);
                if (rhs.evaluate(ExactRational(0)).is_zero())
                    throw ParseError("division by zero", divisor_pos);
            }
            lhs = Expr::binary(c == '*' ? Expr::Op::Mul : Expr::Op::Div, std::move(lhs), std::move(rhs));
        }
    }

    Expr parse_factor() {
        skip_ws();
        char c = peek();
        if (c == '+' || c == '-') {
            ++pos_;
            Expr inner = parse_factor();
            return c == '-' ? Expr::negate(std::move(inner)) : inner;
        }
        Expr base = parse_base();
        skip_ws();
        if (peek() != '^') return base;
        ++pos_;
        skip_ws();
        std::size_t exp_pos = pos_;
        if (peek() == '-') throw NonPolynomialError("negative power", exp_pos);
        if (peek() == '(') throw NonPolynomialError("exponent must be a non-negative integer literal", exp_pos);
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(peek()))) digits += src_[pos_++];
        if (digits.empty()) throw ParseError("expected integer exponent", exp_pos);
        if (peek() == '.') throw NonPolynomialError("non-integer power", exp_pos);
        if (digits.size() > 3 || std::stoul(digits) > kMaxExponent)
            throw ParseError("exponent too large", exp_pos);
        return Expr::power(std::move(base), static_cast<unsigned>(std::stoul(digits)));
    }

    Expr parse_base() {
        skip_ws();
        if (at_end()) throw ParseError("unexpected end of expression", pos_);
        char c = peek();
        if (c == '(') {
            std::size_t open = pos_;
            ++pos_;
            Expr e = parse_expression();
            skip_ws();
            if (peek() != ')') throw ParseError("missing ')' for '(' opened at " + std::to_string(open), pos_);
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') ++pos_;
            std::string lit = src_.substr(start, pos_ - start);
            try {
                return Expr::number(rational_from_decimal_text(lit));
            } catch (const ValidationError&) {
                throw ParseError("malformed number '" + lit + "'", start);
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
            std::string name = src_.substr(start, pos_ - start);
            if (expected_ && name != *expected_)
                throw NonPolynomialError("unknown variable '" + name + "' (expected '" + *expected_ + "')", start);
            if (var_.empty()) {
                var_ = name;
            } else if (var_ != name) {
                throw NonPolynomialError("multiple variables '" + var_ + "' and '" + name + "'", start);
            }
            return Expr::variable();
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    std::string src_;
    std::size_t pos_ = 0;
    std::optional<std::string> expected_;
    std::string var_;
};

}  // namespace detail

inline ParsedExpression parse_expression(std::string_view text,
                                         std::optional<std::string> variable = std::nullopt) {
    return detail::ExpressionParser(text, std::move(variable)).parse();
}

/// Parses and expands a potential such as "1/2*q^2*(1-q)^2".
inline Polynomial parse_potential(std::string_view text, std::optional<std::string> variable = std::nullopt) {
    return parse_expression(text, std::move(variable)).tree.expand();
}

}  // namespace boxseries
