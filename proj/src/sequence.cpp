#include "symdyn/sequence.hpp"

#include <cctype>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "symdyn/error.hpp"

namespace symdyn {

struct Sequence::Node {
    enum class Op { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Call1, Call2 } op;
    double value = 0;
    std::function<double(double)> fn1;
    std::function<double(double, double)> fn2;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double n) const {
        switch (op) {
        case Op::Number: return value;
        case Op::Var: return n;
        case Op::Add: return lhs->eval(n) + rhs->eval(n);
        case Op::Sub: return lhs->eval(n) - rhs->eval(n);
        case Op::Mul: return lhs->eval(n) * rhs->eval(n);
        case Op::Div: return lhs->eval(n) / rhs->eval(n);
        case Op::Pow: return std::pow(lhs->eval(n), rhs->eval(n));
        case Op::Neg: return -lhs->eval(n);
        case Op::Call1: return fn1(lhs->eval(n));
        case Op::Call2: return fn2(lhs->eval(n), rhs->eval(n));
        }
        return 0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Sequence::Node>;

// Recursive descent: expr := term (('+'|'-') term)*, term := unary (('*'|'/') unary)*,
// unary := '-' unary | power, power := atom ('^' unary)?
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        auto node = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return node;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError(fmt::format("bad sequence expression '{}' at offset {}: {}", text_, pos_, what));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(Sequence::Node::Op op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Sequence::Node>();
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr expr() {
        auto node = term();
        for (;;) {
            if (accept('+')) node = binary(Sequence::Node::Op::Add, node, term());
            else if (accept('-')) node = binary(Sequence::Node::Op::Sub, node, term());
            else return node;
        }
    }

    NodePtr term() {
        auto node = unary();
        for (;;) {
            if (accept('*')) node = binary(Sequence::Node::Op::Mul, node, unary());
            else if (accept('/')) node = binary(Sequence::Node::Op::Div, node, unary());
            else return node;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Sequence::Node>();
            n->op = Sequence::Node::Op::Neg;
            n->lhs = unary();
            return n;
        }
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (accept('^')) return binary(Sequence::Node::Op::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (accept('(')) {
            auto inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                    text_[pos_] == 'e' || text_[pos_] == 'E' ||
                    ((text_[pos_] == '-' || text_[pos_] == '+') && pos_ > start &&
                     (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
                ++pos_;
            auto n = std::make_shared<Sequence::Node>();
            n->op = Sequence::Node::Op::Number;
            try {
                n->value = std::stod(std::string(text_.substr(start, pos_ - start)));
            } catch (const std::exception&) {
                fail("malformed number");
            }
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (name == "n" || name == "k") {
                auto n = std::make_shared<Sequence::Node>();
                n->op = Sequence::Node::Op::Var;
                return n;
            }
            return call(name);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr call(const std::string& name) {
        static const std::pair<const char*, double (*)(double)> unary_fns[] = {
            {"sqrt", [](double x) { return std::sqrt(x); }},
            {"ln", [](double x) { return std::log(x); }},
            {"log", [](double x) { return std::log(x); }},
            {"log2", [](double x) { return std::log2(x); }},
            {"exp", [](double x) { return std::exp(x); }},
            {"ceil", [](double x) { return std::ceil(x); }},
            {"floor", [](double x) { return std::floor(x); }},
            {"abs", [](double x) { return std::fabs(x); }},
        };
        if (!accept('(')) fail("expected '(' after function name " + name);
        auto first = expr();
        auto n = std::make_shared<Sequence::Node>();
        n->lhs = first;
        if (name == "min" || name == "max") {
            if (!accept(',')) fail("expected ',' in " + name);
            n->rhs = expr();
            n->op = Sequence::Node::Op::Call2;
            if (name == "min") n->fn2 = [](double a, double b) { return std::min(a, b); };
            else n->fn2 = [](double a, double b) { return std::max(a, b); };
        } else {
            n->op = Sequence::Node::Op::Call1;
            for (auto& [fname, fn] : unary_fns)
                if (name == fname) n->fn1 = fn;
            if (!n->fn1) fail("unknown function " + name);
        }
        if (!accept(')')) fail("expected ')' after arguments of " + name);
        return n;
    }
};

} // namespace

Sequence Sequence::formula(std::string text) {
    Sequence s;
    s.expr_ = Parser(text).parse();
    s.description_ = std::move(text);
    return s;
}

Sequence Sequence::list(std::vector<double> values, std::int64_t first_index) {
    Sequence s;
    s.values_ = std::move(values);
    s.first_ = first_index;
    s.description_ = fmt::format("list[{}..{}]", first_index,
                                 first_index + static_cast<std::int64_t>(s.values_.size()) - 1);
    return s;
}

Sequence Sequence::constant(double value) {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::Number;
    n->value = value;
    Sequence s;
    s.expr_ = n;
    s.description_ = fmt::format("{}", value);
    return s;
}

bool Sequence::defined_at(std::int64_t n) const {
    if (expr_) return true;
    return n >= first_ && n < first_ + static_cast<std::int64_t>(values_.size());
}

double Sequence::at(std::int64_t n) const {
    if (expr_) return expr_->eval(static_cast<double>(n));
    if (!defined_at(n))
        throw InputError(fmt::format("sequence {} undefined at index {}", description_, n));
    return values_[static_cast<std::size_t>(n - first_)];
}

std::int64_t Sequence::at_int(std::int64_t n) const {
    double v = at(n);
    double r = std::round(v);
    if (!std::isfinite(v) || std::fabs(v - r) > 1e-9)
        throw InputError(fmt::format("sequence {} is not integer-valued at index {} (value {})", description_, n, v));
    return static_cast<std::int64_t>(r);
}

std::optional<std::int64_t> Sequence::last_index() const {
    if (expr_) return std::nullopt;
    return first_ + static_cast<std::int64_t>(values_.size()) - 1;
}

} // namespace symdyn
