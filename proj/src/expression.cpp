#include "expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace smoothnet {

struct Expression::Node {
    enum class Op { Constant, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
    Op op = Op::Constant;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

double eval_node(const Node& n, double x, double y) {
    switch (n.op) {
        case Node::Op::Constant: return n.value;
        case Node::Op::VarX: return x;
        case Node::Op::VarY: return y;
        case Node::Op::Add: return eval_node(*n.lhs, x, y) + eval_node(*n.rhs, x, y);
        case Node::Op::Sub: return eval_node(*n.lhs, x, y) - eval_node(*n.rhs, x, y);
        case Node::Op::Mul: return eval_node(*n.lhs, x, y) * eval_node(*n.rhs, x, y);
        case Node::Op::Div: return eval_node(*n.lhs, x, y) / eval_node(*n.rhs, x, y);
        case Node::Op::Pow: return std::pow(eval_node(*n.lhs, x, y), eval_node(*n.rhs, x, y));
        case Node::Op::Neg: return -eval_node(*n.lhs, x, y);
        case Node::Op::Sin: return std::sin(eval_node(*n.lhs, x, y));
        case Node::Op::Cos: return std::cos(eval_node(*n.lhs, x, y));
        case Node::Op::Exp: return std::exp(eval_node(*n.lhs, x, y));
    }
    return 0.0;
}

bool mentions_y(const Node& n) {
    if (n.op == Node::Op::VarY) return true;
    if (n.lhs && mentions_y(*n.lhs)) return true;
    return n.rhs && mentions_y(*n.rhs);
}

// Recursive-descent parser. pos_ always points at the next unread character;
// errors cite it 1-based.
class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run() {
        NodePtr root = parse_sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression error at position " + std::to_string(pos_ + 1) +
                                    ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = make(Node::Op::Add, lhs, parse_term());
            else if (eat('-'))
                lhs = make(Node::Op::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (eat('*'))
                lhs = make(Node::Op::Mul, lhs, parse_unary());
            else if (eat('/'))
                lhs = make(Node::Op::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return make(Node::Op::Neg, parse_unary());
        return parse_power();
    }

    // ^ binds tighter than unary minus and associates right, so -x^2 is
    // -(x^2) and 2^3^2 is 2^(3^2)
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (eat('^')) return make(Node::Op::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr parse_number() {
        double value = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto res = std::from_chars(begin, end, value, std::chars_format::general);
        if (res.ec != std::errc()) fail("malformed number");
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Constant;
        n->value = value;
        return n;
    }

    NodePtr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "x") return make(Node::Op::VarX);
        if (name == "y") return make(Node::Op::VarY);
        Node::Op op;
        if (name == "sin")
            op = Node::Op::Sin;
        else if (name == "cos")
            op = Node::Op::Cos;
        else if (name == "exp")
            op = Node::Op::Exp;
        else {
            pos_ = start;
            fail("unknown name '" + name + "'");
        }
        if (!eat('(')) fail("expected '(' after '" + name + "'");
        NodePtr arg = parse_sum();
        if (!eat(')')) fail("expected ')'");
        return make(op, arg);
    }
};

} // namespace

double Expression::operator()(double x) const {
    if (uses_y_) throw std::invalid_argument("expression needs two inputs: " + text_);
    return eval_node(*root_, x, 0.0);
}

double Expression::operator()(double x, double y) const { return eval_node(*root_, x, y); }

double Expression::eval(const std::vector<double>& point) const {
    if (point.size() != static_cast<std::size_t>(input_dim()))
        throw std::invalid_argument("expression expects " + std::to_string(input_dim()) +
                                    " inputs, got " + std::to_string(point.size()));
    return eval_node(*root_, point[0], uses_y_ ? point[1] : 0.0);
}

Expression parse_expression(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).run();
    e.text_ = text;
    e.uses_y_ = mentions_y(*e.root_);
    return e;
}

} // namespace smoothnet
