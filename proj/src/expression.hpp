#ifndef SMOOTHNET_EXPRESSION_HPP
#define SMOOTHNET_EXPRESSION_HPP

#include <memory>
#include <string>
#include <vector>

namespace smoothnet {

// Scalar expression over x (and optionally y). Supports + - * / ^ with the
// usual precedence, unary minus, parentheses, numeric literals, and the
// functions sin, cos, exp. Built by parse_expression below.
class Expression {
public:
    struct Node;

    double operator()(double x) const;
    double operator()(double x, double y) const;
    double eval(const std::vector<double>& point) const;

    // 2 when the expression mentions y, otherwise 1
    int input_dim() const { return uses_y_ ? 2 : 1; }

    const std::string& text() const { return text_; }

private:
    friend Expression parse_expression(const std::string& text);

    std::shared_ptr<const Node> root_;
    std::string text_;
    bool uses_y_ = false;
};

// Parses text into an Expression. Errors throw std::invalid_argument with a
// message citing the 1-based character position.
Expression parse_expression(const std::string& text);

} // namespace smoothnet

#endif
