#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "invflow/common.hpp"

namespace invflow::expr {

/// Variable slots an expression may read. Names are resolved once at parse time.
///   t          slot 0
///   x1, x2     slots 1, 2   (`x` is an alias of x1)
///   v1 .. vm   slots 3 .. 2+m
struct VariableLayout {
    std::size_t state_dim = 0;

    [[nodiscard]] std::size_t slot_count() const { return 3 + state_dim; }
};

/// Compiled arithmetic expression over + - * / ^, unary minus, parentheses,
/// sin cos exp sqrt abs log min max and the constant `pi`.
class Expression {
public:
    static Expression parse(std::string_view source, const VariableLayout& layout);

    /// `slots` must have VariableLayout::slot_count() entries.
    [[nodiscard]] double evaluate(std::span<const double> slots) const;

    [[nodiscard]] const std::string& source() const { return source_; }

    /// True when the expression reads the slot (t = 0, x1 = 1, ...).
    [[nodiscard]] bool uses_slot(std::size_t slot) const;

private:
    enum class Op : std::uint8_t {
        Constant, Variable, Neg, Add, Sub, Mul, Div, Pow,
        Sin, Cos, Exp, Sqrt, Abs, Log, Min, Max
    };
    struct Node {
        Op op;
        double value = 0.0;
        std::size_t slot = 0;
        std::size_t lhs = 0;
        std::size_t rhs = 0;
    };
    class Parser;

    [[nodiscard]] double eval_node(std::size_t index, std::span<const double> slots) const;

    std::string source_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

/// Vector of expressions sharing one layout, e.g. phi_1 .. phi_m.
class ExpressionVector {
public:
    ExpressionVector() = default;
    ExpressionVector(const std::vector<std::string>& sources, const VariableLayout& layout);

    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] bool uses_slot(std::size_t slot) const;

    /// Fill the slot buffer from (t, x, v) and evaluate every component into `out`.
    void evaluate(double t, std::span<const double> x, std::span<const double> v,
                  std::span<double> out) const;

private:
    std::vector<Expression> items_;
    VariableLayout layout_;
};

}  // namespace invflow::expr
