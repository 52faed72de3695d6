#include "invflow/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace invflow::expr {

// Recursive descent:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?
//   atom    := number | name | name '(' sum (',' sum)* ')' | '(' sum ')'
class Expression::Parser {
public:
    Parser(std::string_view src, const VariableLayout& layout, std::vector<Node>& nodes)
        : src_(src), layout_(layout), nodes_(nodes) {}

    std::size_t parse() {
        const std::size_t root = sum();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression '" + std::string(src_) + "': " + what + " at offset " +
                         std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::size_t push(Node n) {
        nodes_.push_back(n);
        return nodes_.size() - 1;
    }

    std::size_t binary(Op op, std::size_t a, std::size_t b) { return push({op, 0.0, 0, a, b}); }

    std::size_t sum() {
        std::size_t lhs = product();
        while (true) {
            if (accept('+')) lhs = binary(Op::Add, lhs, product());
            else if (accept('-')) lhs = binary(Op::Sub, lhs, product());
            else return lhs;
        }
    }

    std::size_t product() {
        std::size_t lhs = unary();
        while (true) {
            if (accept('*')) lhs = binary(Op::Mul, lhs, unary());
            else if (accept('/')) lhs = binary(Op::Div, lhs, unary());
            else return lhs;
        }
    }

    std::size_t unary() {
        if (accept('-')) return push({Op::Neg, 0.0, 0, unary(), 0});
        if (accept('+')) return unary();
        return power();
    }

    std::size_t power() {
        const std::size_t base = atom();
        if (accept('^')) return binary(Op::Pow, base, unary());
        return base;
    }

    std::size_t atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (accept('(')) {
            const std::size_t inner = sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail(std::string("unexpected character '") + c + "'");
    }

    std::size_t number() {
        double value = 0.0;
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + src_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr == first) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return push({Op::Constant, value});
    }

    std::size_t name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string id(src_.substr(start, pos_ - start));

        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') return call(id);

        if (id == "pi") return push({Op::Constant, std::numbers::pi});
        if (id == "t") return push({Op::Variable, 0.0, 0});
        if (id == "x" || id == "x1") return push({Op::Variable, 0.0, 1});
        if (id == "x2") return push({Op::Variable, 0.0, 2});
        if (id.size() > 1 && id[0] == 'v') {
            std::size_t k = 0;
            auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), k);
            if (ec == std::errc{} && ptr == id.data() + id.size() && k >= 1 && k <= layout_.state_dim)
                return push({Op::Variable, 0.0, 2 + k});
        }
        fail("unknown variable '" + id + "'");
    }

    std::size_t call(const std::string& fn) {
        accept('(');
        std::vector<std::size_t> args{sum()};
        while (accept(',')) args.push_back(sum());
        if (!accept(')')) fail("expected ')' after arguments of " + fn);

        static constexpr std::pair<std::string_view, Op> kUnary[] = {
            {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp},
            {"sqrt", Op::Sqrt}, {"abs", Op::Abs}, {"log", Op::Log}};
        for (const auto& [name, op] : kUnary)
            if (fn == name) {
                if (args.size() != 1) fail(fn + " takes one argument");
                return push({op, 0.0, 0, args[0], 0});
            }
        if (fn == "min" || fn == "max") {
            if (args.size() < 2) fail(fn + " takes at least two arguments");
            const Op op = fn == "min" ? Op::Min : Op::Max;
            std::size_t acc = args[0];
            for (std::size_t i = 1; i < args.size(); ++i) acc = binary(op, acc, args[i]);
            return acc;
        }
        fail("unknown function '" + fn + "'");
    }

    std::string_view src_;
    const VariableLayout& layout_;
    std::vector<Node>& nodes_;
    std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view source, const VariableLayout& layout) {
    Expression e;
    e.source_ = std::string(source);
    Parser parser(e.source_, layout, e.nodes_);
    e.root_ = parser.parse();
    return e;
}

bool Expression::uses_slot(std::size_t slot) const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [slot](const Node& n) { return n.op == Op::Variable && n.slot == slot; });
}

double Expression::evaluate(std::span<const double> slots) const { return eval_node(root_, slots); }

double Expression::eval_node(std::size_t index, std::span<const double> slots) const {
    const Node& n = nodes_[index];
    switch (n.op) {
        case Op::Constant: return n.value;
        case Op::Variable: return slots[n.slot];
        case Op::Neg: return -eval_node(n.lhs, slots);
        case Op::Add: return eval_node(n.lhs, slots) + eval_node(n.rhs, slots);
        case Op::Sub: return eval_node(n.lhs, slots) - eval_node(n.rhs, slots);
        case Op::Mul: return eval_node(n.lhs, slots) * eval_node(n.rhs, slots);
        case Op::Div: return eval_node(n.lhs, slots) / eval_node(n.rhs, slots);
        case Op::Pow: {
            const double base = eval_node(n.lhs, slots);
            const double ex = eval_node(n.rhs, slots);
            if (ex == 2.0) return base * base;
            if (ex == 3.0) return base * base * base;
            return std::pow(base, ex);
        }
        case Op::Sin: return std::sin(eval_node(n.lhs, slots));
        case Op::Cos: return std::cos(eval_node(n.lhs, slots));
        case Op::Exp: return std::exp(eval_node(n.lhs, slots));
        case Op::Sqrt: return std::sqrt(eval_node(n.lhs, slots));
        case Op::Abs: return std::abs(eval_node(n.lhs, slots));
        case Op::Log: return std::log(eval_node(n.lhs, slots));
        case Op::Min: return std::min(eval_node(n.lhs, slots), eval_node(n.rhs, slots));
        case Op::Max: return std::max(eval_node(n.lhs, slots), eval_node(n.rhs, slots));
    }
    return 0.0;
}

ExpressionVector::ExpressionVector(const std::vector<std::string>& sources, const VariableLayout& layout)
    : layout_(layout) {
    items_.reserve(sources.size());
    for (const auto& s : sources) items_.push_back(Expression::parse(s, layout));
}

bool ExpressionVector::uses_slot(std::size_t slot) const {
    return std::any_of(items_.begin(), items_.end(), [slot](const Expression& e) { return e.uses_slot(slot); });
}

void ExpressionVector::evaluate(double t, std::span<const double> x, std::span<const double> v,
                                std::span<double> out) const {
    // stack buffer for the common small cases
    double small[16];
    std::vector<double> large;
    const std::size_t n = layout_.slot_count();
    std::span<double> slots;
    if (n <= 16) {
        slots = std::span<double>(small, n);
    } else {
        large.assign(n, 0.0);
        slots = large;
    }
    std::fill(slots.begin(), slots.end(), 0.0);
    slots[0] = t;
    for (std::size_t j = 0; j < x.size() && j < 2; ++j) slots[1 + j] = x[j];
    for (std::size_t k = 0; k < v.size() && k < layout_.state_dim; ++k) slots[3 + k] = v[k];
    for (std::size_t i = 0; i < items_.size(); ++i) out[i] = items_[i].evaluate(slots);
}

}  // namespace invflow::expr
