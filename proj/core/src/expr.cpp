#include "vml/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "vml/errors.hpp"

namespace vml {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr out;
    out.source_ = std::string(src_);
    nodes_ = &out.nodes_;
    out.root_ = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) {
      throw ConfigError("expression: trailing input at position " +
                        std::to_string(pos_) + " in \"" + out.source_ + "\"");
    }
    if (out.root_ < 0) throw ConfigError("expression: empty input");
    return out;
  }

 private:
  using Op = Expr::Op;

  int push(Expr::Node n) {
    nodes_->push_back(std::move(n));
    return static_cast<int>(nodes_->size()) - 1;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        lhs = push({Op::add, 0.0, lhs, parse_term(), {}});
      } else if (eat('-')) {
        lhs = push({Op::sub, 0.0, lhs, parse_term(), {}});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (eat('*')) {
        lhs = push({Op::mul, 0.0, lhs, parse_unary(), {}});
      } else if (eat('/')) {
        lhs = push({Op::div, 0.0, lhs, parse_unary(), {}});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (eat('-')) return push({Op::neg, 0.0, parse_unary(), -1, {}});
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  // Right-associative; the exponent may carry its own sign, so 2^-n works.
  int parse_power() {
    int base = parse_primary();
    if (eat('^')) {
      return push({Op::pow, 0.0, base, parse_unary(), {}});
    }
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ConfigError("expression: unexpected end of input");
    const char c = src_[pos_];

    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!eat(')')) throw ConfigError("expression: missing ')'");
      return inner;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.data() + pos_;
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin) throw ConfigError("expression: bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return push({Op::constant, value, -1, -1, {}});
    }

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      std::string name(src_.substr(start, pos_ - start));
      if (peek() == '(') {
        Op fn;
        if (name == "sqrt") fn = Op::sqrt_fn;
        else if (name == "log") fn = Op::log_fn;
        else if (name == "exp") fn = Op::exp_fn;
        else if (name == "cos") fn = Op::cos_fn;
        else if (name == "sin") fn = Op::sin_fn;
        else if (name == "abs") fn = Op::abs_fn;
        else throw ConfigError("expression: unknown function \"" + name + "\"");
        eat('(');
        int arg = parse_expr();
        if (!eat(')')) throw ConfigError("expression: missing ')' after " + name);
        return push({fn, 0.0, arg, -1, {}});
      }
      if (name == "pi") return push({Op::constant, std::numbers::pi, -1, -1, {}});
      return push({Op::variable, 0.0, -1, -1, std::move(name)});
    }

    throw ConfigError(std::string("expression: unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node>* nodes_ = nullptr;
};

Expr Expr::parse(std::string_view src) { return ExprParser(src).run(); }

std::vector<std::string> Expr::variables() const {
  std::set<std::string> seen;
  for (const auto& n : nodes_) {
    if (n.op == Op::variable) seen.insert(n.name);
  }
  return {seen.begin(), seen.end()};
}

double Expr::eval_node(
    int index,
    const std::vector<std::pair<std::string_view, double>>& bindings) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::constant:
      return n.value;
    case Op::variable:
      for (const auto& [name, value] : bindings) {
        if (name == n.name) return value;
      }
      throw ConfigError("expression: unbound variable \"" + n.name + "\" in \"" +
                        source_ + "\"");
    case Op::add:
      return eval_node(n.lhs, bindings) + eval_node(n.rhs, bindings);
    case Op::sub:
      return eval_node(n.lhs, bindings) - eval_node(n.rhs, bindings);
    case Op::mul:
      return eval_node(n.lhs, bindings) * eval_node(n.rhs, bindings);
    case Op::div:
      return eval_node(n.lhs, bindings) / eval_node(n.rhs, bindings);
    case Op::pow:
      return std::pow(eval_node(n.lhs, bindings), eval_node(n.rhs, bindings));
    case Op::neg:
      return -eval_node(n.lhs, bindings);
    case Op::sqrt_fn:
      return std::sqrt(eval_node(n.lhs, bindings));
    case Op::log_fn:
      return std::log(eval_node(n.lhs, bindings));
    case Op::exp_fn:
      return std::exp(eval_node(n.lhs, bindings));
    case Op::cos_fn:
      return std::cos(eval_node(n.lhs, bindings));
    case Op::sin_fn:
      return std::sin(eval_node(n.lhs, bindings));
    case Op::abs_fn:
      return std::abs(eval_node(n.lhs, bindings));
  }
  throw ConfigError("expression: corrupt node");
}

double Expr::operator()(double value) const {
  if (empty()) throw ConfigError("expression: evaluating empty expression");
  std::vector<std::pair<std::string_view, double>> bindings;
  for (const auto& n : nodes_) {
    if (n.op == Op::variable) bindings.emplace_back(n.name, value);
  }
  return eval_node(root_, bindings);
}

double Expr::eval(
    std::initializer_list<std::pair<std::string_view, double>> bindings) const {
  if (empty()) throw ConfigError("expression: evaluating empty expression");
  std::vector<std::pair<std::string_view, double>> bound(bindings);
  return eval_node(root_, bound);
}

}  // namespace vml
