#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vml {

// The arithmetic-expression sublanguage used by measure, coefficient, shift
// and weight rules: constants, a free variable, + - * / ^, sqrt, log, exp,
// cos, sin, abs, parentheses, and the constant pi. Rules are closed forms
// over an index (usually n), never stored arrays.
class Expr {
 public:
  Expr() = default;

  // Throws ConfigError on malformed input.
  static Expr parse(std::string_view src);

  bool empty() const { return nodes_.empty(); }
  const std::string& source() const { return source_; }

  // Names of free variables appearing in the expression.
  std::vector<std::string> variables() const;

  // Evaluate with every free variable bound to the same value. The usual
  // case: single-variable rules over n.
  double operator()(double value) const;

  // Evaluate with named bindings; unknown variables throw ConfigError.
  double eval(
      std::initializer_list<std::pair<std::string_view, double>> bindings)
      const;

 private:
  enum class Op : unsigned char {
    constant,
    variable,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    sqrt_fn,
    log_fn,
    exp_fn,
    cos_fn,
    sin_fn,
    abs_fn,
  };

  struct Node {
    Op op;
    double value = 0.0;  // constant
    int lhs = -1;
    int rhs = -1;
    std::string name;  // variable
  };

  double eval_node(
      int index,
      const std::vector<std::pair<std::string_view, double>>& bindings) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string source_;

  friend class ExprParser;
};

}  // namespace vml
