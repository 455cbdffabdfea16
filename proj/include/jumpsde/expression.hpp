#pragma once

// Small arithmetic expression language for user-supplied coefficients.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          right associative
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
//
// Names are the variables t, x, z and the constants pi, e. Functions: sin, cos,
// tan, arctan (alias atan), exp, log, sqrt, abs.

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "jumpsde/error.hpp"

namespace jumpsde {

class Expression {
 public:
  struct Vars {
    double t = 0.0;
    double x = 0.0;
    double z = 0.0;
  };

  static Expression parse(std::string_view source) {
    Parser p{source, 0};
    Expression e;
    e.source_ = std::string(source);
    e.nodes_ = std::make_shared<std::vector<Node>>();
    p.out = e.nodes_.get();
    e.root_ = p.expr();
    p.skip();
    if (p.pos != source.size()) p.fail("unexpected trailing input");
    for (const auto& n : *e.nodes_) {
      if (n.op == Op::var_t) e.uses_t_ = true;
      if (n.op == Op::var_z) e.uses_z_ = true;
    }
    return e;
  }

  double operator()(double t, double x, double z = 0.0) const { return eval(root_, Vars{t, x, z}); }

  const std::string& source() const { return source_; }
  bool uses_t() const { return uses_t_; }
  bool uses_z() const { return uses_z_; }

 private:
  enum class Op {
    constant, var_t, var_x, var_z, add, sub, mul, div, pow, neg,
    sin, cos, tan, atan, exp, log, sqrt, abs
  };
  struct Node {
    Op op;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  struct Parser {
    std::string_view src;
    std::size_t pos;
    std::vector<Node>* out = nullptr;

    [[noreturn]] void fail(const std::string& msg) const {
      throw PreconditionError("expression '" + std::string(src) + "' at column " +
                              std::to_string(pos + 1) + ": " + msg);
    }
    void skip() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool accept(char c) {
      skip();
      if (pos < src.size() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    int add(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
      out->push_back(Node{op, value, lhs, rhs});
      return static_cast<int>(out->size()) - 1;
    }
    int expr() {
      int lhs = term();
      for (;;) {
        if (accept('+')) {
          lhs = add(Op::add, lhs, term());
        } else if (accept('-')) {
          lhs = add(Op::sub, lhs, term());
        } else {
          return lhs;
        }
      }
    }
    int term() {
      int lhs = unary();
      for (;;) {
        if (accept('*')) {
          lhs = add(Op::mul, lhs, unary());
        } else if (accept('/')) {
          lhs = add(Op::div, lhs, unary());
        } else {
          return lhs;
        }
      }
    }
    int unary() {
      if (accept('-')) return add(Op::neg, unary());
      if (accept('+')) return unary();
      return power();
    }
    int power() {
      const int base = atom();
      if (accept('^')) return add(Op::pow, base, unary());
      return base;
    }
    int atom() {
      skip();
      if (pos >= src.size()) fail("unexpected end of input");
      const char c = src[pos];
      if (c == '(') {
        ++pos;
        const int inner = expr();
        if (!accept(')')) fail("expected ')'");
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
      fail(std::string("unexpected character '") + c + "'");
    }
    int number() {
      const std::string rest(src.substr(pos));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos += used;
      return add(Op::constant, -1, -1, v);
    }
    int name() {
      const std::size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        ++pos;
      }
      const std::string_view id = src.substr(start, pos - start);
      if (id == "t") return add(Op::var_t);
      if (id == "x") return add(Op::var_x);
      if (id == "z") return add(Op::var_z);
      if (id == "pi") return add(Op::constant, -1, -1, std::numbers::pi);
      if (id == "e") return add(Op::constant, -1, -1, std::numbers::e);
      Op fn;
      if (id == "sin") {
        fn = Op::sin;
      } else if (id == "cos") {
        fn = Op::cos;
      } else if (id == "tan") {
        fn = Op::tan;
      } else if (id == "arctan" || id == "atan") {
        fn = Op::atan;
      } else if (id == "exp") {
        fn = Op::exp;
      } else if (id == "log") {
        fn = Op::log;
      } else if (id == "sqrt") {
        fn = Op::sqrt;
      } else if (id == "abs") {
        fn = Op::abs;
      } else {
        pos = start;
        fail("unknown name '" + std::string(id) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      const int arg = expr();
      if (!accept(')')) fail("expected ')'");
      return add(fn, arg);
    }
  };

  double eval(int idx, const Vars& v) const {
    const Node& n = (*nodes_)[idx];
    switch (n.op) {
      case Op::constant: return n.value;
      case Op::var_t: return v.t;
      case Op::var_x: return v.x;
      case Op::var_z: return v.z;
      case Op::add: return eval(n.lhs, v) + eval(n.rhs, v);
      case Op::sub: return eval(n.lhs, v) - eval(n.rhs, v);
      case Op::mul: return eval(n.lhs, v) * eval(n.rhs, v);
      case Op::div: return eval(n.lhs, v) / eval(n.rhs, v);
      case Op::pow: return std::pow(eval(n.lhs, v), eval(n.rhs, v));
      case Op::neg: return -eval(n.lhs, v);
      case Op::sin: return std::sin(eval(n.lhs, v));
      case Op::cos: return std::cos(eval(n.lhs, v));
      case Op::tan: return std::tan(eval(n.lhs, v));
      case Op::atan: return std::atan(eval(n.lhs, v));
      case Op::exp: return std::exp(eval(n.lhs, v));
      case Op::log: return std::log(eval(n.lhs, v));
      case Op::sqrt: return std::sqrt(eval(n.lhs, v));
      case Op::abs: return std::abs(eval(n.lhs, v));
    }
    return 0.0;
  }

  std::string source_;
  std::shared_ptr<std::vector<Node>> nodes_;
  int root_ = -1;
  bool uses_t_ = false;
  bool uses_z_ = false;
};

}  // namespace jumpsde
