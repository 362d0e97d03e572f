#pragma once

// Tiny expression language for user-supplied functions on R^1..R^3.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | 'pi' | 'inf' | variable | call | '(' expr ')'
//   call    := ('abs' | 'max' | 'min') '(' expr (',' expr)* ')'
//
// Variables: x, y, z or x1, x2, x3.

#include "gauge_certify/types.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace gauge_certify {

class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(const Point& x) const { return root_->eval(x); }

  // 1 + highest variable index referenced (0 for constants).
  int arity() const { return arity_; }
  const std::string& text() const { return text_; }

 private:
  struct Node {
    enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Abs, Max, Min };
    Kind kind;
    double value = 0.0;
    int index = 0;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(const Point& x) const {
      switch (kind) {
        case Kind::Constant: return value;
        case Kind::Variable:
          if (index >= x.size()) {
            throw InvalidInput("expression uses variable x" +
                               std::to_string(index + 1) + " beyond the dimension");
          }
          return x(index);
        case Kind::Neg: return -args[0]->eval(x);
        case Kind::Add: return args[0]->eval(x) + args[1]->eval(x);
        case Kind::Sub: return args[0]->eval(x) - args[1]->eval(x);
        case Kind::Mul: return args[0]->eval(x) * args[1]->eval(x);
        case Kind::Div: return args[0]->eval(x) / args[1]->eval(x);
        case Kind::Pow: {
          const double base = args[0]->eval(x);
          const int e = index;
          double r = 1.0;
          for (int i = 0; i < std::abs(e); ++i) r *= base;
          return e < 0 ? 1.0 / r : r;
        }
        case Kind::Abs: return std::abs(args[0]->eval(x));
        case Kind::Max: {
          double m = args[0]->eval(x);
          for (std::size_t i = 1; i < args.size(); ++i) m = std::max(m, args[i]->eval(x));
          return m;
        }
        case Kind::Min: {
          double m = args[0]->eval(x);
          for (std::size_t i = 1; i < args.size(); ++i) m = std::min(m, args[i]->eval(x));
          return m;
        }
      }
      return 0.0;
    }
  };
  using NodePtr = std::shared_ptr<const Node>;

  class Parser {
   public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_all() {
      NodePtr n = expr();
      skip_space();
      if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
      return n;
    }
    int arity() const { return arity_; }

   private:
    [[noreturn]] void fail(const std::string& msg) const {
      throw InvalidInput("malformed expression at column " + std::to_string(pos_ + 1) +
                         ": " + msg);
    }

    void skip_space() {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == c) {
        ++pos_;
        return true;
      }
      return false;
    }

    void expect(char c) {
      if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static NodePtr make(Node::Kind k, std::vector<NodePtr> args = {}, double v = 0.0,
                        int idx = 0) {
      auto n = std::make_shared<Node>();
      n->kind = k;
      n->value = v;
      n->index = idx;
      n->args = std::move(args);
      return n;
    }

    NodePtr expr() {
      NodePtr lhs = term();
      while (true) {
        if (accept('+')) {
          lhs = make(Node::Kind::Add, {lhs, term()});
        } else if (accept('-')) {
          lhs = make(Node::Kind::Sub, {lhs, term()});
        } else {
          return lhs;
        }
      }
    }

    NodePtr term() {
      NodePtr lhs = unary();
      while (true) {
        if (accept('*')) {
          lhs = make(Node::Kind::Mul, {lhs, unary()});
        } else if (accept('/')) {
          lhs = make(Node::Kind::Div, {lhs, unary()});
        } else {
          return lhs;
        }
      }
    }

    NodePtr unary() {
      if (accept('-')) return make(Node::Kind::Neg, {unary()});
      return power();
    }

    NodePtr power() {
      NodePtr base = primary();
      if (!accept('^')) return base;
      const bool negative = accept('-');
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be an integer literal");
      if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e')) {
        fail("exponent must be an integer literal");
      }
      const int e = std::stoi(s_.substr(start, pos_ - start));
      return make(Node::Kind::Pow, {base}, 0.0, negative ? -e : e);
    }

    NodePtr primary() {
      skip_space();
      if (pos_ >= s_.size()) fail("unexpected end of input");
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (accept('(')) {
        NodePtr n = expr();
        expect(')');
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
      fail(std::string("unexpected '") + c + "'");
    }

    NodePtr number() {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Node::Kind::Constant, {}, v);
    }

    NodePtr identifier() {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "pi") return make(Node::Kind::Constant, {}, std::numbers::pi);
      if (id == "inf") return make(Node::Kind::Constant, {}, kInf);
      if (id == "x" || id == "x1") return variable(0);
      if (id == "y" || id == "x2") return variable(1);
      if (id == "z" || id == "x3") return variable(2);
      if (id == "abs" || id == "max" || id == "min") {
        expect('(');
        std::vector<NodePtr> args{expr()};
        while (accept(',')) args.push_back(expr());
        expect(')');
        if (id == "abs") {
          if (args.size() != 1) fail("abs takes one argument");
          return make(Node::Kind::Abs, std::move(args));
        }
        return make(id == "max" ? Node::Kind::Max : Node::Kind::Min, std::move(args));
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }

    NodePtr variable(int i) {
      arity_ = std::max(arity_, i + 1);
      return make(Node::Kind::Variable, {}, 0.0, i);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int arity_ = 0;
  };

  Expression(NodePtr root, int arity, std::string text)
      : root_(std::move(root)), arity_(arity), text_(std::move(text)) {}

  NodePtr root_;
  int arity_;
  std::string text_;
};

inline Expression Expression::parse(const std::string& text) {
  Parser p(text);
  NodePtr root = p.parse_all();
  return Expression(std::move(root), p.arity(), text);
}

}  // namespace gauge_certify
