#include "killing/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "killing/errors.hpp"

namespace killing {

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

constexpr double kAbsKink = 1e-12;

struct FuncName {
  std::string_view name;
  Expr::UnaryOp op;
};

constexpr FuncName kFunctions[] = {
    {"sin", Expr::UnaryOp::Sin},   {"cos", Expr::UnaryOp::Cos},   {"tan", Expr::UnaryOp::Tan},
    {"exp", Expr::UnaryOp::Exp},   {"log", Expr::UnaryOp::Log},   {"sqrt", Expr::UnaryOp::Sqrt},
    {"abs", Expr::UnaryOp::Abs},
};

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Expr::Kind::Constant;
  n->value = v;
  return n;
}

NodePtr make_variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Expr::Kind::Variable;
  n->var = index;
  return n;
}

NodePtr make_unary(Expr::UnaryOp op, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Expr::Kind::Unary;
  n->unary = op;
  n->lhs = std::move(arg);
  return n;
}

NodePtr make_binary(Expr::BinaryOp op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Expr::Kind::Binary;
  n->binary = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_power(NodePtr base, double exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Expr::Kind::Power;
  n->value = exponent;
  n->lhs = std::move(base);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = make_binary(Expr::BinaryOp::Add, lhs, term());
      } else if (peek('-')) {
        ++pos_;
        lhs = make_binary(Expr::BinaryOp::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = make_binary(Expr::BinaryOp::Mul, lhs, factor());
      } else if (peek('/')) {
        ++pos_;
        lhs = make_binary(Expr::BinaryOp::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr b = base();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      if (!starts_number()) fail("constant exponent required for '^'");
      b = make_power(b, number());
    }
    return b;
  }

  bool starts_number() const {
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '.' && pos_ + 1 < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]));
  }

  // number := digits ["." digits] [("e"|"E") ["+"|"-"] digits]  |  "." digits [...]
  double number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail_at("malformed exponent in number", save);
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      fail_at("malformed number", start);
    }
    if (!std::isfinite(v)) fail_at("number out of range", start);
    return v;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (starts_number()) return make_constant(number());
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (c == '-') {
      ++pos_;
      return make_unary(Expr::UnaryOp::Neg, base());
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view ident = text_.substr(start, pos_ - start);
      for (const auto& f : kFunctions) {
        if (ident == f.name) {
          if (!peek('(')) fail("expected '(' after function '" + std::string(ident) + "'");
          ++pos_;
          NodePtr arg = expr();
          expect(')');
          return make_unary(f.op, arg);
        }
      }
      const auto it = std::find(vars_.begin(), vars_.end(), ident);
      if (it != vars_.end()) return make_variable(static_cast<int>(it - vars_.begin()));
      if (ident == "pi") return make_constant(std::numbers::pi);
      fail_at("undeclared variable '" + std::string(ident) + "'", start);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view unary_name(Expr::UnaryOp op) {
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return "-";
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Constant:
      return a.value == b.value;
    case Expr::Kind::Variable:
      return a.var == b.var;
    case Expr::Kind::Unary:
      return a.unary == b.unary && nodes_equal(*a.lhs, *b.lhs);
    case Expr::Kind::Binary:
      return a.binary == b.binary && nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
    case Expr::Kind::Power:
      return a.value == b.value && nodes_equal(*a.lhs, *b.lhs);
  }
  return false;
}

bool is_integer(double p) { return std::floor(p) == p; }

struct Evaluator {
  std::span<const double> point;
  const std::vector<std::string>& vars;

  [[noreturn]] void domain(const char* what, const Node& n) const {
    throw DomainError(what, to_string(n, vars));
  }

  double check(double v, const Node& n) const {
    if (!std::isfinite(v)) domain("non-finite value", n);
    return v;
  }

  double value(const Node& n) const {
    switch (n.kind) {
      case Expr::Kind::Constant:
        return n.value;
      case Expr::Kind::Variable:
        return point[n.var];
      case Expr::Kind::Unary: {
        const double u = value(*n.lhs);
        switch (n.unary) {
          case Expr::UnaryOp::Neg: return -u;
          case Expr::UnaryOp::Sin: return std::sin(u);
          case Expr::UnaryOp::Cos: return std::cos(u);
          case Expr::UnaryOp::Tan:
            if (std::abs(std::cos(u)) < 1e-15) domain("tan evaluated at a pole", n);
            return std::tan(u);
          case Expr::UnaryOp::Exp: return check(std::exp(u), n);
          case Expr::UnaryOp::Log:
            if (!(u > 0.0)) domain("log of a non-positive argument", n);
            return std::log(u);
          case Expr::UnaryOp::Sqrt:
            if (!(u > 0.0)) domain("sqrt of a non-positive argument", n);
            return std::sqrt(u);
          case Expr::UnaryOp::Abs:
            if (std::abs(u) <= kAbsKink) domain("abs evaluated at its kink", n);
            return std::abs(u);
        }
        break;
      }
      case Expr::Kind::Binary: {
        const double a = value(*n.lhs);
        const double b = value(*n.rhs);
        switch (n.binary) {
          case Expr::BinaryOp::Add: return a + b;
          case Expr::BinaryOp::Sub: return a - b;
          case Expr::BinaryOp::Mul: return a * b;
          case Expr::BinaryOp::Div:
            if (b == 0.0) domain("division by zero", n);
            return check(a / b, n);
        }
        break;
      }
      case Expr::Kind::Power: {
        const double u = value(*n.lhs);
        check_power_domain(u, n);
        return check(std::pow(u, n.value), n);
      }
    }
    return 0.0;
  }

  void check_power_domain(double u, const Node& n) const {
    const double p = n.value;
    if (is_integer(p)) {
      if (p < 0.0 && u == 0.0) domain("negative power of zero", n);
    } else if (!(u > 0.0)) {
      domain("non-integer power of a non-positive base", n);
    }
  }

  Jet jet(const Node& n) const {
    const int dim = static_cast<int>(point.size());
    switch (n.kind) {
      case Expr::Kind::Constant:
        return Jet::constant(dim, n.value);
      case Expr::Kind::Variable:
        return Jet::variable(dim, n.var, point[n.var]);
      case Expr::Kind::Unary: {
        const Jet u = jet(*n.lhs);
        const double x = u.value;
        switch (n.unary) {
          case Expr::UnaryOp::Neg:
            return -u;
          case Expr::UnaryOp::Sin:
            return apply_univariate(u, std::sin(x), std::cos(x), -std::sin(x));
          case Expr::UnaryOp::Cos:
            return apply_univariate(u, std::cos(x), -std::sin(x), -std::cos(x));
          case Expr::UnaryOp::Tan: {
            const double c = std::cos(x);
            if (std::abs(c) < 1e-15) domain("tan evaluated at a pole", n);
            const double t = std::tan(x);
            const double sec2 = 1.0 / (c * c);
            return apply_univariate(u, t, sec2, 2.0 * sec2 * t);
          }
          case Expr::UnaryOp::Exp: {
            const double e = check(std::exp(x), n);
            return apply_univariate(u, e, e, e);
          }
          case Expr::UnaryOp::Log:
            if (!(x > 0.0)) domain("log of a non-positive argument", n);
            return apply_univariate(u, std::log(x), 1.0 / x, -1.0 / (x * x));
          case Expr::UnaryOp::Sqrt: {
            if (!(x > 0.0)) domain("sqrt of a non-positive argument", n);
            const double s = std::sqrt(x);
            return apply_univariate(u, s, 0.5 / s, -0.25 / (s * x));
          }
          case Expr::UnaryOp::Abs: {
            if (std::abs(x) <= kAbsKink) domain("abs evaluated at its kink", n);
            const double sg = x > 0.0 ? 1.0 : -1.0;
            return apply_univariate(u, std::abs(x), sg, 0.0);
          }
        }
        break;
      }
      case Expr::Kind::Binary: {
        const Jet a = jet(*n.lhs);
        const Jet b = jet(*n.rhs);
        switch (n.binary) {
          case Expr::BinaryOp::Add: return a + b;
          case Expr::BinaryOp::Sub: return a - b;
          case Expr::BinaryOp::Mul: return a * b;
          case Expr::BinaryOp::Div: {
            if (b.value == 0.0) domain("division by zero", n);
            Jet q = a / b;
            check(q.value, n);
            return q;
          }
        }
        break;
      }
      case Expr::Kind::Power: {
        const Jet u = jet(*n.lhs);
        const double x = u.value;
        const double p = n.value;
        check_power_domain(x, n);
        if (p == 0.0) return Jet::constant(dim, 1.0);
        const double f0 = check(std::pow(x, p), n);
        const double f1 = p * std::pow(x, p - 1.0);
        const double f2 = p == 1.0 ? 0.0 : p * (p - 1.0) * std::pow(x, p - 2.0);
        if (!std::isfinite(f1) || !std::isfinite(f2)) domain("power not differentiable here", n);
        return apply_univariate(u, f0, f1, f2);
      }
    }
    return Jet::constant(dim, 0.0);
  }
};

void print(const Node& n, const std::vector<std::string>& vars, std::string& out) {
  switch (n.kind) {
    case Expr::Kind::Constant:
      out += format_number(n.value);
      return;
    case Expr::Kind::Variable:
      out += vars.at(n.var);
      return;
    case Expr::Kind::Unary:
      out += unary_name(n.unary);
      out += '(';
      print(*n.lhs, vars, out);
      out += ')';
      return;
    case Expr::Kind::Binary: {
      static constexpr char kOps[] = {'+', '-', '*', '/'};
      out += '(';
      print(*n.lhs, vars, out);
      out += ' ';
      out += kOps[static_cast<int>(n.binary)];
      out += ' ';
      print(*n.rhs, vars, out);
      out += ')';
      return;
    }
    case Expr::Kind::Power:
      out += '(';
      print(*n.lhs, vars, out);
      out += ")^";
      out += format_number(n.value);
      return;
  }
}

}  // namespace

Expr Expr::parse(std::string_view text, std::vector<std::string> vars) {
  Parser p(text, vars);
  NodePtr root = p.parse();
  return Expr(std::move(root), std::move(vars));
}

std::string to_string(const Expr::Node& node, const std::vector<std::string>& vars) {
  std::string out;
  print(node, vars, out);
  return out;
}

std::string Expr::to_string() const { return root_ ? killing::to_string(*root_, vars_) : ""; }

Expr Expr::relabeled(std::vector<std::string> vars) const {
  if (vars.size() < vars_.size()) {
    throw ArityMismatch("relabeling would drop variables");
  }
  return Expr(root_, std::move(vars));
}

double Expr::evaluate(std::span<const double> point) const {
  if (point.size() != vars_.size()) {
    throw ArityMismatch("expression has " + std::to_string(vars_.size()) +
                        " variables but the point has " + std::to_string(point.size()));
  }
  return Evaluator{point, vars_}.value(*root_);
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (!a.root_ || !b.root_) return a.root_ == b.root_;
  return nodes_equal(*a.root_, *b.root_);
}

Jet eval_jet(const Expr& e, std::span<const double> point) {
  if (point.size() != e.vars().size()) {
    throw ArityMismatch("expression has " + std::to_string(e.vars().size()) +
                        " variables but the point has " + std::to_string(point.size()));
  }
  if (point.size() > static_cast<std::size_t>(Jet::kMaxDim)) {
    throw ArityMismatch("jets support at most three variables");
  }
  Jet j = Evaluator{point, e.vars()}.jet(e.root());
  j.hess = 0.5 * (j.hess + j.hess.transpose()).eval();
  return j;
}

Jet eval_jet(const Expr& e, std::initializer_list<double> point) {
  return eval_jet(e, std::span<const double>(point.begin(), point.size()));
}

}  // namespace killing
