#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "killing/errors.hpp"
#include "killing/expr.hpp"

using killing::compose_jet;
using killing::eval_jet;
using killing::Expr;
using killing::Jet;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kXYZ = {"x", "y", "z"};

// Smooth random expressions whose every subexpression is defined on R^3.
class SmoothGenerator {
 public:
  explicit SmoothGenerator(unsigned seed) : rng_(seed) {}

  std::string make(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    switch (pick(rng_)) {
      case 0: return constant();
      case 1: return var();
      case 2: return "(" + make(depth - 1) + " + " + make(depth - 1) + ")";
      case 3: return "(" + make(depth - 1) + " - " + make(depth - 1) + ")";
      case 4: return "(" + make(depth - 1) + " * " + make(depth - 1) + ")";
      case 5: return "sin(" + make(depth - 1) + ")";
      case 6: return "cos(" + make(depth - 1) + ")";
      case 7: return "exp(0.3*sin(" + make(depth - 1) + "))";
      case 8: return "(" + make(depth - 1) + ")/(1.5 + cos(" + make(depth - 1) + "))";
      default: return "sqrt(2 + sin(" + make(depth - 1) + "))*log(1.5 + (" + make(depth - 1) + ")^2)";
    }
  }

  double coordinate() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }

 private:
  std::string constant() {
    return std::to_string(std::uniform_real_distribution<double>(0.1, 2.0)(rng_));
  }
  std::string var() { return kXYZ[std::uniform_int_distribution<int>(0, 2)(rng_)]; }

  std::mt19937 rng_;
};

// Central-difference oracle on plain values, step 1e-4.
struct FdOracle {
  const Expr& e;
  static constexpr double h = 1e-4;

  double f(std::vector<double> p) const { return e.evaluate(p); }

  double grad(const std::vector<double>& p, int i) const {
    auto a = p, b = p;
    a[i] += h;
    b[i] -= h;
    return (f(a) - f(b)) / (2 * h);
  }

  double hess(const std::vector<double>& p, int i, int j) const {
    if (i == j) {
      auto a = p, b = p;
      a[i] += h;
      b[i] -= h;
      return (f(a) - 2 * f(p) + f(b)) / (h * h);
    }
    auto pp = p, pm = p, mp = p, mm = p;
    pp[i] += h, pp[j] += h;
    pm[i] += h, pm[j] -= h;
    mp[i] -= h, mp[j] += h;
    mm[i] -= h, mm[j] -= h;
    return (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
  }
};

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

// Sentences of the full grammar, including whitespace, pi, abs and exponents.
class GrammarGenerator {
 public:
  explicit GrammarGenerator(unsigned seed) : rng_(seed) {}

  std::string expr(int depth) {
    std::string s = term(depth);
    for (int n = roll(0, 2); n > 0; --n) s += ws() + (roll(0, 1) ? "+" : "-") + ws() + term(depth);
    return s;
  }

 private:
  int roll(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  std::string ws() { return roll(0, 3) == 0 ? " " : ""; }

  std::string number() {
    static const char* kNumbers[] = {"1", "0.5", "2.", ".25", "3e2", "1.5E-3", "42", "7e+1"};
    return kNumbers[roll(0, 7)];
  }

  std::string term(int depth) {
    std::string s = factor(depth);
    for (int n = roll(0, 2); n > 0; --n) s += ws() + (roll(0, 1) ? "*" : "/") + ws() + factor(depth);
    return s;
  }

  std::string factor(int depth) {
    std::string s = base(depth);
    if (roll(0, 4) == 0) s += ws() + "^" + ws() + number();
    return s;
  }

  std::string base(int depth) {
    static const char* kFuncs[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs"};
    const int choice = depth <= 0 ? roll(0, 2) : roll(0, 5);
    switch (choice) {
      case 0: return number();
      case 1: return roll(0, 1) ? "pi" : "x";
      case 2: return "y";
      case 3: return "(" + ws() + expr(depth - 1) + ws() + ")";
      case 4: return std::string(kFuncs[roll(0, 6)]) + ws() + "(" + expr(depth - 1) + ")";
      default: return "-" + ws() + base(depth - 1);
    }
  }

  std::mt19937 rng_;
};

}  // namespace

TEST_CASE("parse: BCV conformal factor") {
  const Expr e = Expr::parse("1/(1+(1/4)*(x^2+y^2))", kXY);
  CHECK(e.root().kind == Expr::Kind::Binary);
  CHECK(e.root().binary == Expr::BinaryOp::Div);
  const double p[] = {0.0, 0.0};
  CHECK(e.evaluate(p) == doctest::Approx(1.0));
  const double q[] = {2.0, 0.0};
  CHECK(e.evaluate(q) == doctest::Approx(0.5));
}

TEST_CASE("parse: single variable") {
  const Expr e = Expr::parse("x", kXY);
  CHECK(e.root().kind == Expr::Kind::Variable);
  CHECK(e.root().var == 0);
}

TEST_CASE("parse: errors carry positions") {
  try {
    (void)Expr::parse("1+", {"x"});
    FAIL("expected a parse error");
  } catch (const killing::ParseError& e) {
    CHECK(e.offset() == 2);
  }
  try {
    (void)Expr::parse("x + q", {"x"});
    FAIL("expected a parse error");
  } catch (const killing::ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(std::string(e.what()).find("undeclared") != std::string::npos);
  }
  try {
    (void)Expr::parse("x^y", kXY);
    FAIL("expected a parse error");
  } catch (const killing::ParseError& e) {
    CHECK(e.offset() == 2);
    CHECK(std::string(e.what()).find("constant exponent") != std::string::npos);
  }
  CHECK_THROWS_AS((void)Expr::parse("sin x", kXY), killing::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("(x", kXY), killing::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("", kXY), killing::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("1e", kXY), killing::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("x y", kXY), killing::ParseError);
}

TEST_CASE("parse: numbers, pi and unary minus") {
  const double p[] = {2.0, 0.0};
  CHECK(Expr::parse("1.5e2", kXY).evaluate(p) == 150.0);
  CHECK(Expr::parse(".5", kXY).evaluate(p) == 0.5);
  CHECK(Expr::parse("pi", kXY).evaluate(p) == doctest::Approx(M_PI));
  // Unary minus applies to the base, before the power.
  CHECK(Expr::parse("-x^2", kXY).evaluate(p) == doctest::Approx(4.0));
  CHECK(Expr::parse("-(x^2)", kXY).evaluate(p) == doctest::Approx(-4.0));
  CHECK(Expr::parse("2 - -x", kXY).evaluate(p) == doctest::Approx(4.0));
}

TEST_CASE("eval_jet: x^2 at 3") {
  const Jet j = eval_jet(Expr::parse("x^2", {"x"}), {3.0});
  CHECK(j.value == 9.0);
  CHECK(j.d(0) == 6.0);
  CHECK(j.dd(0, 0) == 2.0);
}

TEST_CASE("eval_jet: BCV lambda at the origin") {
  const Expr e = Expr::parse("1/(1+(1/4)*(x^2+y^2))", kXY);
  const Jet j = eval_jet(e, {0.0, 0.0});
  CHECK(j.value == doctest::Approx(1.0));
  CHECK(j.d(0) == doctest::Approx(0.0));
  CHECK(j.d(1) == doctest::Approx(0.0));
  CHECK(j.dd(0, 0) == doctest::Approx(-0.5));
  CHECK(j.dd(1, 1) == doctest::Approx(-0.5));
  CHECK(j.dd(0, 1) == doctest::Approx(0.0));
  // Cross-check against central differences with step 1e-4.
  const FdOracle fd{e};
  CHECK(std::abs(fd.hess({0, 0}, 0, 0) + 0.5) < 1e-6);
  CHECK(std::abs(fd.hess({0, 0}, 1, 1) + 0.5) < 1e-6);
}

TEST_CASE("eval_jet: sin(x)*y") {
  const Jet j = eval_jet(Expr::parse("sin(x)*y", kXY), {0.0, 2.0});
  CHECK(j.value == 0.0);
  CHECK(j.d(0) == doctest::Approx(2.0));
  CHECK(j.d(1) == doctest::Approx(0.0));
  CHECK(j.dd(0, 0) == doctest::Approx(0.0));
  CHECK(j.dd(0, 1) == doctest::Approx(1.0));
  CHECK(j.dd(1, 0) == doctest::Approx(1.0));
  CHECK(j.dd(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("eval_jet: domain errors name the subexpression") {
  CHECK_THROWS_AS(eval_jet(Expr::parse("1/x", {"x"}), {0.0}), killing::DomainError);
  CHECK_THROWS_AS(eval_jet(Expr::parse("log(x)", {"x"}), {-1.0}), killing::DomainError);
  CHECK_THROWS_AS(eval_jet(Expr::parse("sqrt(x)", {"x"}), {0.0}), killing::DomainError);
  CHECK_THROWS_AS(eval_jet(Expr::parse("x^0.5", {"x"}), {-1.0}), killing::DomainError);
  CHECK_THROWS_AS(eval_jet(Expr::parse("x^-1", {"x"}), {1.0}), killing::ParseError);
  try {
    eval_jet(Expr::parse("1 + abs(x - 1)", {"x"}), {1.0 + 1e-13});
    FAIL("expected a domain error");
  } catch (const killing::DomainError& e) {
    CHECK(e.subexpression() == "abs((x - 1))");
  }
  CHECK(eval_jet(Expr::parse("abs(x)", {"x"}), {-2.0}).d(0) == -1.0);
  CHECK_THROWS_AS(eval_jet(Expr::parse("x", {"x"}), {1.0, 2.0}), killing::ArityMismatch);
}

TEST_CASE("eval_jet: polynomials of degree two are exact") {
  const Expr e = Expr::parse("3*x^2 - 2*x*y + 0.5*y^2 + 4*x - y + 7", kXY);
  const Jet j = eval_jet(e, {1.25, -0.75});
  const double x = 1.25, y = -0.75;
  CHECK(j.value == 3 * x * x - 2 * x * y + 0.5 * y * y + 4 * x - y + 7);
  CHECK(j.d(0) == 6 * x - 2 * y + 4);
  CHECK(j.d(1) == -2 * x + y - 1);
  CHECK(j.dd(0, 0) == 6.0);
  CHECK(j.dd(0, 1) == -2.0);
  CHECK(j.dd(1, 1) == 1.0);
}

TEST_CASE("property: jets agree with central differences on random smooth expressions") {
  SmoothGenerator gen(20240611);
  int checked = 0;
  for (int n = 0; n < 100; ++n) {
    const Expr e = Expr::parse(gen.make(3), kXYZ);
    const std::vector<double> p = {gen.coordinate(), gen.coordinate(), gen.coordinate()};
    const Jet j = eval_jet(e, p);
    const FdOracle fd{e};
    for (int i = 0; i < 3; ++i) {
      CHECK_MESSAGE(close_rel(j.d(i), fd.grad(p, i), 1e-5), e.to_string());
      for (int k = 0; k < 3; ++k) {
        CHECK_MESSAGE(close_rel(j.dd(i, k), fd.hess(p, i, k), 1e-5), e.to_string());
        CHECK(j.dd(i, k) == j.dd(k, i));
      }
    }
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("property: pretty-print then re-parse is structurally identical") {
  GrammarGenerator gen(7);
  for (int n = 0; n < 300; ++n) {
    const std::string text = gen.expr(3);
    const Expr e = Expr::parse(text, kXY);
    const Expr again = Expr::parse(e.to_string(), kXY);
    CHECK_MESSAGE(structurally_equal(e, again), text);
  }
}

TEST_CASE("property: mutated sentences either parse or fail with a positioned error") {
  GrammarGenerator gen(11);
  std::mt19937 rng(5);
  const std::string alphabet = "()+-*/^.eE0123456789xyzq, \t";
  int errors = 0;
  for (int n = 0; n < 500; ++n) {
    std::string text = gen.expr(2);
    const int edits = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int k = 0; k < edits; ++k) {
      const auto pos = std::uniform_int_distribution<std::size_t>(0, text.size())(rng);
      const char c = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
      if (std::uniform_int_distribution<int>(0, 1)(rng) == 0 && pos < text.size()) {
        text.erase(pos, 1);
      } else {
        text.insert(pos, 1, c);
      }
    }
    try {
      const Expr e = Expr::parse(text, kXY);
      CHECK(structurally_equal(e, Expr::parse(e.to_string(), kXY)));
    } catch (const killing::ParseError& e) {
      CHECK(e.offset() <= text.size());
      ++errors;
    }
  }
  CHECK(errors > 0);
}

TEST_CASE("compose_jet: t^2 after t") {
  const Jet outer = eval_jet(Expr::parse("t^2", {"t"}), {3.0});
  const Jet inner = Jet::variable(1, 0, 3.0);
  const Jet c = compose_jet(outer, std::span<const Jet>(&inner, 1));
  CHECK(c.value == 9.0);
  CHECK(c.d(0) == 6.0);
  CHECK(c.dd(0, 0) == 2.0);
}

TEST_CASE("compose_jet: straight line picks out the partial derivative") {
  const Expr r = Expr::parse("x^3*y + sin(x*y) + exp(x)", kXY);
  const double t = 0.4;
  const Jet outer = eval_jet(r, {t, 0.0});
  const Jet inners[] = {Jet::variable(1, 0, t), Jet::constant(1, 0.0)};
  const Jet c = compose_jet(outer, inners);
  CHECK(c.d(0) == doctest::Approx(outer.d(0)).epsilon(1e-15));
  CHECK(c.dd(0, 0) == doctest::Approx(outer.dd(0, 0)).epsilon(1e-15));
}

TEST_CASE("compose_jet: arity mismatch") {
  const Jet outer = eval_jet(Expr::parse("x*y", kXY), {1.0, 2.0});
  const Jet inner = Jet::variable(1, 0, 1.0);
  CHECK_THROWS_AS(compose_jet(outer, std::span<const Jet>(&inner, 1)), killing::ArityMismatch);
  const Jet mixed[] = {Jet::variable(1, 0, 1.0), Jet::variable(2, 0, 1.0)};
  CHECK_THROWS_AS(compose_jet(outer, mixed), killing::ArityMismatch);
}

TEST_CASE("property: compose_jet matches finite differences and symbolic substitution") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto number = [&] {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", coef(rng));
    return std::string(buf);
  };
  // Random bivariate cubic with the placeholders A and B substituted by text.
  auto cubic = [&](const std::string& a, const std::string& b) {
    static const char* kMonomials[] = {"1", "A", "B", "A*A", "A*B", "B*B", "A*A*A", "A*A*B", "A*B*B", "B*B*B"};
    std::string s;
    for (const char* m : kMonomials) {
      std::string expanded;
      for (const char* ch = m; *ch; ++ch) {
        if (*ch == 'A') expanded += "(" + a + ")";
        else if (*ch == 'B') expanded += "(" + b + ")";
        else expanded += *ch;
      }
      s += (s.empty() ? "" : " + ") + ("(" + number() + ")*") + expanded;
    }
    return s;
  };
  const std::vector<std::string> uv = {"u", "v"};
  for (int n = 0; n < 50; ++n) {
    const std::string p_text = cubic("x", "y");
    const std::string q1_text = cubic("u", "v");
    const std::string q2_text = cubic("u", "v");
    const Expr q1 = Expr::parse(q1_text, uv);
    const Expr q2 = Expr::parse(q2_text, uv);
    std::uniform_real_distribution<double> coord(-0.8, 0.8);
    const double u = coord(rng), v = coord(rng);
    const Jet inners[] = {eval_jet(q1, {u, v}), eval_jet(q2, {u, v})};
    const Expr p = Expr::parse(p_text, kXY);
    const Jet c = compose_jet(eval_jet(p, {inners[0].value, inners[1].value}), inners);

    // Symbolic substitution: p(q1(u, v), q2(u, v)) as a single expression.
    std::string sub;
    for (char ch : p_text) {
      if (ch == 'x') sub += "(" + q1_text + ")";
      else if (ch == 'y') sub += "(" + q2_text + ")";
      else sub += ch;
    }
    const Expr composite = Expr::parse(sub, uv);
    const Jet direct = eval_jet(composite, {u, v});
    CHECK(close_rel(c.value, direct.value, 1e-12));
    const FdOracle fd{composite};
    for (int i = 0; i < 2; ++i) {
      CHECK(close_rel(c.d(i), direct.d(i), 1e-10));
      CHECK(close_rel(c.d(i), fd.grad({u, v}, i), 1e-6));
      for (int k = 0; k < 2; ++k) {
        CHECK(close_rel(c.dd(i, k), direct.dd(i, k), 1e-10));
        CHECK(close_rel(c.dd(i, k), fd.hess({u, v}, i, k), 1e-6));
      }
    }
  }
}
