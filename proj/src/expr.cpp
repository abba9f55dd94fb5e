#include "obliqua/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace obliqua::expr {

double Vec2::norm() const { return std::hypot(x1, x2); }

Vec2 Vec2::unit() const {
  double n = norm();
  if (n < 1e-300) throw DegenerateVector("cannot normalize near-zero vector");
  return {x1 / n, x2 / n};
}

namespace {

NodePtr make(NodeKind k, NodePtr a = nullptr, NodePtr b = nullptr,
             NodePtr c = nullptr, NodePtr d = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->c = std::move(c);
  n->d = std::move(d);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr make_pow(NodePtr base, long e) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::PowInt;
  n->iexp = e;
  n->a = std::move(base);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == NodeKind::Constant && n->value == v;
}

double eval_node(const Node* n, const Vec2& x, bool strict) {
  switch (n->kind) {
    case NodeKind::Constant:
      return n->value;
    case NodeKind::Var1:
      return x.x1;
    case NodeKind::Var2:
      return x.x2;
    case NodeKind::Add:
      return eval_node(n->a.get(), x, strict) + eval_node(n->b.get(), x, strict);
    case NodeKind::Sub:
      return eval_node(n->a.get(), x, strict) - eval_node(n->b.get(), x, strict);
    case NodeKind::Mul:
      return eval_node(n->a.get(), x, strict) * eval_node(n->b.get(), x, strict);
    case NodeKind::Div: {
      double num = eval_node(n->a.get(), x, strict);
      double den = eval_node(n->b.get(), x, strict);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case NodeKind::PowInt: {
      double base = eval_node(n->a.get(), x, strict);
      long e = n->iexp;
      if (base == 0.0 && e < 0) throw DomainError("zero raised to negative power");
      double r = std::pow(base, static_cast<double>(e));
      return r;
    }
    case NodeKind::Neg:
      return -eval_node(n->a.get(), x, strict);
    case NodeKind::Abs: {
      double v = eval_node(n->a.get(), x, strict);
      if (strict && v == 0.0) throw KinkError("abs evaluated at 0");
      return std::fabs(v);
    }
    case NodeKind::Sign: {
      double v = eval_node(n->a.get(), x, strict);
      if (v == 0.0) {
        if (strict) throw KinkError("sign evaluated at 0");
        return 0.0;
      }
      return v > 0.0 ? 1.0 : -1.0;
    }
    case NodeKind::Sqrt: {
      double v = eval_node(n->a.get(), x, strict);
      if (v < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(v);
    }
    case NodeKind::Sin:
      return std::sin(eval_node(n->a.get(), x, strict));
    case NodeKind::Cos:
      return std::cos(eval_node(n->a.get(), x, strict));
    case NodeKind::Exp:
      return std::exp(eval_node(n->a.get(), x, strict));
    case NodeKind::Min: {
      double u = eval_node(n->a.get(), x, strict);
      double v = eval_node(n->b.get(), x, strict);
      if (strict && u == v) throw KinkError("min evaluated at a tie");
      return u <= v ? u : v;
    }
    case NodeKind::Max: {
      double u = eval_node(n->a.get(), x, strict);
      double v = eval_node(n->b.get(), x, strict);
      if (strict && u == v) throw KinkError("max evaluated at a tie");
      return u >= v ? u : v;
    }
    case NodeKind::SelectLE: {
      double u = eval_node(n->a.get(), x, strict);
      double v = eval_node(n->b.get(), x, strict);
      if (strict && u == v) throw KinkError("branch selection at a tie");
      return u <= v ? eval_node(n->c.get(), x, strict)
                    : eval_node(n->d.get(), x, strict);
    }
  }
  throw std::logic_error("unreachable node kind");
}

// --- differentiation ------------------------------------------------------

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  return make(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr divn(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return make(NodeKind::Div, std::move(a), std::move(b));
}

NodePtr diff(const NodePtr& n, int var) {
  switch (n->kind) {
    case NodeKind::Constant:
      return make_const(0.0);
    case NodeKind::Var1:
      return make_const(var == 1 ? 1.0 : 0.0);
    case NodeKind::Var2:
      return make_const(var == 2 ? 1.0 : 0.0);
    case NodeKind::Add:
      return add(diff(n->a, var), diff(n->b, var));
    case NodeKind::Sub:
      return sub(diff(n->a, var), diff(n->b, var));
    case NodeKind::Mul:
      return add(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var)));
    case NodeKind::Div:
      // (a/b)' = (a'b - ab') / b^2
      return divn(sub(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var))),
                  make_pow(n->b, 2));
    case NodeKind::PowInt: {
      if (n->iexp == 0) return make_const(0.0);
      return mul(mul(make_const(static_cast<double>(n->iexp)),
                     make_pow(n->a, n->iexp - 1)),
                 diff(n->a, var));
    }
    case NodeKind::Neg:
      return make(NodeKind::Neg, diff(n->a, var));
    case NodeKind::Abs:
      // d|u| = sign(u) u'; sign(0) = 0 by convention
      return mul(make(NodeKind::Sign, n->a), diff(n->a, var));
    case NodeKind::Sign:
      return make_const(0.0);  // a.e.; never exact at the jump
    case NodeKind::Sqrt:
      return divn(diff(n->a, var),
                  mul(make_const(2.0), make(NodeKind::Sqrt, n->a)));
    case NodeKind::Sin:
      return mul(make(NodeKind::Cos, n->a), diff(n->a, var));
    case NodeKind::Cos:
      return make(NodeKind::Neg, mul(make(NodeKind::Sin, n->a), diff(n->a, var)));
    case NodeKind::Exp:
      return mul(make(NodeKind::Exp, n->a), diff(n->a, var));
    case NodeKind::Min:
      // through the attained branch, ties to the first argument
      return make(NodeKind::SelectLE, n->a, n->b, diff(n->a, var),
                  diff(n->b, var));
    case NodeKind::Max:
      return make(NodeKind::SelectLE, n->b, n->a, diff(n->b, var),
                  diff(n->a, var));
    case NodeKind::SelectLE:
      return make(NodeKind::SelectLE, n->a, n->b, diff(n->c, var),
                  diff(n->d, var));
  }
  throw std::logic_error("unreachable node kind");
}

// --- printing -------------------------------------------------------------

void print_node(const Node* n, std::ostream& os);

void print_paren(const Node* n, std::ostream& os) {
  os << '(';
  print_node(n, os);
  os << ')';
}

bool is_atom(const Node* n) {
  switch (n->kind) {
    case NodeKind::Constant:
      return n->value >= 0.0;
    case NodeKind::Var1:
    case NodeKind::Var2:
    case NodeKind::Abs:
    case NodeKind::Sign:
    case NodeKind::Sqrt:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Exp:
    case NodeKind::Min:
    case NodeKind::Max:
    case NodeKind::SelectLE:
      return true;
    default:
      return false;
  }
}

void print_node(const Node* n, std::ostream& os) {
  switch (n->kind) {
    case NodeKind::Constant: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n->value;
      os << tmp.str();
      return;
    }
    case NodeKind::Var1:
      os << "x1";
      return;
    case NodeKind::Var2:
      os << "x2";
      return;
    case NodeKind::Add:
      print_paren(n->a.get(), os);
      os << " + ";
      print_paren(n->b.get(), os);
      return;
    case NodeKind::Sub:
      print_paren(n->a.get(), os);
      os << " - ";
      print_paren(n->b.get(), os);
      return;
    case NodeKind::Mul:
      print_paren(n->a.get(), os);
      os << "*";
      print_paren(n->b.get(), os);
      return;
    case NodeKind::Div:
      print_paren(n->a.get(), os);
      os << "/";
      print_paren(n->b.get(), os);
      return;
    case NodeKind::PowInt:
      if (is_atom(n->a.get()))
        print_node(n->a.get(), os);
      else
        print_paren(n->a.get(), os);
      os << "^";
      if (n->iexp < 0)
        os << '(' << n->iexp << ')';
      else
        os << n->iexp;
      return;
    case NodeKind::Neg:
      os << "-";
      print_paren(n->a.get(), os);
      return;
    case NodeKind::Abs:
      os << "abs(";
      print_node(n->a.get(), os);
      os << ')';
      return;
    case NodeKind::Sign:
      os << "sign(";
      print_node(n->a.get(), os);
      os << ')';
      return;
    case NodeKind::Sqrt:
      os << "sqrt(";
      print_node(n->a.get(), os);
      os << ')';
      return;
    case NodeKind::Sin:
      os << "sin(";
      print_node(n->a.get(), os);
      os << ')';
      return;
    case NodeKind::Cos:
      os << "cos(";
      print_node(n->a.get(), os);
      os << ')';
      return;
    case NodeKind::Exp:
      os << "exp(";
      print_node(n->a.get(), os);
      os << ')';
      return;
    case NodeKind::Min:
      os << "min(";
      print_node(n->a.get(), os);
      os << ", ";
      print_node(n->b.get(), os);
      os << ')';
      return;
    case NodeKind::Max:
      os << "max(";
      print_node(n->a.get(), os);
      os << ", ";
      print_node(n->b.get(), os);
      os << ')';
      return;
    case NodeKind::SelectLE:
      os << "selectle(";
      print_node(n->a.get(), os);
      os << ", ";
      print_node(n->b.get(), os);
      os << ", ";
      print_node(n->c.get(), os);
      os << ", ";
      print_node(n->d.get(), os);
      os << ')';
      return;
  }
}

bool nodes_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  if (a->kind == NodeKind::Constant) return a->value == b->value;
  if (a->kind == NodeKind::PowInt && a->iexp != b->iexp) return false;
  const NodePtr* ca[4] = {&a->a, &a->b, &a->c, &a->d};
  const NodePtr* cb[4] = {&b->a, &b->b, &b->c, &b->d};
  for (int i = 0; i < 4; ++i) {
    if (static_cast<bool>(*ca[i]) != static_cast<bool>(*cb[i])) return false;
    if (*ca[i] && !nodes_equal(ca[i]->get(), cb[i]->get())) return false;
  }
  return true;
}

// --- parser ---------------------------------------------------------------
//
// expr    := term (('+' | '-') term)*
// term    := unary (('*' | '/') unary)*
// unary   := '-' unary | power
// power   := atom ('^' intlit)?          (integer exponents only)
// atom    := number | 'x1' | 'x2' | func '(' expr (',' expr)* ')' | '(' expr ')'
// func    := abs | sign | sqrt | sin | cos | exp | min | max | selectle

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) throw SyntaxError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c)
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        lhs = make(NodeKind::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = make(NodeKind::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (accept('*'))
        lhs = make(NodeKind::Mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = make(NodeKind::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make(NodeKind::Neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    skip_ws();
    if (accept('^')) {
      bool parens = accept('(');
      skip_ws();
      std::size_t start = pos_;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      if (pos_ == start) throw SyntaxError("expected integer exponent", pos_);
      long e = std::strtol(s_.substr(start, pos_ - start).c_str(), nullptr, 10);
      if (parens) expect(')');
      return make_pow(std::move(base), e);
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw SyntaxError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      char* end = nullptr;
      double v = std::strtod(s_.c_str() + start, &end);
      if (end == s_.c_str() + start) throw SyntaxError("bad number", start);
      pos_ = static_cast<std::size_t>(end - s_.c_str());
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "x1") return make(NodeKind::Var1);
      if (name == "x2") return make(NodeKind::Var2);
      if (name == "pi") return make_const(3.14159265358979323846);
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        std::vector<NodePtr> args;
        args.push_back(parse_expr());
        while (accept(',')) args.push_back(parse_expr());
        expect(')');
        auto need = [&](std::size_t n) {
          if (args.size() != n)
            throw SyntaxError(name + " expects " + std::to_string(n) +
                                  " argument(s)",
                              start);
        };
        if (name == "abs") { need(1); return make(NodeKind::Abs, args[0]); }
        if (name == "sign") { need(1); return make(NodeKind::Sign, args[0]); }
        if (name == "sqrt") { need(1); return make(NodeKind::Sqrt, args[0]); }
        if (name == "sin") { need(1); return make(NodeKind::Sin, args[0]); }
        if (name == "cos") { need(1); return make(NodeKind::Cos, args[0]); }
        if (name == "exp") { need(1); return make(NodeKind::Exp, args[0]); }
        if (name == "min") { need(2); return make(NodeKind::Min, args[0], args[1]); }
        if (name == "max") { need(2); return make(NodeKind::Max, args[0], args[1]); }
        if (name == "selectle") {
          need(4);
          return make(NodeKind::SelectLE, args[0], args[1], args[2], args[3]);
        }
        throw UnknownIdentifier(name, start);
      }
      throw UnknownIdentifier(name, start);
    }
    throw SyntaxError("unexpected character", pos_);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

NodePtr ScalarField::constant_node(double v) { return make_const(v); }

double ScalarField::eval(const Vec2& x, bool strict_kinks) const {
  return eval_node(root_.get(), x, strict_kinks);
}

ScalarField ScalarField::derivative(int var) const {
  return ScalarField(diff(root_, var));
}

std::string ScalarField::print() const {
  std::ostringstream os;
  print_node(root_.get(), os);
  return os.str();
}

bool ScalarField::structurally_equal(const ScalarField& other) const {
  return nodes_equal(root_.get(), other.root_.get());
}

ScalarField parse(const std::string& text) {
  Parser p(text);
  return ScalarField(p.run());
}

VectorField gradient(const ScalarField& f) {
  return {f.derivative(1), f.derivative(2)};
}

MatrixField hessian(const ScalarField& f) {
  ScalarField fx = f.derivative(1);
  ScalarField fy = f.derivative(2);
  ScalarField fxy = fx.derivative(2);  // shared mixed entry
  MatrixField h;
  h.entries[0][0] = fx.derivative(1);
  h.entries[0][1] = fxy;
  h.entries[1][0] = fxy;
  h.entries[1][1] = fy.derivative(2);
  return h;
}

}  // namespace obliqua::expr
