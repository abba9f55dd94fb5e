#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace obliqua::expr {

// Point in the plane. Used everywhere downstream.
struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  Vec2() = default;
  Vec2(double a, double b) : x1(a), x2(b) {}

  Vec2 operator+(const Vec2& o) const { return {x1 + o.x1, x2 + o.x2}; }
  Vec2 operator-(const Vec2& o) const { return {x1 - o.x1, x2 - o.x2}; }
  Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
  Vec2 operator-() const { return {-x1, -x2}; }
  double dot(const Vec2& o) const { return x1 * o.x1 + x2 * o.x2; }
  double norm() const;
  Vec2 unit() const;  // throws DegenerateVector on (near-)zero input
  // perpendicular, counterclockwise
  Vec2 perp() const { return {-x2, x1}; }
};

struct Mat2 {
  // row-major: [[a, b], [c, d]]
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  Vec2 apply(const Vec2& v) const {
    return {a * v.x1 + b * v.x2, c * v.x1 + d * v.x2};
  }
  double det() const { return a * d - b * c; }
};

struct SyntaxError : std::runtime_error {
  std::size_t offset;
  SyntaxError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)),
        offset(off) {}
};

struct UnknownIdentifier : std::runtime_error {
  std::size_t offset;
  UnknownIdentifier(const std::string& name, std::size_t off)
      : std::runtime_error("unknown identifier '" + name + "' at offset " +
                           std::to_string(off)),
        offset(off) {}
};

// Division by zero, sqrt of a negative, 0^negative.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict-mode evaluation landed exactly on an abs/min/max kink.
struct KinkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateVector : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NodeKind : unsigned char {
  Constant,
  Var1,
  Var2,
  Add,
  Sub,
  Mul,
  Div,
  PowInt,  // integer exponent stored in `iexp`
  Neg,
  Abs,
  Sign,  // appears in derivatives of abs; sign(0) = 0
  Sqrt,
  Sin,
  Cos,
  Exp,
  Min,
  Max,
  // (a <= b ? u : v). Internal node produced by differentiating min/max;
  // ties go to the first branch.
  SelectLE,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double value = 0.0;  // Constant
  long iexp = 0;       // PowInt
  NodePtr a, b, c, d;  // children (SelectLE uses all four)
};

// Immutable differentiable scalar field over (x1, x2).
class ScalarField {
 public:
  ScalarField() : root_(constant_node(0.0)) {}
  explicit ScalarField(NodePtr root) : root_(std::move(root)) {}
  static ScalarField constant(double v) { return ScalarField(constant_node(v)); }

  double eval(const Vec2& x, bool strict_kinks = false) const;
  ScalarField derivative(int var) const;  // var in {1, 2}
  std::string print() const;

  bool structurally_equal(const ScalarField& other) const;
  const NodePtr& root() const { return root_; }

 private:
  static NodePtr constant_node(double v);
  NodePtr root_;
};

ScalarField parse(const std::string& text);

struct VectorField {
  ScalarField u1, u2;
  Vec2 eval(const Vec2& x) const { return {u1.eval(x), u2.eval(x)}; }
};

struct MatrixField {
  std::array<std::array<ScalarField, 2>, 2> entries;
  Mat2 eval(const Vec2& x) const {
    return {entries[0][0].eval(x), entries[0][1].eval(x), entries[1][0].eval(x),
            entries[1][1].eval(x)};
  }
};

VectorField gradient(const ScalarField& f);
// Symmetric by construction: the mixed entry is computed once and shared.
MatrixField hessian(const ScalarField& f);

}  // namespace obliqua::expr
