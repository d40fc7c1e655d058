#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetsec/types.hpp"

namespace hetsec::conic {

/// Variable blocks of a conic program. Every block owns a contiguous slice of
/// the real parameter vector:
///   Scalar          1 parameter
///   ComplexVector   2*dim parameters, interleaved (re0, im0, re1, im1, ...)
///   Hermitian       dim*dim parameters, see embed.hpp for the layout
enum class VarKind { Scalar, ComplexVector, Hermitian };

struct VarId {
  int index = -1;
  friend bool operator==(VarId, VarId) = default;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::Scalar;
  int dim = 1;
  int offset = 0;       // first real parameter
  bool nonneg = false;  // scalars only
  int param_count() const;
};

/// Affine functional sum_i coef_i * x[param_i] + constant over the real parameters.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}

  LinExpr& add(int param, double coef);
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double a);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(double a, LinExpr e) { return e *= a; }
  friend LinExpr operator*(LinExpr e, double a) { return e *= a; }
  friend LinExpr operator+(LinExpr a, double c) { return a.add_constant(c); }
  friend LinExpr operator-(LinExpr a, double c) { return a.add_constant(-c); }

  double constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }

  /// Merge duplicate parameters and drop exact zeros.
  void compact();
  double evaluate(const RVec& x) const;

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

/// expr == 0
struct LinearEq {
  LinExpr expr;
};
/// expr >= 0
struct LinearIneq {
  LinExpr expr;
};
/// || (x_1, ..., x_k) || <= t
struct SecondOrderCone {
  LinExpr t;
  std::vector<LinExpr> x;
};
/// The Hermitian block `var` is positive semidefinite.
struct PsdMembership {
  VarId var;
};

using Constraint = std::variant<LinearEq, LinearIneq, SecondOrderCone, PsdMembership>;

enum class Sense { Minimize, Maximize };

struct Census {
  int scalars = 0;
  int complex_vectors = 0;
  int hermitian_blocks = 0;
  int equalities = 0;
  int inequalities = 0;
  int socs = 0;
  int psd = 0;
  int linear() const { return equalities + inequalities; }
};

/// Solver-agnostic conic program over scalar, complex-vector and Hermitian
/// variable blocks. Build it once, then hand it to solve(); it is not mutated
/// by the solver.
class ConicProblem {
 public:
  VarId add_scalar(std::string name, bool nonneg = false);
  VarId add_complex_vector(std::string name, int dim);
  VarId add_hermitian(std::string name, int dim);

  const Variable& variable(VarId v) const;
  const std::vector<Variable>& variables() const { return vars_; }
  int param_count() const { return n_params_; }

  // Building blocks for linear forms.
  LinExpr scalar(VarId v) const;
  /// Real and imaginary parts of h * w for a channel row h and complex vector w.
  std::pair<LinExpr, LinExpr> row_times(const CRow& h, VarId w) const;
  /// Re(c^H w) for a complex coefficient vector c.
  LinExpr re_inner(const CVec& c, VarId w) const;
  /// Real and imaginary parts of every entry of w.
  std::vector<LinExpr> components(VarId w) const;
  /// Tr(H X) for Hermitian H and Hermitian variable X (always real).
  LinExpr trace_product(const CMat& H, VarId x) const;
  LinExpr trace(VarId x) const;

  int add(Constraint c);
  int add_eq(LinExpr e) { return add(LinearEq{std::move(e)}); }
  int add_ge(LinExpr e) { return add(LinearIneq{std::move(e)}); }
  int add_le(LinExpr lhs, const LinExpr& rhs) { return add(LinearIneq{rhs - lhs}); }
  int add_soc(LinExpr t, std::vector<LinExpr> x) {
    return add(SecondOrderCone{std::move(t), std::move(x)});
  }
  int add_psd(VarId x) { return add(PsdMembership{x}); }

  void set_objective(LinExpr obj, Sense sense) {
    objective_ = std::move(obj);
    sense_ = sense;
  }
  const LinExpr& objective() const { return objective_; }
  Sense sense() const { return sense_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  Census census() const;

  /// Line-oriented debug dump (not a stable format):
  ///   var <name> <kind> <dim> <offset> [nonneg]
  ///   obj <min|max> <const> {<param>:<coef>}
  ///   eq|ge <const> {<param>:<coef>}
  ///   soc <k> then k+1 lines "  <const> {<param>:<coef>}" (t first)
  ///   psd <name>
  void dump(std::ostream& os) const;

 private:
  VarId push(Variable v);
  void check(const LinExpr& e) const;

  std::vector<Variable> vars_;
  std::vector<Constraint> constraints_;
  LinExpr objective_;
  Sense sense_ = Sense::Minimize;
  int n_params_ = 0;
};

}  // namespace hetsec::conic
