#include "hetsec/conic/problem.hpp"

#include <algorithm>
#include <ostream>

namespace hetsec::conic {

int Variable::param_count() const {
  switch (kind) {
    case VarKind::Scalar:
      return 1;
    case VarKind::ComplexVector:
      return 2 * dim;
    case VarKind::Hermitian:
      return dim * dim;
  }
  return 0;
}

LinExpr& LinExpr::add(int param, double coef) {
  if (coef != 0.0) terms_.emplace_back(param, coef);
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  constant_ += o.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  terms_.reserve(terms_.size() + o.terms_.size());
  for (const auto& [p, c] : o.terms_) terms_.emplace_back(p, -c);
  constant_ -= o.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double a) {
  for (auto& t : terms_) t.second *= a;
  constant_ *= a;
  return *this;
}

void LinExpr::compact() {
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!out.empty() && out.back().first == t.first)
      out.back().second += t.second;
    else
      out.push_back(t);
  }
  std::erase_if(out, [](const auto& t) { return t.second == 0.0; });
  terms_ = std::move(out);
}

double LinExpr::evaluate(const RVec& x) const {
  double v = constant_;
  for (const auto& [p, c] : terms_) v += c * x(p);
  return v;
}

VarId ConicProblem::push(Variable v) {
  v.offset = n_params_;
  n_params_ += v.param_count();
  vars_.push_back(std::move(v));
  return VarId{static_cast<int>(vars_.size()) - 1};
}

VarId ConicProblem::add_scalar(std::string name, bool nonneg) {
  return push(Variable{std::move(name), VarKind::Scalar, 1, 0, nonneg});
}

VarId ConicProblem::add_complex_vector(std::string name, int dim) {
  if (dim < 1) throw DimensionError("complex vector variable needs dim >= 1");
  return push(Variable{std::move(name), VarKind::ComplexVector, dim, 0, false});
}

VarId ConicProblem::add_hermitian(std::string name, int dim) {
  if (dim < 1) throw DimensionError("hermitian variable needs dim >= 1");
  return push(Variable{std::move(name), VarKind::Hermitian, dim, 0, false});
}

const Variable& ConicProblem::variable(VarId v) const {
  if (v.index < 0 || v.index >= static_cast<int>(vars_.size()))
    throw DimensionError("unknown variable id");
  return vars_[v.index];
}

LinExpr ConicProblem::scalar(VarId v) const {
  const auto& var = variable(v);
  if (var.kind != VarKind::Scalar) throw DimensionError(var.name + " is not a scalar");
  LinExpr e;
  e.add(var.offset, 1.0);
  return e;
}

std::pair<LinExpr, LinExpr> ConicProblem::row_times(const CRow& h, VarId w) const {
  const auto& var = variable(w);
  if (var.kind != VarKind::ComplexVector || var.dim != h.size())
    throw DimensionError("row_times: " + var.name + " does not match channel length");
  LinExpr re, im;
  for (int i = 0; i < var.dim; ++i) {
    const int p = var.offset + 2 * i;
    // (a + ib)(x + iy) = (ax - by) + i(ay + bx)
    re.add(p, h(i).real()).add(p + 1, -h(i).imag());
    im.add(p, h(i).imag()).add(p + 1, h(i).real());
  }
  return {re, im};
}

LinExpr ConicProblem::re_inner(const CVec& c, VarId w) const {
  const auto& var = variable(w);
  if (var.kind != VarKind::ComplexVector || var.dim != c.size())
    throw DimensionError("re_inner: " + var.name + " does not match coefficient length");
  LinExpr e;
  for (int i = 0; i < var.dim; ++i) {
    // Re(conj(c) w) = Re c Re w + Im c Im w
    e.add(var.offset + 2 * i, c(i).real()).add(var.offset + 2 * i + 1, c(i).imag());
  }
  return e;
}

std::vector<LinExpr> ConicProblem::components(VarId w) const {
  const auto& var = variable(w);
  if (var.kind != VarKind::ComplexVector) throw DimensionError(var.name + " is not a vector");
  std::vector<LinExpr> out(2 * var.dim);
  for (int i = 0; i < 2 * var.dim; ++i) out[i].add(var.offset + i, 1.0);
  return out;
}

LinExpr ConicProblem::trace_product(const CMat& h, VarId x) const {
  const auto& var = variable(x);
  const int d = var.dim;
  if (var.kind != VarKind::Hermitian || h.rows() != d || h.cols() != d)
    throw DimensionError("trace_product: " + var.name + " does not match matrix size");
  LinExpr e;
  for (int a = 0; a < d; ++a) {
    e.add(var.offset + a * d + a, h(a, a).real());
    for (int b = a + 1; b < d; ++b) {
      // H_ab X_ba + H_ba X_ab = 2 Re(conj(H_ab) X_ab)
      e.add(var.offset + a * d + b, 2.0 * h(a, b).real());
      e.add(var.offset + b * d + a, 2.0 * h(a, b).imag());
    }
  }
  return e;
}

LinExpr ConicProblem::trace(VarId x) const {
  const auto& var = variable(x);
  if (var.kind != VarKind::Hermitian) throw DimensionError(var.name + " is not hermitian");
  LinExpr e;
  for (int a = 0; a < var.dim; ++a) e.add(var.offset + a * var.dim + a, 1.0);
  return e;
}

void ConicProblem::check(const LinExpr& e) const {
  for (const auto& [p, c] : e.terms())
    if (p < 0 || p >= n_params_) throw DimensionError("expression references an undeclared variable");
}

int ConicProblem::add(Constraint c) {
  std::visit(
      [this](auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SecondOrderCone>) {
          check(k.t);
          k.t.compact();
          for (auto& x : k.x) {
            check(x);
            x.compact();
          }
        } else if constexpr (std::is_same_v<K, PsdMembership>) {
          if (variable(k.var).kind != VarKind::Hermitian)
            throw DimensionError("PSD membership requires a hermitian variable");
        } else {
          check(k.expr);
          k.expr.compact();
        }
      },
      c);
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

Census ConicProblem::census() const {
  Census out;
  for (const auto& v : vars_) {
    if (v.kind == VarKind::Scalar) ++out.scalars;
    if (v.kind == VarKind::ComplexVector) ++out.complex_vectors;
    if (v.kind == VarKind::Hermitian) ++out.hermitian_blocks;
  }
  for (const auto& c : constraints_) {
    if (std::holds_alternative<LinearEq>(c)) ++out.equalities;
    if (std::holds_alternative<LinearIneq>(c)) ++out.inequalities;
    if (std::holds_alternative<SecondOrderCone>(c)) ++out.socs;
    if (std::holds_alternative<PsdMembership>(c)) ++out.psd;
  }
  return out;
}

namespace {

void dump_expr(std::ostream& os, const LinExpr& e) {
  os << e.constant();
  for (const auto& [p, c] : e.terms()) os << ' ' << p << ':' << c;
  os << '\n';
}

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::Scalar:
      return "scalar";
    case VarKind::ComplexVector:
      return "cvec";
    case VarKind::Hermitian:
      return "herm";
  }
  return "?";
}

}  // namespace

void ConicProblem::dump(std::ostream& os) const {
  os.precision(17);
  for (const auto& v : vars_) {
    os << "var " << v.name << ' ' << kind_name(v.kind) << ' ' << v.dim << ' ' << v.offset;
    if (v.nonneg) os << " nonneg";
    os << '\n';
  }
  os << "obj " << (sense_ == Sense::Minimize ? "min " : "max ");
  dump_expr(os, objective_);
  for (const auto& c : constraints_) {
    if (const auto* eq = std::get_if<LinearEq>(&c)) {
      os << "eq ";
      dump_expr(os, eq->expr);
    } else if (const auto* ge = std::get_if<LinearIneq>(&c)) {
      os << "ge ";
      dump_expr(os, ge->expr);
    } else if (const auto* soc = std::get_if<SecondOrderCone>(&c)) {
      os << "soc " << soc->x.size() << '\n' << "  ";
      dump_expr(os, soc->t);
      for (const auto& x : soc->x) {
        os << "  ";
        dump_expr(os, x);
      }
    } else if (const auto* psd = std::get_if<PsdMembership>(&c)) {
      os << "psd " << vars_[psd->var.index].name << '\n';
    }
  }
}

}  // namespace hetsec::conic
