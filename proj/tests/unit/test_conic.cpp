#include <random>

#include "conic/cones.hpp"
#include "doctest.h"
#include "hetsec/conic/embed.hpp"
#include "hetsec/conic/solver.hpp"

using namespace hetsec;
using namespace hetsec::conic;

namespace {

CMat random_hermitian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  CMat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  return 0.5 * (a + a.adjoint());
}

CMat random_psd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  CMat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  return a * a.adjoint() + 0.1 * CMat::Identity(d, d);
}

RVec random_soc_interior(std::mt19937_64& rng, int q) {
  std::normal_distribution<double> n;
  RVec x(q);
  for (int i = 0; i < q; ++i) x(i) = n(rng);
  x(0) = x.tail(q - 1).norm() + 0.05 + std::abs(n(rng));
  return x;
}

}  // namespace

TEST_CASE("hermitian parameter layout round-trips and matches the trace form") {
  std::mt19937_64 rng(7);
  for (int d : {1, 2, 5}) {
    const CMat x = random_hermitian(rng, d);
    const RVec p = hermitian_to_params(x);
    CHECK((params_to_hermitian(p, d) - x).norm() < 1e-12);

    ConicProblem prob;
    const auto X = prob.add_hermitian("X", d);
    const CMat h = random_hermitian(rng, d);
    const double direct = (h * x).trace().real();
    CHECK(prob.trace_product(h, X).evaluate(p) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(prob.trace(X).evaluate(p) == doctest::Approx(x.trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("real embedding doubles the spectrum") {
  std::mt19937_64 rng(11);
  const CMat x = random_hermitian(rng, 4);
  const RMat s = hermitian_to_real_symmetric(x);
  CHECK((s - s.transpose()).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<CMat> ec(x);
  Eigen::SelfAdjointEigenSolver<RMat> er(s);
  for (int i = 0; i < 4; ++i) {
    CHECK(er.eigenvalues()(2 * i) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
    CHECK(er.eigenvalues()(2 * i + 1) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
  }
  CHECK((real_symmetric_to_hermitian(s) - x).norm() < 1e-14);
}

TEST_CASE("complex row product and inner product") {
  ConicProblem prob;
  const auto w = prob.add_complex_vector("w", 3);
  CRow h(3);
  h << cplx(1, 2), cplx(-0.5, 0.3), cplx(0, -1);
  CVec wv(3);
  wv << cplx(0.2, -1), cplx(3, 0.5), cplx(-1, 1);
  const RVec p = embed_vector(wv);
  auto [re, im] = prob.row_times(h, w);
  const cplx hw = (h * wv)(0);
  CHECK(re.evaluate(p) == doctest::Approx(hw.real()));
  CHECK(im.evaluate(p) == doctest::Approx(hw.imag()));
  const CVec c = h.adjoint();
  CHECK(prob.re_inner(c, w).evaluate(p) == doctest::Approx((c.adjoint() * wv)(0).real()));
}

TEST_CASE("Nesterov-Todd scaling maps s and z to the same point") {
  std::mt19937_64 rng(3);
  detail::ConeDims dims;
  dims.lp = 3;
  dims.soc = {4, 2};
  dims.psd = {3};
  const int m = dims.total();
  RVec s(m), z(m);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int i = 0; i < 3; ++i) {
    s(i) = u(rng);
    z(i) = u(rng);
  }
  for (std::size_t k = 0; k < dims.soc.size(); ++k) {
    const int off = dims.soc_offset(static_cast<int>(k));
    s.segment(off, dims.soc[k]) = random_soc_interior(rng, dims.soc[k]);
    z.segment(off, dims.soc[k]) = random_soc_interior(rng, dims.soc[k]);
  }
  {
    std::normal_distribution<double> n;
    RMat a(3, 3), b(3, 3);
    for (int i = 0; i < 9; ++i) {
      a(i) = n(rng);
      b(i) = n(rng);
    }
    const RMat sa = a * a.transpose() + 0.1 * RMat::Identity(3, 3);
    const RMat sb = b * b.transpose() + 0.1 * RMat::Identity(3, 3);
    const int off = dims.psd_offset(0);
    s.segment(off, 9) = Eigen::Map<const RVec>(sa.data(), 9);
    z.segment(off, 9) = Eigen::Map<const RVec>(sb.data(), 9);
  }
  detail::Scaling w;
  REQUIRE(w.compute(dims, s, z));
  RVec ws = s;
  w.apply(dims, ws, false, false);
  RVec wz = z;
  w.apply(dims, wz, true, true);
  CHECK((ws - wz).norm() < 1e-10);
  CHECK((ws - w.lambda).norm() < 1e-10);

  RVec v = RVec::LinSpaced(m, -1.0, 2.0);
  RVec t = v;
  w.apply(dims, t, false, false);
  w.apply(dims, t, false, true);
  CHECK((t - v).norm() < 1e-10);
  t = v;
  w.apply_wtw(dims, t);
  w.apply_wtw_inv(dims, t);
  CHECK((t - v).norm() < 1e-9);
  // W^T is the adjoint of W
  RVec a = RVec::LinSpaced(m, 0.5, -0.7), b = v;
  RVec wa = a, wtb = b;
  w.apply(dims, wa, false, false);
  w.apply(dims, wtb, true, false);
  CHECK(wa.dot(b) == doctest::Approx(a.dot(wtb)).epsilon(1e-10));
}

TEST_CASE("Jordan solve inverts the Jordan product") {
  detail::ConeDims dims;
  dims.lp = 2;
  dims.soc = {3};
  dims.psd = {2};
  RVec lam(2 + 3 + 4);
  lam << 1.5, 0.7, 2.0, 0.5, -0.8, 1.2, 0.0, 0.0, 0.4;
  const RVec x = RVec::LinSpaced(9, -1.0, 1.0);
  RVec xs = x;
  // keep the PSD block symmetric
  xs(6) = xs(7);
  const RVec y = detail::jordan_product(dims, lam, xs);
  const RVec back = detail::jordan_solve(dims, lam, y);
  CHECK((back - xs).norm() < 1e-12);
}

TEST_CASE("max step stops exactly at the cone boundary") {
  detail::ConeDims dims;
  dims.soc = {3};
  RVec l(3), d(3);
  l << 2.0, 0.5, 0.0;
  d << -1.0, 0.5, 1.0;
  const double a = detail::max_step(dims, l, d);
  const RVec p = l + a * d;
  CHECK(p(0) == doctest::Approx(p.tail(2).norm()).epsilon(1e-10));
  CHECK(a > 0.0);
}

TEST_CASE("linear program with a lower bound") {
  ConicProblem p;
  const auto x = p.add_scalar("x");
  p.add_ge(p.scalar(x) - 1.0);
  p.set_objective(p.scalar(x), Sense::Minimize);
  const auto r = solve(p);
  REQUIRE(r.optimal());
  CHECK(r.scalar(p, x) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.objective_value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("maximization with equality and nonnegative scalars") {
  ConicProblem p;
  const auto x = p.add_scalar("x", true);
  const auto y = p.add_scalar("y", true);
  p.add_eq(p.scalar(x) + 2.0 * p.scalar(y) - 4.0);
  p.set_objective(p.scalar(x) + p.scalar(y), Sense::Maximize);
  const auto r = solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective_value == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(r.scalar(p, x) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("second-order cone with constant vector") {
  ConicProblem p;
  const auto t = p.add_scalar("t");
  p.add_soc(p.scalar(t), {LinExpr(3.0), LinExpr(4.0)});
  p.set_objective(p.scalar(t), Sense::Minimize);
  const auto r = solve(p);
  REQUIRE(r.optimal());
  CHECK(r.scalar(p, t) == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("minimum-norm complex vector meeting a linear target") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 5; ++trial) {
    CRow h(4);
    for (int i = 0; i < 4; ++i) h(i) = cplx(n(rng), n(rng));
    ConicProblem p;
    const auto w = p.add_complex_vector("w", 4);
    const auto t = p.add_scalar("t");
    p.add_soc(p.scalar(t), p.components(w));
    auto [re, im] = p.row_times(h, w);
    p.add_ge(re - 1.0);
    p.set_objective(p.scalar(t), Sense::Minimize);
    const auto r = solve(p);
    REQUIRE(r.optimal());
    CHECK(r.objective_value == doctest::Approx(1.0 / h.norm()).epsilon(1e-6));
    const CVec wv = r.vector(p, w);
    CHECK((wv - h.adjoint() / h.squaredNorm()).norm() < 1e-5);
  }
}

TEST_CASE("trace-normalized SDP recovers the largest eigenvalue") {
  std::mt19937_64 rng(9);
  for (int d : {2, 4, 6}) {
    const CMat c = random_hermitian(rng, d);
    ConicProblem p;
    const auto X = p.add_hermitian("X", d);
    const int psd = p.add_psd(X);
    p.add_eq(p.trace(X) - 1.0);
    p.set_objective(p.trace_product(c, X), Sense::Maximize);
    const auto r = solve(p);
    REQUIRE(r.optimal());
    Eigen::SelfAdjointEigenSolver<CMat> es(c);
    const double lmax = es.eigenvalues()(d - 1);
    CHECK(std::abs(r.objective_value - lmax) < 1e-7 * std::max(1.0, std::abs(lmax)));
    const CMat x = r.hermitian(p, X);
    const CVec v = es.eigenvectors().col(d - 1);
    CHECK(std::abs((v.adjoint() * x * v)(0).real() - 1.0) < 1e-6);
    const CMat g = r.psd_dual(p, psd);
    Eigen::SelfAdjointEigenSolver<CMat> eg(g);
    CHECK(eg.eigenvalues()(0) > -1e-7);
    CHECK(std::abs((g * x).trace().real()) < 1e-6);
  }
}

TEST_CASE("infeasible and unbounded programs are reported") {
  {
    ConicProblem p;
    const auto x = p.add_scalar("x");
    p.add_ge(p.scalar(x) - 1.0);
    p.add_le(p.scalar(x), LinExpr(0.0));
    p.set_objective(p.scalar(x), Sense::Minimize);
    CHECK(solve(p).status == Status::Infeasible);
  }
  {
    ConicProblem p;
    const auto x = p.add_scalar("x");
    p.add_le(p.scalar(x), LinExpr(0.0));
    p.set_objective(p.scalar(x), Sense::Minimize);
    CHECK(solve(p).status == Status::Unbounded);
  }
  {
    ConicProblem p;
    const auto w = p.add_complex_vector("w", 2);
    p.add_soc(LinExpr(1.0), p.components(w));
    auto c = p.components(w);
    p.add_ge(c[0] - 2.0);
    p.set_objective(c[1], Sense::Minimize);
    CHECK(solve(p).status == Status::Infeasible);
  }
}

// Random bounded SOCP/SDP mixes: the returned point must be feasible, the
// objective must match the dual objective and the multipliers must satisfy
// stationarity of the Lagrangian.
TEST_CASE("random conic programs satisfy the optimality conditions") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    const int dv = 2 + trial % 3;
    const int dh = 2 + trial % 2;
    ConicProblem p;
    const auto w = p.add_complex_vector("w", dv);
    const auto X = p.add_hermitian("X", dh);
    const auto t = p.add_scalar("t");
    p.add_soc(LinExpr(2.0), p.components(w));
    p.add_psd(X);
    p.add_le(p.trace(X), LinExpr(3.0));
    for (int k = 0; k < 3; ++k) {
      CVec c(dv);
      for (int i = 0; i < dv; ++i) c(i) = cplx(n(rng), n(rng));
      // 0 is strictly feasible
      p.add_le(p.re_inner(c, w) + p.trace_product(random_hermitian(rng, dh), X), LinExpr(1.0 + std::abs(n(rng))));
    }
    p.add_soc(p.scalar(t), {p.trace_product(random_psd(rng, dh), X), LinExpr(n(rng))});
    CVec obj(dv);
    for (int i = 0; i < dv; ++i) obj(i) = cplx(n(rng), n(rng));
    LinExpr o = p.re_inner(obj, w) + p.trace_product(random_hermitian(rng, dh), X) - 0.5 * p.scalar(t);
    const bool maximize = trial % 2 == 0;
    p.set_objective(maximize ? o : -1.0 * o, maximize ? Sense::Maximize : Sense::Minimize);

    const auto r = solve(p);
    REQUIRE(r.optimal());
    CHECK(std::abs(r.stats.primal_objective - r.stats.dual_objective) <=
          1e-6 * std::max(1.0, std::abs(r.objective_value)));

    // feasibility
    const RVec& x = r.primal;
    for (const auto& c : p.constraints()) {
      if (const auto* g = std::get_if<LinearIneq>(&c)) CHECK(g->expr.evaluate(x) > -1e-7);
      if (const auto* s = std::get_if<SecondOrderCone>(&c)) {
        double nn = 0.0;
        for (const auto& e : s->x) nn += std::pow(e.evaluate(x), 2);
        CHECK(s->t.evaluate(x) - std::sqrt(nn) > -1e-7);
      }
    }
    Eigen::SelfAdjointEigenSolver<CMat> ex(r.hermitian(p, X));
    CHECK(ex.eigenvalues()(0) > -1e-7);

    // stationarity: c_min = sum of multiplier-weighted constraint gradients
    RVec grad = RVec::Zero(p.param_count());
    const double sgn = maximize ? -1.0 : 1.0;
    for (const auto& [k, v] : p.objective().terms()) grad(k) += sgn * v;
    for (std::size_t i = 0; i < p.constraints().size(); ++i) {
      const auto& c = p.constraints()[i];
      const RVec& y = r.duals[i];
      if (const auto* g = std::get_if<LinearIneq>(&c)) {
        CHECK(y(0) > -1e-8);
        for (const auto& [k, v] : g->expr.terms()) grad(k) -= y(0) * v;
      } else if (const auto* s = std::get_if<SecondOrderCone>(&c)) {
        CHECK(y(0) - y.tail(y.size() - 1).norm() > -1e-8);
        for (const auto& [k, v] : s->t.terms()) grad(k) -= y(0) * v;
        for (std::size_t j = 0; j < s->x.size(); ++j)
          for (const auto& [k, v] : s->x[j].terms()) grad(k) -= y(static_cast<Eigen::Index>(j) + 1) * v;
      } else if (std::holds_alternative<PsdMembership>(c)) {
        const CMat g = r.psd_dual(p, static_cast<int>(i));
        Eigen::SelfAdjointEigenSolver<CMat> eg(g);
        CHECK(eg.eigenvalues()(0) > -1e-7);
        grad -= [&] {
          RVec out = RVec::Zero(p.param_count());
          const auto& var = p.variable(X);
          const LinExpr tg = p.trace_product(g, X);
          for (const auto& [k, v] : tg.terms()) out(k) += v;
          (void)var;
          return out;
        }();
      }
    }
    CHECK(grad.norm() < 1e-6 * std::max(1.0, obj.norm()));
  }
}
