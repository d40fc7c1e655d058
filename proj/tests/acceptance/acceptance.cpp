// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hetsec/benchmark.hpp"
#include "hetsec/harness.hpp"
#include "hetsec/stb_jmf.hpp"
#include "hetsec/stb_om.hpp"
#include "hetsec/stb_smf.hpp"

using namespace hetsec;

namespace {

// pinned tolerances
constexpr double kTraceDrop = 1e-6;
constexpr double kConvRel = 1e-4;
constexpr int kConvIters = 30;
constexpr double kFuRel = 1e-3;
constexpr double kRankRatio = 1e-6;
constexpr double kNullAbs = 1e-8;      // times sqrt(p_f)
constexpr double kSocpRel = 1e-6;
constexpr double kEigRel = 1e-8;
constexpr double kBruteBits = 1e-2;
constexpr double kCcConstraint = 1e-6;
constexpr double kCcValue = 1e-7;
constexpr double kOuterBits = 1e-3;
constexpr double kAnRel = 0.05;

struct Options {
  int trials = 100;
  std::uint64_t seed = 1;
  std::string csv_dir = ".";
  std::set<int> only;
};

int g_passed = 0, g_run = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
  ++g_run;
  g_passed += pass;
  std::printf("[%s] C%-2d %-34s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double q(const CRow& h, const CMat& w) { return (h * w * h.adjoint())(0, 0).real(); }

// ---------------------------------------------------------------- C1
void c1_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_drop = 0.0;
  int worst_iters = 0, unconverged = 0, failed = 0, runs = 0;
  for (double pm : {1e3, 1e4, std::pow(10.0, 4.5)})
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      NetworkConfig c;
      c.p_m = pm;
      const ChannelSet ch = sample_rayleigh_channels(c, seed);
      ++runs;
      try {
        const auto tr = solve_stb_om(ch, c).diagnostics.trace;
        for (std::size_t k = 1; k < tr.size(); ++k)
          worst_drop = std::max(worst_drop, (tr[k - 1] - tr[k]) / tr[k - 1]);
        worst_iters = std::max(worst_iters, static_cast<int>(tr.size()));
        const bool conv = tr.size() >= 2 && static_cast<int>(tr.size()) <= kConvIters &&
                          std::abs(tr.back() - tr[tr.size() - 2]) < kConvRel * tr[tr.size() - 2];
        unconverged += !conv;
      } catch (const Error&) {
        ++failed;
      }
    }
  const bool ok = worst_drop <= kTraceDrop && unconverged == 0 && failed == 0;
  verdict(1, "sca-monotone-convergence", ok,
          fmt("%d runs, worst relative drop %.2e (tol %.0e), max iterations %d (limit %d), unconverged %d, "
              "failed %d, %.0f s",
              runs, worst_drop, kTraceDrop, worst_iters, kConvIters, unconverged, failed, secs_since(t0)));
}

// ---------------------------------------------------- shared p_m / p_f sweeps
struct JmfRecord {
  double max_dev = 0.0;  // worst |SINR_fu - target| / target over FUs
  double rank_ratio = 0.0;
  int randomized = 0;
};

struct Sweeps {
  ResultTable pm, pf;
  std::vector<JmfRecord> jmf;  // every solved JMF row of the p_m sweep
  int jmf_attempts = 0;
  double pm_seconds = 0.0, pf_seconds = 0.0;
};

ResultTable sweep(const std::string& param, const std::vector<double>& values, const std::vector<std::string>& schemes,
                  const Options& o, std::vector<JmfRecord>* jmf, int* jmf_attempts) {
  ExperimentSpec spec;
  spec.sweep = {param, values};
  spec.schemes = schemes;
  spec.trials = o.trials;
  spec.seed = o.seed;
  spec.validate();
  ResultTable t;
  for (double v : values) {
    const auto t0 = std::chrono::steady_clock::now();
    const NetworkConfig c = at_sweep_point(spec.base, param, v);
    for (int trial = 0; trial < o.trials; ++trial) {
      const ChannelSet ch = trial_channels(c, spec.seed, trial);
      for (const auto& s : schemes) {
        BeamformingSolution sol;
        auto rows = run_scheme(s, ch, c, spec, trial, &sol);
        ResultRow& r = rows.back();
        r.sweep_value_db = v;
        if (s == "stb_jmf" && jmf) {
          ++*jmf_attempts;
          if (solved(r)) {
            const double target = r.status == "ok" ? c.gamma_fu[0][0] : 0.5;
            JmfRecord rec;
            for (int n = 0; n < c.n_coop; ++n)
              for (int k = 0; k < c.k_users; ++k)
                rec.max_dev = std::max(rec.max_dev, std::abs(sinr_fu(ch, sol, n, k) - target) / target);
            rec.rank_ratio = sol.diagnostics.max_rank_ratio;
            rec.randomized = sol.diagnostics.randomized_blocks;
            jmf->push_back(rec);
          }
        }
        t.rows.insert(t.rows.end(), rows.begin(), rows.end());
      }
    }
    std::fprintf(stderr, "  %s = %g dB done (%.0f s)\n", param.c_str(), v, secs_since(t0));
  }
  return t;
}

Sweeps& sweeps(const Options& o) {
  static Sweeps s;
  static bool done = false;
  if (done) return s;
  done = true;
  std::fprintf(stderr, "p_m sweep, %d paired trials per point\n", o.trials);
  auto t0 = std::chrono::steady_clock::now();
  s.pm = sweep("p_m_db", {30, 33, 36, 39, 42, 45}, {"stb_smf", "stb_jmf", "stb_om", "benchmark", "stb_om_an"}, o,
               &s.jmf, &s.jmf_attempts);
  s.pm_seconds = secs_since(t0);
  write_csv(s.pm, o.csv_dir + "/acceptance_p_m.csv");
  std::fprintf(stderr, "p_f sweep, %d paired trials per point\n", o.trials);
  t0 = std::chrono::steady_clock::now();
  s.pf = sweep("p_f_db", {20, 25, 30, 35, 40}, {"stb_smf", "stb_jmf"}, o, nullptr, nullptr);
  s.pf_seconds = secs_since(t0);
  write_csv(s.pf, o.csv_dir + "/acceptance_p_f.csv");
  return s;
}

// mean secrecy per sweep value for one scheme
std::vector<std::pair<double, PointSummary>> curve(const ResultTable& t, const std::string& scheme) {
  std::vector<std::pair<double, PointSummary>> out;
  for (const auto& [key, s] : summarize(t))
    if (std::get<0>(key) == scheme) out.emplace_back(std::get<2>(key), s);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::string failures_note(const ResultTable& t) {
  int bad = 0;
  for (const auto& r : t.rows) bad += r.status != "trace" && !solved(r);
  return fmt("%d failed rows", bad);
}

// ---------------------------------------------------------------- C2
void c2_ordering(const Options& o) {
  const Sweeps& s = sweeps(o);
  const auto smf = curve(s.pm, "stb_smf"), jmf = curve(s.pm, "stb_jmf"), om = curve(s.pm, "stb_om"),
             bm = curve(s.pm, "benchmark");
  bool ok = smf.size() == 6 && jmf.size() == 6 && om.size() == 6 && bm.size() == 6;
  double m1 = INFINITY, m2 = INFINITY, m3 = INFINITY;
  std::string broken;
  for (std::size_t i = 0; ok && i < smf.size(); ++i) {
    const double a = smf[i].second.mean_secrecy, b = jmf[i].second.mean_secrecy, c = om[i].second.mean_secrecy,
                 d = bm[i].second.mean_secrecy;
    m1 = std::min(m1, a - b);
    m2 = std::min(m2, b - c);
    m3 = std::min(m3, c - d);
    if (!(a >= b && b >= c && c >= d)) broken += fmt(" %g", smf[i].first);
  }
  ok = ok && broken.empty();
  verdict(2, "scheme-ordering", ok,
          fmt("min margins SMF-JMF %.4f, JMF-OM %.4f, OM-bench %.4f bits; violated at p_m =%s; %s; sweep %.0f s", m1,
              m2, m3, broken.empty() ? " none" : broken.c_str(), failures_note(s.pm).c_str(), s.pm_seconds));
}

// ---------------------------------------------------------------- C3
int decreases(const std::vector<std::pair<double, PointSummary>>& c) {
  int v = 0;
  for (std::size_t i = 1; i < c.size(); ++i) v += c[i].second.mean_secrecy < c[i - 1].second.mean_secrecy;
  return v;
}

void c3_power_trends(const Options& o) {
  const Sweeps& s = sweeps(o);
  bool ok = true;
  std::string detail = "violations p_m:";
  for (const char* sc : {"stb_smf", "stb_jmf", "stb_om", "benchmark"}) {
    const int v = decreases(curve(s.pm, sc));
    ok = ok && v <= 1;
    detail += fmt(" %s %d", sc, v);
  }
  detail += "; p_f:";
  for (const char* sc : {"stb_smf", "stb_jmf"}) {
    const int v = decreases(curve(s.pf, sc));
    ok = ok && v <= 1;
    detail += fmt(" %s %d", sc, v);
  }
  detail += fmt(" (at most 1 per curve); p_f sweep %s, %.0f s", failures_note(s.pf).c_str(), s.pf_seconds);
  verdict(3, "power-trends", ok, detail);
}

// ---------------------------------------------------------------- C4
void c4_fu_qos(const Options& o) {
  const Sweeps& s = sweeps(o);
  double worst = 0.0;
  int off = 0;
  for (const auto& r : s.jmf) {
    worst = std::max(worst, r.max_dev);
    off += r.max_dev > kFuRel;
  }
  const auto smf = curve(s.pm, "stb_smf");
  bool decreasing = smf.size() >= 2;
  std::string means;
  for (std::size_t i = 0; i < smf.size(); ++i) {
    means += fmt(" %.3f", smf[i].second.mean_fu_sinr);
    if (i > 0 && !(smf[i].second.mean_fu_sinr < smf[i - 1].second.mean_fu_sinr)) decreasing = false;
  }
  const bool ok = !s.jmf.empty() && off == 0 && decreasing;
  verdict(4, "fu-qos-active", ok,
          fmt("JMF: %d of %zu solves off target by > %.0e relative, worst %.3e; SMF mean FU SINR over p_m:%s (%s)",
              off, s.jmf.size(), kFuRel, worst, means.c_str(), decreasing ? "strictly decreasing" : "not decreasing"));
}

// ---------------------------------------------------------------- C5
void c5_rank_one(const Options& o) {
  const Sweeps& s = sweeps(o);
  double worst = 0.0;
  int over = 0, randomized = 0;
  for (const auto& r : s.jmf) {
    worst = std::max(worst, r.rank_ratio);
    over += r.rank_ratio > kRankRatio;
    randomized += r.randomized;
  }
  const bool ok = static_cast<int>(s.jmf.size()) >= 100 && over == 0 && randomized == 0;
  verdict(5, "rank-one-relaxation", ok,
          fmt("%zu solves (%d attempted): worst lambda2/lambda1 %.2e (tol %.0e), %d solves over, randomized blocks %d",
              s.jmf.size(), s.jmf_attempts, worst, kRankRatio, over, randomized));
}

// ---------------------------------------------------------------- C6
void c6_null_space() {
  double worst_mu = 0.0, worst_fu = 0.0;
  int failed = 0;
  for (int k_users : {1, 2}) {
    NetworkConfig c;
    c.k_users = k_users;
    c.set_uniform_targets(1.0, 0.6);
    const double bound = kNullAbs * std::sqrt(c.p_f);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const ChannelSet ch = sample_rayleigh_channels(c, seed);
      try {
        const BeamformingSolution s = solve_stb_smf(ch, c);
        for (int n = 0; n < c.n_coop; ++n)
          for (int k = 0; k < k_users; ++k) {
            const CVec& w = s.w_fu[n][k];
            for (int m = 0; m < c.m_users; ++m)
              worst_mu = std::max(worst_mu, std::abs((ch.h_fbs_mu[n][m] * w).value()) / bound);
            for (int j = 0; j < k_users; ++j)
              if (j != k) worst_fu = std::max(worst_fu, std::abs((ch.h_fbs_fu[n][n][j] * w).value()) / bound);
          }
      } catch (const Error&) {
        ++failed;
      }
    }
  }
  const bool ok = worst_mu <= 1.0 && worst_fu <= 1.0 && failed == 0;
  verdict(6, "null-space-exactness", ok,
          fmt("100 seeds x K in {1,2}: worst MU leak %.2e, worst intra-cell residual %.2e (in units of %.0e sqrt(p_f)), "
              "failed %d",
              worst_mu, worst_fu, kNullAbs, failed));
}

// ---------------------------------------------------------------- C7
void c7_closed_form() {
  NetworkConfig c;
  double worst_socp = 0.0, worst_eig = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const ChannelSet ch = sample_rayleigh_channels(c, seed);
    for (int n = 0; n < c.n_coop; ++n) {
      const FbsLocalProblem p = local_problem(ch, c, n);
      const CVec w = solve_fbs_closed_form(p);
      const double cf = std::norm((p.h_e * w).value());
      const double socp = solve_fbs_socp(p).objective;
      // leading generalized eigenvalue of a rank-one pencil: squared norm of the
      // eavesdropper channel projected onto the null space of the MU channels
      const CMat& g = p.g;
      const CMat proj = CMat::Identity(g.cols(), g.cols()) - g.adjoint() * (g * g.adjoint()).inverse() * g;
      const double lam = (proj * p.h_e.adjoint()).squaredNorm();
      worst_socp = std::max(worst_socp, std::abs(socp - cf) / cf);
      worst_eig = std::max(worst_eig, std::abs(cf - c.p_f * lam) / (c.p_f * lam));
    }
  }
  const bool ok = worst_socp <= kSocpRel && worst_eig <= kEigRel;
  verdict(7, "closed-form-vs-socp", ok,
          fmt("50 seeds x 2 FBSs: worst |SOCP - closed form| %.2e (tol %.0e), |closed form - p_f lambda_max| %.2e "
              "(tol %.0e), relative",
              worst_socp, kSocpRel, worst_eig, kEigRel));
}

// ---------------------------------------------------------------- C8
void c8_brute_force() {
  const auto t0 = std::chrono::steady_clock::now();
  NetworkConfig c;
  c.n_m = 2;
  c.n_f = 2;
  c.m_users = 1;
  c.n_coop = 0;
  c.set_uniform_targets(1.0, 0.6);
  double worst = INFINITY;
  int failed = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ChannelSet ch = sample_rayleigh_channels(c, seed);
    const std::complex<double> a0 = ch.h_mu[0](0), a1 = ch.h_mu[0](1), e0 = ch.h_e(0), e1 = ch.h_e(1);
    // w = sqrt(p) (cos t, sin t e^{i f}): 200 angles x 200 phases x 50 power levels
    double best = 0.0;
    for (int i = 0; i < 200; ++i)
      for (int j = 0; j < 200; ++j) {
        const double t = 0.5 * M_PI * i / 199, f = 2 * M_PI * j / 200;
        const std::complex<double> s = std::sin(t) * std::polar(1.0, f);
        const double gu = std::norm(a0 * std::cos(t) + a1 * s), ge = std::norm(e0 * std::cos(t) + e1 * s);
        for (int l = 1; l <= 50; ++l) {
          const double p = c.p_m * l / 50.0;
          best = std::max(best, std::log2(1 + p * gu) - std::log2(1 + p * ge));
        }
      }
    try {
      const double r = secrecy_rate_clipped(ch, solve_stb_om(ch, c));
      worst = std::min(worst, r - best);
    } catch (const Error&) {
      ++failed;
    }
  }
  const bool ok = worst >= -kBruteBits && failed == 0;
  verdict(8, "brute-force-oracle", ok,
          fmt("10 seeds at n_m=2, M=1: min (design - grid best) %.2e bits (tol -%.0e), failed %d, %.0f s", worst,
              kBruteBits, failed, secs_since(t0)));
}

// ---------------------------------------------------------------- C9
struct CovSinr {
  double mu0 = 0.0, eve = 0.0;
  std::vector<double> mu;
  std::vector<std::vector<double>> fu;
};

// SINRs of the covariance W = X / zeta, written out from the channel model
CovSinr cov_sinr(const ChannelSet& ch, const InnerSdpSolution& s) {
  const double z = s.zeta;
  const int M = static_cast<int>(s.x_mu.size()), N = static_cast<int>(s.x_fu.size());
  auto fbs = [&](auto&& h_of) {
    double v = 0.0;
    for (int n = 0; n < N; ++n)
      for (const auto& x : s.x_fu[n]) v += q(h_of(n), x / z);
    return v;
  };
  CovSinr out;
  double i0 = 1.0 + fbs([&](int n) { return ch.h_fbs_mu[n][0]; });
  double ie = 1.0 + fbs([&](int n) { return ch.h_fbs_e[n]; });
  for (int m = 1; m < M; ++m) {
    i0 += q(ch.h_mu[0], s.x_mu[m] / z);
    ie += q(ch.h_e, s.x_mu[m] / z);
  }
  out.mu0 = q(ch.h_mu[0], s.x_mu[0] / z) / i0;
  out.eve = q(ch.h_e, s.x_mu[0] / z) / ie;
  for (int m = 1; m < M; ++m) {
    double im = 1.0 + fbs([&](int n) { return ch.h_fbs_mu[n][m]; });
    for (int p = 0; p < M; ++p)
      if (p != m) im += q(ch.h_mu[m], s.x_mu[p] / z);
    out.mu.push_back(q(ch.h_mu[m], s.x_mu[m] / z) / im);
  }
  out.fu.resize(N);
  for (int n = 0; n < N; ++n)
    for (std::size_t k = 0; k < s.x_fu[n].size(); ++k) {
      double in = 1.0;
      for (int p = 0; p < M; ++p) in += q(ch.h_mbs_fu[n][k], s.x_mu[p] / z);
      for (int r = 0; r < N; ++r)
        for (std::size_t t = 0; t < s.x_fu[r].size(); ++t)
          if (r != n || t != k) in += q(ch.h_fbs_fu[r][n][k], s.x_fu[r][t] / z);
      out.fu[n].push_back(q(ch.h_fbs_fu[n][n][k], s.x_fu[n][k] / z) / in);
    }
  return out;
}

void c9_charnes_cooper() {
  const auto t0 = std::chrono::steady_clock::now();
  NetworkConfig c;
  boost::random::mt19937_64 rng(9);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_con = 0.0, worst_val = 0.0;
  int pairs = 0, infeasible = 0, failed = 0;
  for (std::uint64_t seed = 1; pairs < 50 && seed <= 200; ++seed) {
    const ChannelSet ch = sample_rayleigh_channels(c, seed);
    const double tau = std::expm1(unit(rng) * std::log1p(tau_max(ch, c)));
    try {
      const auto [g, s] = inner_value(ch, c, tau);
      ++pairs;
      const CovSinr v = cov_sinr(ch, s);
      auto viol = [&](double excess) { worst_con = std::max(worst_con, excess); };
      viol((v.eve - tau) / std::max(tau, 1.0));
      for (int m = 1; m < c.m_users; ++m) viol((c.gamma_mu[m - 1] - v.mu[m - 1]) / c.gamma_mu[m - 1]);
      for (int n = 0; n < c.n_coop; ++n)
        for (int k = 0; k < c.k_users; ++k) viol((c.gamma_fu[n][k] - v.fu[n][k]) / c.gamma_fu[n][k]);
      double tr = 0.0;
      for (const auto& x : s.x_mu) {
        tr += x.trace().real() / s.zeta;
        viol(-Eigen::SelfAdjointEigenSolver<CMat>(x / s.zeta).eigenvalues().minCoeff() / c.p_m);
      }
      viol((tr - c.p_m) / c.p_m);
      for (const auto& blk : s.x_fu) {
        double tf = 0.0;
        for (const auto& x : blk) {
          tf += x.trace().real() / s.zeta;
          viol(-Eigen::SelfAdjointEigenSolver<CMat>(x / s.zeta).eigenvalues().minCoeff() / c.p_f);
        }
        viol((tf - c.p_f) / c.p_f);
      }
      worst_val = std::max(worst_val, std::abs(v.mu0 - g) / std::max(1.0, g));
    } catch (const QosInfeasible&) {
      ++infeasible;
    } catch (const Error&) {
      ++pairs;
      ++failed;
    }
  }
  const bool ok = pairs == 50 && failed == 0 && worst_con <= kCcConstraint && worst_val <= kCcValue;
  verdict(9, "charnes-cooper-consistency", ok,
          fmt("%d (seed, tau) pairs: worst constraint violation %.2e (tol %.0e), worst |SINR - G| %.2e (tol %.0e), "
              "relative; %d skipped as QoS-infeasible, %d solver failures, %.0f s",
              pairs, worst_con, kCcConstraint, worst_val, kCcValue, infeasible, failed, secs_since(t0)));
}

// ---------------------------------------------------------------- C10
void c10_outer_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  NetworkConfig c;
  double worst = INFINITY;
  int seeds = 0, infeasible = 0, failed = 0;
  for (std::uint64_t seed = 1; seeds < 20 && seed <= 100; ++seed) {
    const ChannelSet ch = sample_rayleigh_channels(c, seed);
    try {
      const JmfResult r = solve_stb_jmf_detailed(ch, c);
      ++seeds;
      // 200 points, uniform in log(1 + tau) over [0, tau_max]
      const double umax = std::log1p(tau_max(ch, c));
      double best = 0.0;
      for (int i = 0; i < 200; ++i) best = std::max(best, outer_value(ch, c, std::expm1(umax * i / 199.0)));
      worst = std::min(worst, std::log2(r.outer_value) - std::log2(best));
    } catch (const QosInfeasible&) {
      ++infeasible;
    } catch (const Error&) {
      ++seeds;
      ++failed;
    }
  }
  const bool ok = seeds == 20 && failed == 0 && worst >= -kOuterBits;
  verdict(10, "outer-search-vs-grid", ok,
          fmt("%d seeds: min log2(search) - log2(grid best) %.2e bits (tol -%.0e); %d skipped as QoS-infeasible, "
              "%d failed, %.0f s",
              seeds, worst, kOuterBits, infeasible, failed, secs_since(t0)));
}

// ---------------------------------------------------------------- C11
void c11_an_equivalence(const Options& o) {
  const Sweeps& s = sweeps(o);
  const auto om = curve(s.pm, "stb_om"), an = curve(s.pm, "stb_om_an");
  bool ok = om.size() == 6 && an.size() == 6;
  double worst = 0.0;
  for (std::size_t i = 0; ok && i < om.size(); ++i)
    worst = std::max(worst, std::abs(an[i].second.mean_secrecy - om[i].second.mean_secrecy) /
                                om[i].second.mean_secrecy);
  ok = ok && worst <= kAnRel;
  verdict(11, "artificial-noise-equivalence", ok,
          fmt("worst |mean(AN) - mean(no AN)| / mean(no AN) over p_m grid %.2e (tol %.2f)", worst, kAnRel));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  Options o;
  std::vector<int> only;
  bool strict = false;
  app.add_option("--trials", o.trials, "paired trials per sweep point")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed);
  app.add_option("--csv-dir", o.csv_dir, "where the sweep CSVs go");
  app.add_option("--only", only, "criterion numbers to run")->delimiter(',');
  app.add_flag("--strict", strict, "exit 1 when a criterion fails");
  CLI11_PARSE(app, argc, argv);
  o.only.insert(only.begin(), only.end());
  auto want = [&](int id) { return o.only.empty() || o.only.count(id); };

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (want(1)) c1_convergence();
    if (want(2)) c2_ordering(o);
    if (want(3)) c3_power_trends(o);
    if (want(4)) c4_fu_qos(o);
    if (want(5)) c5_rank_one(o);
    if (want(6)) c6_null_space();
    if (want(7)) c7_closed_form();
    if (want(8)) c8_brute_force();
    if (want(9)) c9_charnes_cooper();
    if (want(10)) c10_outer_grid();
    if (want(11)) c11_an_equivalence(o);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("acceptance: %d/%d criteria passed (%.0f s)\n", g_passed, g_run, secs_since(t0));
  return strict && g_passed != g_run ? 1 : 0;
}
