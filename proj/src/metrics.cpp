#include "hetsec/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hetsec {

namespace {

double gain(const CRow& h, const CVec& w) {
  if (h.size() != w.size()) throw DimensionError("channel and precoder lengths differ");
  return std::norm((h * w).value());
}

void check_user(const ChannelSet& ch, const BeamformingSolution& sol, int m) {
  if (m < 0 || m >= ch.m_users()) throw DimensionError("MU index out of range");
  if (static_cast<int>(sol.w_mu.size()) != ch.m_users()) throw DimensionError("one MBS precoder per MU required");
}

void check_fbs(const ChannelSet& ch, const BeamformingSolution& sol) {
  if (sol.w_fu.empty()) return;
  if (static_cast<int>(sol.w_fu.size()) != ch.n_coop()) throw DimensionError("one precoder set per FBS required");
  for (const auto& row : sol.w_fu)
    if (static_cast<int>(row.size()) != ch.k_users()) throw DimensionError("one FBS precoder per FU required");
}

}  // namespace

double BeamformingSolution::mbs_power() const {
  double p = 0.0;
  for (const auto& w : w_mu) p += w.squaredNorm();
  if (an.size()) p += an.squaredNorm();
  return p;
}

double BeamformingSolution::fbs_power(int n) const {
  double p = 0.0;
  for (const auto& w : w_fu.at(n)) p += w.squaredNorm();
  return p;
}

double sinr_mu(const ChannelSet& ch, const BeamformingSolution& sol, int m, double sigma2) {
  check_user(ch, sol, m);
  check_fbs(ch, sol);
  const CRow& h = ch.h_mu[m];
  double den = sigma2;
  for (int q = 0; q < ch.m_users(); ++q)
    if (q != m) den += gain(h, sol.w_mu[q]);
  for (std::size_t n = 0; n < sol.w_fu.size(); ++n)
    for (const auto& w : sol.w_fu[n]) den += gain(ch.h_fbs_mu[n][m], w);
  if (sol.an.size()) den += gain(h, sol.an);
  return gain(h, sol.w_mu[m]) / den;
}

double interference_at_eve(const ChannelSet& ch, const BeamformingSolution& sol) {
  check_fbs(ch, sol);
  double s = 0.0;
  for (std::size_t n = 0; n < sol.w_fu.size(); ++n)
    for (const auto& w : sol.w_fu[n]) s += gain(ch.h_fbs_e[n], w);
  return s;
}

double sinr_eve(const ChannelSet& ch, const BeamformingSolution& sol, double sigma2) {
  check_user(ch, sol, 0);
  double den = sigma2 + interference_at_eve(ch, sol);
  for (int m = 1; m < ch.m_users(); ++m) den += gain(ch.h_e, sol.w_mu[m]);
  if (sol.an.size()) den += gain(ch.h_e, sol.an);
  return gain(ch.h_e, sol.w_mu[0]) / den;
}

double sinr_fu(const ChannelSet& ch, const BeamformingSolution& sol, int n, int k, double sigma2) {
  check_fbs(ch, sol);
  if (sol.w_fu.empty()) throw DimensionError("solution carries no FBS precoders");
  if (n < 0 || n >= ch.n_coop() || k < 0 || k >= ch.k_users()) throw DimensionError("FU index out of range");
  double den = sigma2;
  for (int t = 0; t < ch.k_users(); ++t)
    if (t != k) den += gain(ch.h_fbs_fu[n][n][k], sol.w_fu[n][t]);
  for (int p = 0; p < ch.n_coop(); ++p) {
    if (p == n) continue;
    for (int t = 0; t < ch.k_users(); ++t) den += gain(ch.h_fbs_fu[p][n][k], sol.w_fu[p][t]);
  }
  for (const auto& w : sol.w_mu) den += gain(ch.h_mbs_fu[n][k], w);
  if (sol.an.size()) den += gain(ch.h_mbs_fu[n][k], sol.an);
  return gain(ch.h_fbs_fu[n][n][k], sol.w_fu[n][k]) / den;
}

double secrecy_rate_from_sinr(double sinr_user, double sinr_eve) {
  return std::log2(1.0 + sinr_user) - std::log2(1.0 + sinr_eve);
}

double secrecy_rate(const ChannelSet& ch, const BeamformingSolution& sol, double sigma2) {
  return secrecy_rate_from_sinr(sinr_mu(ch, sol, 0, sigma2), sinr_eve(ch, sol, sigma2));
}

double secrecy_rate_clipped(const ChannelSet& ch, const BeamformingSolution& sol, double sigma2) {
  return std::max(0.0, secrecy_rate(ch, sol, sigma2));
}

}  // namespace hetsec
