#include "hetsec/channel.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace hetsec {

namespace {

// stream-id namespaces; low bits carry the entity indices
enum : std::uint64_t {
  kMu = 1,
  kEve = 2,
  kFbsMu = 3,
  kFbsEve = 4,
  kMbsFu = 5,
  kFbsFu = 6,
  kPlacement = 7,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t id(std::uint64_t kind, std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0) {
  return (kind << 56) | (a << 36) | (b << 16) | c;
}

CRow draw_row(std::uint64_t seed, std::uint64_t stream, int len) {
  std::mt19937_64 eng(stream_seed(seed, stream));
  boost::random::normal_distribution<double> n(0.0, 1.0);
  const double s = std::sqrt(0.5);
  CRow h(len);
  for (int i = 0; i < len; ++i) {
    const double re = n(eng);
    const double im = n(eng);
    h(i) = cplx(s * re, s * im);
  }
  return h;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void NetworkConfig::validate() const {
  require(n_m >= 1 && n_f >= 1 && m_users >= 1 && k_users >= 1 && n_coop >= 0, "counts must be positive");
  require(n_m > m_users, "need n_m > m_users");
  require(n_f > k_users, "need n_f > k_users");
  require(p_m > 0.0 && p_f > 0.0, "power budgets must be positive");
  require(sigma2 == 1.0, "noise power is normalized to 1");
  require(static_cast<int>(gamma_mu.size()) == m_users - 1, "gamma_mu needs m_users - 1 entries");
  for (double g : gamma_mu) require(g > 0.0 && std::isfinite(g), "gamma_mu entries must be positive");
  require(static_cast<int>(gamma_fu.size()) == n_coop, "gamma_fu needs n_coop rows");
  for (const auto& row : gamma_fu) {
    require(static_cast<int>(row.size()) == k_users, "gamma_fu rows need k_users entries");
    for (double g : row) require(g > 0.0 && std::isfinite(g), "gamma_fu entries must be positive");
  }
  require(cell_radius_m > 0.0, "cell radius must be positive");
  require(fbs_intensity > 0.0, "FBS intensity must be positive");
}

void NetworkConfig::validate_for_null_space() const {
  validate();
  require(n_m > n_f && n_f > m_users, "null-space design needs n_m > n_f > m_users");
}

void NetworkConfig::set_uniform_targets(double gamma_mu_value, double gamma_fu_value) {
  gamma_mu.assign(std::max(0, m_users - 1), gamma_mu_value);
  gamma_fu.assign(std::max(0, n_coop), std::vector<double>(std::max(0, k_users), gamma_fu_value));
}

void ChannelSet::check(const NetworkConfig& c) const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw DimensionError(std::string("channel set: ") + what);
  };
  need(static_cast<int>(h_mu.size()) == c.m_users, "h_mu count");
  for (const auto& h : h_mu) need(h.size() == c.n_m, "h_mu length");
  need(h_e.size() == c.n_m, "h_e length");
  need(static_cast<int>(h_fbs_mu.size()) == c.n_coop, "h_fbs_mu count");
  for (const auto& row : h_fbs_mu) {
    need(static_cast<int>(row.size()) == c.m_users, "h_fbs_mu users");
    for (const auto& h : row) need(h.size() == c.n_f, "h_fbs_mu length");
  }
  need(static_cast<int>(h_fbs_e.size()) == c.n_coop, "h_fbs_e count");
  for (const auto& h : h_fbs_e) need(h.size() == c.n_f, "h_fbs_e length");
  need(static_cast<int>(h_mbs_fu.size()) == c.n_coop, "h_mbs_fu count");
  for (const auto& row : h_mbs_fu) {
    need(static_cast<int>(row.size()) == c.k_users, "h_mbs_fu users");
    for (const auto& h : row) need(h.size() == c.n_m, "h_mbs_fu length");
  }
  need(static_cast<int>(h_fbs_fu.size()) == c.n_coop, "h_fbs_fu count");
  for (const auto& per_p : h_fbs_fu) {
    need(static_cast<int>(per_p.size()) == c.n_coop, "h_fbs_fu cells");
    for (const auto& row : per_p) {
      need(static_cast<int>(row.size()) == c.k_users, "h_fbs_fu users");
      for (const auto& h : row) need(h.size() == c.n_f, "h_fbs_fu length");
    }
  }
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ stream);
}

ChannelSet sample_rayleigh_channels(const NetworkConfig& c, std::uint64_t seed, const std::vector<int>& fbs_ids) {
  std::vector<int> ids = fbs_ids;
  if (ids.empty()) {
    ids.resize(c.n_coop);
    std::iota(ids.begin(), ids.end(), 0);
  }
  if (static_cast<int>(ids.size()) != c.n_coop) throw DimensionError("fbs_ids must list n_coop FBSs");

  ChannelSet ch;
  for (int m = 0; m < c.m_users; ++m) ch.h_mu.push_back(draw_row(seed, id(kMu, m), c.n_m));
  ch.h_e = draw_row(seed, id(kEve), c.n_m);
  // FU identities follow their serving FBS's global index.
  ch.h_fbs_mu.resize(c.n_coop);
  ch.h_fbs_e.resize(c.n_coop);
  ch.h_mbs_fu.resize(c.n_coop);
  ch.h_fbs_fu.assign(c.n_coop, std::vector<std::vector<CRow>>(c.n_coop));
  for (int n = 0; n < c.n_coop; ++n) {
    const auto g = static_cast<std::uint64_t>(ids[n]);
    for (int m = 0; m < c.m_users; ++m) ch.h_fbs_mu[n].push_back(draw_row(seed, id(kFbsMu, g, m), c.n_f));
    ch.h_fbs_e[n] = draw_row(seed, id(kFbsEve, g), c.n_f);
    for (int k = 0; k < c.k_users; ++k) ch.h_mbs_fu[n].push_back(draw_row(seed, id(kMbsFu, g, k), c.n_m));
  }
  for (int p = 0; p < c.n_coop; ++p)
    for (int n = 0; n < c.n_coop; ++n)
      for (int k = 0; k < c.k_users; ++k)
        ch.h_fbs_fu[p][n].push_back(draw_row(seed, id(kFbsFu, ids[p], ids[n], k), c.n_f));
  return ch;
}

Placement sample_fbs_placement(const NetworkConfig& c, std::uint64_t seed) {
  if (!(c.cell_radius_m > 0.0) || c.fbs_intensity < 0.0) throw ConfigError("invalid placement parameters");
  Placement out;
  const double mean = c.fbs_intensity * std::numbers::pi * c.cell_radius_m * c.cell_radius_m;
  if (mean <= 0.0) return out;
  std::mt19937_64 eng(stream_seed(seed, id(kPlacement)));
  boost::random::poisson_distribution<int, double> pois(mean);
  boost::random::uniform_01<double> u;
  const int count = pois(eng);
  out.fbs_positions.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double r = c.cell_radius_m * std::sqrt(u(eng));
    const double th = 2.0 * std::numbers::pi * u(eng);
    out.fbs_positions.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return out;
}

Point sample_uniform_on_disk(double r, std::uint64_t seed) {
  std::mt19937_64 eng(stream_seed(seed, id(kPlacement, 1)));
  boost::random::uniform_01<double> u;
  const double rad = r * std::sqrt(u(eng));
  const double th = 2.0 * std::numbers::pi * u(eng);
  return {rad * std::cos(th), rad * std::sin(th)};
}

std::vector<int> nearest_fbs(const Placement& placement, Point eve, int count) {
  const int n = static_cast<int>(placement.fbs_positions.size());
  if (n < count) throw ConfigError("placement has fewer FBSs than requested cooperators");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto d2 = [&](int i) {
    const auto& p = placement.fbs_positions[i];
    return (p.x - eve.x) * (p.x - eve.x) + (p.y - eve.y) * (p.y - eve.y);
  };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return d2(a) < d2(b); });
  idx.resize(count);
  return idx;
}

}  // namespace hetsec
