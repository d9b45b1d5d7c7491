#include "flatlpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "flatlpp/math_util.hpp"

namespace flatlpp {

namespace {

double ks_p_value(double d, double effective_n) {
  const double s = std::sqrt(effective_n);
  const double lambda = (s + 0.12 + 0.11 / s) * d;
  return std::min(1.0, kolmogorov_q(lambda));
}

std::size_t bounded(CounterRng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng.next_u64() % n);
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Energy statistic from a pooled distance matrix and a label assignment.
double energy_stat(const std::vector<double>& dist, std::size_t total,
                   const std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t m = total - n;
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j) {
      const double d = dist[idx[i] * total + idx[j]];
      const bool ia = i < n, ja = j < n;
      if (ia && ja)
        aa += d;
      else if (!ia && !ja)
        bb += d;
      else
        ab += d;
    }
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  return 2.0 * ab / (dn * dm) - 2.0 * aa / (dn * dn) - 2.0 * bb / (dm * dm);
}

}  // namespace

KsResult ks_one_sample(std::span<const double> sample,
                       const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  double prev = -1e-9;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    if (f < prev - 1e-9 || f < -1e-9 || f > 1.0 + 1e-9)
      throw std::invalid_argument("ks_one_sample: cdf not monotone into [0,1]");
    prev = f;
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 50 || b.size() < 50)
    throw std::invalid_argument("ks_two_sample: need at least 50 points per sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

double ecdf_sup_distance(std::span<const double> sample,
                         const std::function<double(double)>& cdf) {
  return ks_one_sample(sample, cdf).statistic;
}

EnergyResult energy_distance_test(std::span<const std::vector<double>> a,
                                  std::span<const std::vector<double>> b,
                                  int permutations, CounterRng& rng) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("energy_distance_test: empty sample");
  if (permutations < 1)
    throw std::invalid_argument("energy_distance_test: need at least one permutation");
  const std::size_t dim = a.front().size();
  for (const auto& row : a)
    if (row.size() != dim) throw std::invalid_argument("energy_distance_test: ragged rows");
  for (const auto& row : b)
    if (row.size() != dim) throw std::invalid_argument("energy_distance_test: ragged rows");

  const std::size_t n = a.size(), total = n + b.size();
  std::vector<const std::vector<double>*> pool;
  pool.reserve(total);
  for (const auto& row : a) pool.push_back(&row);
  for (const auto& row : b) pool.push_back(&row);
  std::vector<double> dist(total * total, 0.0);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j)
      dist[i * total + j] = dist[j * total + i] = euclid(*pool[i], *pool[j]);

  std::vector<std::size_t> idx(total);
  for (std::size_t i = 0; i < total; ++i) idx[i] = i;
  const double observed = energy_stat(dist, total, idx, n);

  int exceed = 0;
  for (int p = 0; p < permutations; ++p) {
    for (std::size_t i = total - 1; i > 0; --i)
      std::swap(idx[i], idx[bounded(rng, i + 1)]);
    if (energy_stat(dist, total, idx, n) >= observed) ++exceed;
  }
  const double pval = (exceed + 1.0) / (permutations + 1.0);
  return {observed, pval, permutations};
}

Chi2Result chi2_density_fit(std::span<const double> sample,
                            const std::function<double(double)>& density,
                            std::span<const double> edges) {
  if (edges.size() < 3)
    throw std::invalid_argument("chi2_density_fit: need at least two bins");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1]))
      throw std::invalid_argument("chi2_density_fit: edges not increasing");
  const std::size_t bins = edges.size() - 1;
  std::vector<double> expected(bins, 0.0);
  double mass = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    expected[k] = adaptive_quad(density, edges[k], edges[k + 1], 1e-11);
    mass += expected[k];
  }
  if (!(mass > 0.0)) throw std::invalid_argument("chi2_density_fit: zero density mass");
  const double n = static_cast<double>(sample.size());
  std::vector<double> observed(bins, 0.0);
  for (double x : sample) {
    if (x < edges.front() || x > edges.back())
      throw std::invalid_argument("chi2_density_fit: sample point outside bin range");
    const std::size_t k = std::min(
        bins - 1, static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) -
                                           edges.begin()) -
                      1);
    observed[k] += 1.0;
  }
  double stat = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double e = n * expected[k] / mass;
    if (e < 5.0)
      throw std::invalid_argument("chi2_density_fit: expected count below 5 in a bin");
    const double d = observed[k] - e;
    stat += d * d / e;
  }
  const int dof = static_cast<int>(bins) - 1;
  return {stat, chi2_tail(stat, dof), dof};
}

std::vector<double> finite_diff_grad(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be positive");
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = p[i];
    p[i] = xi + h;
    const double up = f(p);
    p[i] = xi - h;
    const double dn = f(p);
    p[i] = xi;
    grad[i] = (up - dn) / (2.0 * h);
  }
  return grad;
}

MomentInterval bootstrap_mean_ci(std::span<const double> sample, int resamples,
                                 double confidence, CounterRng& rng) {
  if (sample.empty()) throw std::invalid_argument("bootstrap_mean_ci: empty sample");
  if (resamples < 10) throw std::invalid_argument("bootstrap_mean_ci: too few resamples");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("bootstrap_mean_ci: confidence must lie in (0,1)");
  double mean = 0.0;
  for (double x : sample) mean += x;
  mean /= static_cast<double>(sample.size());
  std::vector<double> means(static_cast<std::size_t>(resamples), 0.0);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) s += sample[bounded(rng, sample.size())];
    m = s / static_cast<double>(sample.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - confidence);
  const auto pick = [&](double q) {
    const double pos = q * (static_cast<double>(means.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, means.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * means[lo] + w * means[hi];
  };
  return {mean, pick(tail), pick(1.0 - tail)};
}

}  // namespace flatlpp
