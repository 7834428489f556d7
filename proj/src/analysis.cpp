#include "minivida/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vida {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  // Compensated summation so the metric is stable under reordering.
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return (n % 2) ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double task_success(const std::vector<std::vector<float>>& qualities, int task_count) {
  if (qualities.empty() || task_count <= 0) return 0.0;
  double total = 0.0, c = 0.0;
  for (const auto& org : qualities) {
    double s = 0.0;
    for (float q : org) s += q;
    const double y = s - c;
    const double t = total + y;
    c = (t - total) - y;
    total = t;
  }
  return total / (static_cast<double>(qualities.size()) * task_count);
}

double log2_mean_fitness(std::span<const double> fitness) {
  return std::log2(mean(fitness));
}

namespace {

// P(U <= u) for the exact Mann-Whitney null: f[j][v] counts subsets of size
// j from the first i ranks with rank-sum statistic v.
double exact_cdf(int n, int m, double u_stat) {
  const int max_u = n * m;
  const int u = static_cast<int>(std::floor(u_stat + 1e-9));
  if (u < 0) return 0.0;
  std::vector<std::vector<double>> f(static_cast<std::size_t>(n) + 1,
                                     std::vector<double>(static_cast<std::size_t>(max_u) + 1, 0.0));
  f[0][0] = 1.0;
  for (int i = 1; i <= n + m; ++i)
    for (int j = std::min(i, n); j >= 1; --j)
      for (int v = max_u; v >= 0; --v) {
        // Adding rank i as the j-th member of sample a raises U by i - j.
        const int add = i - j;
        if (add <= v) f[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)] +=
            f[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(v - add)];
      }
  double total = 0.0, below = 0.0;
  for (int v = 0; v <= max_u; ++v) {
    total += f[static_cast<std::size_t>(n)][static_cast<std::size_t>(v)];
    if (v <= std::min(u, max_u)) below += f[static_cast<std::size_t>(n)][static_cast<std::size_t>(v)];
  }
  if (u >= max_u) below = total;
  return below / total;
}

}  // namespace

RankSumResult rank_sum(std::span<const double> a, std::span<const double> b, Tail tail) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (n == 0 || m == 0) throw std::invalid_argument("rank_sum: empty sample");

  std::vector<std::pair<double, int>> all;  // value, 0 for a / 1 for b
  all.reserve(static_cast<std::size_t>(n + m));
  for (double x : a) all.emplace_back(x, 0);
  for (double x : b) all.emplace_back(x, 1);
  std::sort(all.begin(), all.end(),
            [](const auto& p, const auto& q) { return p.first < q.first; });

  // Midranks; tie group sizes feed the variance correction.
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  bool has_ties = false;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double t = static_cast<double>(j - i);
    if (t > 1) {
      has_ties = true;
      tie_term += t * t * t - t;
    }
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 0) rank_sum_a += midrank;
    i = j;
  }

  RankSumResult res;
  res.u_a = rank_sum_a - static_cast<double>(n) * (n + 1) / 2.0;
  const double nm = static_cast<double>(n) * m;

  if (!has_ties && n + m <= 12) {
    res.exact = true;
    const double u = res.u_a;
    const double p_le = exact_cdf(n, m, u);
    const double p_ge = 1.0 - exact_cdf(n, m, u - 1.0);
    switch (tail) {
      case Tail::TwoSided: res.p = std::min(1.0, 2.0 * std::min(p_le, p_ge)); break;
      case Tail::AGreater: res.p = p_ge; break;
      case Tail::ALess: res.p = p_le; break;
    }
    return res;
  }

  const double total = static_cast<double>(n + m);
  double var = nm / 12.0 * (total + 1.0 - tie_term / (total * (total - 1.0)));
  if (var <= 0.0) {  // every value identical
    res.p = 1.0;
    return res;
  }
  const double sd = std::sqrt(var);
  const double meanU = nm / 2.0;
  auto upper_p = [&](double u) {  // P(U >= u), continuity corrected
    const double z = (u - meanU - 0.5) / sd;
    return 0.5 * std::erfc(z / std::sqrt(2.0));
  };
  auto lower_p = [&](double u) {  // P(U <= u)
    const double z = (u - meanU + 0.5) / sd;
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
  };
  switch (tail) {
    case Tail::TwoSided:
      res.p = std::min(1.0, 2.0 * std::min(lower_p(res.u_a), upper_p(res.u_a)));
      break;
    case Tail::AGreater: res.p = upper_p(res.u_a); break;
    case Tail::ALess: res.p = lower_p(res.u_a); break;
  }
  return res;
}

std::vector<char> holm_reject(std::span<const double> pvals, double alpha) {
  const std::size_t m = pvals.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  std::vector<char> reject(m, 0);
  for (std::size_t k = 0; k < m; ++k) {
    const double level = alpha / static_cast<double>(m - k);
    if (pvals[idx[k]] <= level)
      reject[idx[k]] = 1;
    else
      break;
  }
  return reject;
}

Interval bootstrap_ci_median(std::span<const double> sample, int iters, Rng& rng,
                             double lo_q, double hi_q) {
  if (sample.empty()) throw std::invalid_argument("bootstrap: empty sample");
  const std::size_t n = sample.size();
  std::vector<double> stats(static_cast<std::size_t>(iters));
  std::vector<double> resample(n);
  for (int it = 0; it < iters; ++it) {
    for (std::size_t k = 0; k < n; ++k)
      resample[k] = sample[rng.below(static_cast<std::uint64_t>(n))];
    stats[static_cast<std::size_t>(it)] = median(resample);
  }
  std::sort(stats.begin(), stats.end());
  auto at_quantile = [&](double q) {
    const auto pos = static_cast<std::size_t>(
        std::llround(q * static_cast<double>(iters - 1)));
    return stats[std::min(pos, stats.size() - 1)];
  };
  return {at_quantile(lo_q), at_quantile(hi_q)};
}

}  // namespace vida
