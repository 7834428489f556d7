#pragma once

// Population assessment: normalized task success, log2 mean fitness, the
// Wilcoxon rank-sum test, Holm step-down correction, and bootstrap
// percentile intervals.

#include <cstdint>
#include <span>
#include <vector>

#include "minivida/rng.hpp"

namespace vida {

double mean(std::span<const double> xs);
double median(std::vector<double> xs);  // by value: sorts its copy

// Population mean of (sum of per-task qualities) / task_count; in [0,1].
double task_success(const std::vector<std::vector<float>>& qualities, int task_count);

// log2 of the arithmetic mean fitness.
double log2_mean_fitness(std::span<const double> fitness);

enum class Tail { TwoSided, AGreater, ALess };

struct RankSumResult {
  double u_a = 0.0;  // Mann-Whitney U for sample a
  double p = 1.0;
  bool exact = false;
};

// Midrank ties; exact p by enumeration when |a|+|b| <= 12 and there are no
// ties, otherwise normal approximation with continuity and tie correction.
// All values identical across both samples -> p = 1.
RankSumResult rank_sum(std::span<const double> a, std::span<const double> b,
                       Tail tail = Tail::TwoSided);

// Holm step-down at level alpha: sort ascending, reject p_(k) while
// p_(k) <= alpha/(m-k+1), stop at the first failure.  Flags are returned in
// the input order.
std::vector<char> holm_reject(std::span<const double> pvals, double alpha);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile interval (2.5%, 97.5% by default) of the median over
// resamples-with-replacement; deterministic given the generator state.
Interval bootstrap_ci_median(std::span<const double> sample, int iters, Rng& rng,
                             double lo_q = 0.025, double hi_q = 0.975);

}  // namespace vida
