#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "rvpp/oracle.hpp"

namespace rvpp::oracle {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is integral; after dividing out gcd(r, i) the
    // rest of i divides n - k + i.
    std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    std::uint64_t g = std::gcd(r, static_cast<std::uint64_t>(i));
    std::uint64_t a = r / g, f = num / (i / g);
    if (f != 0 && a > kMax / f) return kMax;
    r = a * f;
  }
  return r;
}

std::vector<int> unrank_subset(int n, int k, std::uint64_t rank) {
  std::vector<int> out;
  out.reserve(k);
  int next = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (int v = next; v < n; ++v) {
      std::uint64_t below = binomial(n - v - 1, k - slot - 1);
      if (rank < below) {
        out.push_back(v);
        next = v + 1;
        break;
      }
      rank -= below;
    }
  }
  return out;
}

namespace {

void check(const std::vector<double>& loss, int gamma) {
  if (gamma < 0 || gamma > static_cast<int>(loss.size()))
    throw std::invalid_argument("budget " + std::to_string(gamma) +
                                " outside [0, " + std::to_string(loss.size()) +
                                "]");
}

double sum_of(const std::vector<double>& loss, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx) s += loss[i];
  return s;
}

// Advances to the next k-subset in lexicographic order.
bool next_subset(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t rank = 0;
};

Best scan(const std::vector<double>& loss, int gamma, std::uint64_t first,
          std::uint64_t last) {
  Best best;
  if (first >= last) return best;
  const int n = static_cast<int>(loss.size());
  std::vector<int> c = unrank_subset(n, gamma, first);
  for (std::uint64_t r = first; r < last; ++r) {
    double v = sum_of(loss, c);
    if (v > best.value) best = {v, r};
    if (!next_subset(c, n)) break;
  }
  return best;
}

}  // namespace

SubsetPick greedy_top(const std::vector<double>& loss, int gamma) {
  check(loss, gamma);
  std::vector<int> order(loss.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return loss[a] > loss[b]; });
  SubsetPick pick;
  pick.periods.assign(order.begin(), order.begin() + gamma);
  std::sort(pick.periods.begin(), pick.periods.end());
  pick.value = sum_of(loss, pick.periods);
  return pick;
}

SubsetPick exhaustive_top_serial(const std::vector<double>& loss, int gamma) {
  check(loss, gamma);
  const int n = static_cast<int>(loss.size());
  Best b = scan(loss, gamma, 0, binomial(n, gamma));
  SubsetPick pick;
  pick.periods = unrank_subset(n, gamma, b.rank);
  pick.value = sum_of(loss, pick.periods);
  return pick;
}

SubsetPick exhaustive_top_parallel(const std::vector<double>& loss,
                                   int gamma) {
  check(loss, gamma);
  const int n = static_cast<int>(loss.size());
  const std::uint64_t total = binomial(n, gamma);
  const int chunks = std::max(1, omp_get_max_threads()) * 4;
  std::vector<Best> part(chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < chunks; ++c) {
    const std::uint64_t base = total / chunks, extra = total % chunks;
    const std::uint64_t k = static_cast<std::uint64_t>(c);
    std::uint64_t lo = base * k + std::min(k, extra);
    std::uint64_t hi = lo + base + (k < extra ? 1 : 0);
    part[c] = scan(loss, gamma, lo, hi);
  }
  // Chunks are in rank order, so strict improvement keeps the earliest rank.
  Best b;
  for (const auto& p : part)
    if (p.value > b.value) b = p;
  SubsetPick pick;
  pick.periods = unrank_subset(n, gamma, b.rank);
  pick.value = sum_of(loss, pick.periods);
  return pick;
}

}  // namespace rvpp::oracle
