#include "jointnorm/auc.hpp"

#include "jointnorm/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jointnorm {

// Mann-Whitney U from midranks.
double auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  const std::size_t m = scores.size();
  if (labels.size() != m) throw DataError("scores and labels differ in length");
  for (double s : scores)
    if (std::isnan(s)) throw DataError("NaN score");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < m;) {
    std::size_t hi = lo;
    while (hi < m && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k)
      if (labels[order[k]]) {
        positive_rank_sum += midrank;
        ++positives;
      }
    lo = hi;
  }
  const std::size_t negatives = m - positives;
  if (positives == 0 || negatives == 0)
    throw DataError("AUC needs both positive and negative labels");
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) /
         (np * static_cast<double>(negatives));
}

} // namespace jointnorm
