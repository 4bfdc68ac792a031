#pragma once

#include <vector>

namespace jointnorm {

/// Area under the ROC curve: the probability that a random positive scores
/// above a random negative, ties counted as one half. Throws DataError when
/// either class is empty or the sizes differ.
double auc(const std::vector<double>& scores, const std::vector<bool>& labels);

} // namespace jointnorm
