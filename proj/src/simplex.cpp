#include "zovr/simplex.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace zovr {

Vector project_simplex(const Vector& v) {
  if (v.size() == 0) throw InvalidArgument("project_simplex: empty vector");
  if (!v.allFinite()) throw InvalidArgument("project_simplex: non-finite input");
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumsum += sorted[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

}  // namespace zovr
