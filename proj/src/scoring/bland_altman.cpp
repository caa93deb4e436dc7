#include "forge3d/scoring/bland_altman.hpp"

#include <cmath>
#include <vector>

#include "forge3d/common/error.hpp"

namespace forge3d::scoring {

BlandAltman bland_altman(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "Bland-Altman needs at least two pairs", "scoring");
  }
  std::vector<double> diffs;
  diffs.reserve(pairs.size());
  double sum = 0.0;
  for (const auto& [engine, reference] : pairs) {
    diffs.push_back(engine - reference);
    sum += diffs.back();
  }
  BlandAltman r;
  r.n = pairs.size();
  r.mean_diff = sum / static_cast<double>(r.n);
  double ss = 0.0;
  for (const double d : diffs) ss += (d - r.mean_diff) * (d - r.mean_diff);
  r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
  r.lower = r.mean_diff - 1.96 * r.sd;
  r.upper = r.mean_diff + 1.96 * r.sd;
  std::size_t inside = 0;
  for (const double d : diffs) inside += (d >= r.lower && d <= r.upper) ? 1U : 0U;
  r.fraction_inside = static_cast<double>(inside) / static_cast<double>(r.n);
  return r;
}

} // namespace forge3d::scoring
