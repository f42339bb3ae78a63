// Copyright 2026 The krigmis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "krigmis/doe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "krigmis/error.hpp"
#include "krigmis/rng.hpp"

namespace krigmis {

const char* to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::SRS:
      return "srs";
    case DesignKind::LHSMaximin:
      return "lhs_maximin";
    case DesignKind::SparseGrid:
      return "sparse_grid";
    case DesignKind::Custom:
      return "custom";
  }
  return "unknown";
}

Design Design::custom(PointMatrix points) {
  if (points.rows() == 0 || points.cols() == 0) throw InputError("empty design");
  if (!points.allFinite()) throw InputError("design points must be finite");
  if (has_duplicate_rows(points)) throw InputError("design contains duplicate rows");
  Design design;
  design.points = std::move(points);
  design.kind = DesignKind::Custom;
  return design;
}

bool has_duplicate_rows(const PointMatrix& points) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    return std::lexicographical_compare(points.row(a).begin(), points.row(a).end(),
                                        points.row(b).begin(), points.row(b).end());
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (points.row(order[i]) == points.row(order[i - 1])) return true;
  }
  return false;
}

double RegularGridSpec::spacing() const { return std::ldexp(1.0, -level); }

namespace {

void check_sizes(Eigen::Index n, Eigen::Index d) {
  if (n < 1) throw InputError("design size n must be at least 1");
  if (d < 1) throw InputError("design dimension d must be at least 1");
}

}  // namespace

Design srs(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  check_sizes(n, d);
  Rng rng(substream_seed(seed, 0));
  Design design;
  design.points.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) design.points(i, j) = rng.uniform();
  }
  design.kind = DesignKind::SRS;
  design.seed = seed;
  return design;
}

Design lhs(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
           std::uint64_t candidate) {
  check_sizes(n, d);
  Rng rng(substream_seed(seed, candidate));
  Design design;
  design.points.resize(n, d);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = (static_cast<double>(perm[static_cast<std::size_t>(i)]) +
                        rng.uniform()) * inv_n;
      // (k + u) / n can round up to the next bin edge.
      const double upper = std::nextafter(
          (static_cast<double>(perm[static_cast<std::size_t>(i)]) + 1.0) * inv_n, 0.0);
      design.points(i, j) = std::min(x, upper);
    }
  }
  design.kind = DesignKind::LHSMaximin;
  design.seed = seed;
  design.meta.candidates = 1;
  return design;
}

double min_pairwise_distance(const PointMatrix& points) {
  const Eigen::Index n = points.rows();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      best = std::min(best, (points.row(a) - points.row(b)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

Design lhs_maximin(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                   std::uint64_t candidates) {
  if (candidates == 0) throw InputError("lhs_maximin needs at least one candidate");
  if (n < 2) throw InputError("lhs_maximin needs n >= 2");
  check_sizes(n, d);
  std::vector<double> scores(candidates);
  const auto count = static_cast<std::int64_t>(candidates);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    scores[static_cast<std::size_t>(k)] =
        min_pairwise_distance(lhs(n, d, seed, static_cast<std::uint64_t>(k)).points);
  }
  const auto best = static_cast<std::uint64_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
  Design design = lhs(n, d, seed, best);
  design.meta.candidates = candidates;
  return design;
}

namespace {

// Calls visit(levels) for every multi-index with entries >= 1 and
// sum(levels) - dim <= budget.
template <typename Visit>
void for_each_multi_index(int dim, int budget, std::vector<int>& levels,
                          Visit&& visit) {
  const auto depth = static_cast<int>(levels.size());
  if (depth == dim) {
    visit(levels);
    return;
  }
  for (int extra = 0; extra <= budget; ++extra) {
    levels.push_back(1 + extra);
    for_each_multi_index(dim, budget - extra, levels, visit);
    levels.pop_back();
  }
}

void check_grid(const RegularGridSpec& spec) {
  if (spec.level < 1) throw InputError("sparse grid level must be at least 1");
  if (spec.dim < 1) throw InputError("sparse grid dimension must be at least 1");
  if (spec.level > 30) throw InputError("sparse grid level too large");
}

}  // namespace

std::size_t sparse_grid_size(const RegularGridSpec& spec) {
  check_grid(spec);
  // Hierarchical 1-d point sets are disjoint across levels, so the union is
  // disjoint and the size is a plain sum of tensor sizes.
  std::size_t total = 0;
  std::vector<int> levels;
  for_each_multi_index(spec.dim, spec.level - 1, levels, [&](const std::vector<int>& l) {
    std::size_t block = 1;
    for (int li : l) block <<= (li - 1);
    total += block;
  });
  return total;
}

Design sparse_grid(const RegularGridSpec& spec) {
  check_grid(spec);
  // Numerators over the common denominator 2^level keep the union exact.
  std::set<std::vector<std::int64_t>> unique;
  std::vector<int> levels;
  const int top = spec.level;
  for_each_multi_index(spec.dim, spec.level - 1, levels, [&](const std::vector<int>& l) {
    std::vector<std::int64_t> counts(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) counts[i] = std::int64_t{1} << (l[i] - 1);
    std::vector<std::int64_t> idx(l.size(), 0);
    for (;;) {
      std::vector<std::int64_t> point(l.size());
      for (std::size_t i = 0; i < l.size(); ++i) {
        point[i] = (2 * idx[i] + 1) << (top - l[i]);
      }
      unique.insert(std::move(point));
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == counts[i]) idx[i++] = 0;
      if (i == idx.size()) break;
    }
  });
  Design design;
  design.points.resize(static_cast<Eigen::Index>(unique.size()), spec.dim);
  const double denom = std::ldexp(1.0, top);
  Eigen::Index row = 0;
  for (const auto& point : unique) {
    for (int j = 0; j < spec.dim; ++j) {
      design.points(row, j) = static_cast<double>(point[static_cast<std::size_t>(j)]) / denom;
    }
    ++row;
  }
  design.kind = DesignKind::SparseGrid;
  design.meta.grid_level = spec.level;
  return design;
}

int sparse_grid_level_for(std::size_t target_n, int dim, int max_level) {
  int best_level = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_level; ++level) {
    const auto size = static_cast<double>(sparse_grid_size({level, dim}));
    const double gap = std::abs(size - static_cast<double>(target_n));
    if (gap < best_gap) {
      best_gap = gap;
      best_level = level;
    }
    if (size > static_cast<double>(target_n)) break;
  }
  return best_level;
}

std::vector<int> bin_occupancy(const PointMatrix& points, Eigen::Index col) {
  const Eigen::Index n = points.rows();
  std::vector<int> bins(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto b = static_cast<Eigen::Index>(std::floor(points(i, col) * static_cast<double>(n)));
    b = std::clamp<Eigen::Index>(b, 0, n - 1);
    ++bins[static_cast<std::size_t>(b)];
  }
  return bins;
}

}  // namespace krigmis
