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

#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

namespace krigmis {

/// Row-major so that each observation point is contiguous.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class DesignKind { SRS, LHSMaximin, SparseGrid, Custom };

const char* to_string(DesignKind kind);

struct DesignMeta {
  std::uint64_t candidates = 0;  // LHS-Maximin only
  int grid_level = 0;            // sparse grid only
};

/// n points of [0,1]^d with their provenance.
struct Design {
  PointMatrix points;
  DesignKind kind = DesignKind::Custom;
  std::optional<std::uint64_t> seed;
  DesignMeta meta;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  std::span<const double> point(Eigen::Index i) const {
    return {points.row(i).data(), static_cast<std::size_t>(points.cols())};
  }

  /// Wraps user-provided points; rows must be pairwise distinct.
  static Design custom(PointMatrix points);
};

/// True when two rows of `points` compare equal coordinate-wise.
bool has_duplicate_rows(const PointMatrix& points);

struct RegularGridSpec {
  int level = 1;
  int dim = 1;
  double spacing() const;
};

/// n i.i.d. uniform points.
Design srs(Eigen::Index n, Eigen::Index d, std::uint64_t seed);

/// One Latin hypercube draw from substream `candidate` of `seed`.
Design lhs(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
           std::uint64_t candidate = 0);

/// Smallest Euclidean distance between two distinct rows.
double min_pairwise_distance(const PointMatrix& points);

/// Best of `candidates` Latin hypercubes under the maximin criterion. Every
/// candidate k is `lhs(n, d, seed, k)`; ties keep the lowest k.
Design lhs_maximin(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                   std::uint64_t candidates = 1000);

/// Boundary-free hierarchical sparse grid, points sorted lexicographically.
Design sparse_grid(const RegularGridSpec& spec);

/// Number of points `sparse_grid` produces without building it.
std::size_t sparse_grid_size(const RegularGridSpec& spec);

/// Level whose sparse grid size is closest to `target_n` (ties: lower level).
int sparse_grid_level_for(std::size_t target_n, int dim, int max_level = 12);

/// Number of rows falling in each of the n bins [i/n, (i+1)/n) of column `col`.
std::vector<int> bin_occupancy(const PointMatrix& points, Eigen::Index col);

}  // namespace krigmis
