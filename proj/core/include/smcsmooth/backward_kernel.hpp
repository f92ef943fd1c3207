#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "smcsmooth/rng.hpp"

namespace smc {

/// Random N x N' Markov matrix selecting a time t-1 index given a time t index.
///
/// Materialised kernels store every row as a sparse list of (index,
/// probability) pairs in compressed-row form; dense rows simply list all N'
/// indices. Implicit kernels hold a row sampler instead, for cases (several
/// IMH steps) where the row entries are expensive to write down.
class BackwardKernelBuilder;

class BackwardKernel {
 public:
  enum class Kind { Dense, Sparse, Implicit };
  using RowSampler = std::function<std::size_t(std::size_t row, Rng& rng)>;

  using Builder = BackwardKernelBuilder;

  BackwardKernel() = default;

  static BackwardKernel implicit(std::size_t t, std::size_t rows, std::size_t prev_size, RowSampler sampler);

  std::size_t time() const noexcept { return t_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t prev_size() const noexcept { return prev_size_; }
  Kind kind() const noexcept { return kind_; }
  bool materialized() const noexcept { return kind_ != Kind::Implicit; }

  std::span<const std::size_t> support(std::size_t row) const;
  std::span<const double> probabilities(std::size_t row) const;

  /// Draws a previous-time index from row `row`.
  std::size_t sample(std::size_t row, Rng& rng) const;

  /// Dense rows x prev_size matrix; only for materialised kernels.
  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t t_ = 0;
  std::size_t rows_ = 0;
  std::size_t prev_size_ = 0;
  Kind kind_ = Kind::Sparse;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> indices_;
  std::vector<double> probs_;
  RowSampler sampler_;

  friend class BackwardKernelBuilder;
};

/// Accumulates the rows of a materialised kernel one at a time.
class BackwardKernelBuilder {
 public:
  BackwardKernelBuilder(std::size_t t, std::size_t prev_size,
                        BackwardKernel::Kind kind = BackwardKernel::Kind::Sparse);

  /// Appends a row given explicit probabilities (must sum to one).
  void add_row(std::span<const std::size_t> indices, std::span<const double> probabilities);
  /// Appends the row (1/k) sum delta(atoms[i]); repeated atoms are merged.
  void add_atoms(std::span<const std::size_t> atoms);
  void add_point_mass(std::size_t index);

  BackwardKernel finish() &&;

 private:
  BackwardKernel kernel_;
};

}  // namespace smc
