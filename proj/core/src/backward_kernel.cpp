#include "smcsmooth/backward_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "smcsmooth/discrete_sampler.hpp"
#include "smcsmooth/errors.hpp"

namespace smc {

BackwardKernelBuilder::BackwardKernelBuilder(std::size_t t, std::size_t prev_size, BackwardKernel::Kind kind) {
  if (kind == BackwardKernel::Kind::Implicit) throw InvalidArgumentError("implicit kernels are not built row by row");
  kernel_.t_ = t;
  kernel_.prev_size_ = prev_size;
  kernel_.kind_ = kind;
}

void BackwardKernelBuilder::add_row(std::span<const std::size_t> indices, std::span<const double> probabilities) {
  if (indices.size() != probabilities.size() || indices.empty()) {
    throw InvalidArgumentError("kernel row needs matching, nonempty index and probability lists");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= kernel_.prev_size_) throw InvalidArgumentError("kernel row index out of range");
    if (!(probabilities[k] >= 0.0) || !std::isfinite(probabilities[k])) {
      throw NumericError("kernel row probability is negative or not finite");
    }
    total += probabilities[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw NumericError("kernel row does not sum to one");
  kernel_.indices_.insert(kernel_.indices_.end(), indices.begin(), indices.end());
  kernel_.probs_.insert(kernel_.probs_.end(), probabilities.begin(), probabilities.end());
  kernel_.offsets_.push_back(kernel_.indices_.size());
  ++kernel_.rows_;
}

void BackwardKernelBuilder::add_atoms(std::span<const std::size_t> atoms) {
  if (atoms.empty()) throw InvalidArgumentError("kernel row needs at least one atom");
  std::size_t sorted[8];
  std::vector<std::size_t> heap;
  std::size_t* first = sorted;
  if (atoms.size() > 8) {
    heap.assign(atoms.begin(), atoms.end());
    first = heap.data();
  } else {
    std::copy(atoms.begin(), atoms.end(), sorted);
  }
  std::size_t* last = first + atoms.size();
  std::sort(first, last);
  const double unit = 1.0 / static_cast<double>(atoms.size());
  for (std::size_t* it = first; it != last;) {
    std::size_t* run_end = it;
    while (run_end != last && *run_end == *it) ++run_end;
    if (*it >= kernel_.prev_size_) throw InvalidArgumentError("kernel row index out of range");
    kernel_.indices_.push_back(*it);
    kernel_.probs_.push_back(static_cast<double>(run_end - it) * unit);
    it = run_end;
  }
  kernel_.offsets_.push_back(kernel_.indices_.size());
  ++kernel_.rows_;
}

void BackwardKernelBuilder::add_point_mass(std::size_t index) {
  const std::size_t atom[1] = {index};
  add_atoms(atom);
}

BackwardKernel BackwardKernelBuilder::finish() && { return std::move(kernel_); }

BackwardKernel BackwardKernel::implicit(std::size_t t, std::size_t rows, std::size_t prev_size, RowSampler sampler) {
  BackwardKernel kernel;
  kernel.t_ = t;
  kernel.rows_ = rows;
  kernel.prev_size_ = prev_size;
  kernel.kind_ = Kind::Implicit;
  kernel.sampler_ = std::move(sampler);
  return kernel;
}

std::span<const std::size_t> BackwardKernel::support(std::size_t row) const {
  if (!materialized()) throw UnsupportedOperationError("implicit kernel rows are not stored");
  return {indices_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
}

std::span<const double> BackwardKernel::probabilities(std::size_t row) const {
  if (!materialized()) throw UnsupportedOperationError("implicit kernel rows are not stored");
  return {probs_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
}

std::size_t BackwardKernel::sample(std::size_t row, Rng& rng) const {
  if (row >= rows_) throw InvalidArgumentError("kernel row out of range");
  if (!materialized()) return sampler_(row, rng);
  const auto idx = support(row);
  if (idx.size() == 1) return idx[0];
  return idx[sample_linear_scan(probabilities(row), rng.uniform())];
}

Eigen::MatrixXd BackwardKernel::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(prev_size_));
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto idx = support(i);
    const auto p = probabilities(i);
    for (std::size_t k = 0; k < idx.size(); ++k) dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(idx[k])) += p[k];
  }
  return dense;
}

}  // namespace smc
