// Copyright 2026 The Sculpt Authors
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

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sculpt {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};

/// Internal level of the addressed ion. `none` is used for spinless spaces.
enum class Spin { none, g, e };

struct BasisLabel {
  std::vector<int> occupations;
  Spin spin = Spin::none;
};

/// Truncated spin (x) bosonic space.
///
/// Basis ordering (tag "spin-major/v1"): the spin is the slowest index
/// (g = 0, e = 1), then mode 1 is the most significant motional digit and
/// mode num_modes the least significant, occupations ascending. An optional
/// total-occupation cap keeps only states with sum of occupations <= cap; the
/// ordering is the same lexicographic order restricted to those states. With
/// no cap the motional dimension is (cutoff+1)^num_modes.
class ModeSpace {
 public:
  static constexpr std::size_t kDefaultDimLimit = std::size_t{1} << 22;
  static constexpr const char* kOrderingTag = "spin-major/v1";

  ModeSpace() = default;
  ModeSpace(int num_modes, int cutoff, bool has_spin, int total_cap = -1,
            std::size_t dim_limit = kDefaultDimLimit);

  int num_modes() const { return num_modes_; }
  int cutoff() const { return cutoff_; }
  bool has_spin() const { return has_spin_; }
  /// -1 when no cap is applied.
  int total_cap() const { return capped_ ? cap_ : -1; }
  std::size_t motional_dim() const { return motional_dim_; }
  std::size_t dim() const { return (has_spin_ ? 2 : 1) * motional_dim_; }

  /// Throws std::out_of_range for occupations outside the space.
  std::size_t index(std::span<const int> occupations, Spin spin = Spin::none) const;
  std::optional<std::size_t> find(std::span<const int> occupations,
                                  Spin spin = Spin::none) const noexcept;
  BasisLabel label(std::size_t i) const;

  /// Occupations of basis state i; points at num_modes() ints.
  const int* occupations(std::size_t i) const {
    return tables_->occ.data() + (i % motional_dim_) * static_cast<std::size_t>(num_modes_);
  }
  /// mode is 1-based.
  int occupation(std::size_t i, int mode) const { return occupations(i)[mode - 1]; }
  int total_occupation(std::size_t i) const { return tables_->total[i % motional_dim_]; }
  Spin spin(std::size_t i) const;
  std::size_t motional_index(std::size_t i) const { return i % motional_dim_; }
  /// Index of the spin block start (0 for g or spinless, motional_dim for e).
  std::size_t spin_offset(Spin s) const { return s == Spin::e ? motional_dim_ : 0; }

  std::string descriptor() const;
  bool operator==(const ModeSpace& o) const;
  bool operator!=(const ModeSpace& o) const { return !(*this == o); }

 private:
  struct Tables {
    std::vector<int> occ;
    std::vector<int> total;
    std::vector<std::size_t> count;  // (num_modes+1) x (cap+1)
  };
  std::size_t count(int r, int b) const {
    return tables_->count[static_cast<std::size_t>(r) * static_cast<std::size_t>(cap_ + 1) +
                          static_cast<std::size_t>(b)];
  }
  std::optional<std::size_t> rank(std::span<const int> occ) const noexcept;

  int num_modes_ = 0;
  int cutoff_ = 0;
  int cap_ = 0;
  bool capped_ = false;
  bool has_spin_ = false;
  std::size_t motional_dim_ = 0;
  std::shared_ptr<const Tables> tables_;
};

ModeSpace make_space(int num_modes, int cutoff, bool has_spin);
std::size_t basis_index(const ModeSpace& space, std::span<const int> occupations,
                        Spin spin = Spin::none);

/// Sparse operator, optionally kept as an unevaluated product of factors.
/// Factors apply right to left, so compose(a, b) acts as a(b(x)).
class LinearOperator {
 public:
  LinearOperator() = default;
  LinearOperator(ModeSpace space, SpMat matrix);

  static LinearOperator identity(const ModeSpace& space);

  const ModeSpace& space() const { return space_; }
  std::size_t num_factors() const { return factors_.size(); }

  Vec apply(const Vec& x) const;
  Mat apply(const Mat& x) const;

  LinearOperator adjoint() const;
  /// Lazy product: result applies `rhs` first.
  LinearOperator compose(const LinearOperator& rhs) const;
  SpMat sparse() const;
  Mat dense() const;

  LinearOperator operator+(const LinearOperator& o) const;
  LinearOperator operator-(const LinearOperator& o) const;
  LinearOperator operator*(cplx s) const;

 private:
  ModeSpace space_;
  std::vector<std::shared_ptr<const SpMat>> factors_;  // factors_.back() applied first
};

inline LinearOperator operator*(cplx s, const LinearOperator& op) { return op * s; }

// Primitive operators. Modes are 1-based.
LinearOperator ladder_lower(const ModeSpace& space, int mode);
LinearOperator ladder_raise(const ModeSpace& space, int mode);
LinearOperator number_op(const ModeSpace& space, int mode);
LinearOperator arithmetic_lower(const ModeSpace& space, int mode);
LinearOperator arithmetic_raise(const ModeSpace& space, int mode);
LinearOperator vacuum_projector(const ModeSpace& space, int mode);

enum class SpinOp { x, y, z, plus, minus };
LinearOperator spin_op(const ModeSpace& space, SpinOp which);
LinearOperator spin_projector(const ModeSpace& space, Spin branch);

/// Pure state; the amplitude norm squared carries cumulative success probability.
struct HybridState {
  ModeSpace space;
  Vec amplitudes;

  HybridState() = default;
  explicit HybridState(ModeSpace s) : space(std::move(s)), amplitudes(Vec::Zero(space.dim())) {}
  HybridState(ModeSpace s, Vec a);
};

HybridState basis_state(const ModeSpace& space, std::span<const int> occupations,
                        Spin spin = Spin::none);
HybridState basis_state(const ModeSpace& space, std::initializer_list<int> occupations,
                        Spin spin = Spin::none);

struct Normalized {
  HybridState state;
  double norm2 = 0.0;  // discarded norm squared, the branch probability
};

cplx inner_product(const HybridState& a, const HybridState& b);
double norm(const HybridState& a);
/// Throws std::domain_error on a zero vector (impossible post-selection branch).
Normalized normalize(const HybridState& a);
cplx expectation(const LinearOperator& op, const HybridState& state);
HybridState apply(const LinearOperator& op, const HybridState& state);

struct DensityOperator {
  ModeSpace space;
  Mat matrix;

  DensityOperator() = default;
  DensityOperator(ModeSpace s, Mat m);
  static DensityOperator pure(const HybridState& psi);

  cplx trace() const { return matrix.trace(); }
  double hermiticity_error() const;
  void symmetrize();
};

/// Subsystem ids: 0 is the spin, 1..num_modes are modes. The reduced space
/// keeps the cutoff and, when capped, the cap.
DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep);
DensityOperator reduced_density(const HybridState& psi, std::vector<int> keep);

// Text snapshot: ordering tag, space descriptor and amplitudes at 17 digits.
void write_snapshot(std::ostream& os, const HybridState& state);
HybridState read_snapshot(std::istream& is);

}  // namespace sculpt
