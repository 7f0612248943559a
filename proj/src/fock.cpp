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

#include "sculpt/fock.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sculpt {

namespace {

void enumerate(int mode, int m, int c, int budget, std::vector<int>& cur, std::vector<int>& out) {
  if (mode == m) {
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int v = 0; v <= std::min(c, budget); ++v) {
    cur[static_cast<std::size_t>(mode)] = v;
    enumerate(mode + 1, m, c, budget - v, cur, out);
  }
  cur[static_cast<std::size_t>(mode)] = 0;
}

}  // namespace

ModeSpace::ModeSpace(int num_modes, int cutoff, bool has_spin, int total_cap,
                     std::size_t dim_limit)
    : num_modes_(num_modes), cutoff_(cutoff), has_spin_(has_spin) {
  if (num_modes < 1) throw std::invalid_argument("ModeSpace: num_modes must be >= 1");
  if (cutoff < 0) throw std::invalid_argument("ModeSpace: cutoff must be >= 0");
  const int full = num_modes * cutoff;
  capped_ = total_cap >= 0 && total_cap < full;
  cap_ = capped_ ? total_cap : full;

  // Count tuples in floating point first so an oversized request fails cleanly.
  const auto rows = static_cast<std::size_t>(num_modes + 1);
  const auto cols = static_cast<std::size_t>(cap_ + 1);
  std::vector<double> approx(rows * cols, 0.0);
  for (std::size_t b = 0; b < cols; ++b) approx[b] = 1.0;
  for (std::size_t r = 1; r < rows; ++r)
    for (std::size_t b = 0; b < cols; ++b) {
      double s = 0.0;
      for (std::size_t v = 0; v <= std::min<std::size_t>(static_cast<std::size_t>(cutoff), b); ++v)
        s += approx[(r - 1) * cols + b - v];
      approx[r * cols + b] = s;
    }
  const double mdim = approx[(rows - 1) * cols + cols - 1];
  if (mdim * (has_spin ? 2.0 : 1.0) > static_cast<double>(dim_limit))
    throw std::length_error("ModeSpace: dimension exceeds the configured limit");

  auto t = std::make_shared<Tables>();
  t->count.resize(rows * cols);
  for (std::size_t i = 0; i < approx.size(); ++i)
    t->count[i] = static_cast<std::size_t>(std::llround(approx[i]));
  motional_dim_ = t->count[(rows - 1) * cols + cols - 1];

  std::vector<int> cur(static_cast<std::size_t>(num_modes), 0);
  t->occ.reserve(motional_dim_ * static_cast<std::size_t>(num_modes));
  enumerate(0, num_modes, cutoff, cap_, cur, t->occ);
  t->total.resize(motional_dim_);
  for (std::size_t i = 0; i < motional_dim_; ++i) {
    int s = 0;
    for (int k = 0; k < num_modes; ++k) s += t->occ[i * static_cast<std::size_t>(num_modes) + static_cast<std::size_t>(k)];
    t->total[i] = s;
  }
  tables_ = std::move(t);
}

std::optional<std::size_t> ModeSpace::rank(std::span<const int> occ) const noexcept {
  if (static_cast<int>(occ.size()) != num_modes_) return std::nullopt;
  int budget = cap_;
  std::size_t r = 0;
  for (int i = 0; i < num_modes_; ++i) {
    const int n = occ[static_cast<std::size_t>(i)];
    if (n < 0 || n > cutoff_ || n > budget) return std::nullopt;
    for (int v = 0; v < n; ++v) r += count(num_modes_ - i - 1, budget - v);
    budget -= n;
  }
  return r;
}

std::optional<std::size_t> ModeSpace::find(std::span<const int> occ, Spin spin) const noexcept {
  if (has_spin_ == (spin == Spin::none)) return std::nullopt;
  auto r = rank(occ);
  if (!r) return std::nullopt;
  return *r + spin_offset(spin);
}

std::size_t ModeSpace::index(std::span<const int> occ, Spin spin) const {
  if (static_cast<int>(occ.size()) != num_modes_)
    throw std::invalid_argument("basis_index: wrong number of occupations");
  if (has_spin_ == (spin == Spin::none))
    throw std::invalid_argument("basis_index: spin label does not match the space");
  auto r = find(occ, spin);
  if (!r) throw std::out_of_range("basis_index: occupation outside the truncated space");
  return *r;
}

Spin ModeSpace::spin(std::size_t i) const {
  if (!has_spin_) return Spin::none;
  return i >= motional_dim_ ? Spin::e : Spin::g;
}

BasisLabel ModeSpace::label(std::size_t i) const {
  if (i >= dim()) throw std::out_of_range("ModeSpace::label: index out of range");
  const int* o = occupations(i);
  return BasisLabel{std::vector<int>(o, o + num_modes_), spin(i)};
}

std::string ModeSpace::descriptor() const {
  std::ostringstream os;
  os << "modes=" << num_modes_ << " cutoff=" << cutoff_ << " spin=" << (has_spin_ ? 1 : 0)
     << " cap=" << total_cap();
  return os.str();
}

bool ModeSpace::operator==(const ModeSpace& o) const {
  return num_modes_ == o.num_modes_ && cutoff_ == o.cutoff_ && has_spin_ == o.has_spin_ &&
         total_cap() == o.total_cap();
}

ModeSpace make_space(int num_modes, int cutoff, bool has_spin) {
  return ModeSpace(num_modes, cutoff, has_spin);
}

std::size_t basis_index(const ModeSpace& space, std::span<const int> occupations, Spin spin) {
  return space.index(occupations, spin);
}

// ---------------------------------------------------------------------------

LinearOperator::LinearOperator(ModeSpace space, SpMat matrix) : space_(std::move(space)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (matrix.rows() != d || matrix.cols() != d)
    throw std::invalid_argument("LinearOperator: matrix shape does not match the space");
  matrix.makeCompressed();
  factors_.push_back(std::make_shared<const SpMat>(std::move(matrix)));
}

LinearOperator LinearOperator::identity(const ModeSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  SpMat id(d, d);
  id.setIdentity();
  return LinearOperator(space, std::move(id));
}

Vec LinearOperator::apply(const Vec& x) const {
  if (x.size() != static_cast<Eigen::Index>(space_.dim()))
    throw std::invalid_argument("LinearOperator::apply: size mismatch");
  Vec y = x;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) y = (**it) * y;
  return y;
}

Mat LinearOperator::apply(const Mat& x) const {
  if (x.rows() != static_cast<Eigen::Index>(space_.dim()))
    throw std::invalid_argument("LinearOperator::apply: size mismatch");
  Mat y = x;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) y = (**it) * y;
  return y;
}

LinearOperator LinearOperator::adjoint() const {
  LinearOperator out;
  out.space_ = space_;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
    out.factors_.push_back(std::make_shared<const SpMat>(SpMat((*it)->adjoint())));
  return out;
}

LinearOperator LinearOperator::compose(const LinearOperator& rhs) const {
  if (space_ != rhs.space_) throw std::invalid_argument("compose: space mismatch");
  LinearOperator out = *this;
  out.factors_.insert(out.factors_.end(), rhs.factors_.begin(), rhs.factors_.end());
  return out;
}

SpMat LinearOperator::sparse() const {
  SpMat acc = *factors_.front();
  for (std::size_t i = 1; i < factors_.size(); ++i) acc = SpMat(acc * (*factors_[i]));
  acc.prune(cplx(0.0, 0.0));
  return acc;
}

Mat LinearOperator::dense() const { return Mat(sparse()); }

LinearOperator LinearOperator::operator+(const LinearOperator& o) const {
  if (space_ != o.space_) throw std::invalid_argument("operator+: space mismatch");
  return LinearOperator(space_, SpMat(sparse() + o.sparse()));
}

LinearOperator LinearOperator::operator-(const LinearOperator& o) const {
  if (space_ != o.space_) throw std::invalid_argument("operator-: space mismatch");
  return LinearOperator(space_, SpMat(sparse() - o.sparse()));
}

LinearOperator LinearOperator::operator*(cplx s) const {
  LinearOperator out = *this;
  out.factors_.front() = std::make_shared<const SpMat>(SpMat(s * (*factors_.front())));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_mode(const ModeSpace& space, int mode) {
  if (mode < 1 || mode > space.num_modes())
    throw std::out_of_range("mode index outside [1, num_modes]");
}

/// Builds an operator that maps occupation n of `mode` to n + shift with
/// weight w(n). Targets outside the space are dropped (hard truncation).
template <class W>
LinearOperator mode_shift_op(const ModeSpace& space, int mode, int shift, W w) {
  check_mode(space, mode);
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(space.dim());
  std::vector<int> occ(static_cast<std::size_t>(space.num_modes()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const int* o = space.occupations(i);
    const int n = o[mode - 1];
    const double v = w(n);
    if (v == 0.0) continue;
    std::copy(o, o + space.num_modes(), occ.begin());
    occ[static_cast<std::size_t>(mode - 1)] = n + shift;
    auto j = space.find(occ, space.spin(i));
    if (!j) continue;
    trips.emplace_back(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i), cplx(v, 0.0));
  }
  const auto d = static_cast<Eigen::Index>(space.dim());
  SpMat m(d, d);
  m.setFromTriplets(trips.begin(), trips.end());
  return LinearOperator(space, std::move(m));
}

}  // namespace

LinearOperator ladder_lower(const ModeSpace& space, int mode) {
  return mode_shift_op(space, mode, -1, [](int n) { return n > 0 ? std::sqrt(double(n)) : 0.0; });
}

LinearOperator ladder_raise(const ModeSpace& space, int mode) {
  return mode_shift_op(space, mode, +1, [](int n) { return std::sqrt(double(n + 1)); });
}

LinearOperator number_op(const ModeSpace& space, int mode) {
  return mode_shift_op(space, mode, 0, [](int n) { return double(n); });
}

LinearOperator arithmetic_lower(const ModeSpace& space, int mode) {
  return mode_shift_op(space, mode, -1, [](int n) { return n > 0 ? 1.0 : 0.0; });
}

LinearOperator arithmetic_raise(const ModeSpace& space, int mode) {
  return mode_shift_op(space, mode, +1, [](int) { return 1.0; });
}

LinearOperator vacuum_projector(const ModeSpace& space, int mode) {
  return mode_shift_op(space, mode, 0, [](int n) { return n == 0 ? 1.0 : 0.0; });
}

LinearOperator spin_op(const ModeSpace& space, SpinOp which) {
  if (!space.has_spin()) throw std::invalid_argument("spin_op: space has no spin");
  const auto md = space.motional_dim();
  std::vector<Eigen::Triplet<cplx>> trips;
  auto add = [&](std::size_t r0, std::size_t c0, cplx v) {
    for (std::size_t i = 0; i < md; ++i)
      trips.emplace_back(static_cast<Eigen::Index>(r0 + i), static_cast<Eigen::Index>(c0 + i), v);
  };
  const std::size_t g = 0, e = md;
  switch (which) {
    case SpinOp::x: add(g, e, 1.0); add(e, g, 1.0); break;
    case SpinOp::y: add(g, e, kI); add(e, g, -kI); break;
    case SpinOp::z: add(g, g, -1.0); add(e, e, 1.0); break;
    case SpinOp::plus: add(e, g, 1.0); break;
    case SpinOp::minus: add(g, e, 1.0); break;
  }
  const auto d = static_cast<Eigen::Index>(space.dim());
  SpMat m(d, d);
  m.setFromTriplets(trips.begin(), trips.end());
  return LinearOperator(space, std::move(m));
}

LinearOperator spin_projector(const ModeSpace& space, Spin branch) {
  if (!space.has_spin() || branch == Spin::none)
    throw std::invalid_argument("spin_projector: needs a spin space and a g/e branch");
  const auto md = space.motional_dim();
  const auto d = static_cast<Eigen::Index>(space.dim());
  SpMat m(d, d);
  std::vector<Eigen::Triplet<cplx>> trips;
  const std::size_t off = space.spin_offset(branch);
  for (std::size_t i = 0; i < md; ++i)
    trips.emplace_back(static_cast<Eigen::Index>(off + i), static_cast<Eigen::Index>(off + i), 1.0);
  m.setFromTriplets(trips.begin(), trips.end());
  return LinearOperator(space, std::move(m));
}

// ---------------------------------------------------------------------------

HybridState::HybridState(ModeSpace s, Vec a) : space(std::move(s)), amplitudes(std::move(a)) {
  if (amplitudes.size() != static_cast<Eigen::Index>(space.dim()))
    throw std::invalid_argument("HybridState: amplitude length does not match the space");
}

HybridState basis_state(const ModeSpace& space, std::span<const int> occupations, Spin spin) {
  HybridState s(space);
  s.amplitudes[static_cast<Eigen::Index>(space.index(occupations, spin))] = 1.0;
  return s;
}

HybridState basis_state(const ModeSpace& space, std::initializer_list<int> occupations, Spin spin) {
  return basis_state(space, std::span<const int>(occupations.begin(), occupations.size()), spin);
}

cplx inner_product(const HybridState& a, const HybridState& b) {
  if (a.space != b.space) throw std::invalid_argument("inner_product: space mismatch");
  return a.amplitudes.dot(b.amplitudes);  // conjugates the first argument
}

double norm(const HybridState& a) { return a.amplitudes.norm(); }

Normalized normalize(const HybridState& a) {
  const double n2 = a.amplitudes.squaredNorm();
  if (!(n2 > 0.0)) throw std::domain_error("normalize: impossible post-selection branch (zero norm)");
  return Normalized{HybridState(a.space, a.amplitudes / std::sqrt(n2)), n2};
}

cplx expectation(const LinearOperator& op, const HybridState& state) {
  if (op.space() != state.space) throw std::invalid_argument("expectation: space mismatch");
  return state.amplitudes.dot(op.apply(state.amplitudes));
}

HybridState apply(const LinearOperator& op, const HybridState& state) {
  if (op.space() != state.space) throw std::invalid_argument("apply: space mismatch");
  return HybridState(state.space, op.apply(state.amplitudes));
}

// ---------------------------------------------------------------------------

DensityOperator::DensityOperator(ModeSpace s, Mat m) : space(std::move(s)), matrix(std::move(m)) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  if (matrix.rows() != d || matrix.cols() != d)
    throw std::invalid_argument("DensityOperator: matrix shape does not match the space");
}

DensityOperator DensityOperator::pure(const HybridState& psi) {
  return DensityOperator(psi.space, psi.amplitudes * psi.amplitudes.adjoint());
}

double DensityOperator::hermiticity_error() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

void DensityOperator::symmetrize() {
  Mat h = 0.5 * (matrix + matrix.adjoint());
  matrix = std::move(h);
}

namespace {

struct TraceLayout {
  ModeSpace reduced;
  std::vector<std::size_t> kept_index;  // per full basis index
  std::vector<std::size_t> env_index;   // per full basis index
  std::size_t env_count = 0;
};

TraceLayout trace_layout(const ModeSpace& space, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  for (int k : keep) {
    if (k < 0 || k > space.num_modes()) throw std::out_of_range("partial_trace: bad subsystem id");
    if (k == 0 && !space.has_spin()) throw std::invalid_argument("partial_trace: no spin to keep");
  }
  const bool keep_spin = keep.front() == 0;
  std::vector<int> modes;
  for (int k : keep)
    if (k > 0) modes.push_back(k);

  // A reduced space needs at least one mode; keeping only the spin uses a
  // single vacuum-only placeholder mode.
  const int rm = modes.empty() ? 1 : static_cast<int>(modes.size());
  const int rc = modes.empty() ? 0 : space.cutoff();
  int rcap = -1;
  if (space.total_cap() >= 0 && !modes.empty()) rcap = space.total_cap();
  TraceLayout L{ModeSpace(rm, rc, keep_spin, rcap), {}, {}, 0};

  std::vector<bool> kept_mode(static_cast<std::size_t>(space.num_modes() + 1), false);
  for (int m : modes) kept_mode[static_cast<std::size_t>(m)] = true;

  std::map<std::vector<int>, std::size_t> env_ids;
  L.kept_index.resize(space.dim());
  L.env_index.resize(space.dim());
  std::vector<int> ko(static_cast<std::size_t>(rm), 0);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const int* o = space.occupations(i);
    std::vector<int> env;
    std::size_t p = 0;
    for (int m = 1; m <= space.num_modes(); ++m) {
      if (kept_mode[static_cast<std::size_t>(m)]) ko[p++] = o[m - 1];
      else env.push_back(o[m - 1]);
    }
    const Spin s = space.spin(i);
    if (!keep_spin) env.push_back(s == Spin::e ? 1 : 0);
    L.kept_index[i] = L.reduced.index(ko, keep_spin ? s : Spin::none);
    auto [it, fresh] = env_ids.try_emplace(std::move(env), env_ids.size());
    L.env_index[i] = it->second;
  }
  L.env_count = env_ids.size();
  return L;
}

}  // namespace

DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep) {
  const TraceLayout L = trace_layout(rho.space, std::move(keep));
  std::vector<std::vector<std::size_t>> groups(L.env_count);
  for (std::size_t i = 0; i < rho.space.dim(); ++i) groups[L.env_index[i]].push_back(i);
  const auto rd = static_cast<Eigen::Index>(L.reduced.dim());
  Mat out = Mat::Zero(rd, rd);
  for (const auto& grp : groups)
    for (std::size_t a : grp)
      for (std::size_t b : grp)
        out(static_cast<Eigen::Index>(L.kept_index[a]), static_cast<Eigen::Index>(L.kept_index[b])) +=
            rho.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return DensityOperator(L.reduced, std::move(out));
}

DensityOperator reduced_density(const HybridState& psi, std::vector<int> keep) {
  const TraceLayout L = trace_layout(psi.space, std::move(keep));
  const auto rd = static_cast<Eigen::Index>(L.reduced.dim());
  Mat cols = Mat::Zero(rd, static_cast<Eigen::Index>(L.env_count));
  for (std::size_t i = 0; i < psi.space.dim(); ++i)
    cols(static_cast<Eigen::Index>(L.kept_index[i]), static_cast<Eigen::Index>(L.env_index[i])) +=
        psi.amplitudes[static_cast<Eigen::Index>(i)];
  return DensityOperator(L.reduced, cols * cols.adjoint());
}

// ---------------------------------------------------------------------------

void write_snapshot(std::ostream& os, const HybridState& state) {
  const auto& sp = state.space;
  os << "sculpt-state 1\n";
  os << "ordering " << ModeSpace::kOrderingTag << "\n";
  os << "space " << sp.num_modes() << ' ' << sp.cutoff() << ' ' << (sp.has_spin() ? 1 : 0) << ' '
     << sp.total_cap() << "\n";
  os << "dim " << sp.dim() << "\n";
  os << std::setprecision(17) << std::scientific;
  for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i)
    os << state.amplitudes[i].real() << ' ' << state.amplitudes[i].imag() << "\n";
}

HybridState read_snapshot(std::istream& is) {
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "sculpt-state" || version != 1)
    throw std::runtime_error("read_snapshot: not a version-1 state snapshot");
  std::string tag;
  if (!(is >> word >> tag) || word != "ordering" || tag != ModeSpace::kOrderingTag)
    throw std::runtime_error("read_snapshot: unsupported basis ordering");
  int m = 0, c = 0, spin = 0, cap = -1;
  if (!(is >> word >> m >> c >> spin >> cap) || word != "space")
    throw std::runtime_error("read_snapshot: malformed space line");
  ModeSpace sp(m, c, spin != 0, cap);
  std::size_t dim = 0;
  if (!(is >> word >> dim) || word != "dim" || dim != sp.dim())
    throw std::runtime_error("read_snapshot: dimension mismatch");
  HybridState s(sp);
  for (std::size_t i = 0; i < dim; ++i) {
    double re = 0, im = 0;
    if (!(is >> re >> im)) throw std::runtime_error("read_snapshot: truncated amplitude list");
    s.amplitudes[static_cast<Eigen::Index>(i)] = cplx(re, im);
  }
  return s;
}

}  // namespace sculpt
