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

#include "sculpt/ideal_gates.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace sculpt {

namespace {

using Trip = Eigen::Triplet<cplx>;

struct BlockBuilder {
  explicit BlockBuilder(const ModeSpace& s) : space(s), touched(s.dim(), false) {}

  // a -> c a + (-i e^{i phi} s) b ;  b -> c b + (-i e^{-i phi} s) a
  void rotation(std::size_t a, std::size_t b, double angle, double phi) {
    const double c = std::cos(angle), s = std::sin(angle);
    const cplx ab = -kI * std::polar(1.0, phi) * s;
    const cplx ba = -kI * std::polar(1.0, -phi) * s;
    add(a, a, c);
    add(b, a, ab);
    add(b, b, c);
    add(a, b, ba);
    touched[a] = touched[b] = true;
  }

  void block(const std::vector<std::size_t>& idx, const Mat& u) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const cplx v = u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (v != cplx(0.0, 0.0)) add(idx[r], idx[c], v);
      }
      touched[idx[c]] = true;
    }
  }

  LinearOperator finish() {
    for (std::size_t i = 0; i < touched.size(); ++i)
      if (!touched[i]) add(i, i, 1.0);
    const auto d = static_cast<Eigen::Index>(space.dim());
    SpMat m(d, d);
    m.setFromTriplets(trips.begin(), trips.end());
    return LinearOperator(space, std::move(m));
  }

  void add(std::size_t r, std::size_t c, cplx v) {
    trips.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), v);
  }

  const ModeSpace& space;
  std::vector<bool> touched;
  std::vector<Trip> trips;
};

void require_spin(const ModeSpace& space, const char* who) {
  if (!space.has_spin()) throw std::invalid_argument(std::string(who) + ": space has no spin");
}

void require_mode(const ModeSpace& space, int mode) {
  if (mode < 1 || mode > space.num_modes()) throw std::out_of_range("mode index outside [1, num_modes]");
}

std::vector<int> occ_of(const ModeSpace& space, std::size_t i) {
  const int* o = space.occupations(i);
  return std::vector<int>(o, o + space.num_modes());
}

}  // namespace

LinearOperator carrier(const ModeSpace& space, double theta, double phi) {
  require_spin(space, "carrier");
  BlockBuilder bb(space);
  const std::size_t md = space.motional_dim();
  for (std::size_t i = 0; i < md; ++i) bb.rotation(i, i + md, theta / 2.0, phi);
  return bb.finish();
}

LinearOperator rsb(const ModeSpace& space, int mode, double theta, double phi) {
  require_spin(space, "rsb");
  require_mode(space, mode);
  BlockBuilder bb(space);
  const std::size_t md = space.motional_dim();
  for (std::size_t i = md; i < 2 * md; ++i) {  // |e, n>
    auto occ = occ_of(space, i);
    const int n = occ[static_cast<std::size_t>(mode - 1)];
    occ[static_cast<std::size_t>(mode - 1)] = n + 1;
    auto partner = space.find(occ, Spin::g);
    if (!partner) continue;
    bb.rotation(i, *partner, theta * std::sqrt(double(n + 1)) / 2.0, phi);
  }
  return bb.finish();
}

LinearOperator bsb(const ModeSpace& space, int mode, double theta, double phi) {
  require_spin(space, "bsb");
  require_mode(space, mode);
  BlockBuilder bb(space);
  const std::size_t md = space.motional_dim();
  for (std::size_t i = 0; i < md; ++i) {  // |g, n>
    auto occ = occ_of(space, i);
    const int n = occ[static_cast<std::size_t>(mode - 1)];
    occ[static_cast<std::size_t>(mode - 1)] = n + 1;
    auto partner = space.find(occ, Spin::e);
    if (!partner) continue;
    bb.rotation(*partner, i, theta * std::sqrt(double(n + 1)) / 2.0, phi);
  }
  return bb.finish();
}

bool displacement_within_cutoff(const ModeSpace& space, double theta) {
  return theta * theta <= space.cutoff() / 4.0;
}

LinearOperator displacement(const ModeSpace& space, int mode, double theta, double phi) {
  require_mode(space, mode);
  if (!displacement_within_cutoff(space, theta))
    std::clog << "warning: displacement amplitude " << theta << " is large for cutoff "
              << space.cutoff() << "; truncation error may be significant\n";
  BlockBuilder bb(space);
  std::map<std::size_t, Mat> cache;
  const cplx ep = std::polar(1.0, phi);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    auto occ = occ_of(space, i);
    if (occ[static_cast<std::size_t>(mode - 1)] != 0) continue;
    std::vector<std::size_t> fiber;
    for (int n = 0;; ++n) {
      occ[static_cast<std::size_t>(mode - 1)] = n;
      auto j = space.find(occ, space.spin(i));
      if (!j) break;
      fiber.push_back(*j);
    }
    const std::size_t L = fiber.size();
    auto it = cache.find(L);
    if (it == cache.end()) {
      Mat gen = Mat::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
      for (std::size_t n = 0; n + 1 < L; ++n) {
        const double s = std::sqrt(double(n + 1));
        gen(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n)) += theta * ep * s;
        gen(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + 1)) -= theta * std::conj(ep) * s;
      }
      it = cache.emplace(L, Mat(gen.exp())).first;
    }
    bb.block(fiber, it->second);
  }
  return bb.finish();
}

LinearOperator beam_splitter(const ModeSpace& space, int j, int k, double theta, double phi) {
  require_mode(space, j);
  require_mode(space, k);
  if (j == k) throw std::invalid_argument("beam_splitter: modes must differ");
  const int c = space.cutoff();
  const auto jj = static_cast<std::size_t>(j - 1), kk = static_cast<std::size_t>(k - 1);
  BlockBuilder bb(space);
  std::map<std::pair<int, int>, Mat> cache;  // (first a, length) -> block
  const cplx ep = std::polar(1.0, phi);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    auto occ = occ_of(space, i);
    const int a0 = occ[jj], b0 = occ[kk];
    if (!(a0 == 0 || b0 == c)) continue;  // fiber start: lowest n_j
    std::vector<std::size_t> fiber;
    std::vector<int> na;
    for (int a = a0, b = b0; a <= c && b >= 0; ++a, --b) {
      occ[jj] = a;
      occ[kk] = b;
      fiber.push_back(space.index(occ, space.spin(i)));
      na.push_back(a);
    }
    const int L = static_cast<int>(fiber.size());
    const int N = a0 + b0;
    auto key = std::make_pair(a0, L);
    auto it = cache.find(key);
    if (it == cache.end()) {
      // Generator a_j^dag a_k e^{i phi} + a_j a_k^dag e^{-i phi} on |a, N-a>.
      Mat gen = Mat::Zero(L, L);
      for (int p = 0; p + 1 < L; ++p) {
        const int a = na[static_cast<std::size_t>(p)];
        const int b = N - a;
        const double amp = std::sqrt(double(a + 1) * double(b));  // <a+1,b-1| a_j^dag a_k |a,b>
        gen(p + 1, p) += amp * ep;
        gen(p, p + 1) += amp * std::conj(ep);
      }
      Mat arg = (kI * (theta / 2.0)) * gen;
      it = cache.emplace(key, Mat(arg.exp())).first;
    }
    bb.block(fiber, it->second);
  }
  return bb.finish();
}

Branch arithmetic_subtract(const HybridState& state, int mode) {
  require_mode(state.space, mode);
  const double n_in = state.amplitudes.squaredNorm();
  if (!(n_in > 0.0)) throw std::domain_error("arithmetic_subtract: zero input state");
  HybridState out = apply(arithmetic_lower(state.space, mode), state);
  const double p = out.amplitudes.squaredNorm() / n_in;
  return Branch{std::move(out), p};
}

Branch post_select_spin(const HybridState& state, Spin branch) {
  require_spin(state.space, "post_select_spin");
  if (branch == Spin::none) throw std::invalid_argument("post_select_spin: choose g or e");
  const double n_in = state.amplitudes.squaredNorm();
  if (!(n_in > 0.0)) throw std::domain_error("post_select_spin: zero input state");
  HybridState out(state.space);
  const auto md = static_cast<Eigen::Index>(state.space.motional_dim());
  const auto off = static_cast<Eigen::Index>(state.space.spin_offset(branch));
  out.amplitudes.segment(off, md) = state.amplitudes.segment(off, md);
  const double p = out.amplitudes.squaredNorm() / n_in;
  if (!(p > 0.0)) throw std::domain_error("post_select_spin: zero-probability branch");
  return Branch{std::move(out), p};
}

}  // namespace sculpt
