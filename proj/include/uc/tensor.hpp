#pragma once

#include "uc/error.hpp"
#include "uc/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace uc {

enum class Variance : std::uint8_t { upper, lower };

inline double zero_like(double) { return 0.0; }
inline Jet zero_like(const Jet& x) { return Jet(x.layout()); }
inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

// Dense tensor over a dim-dimensional space with per-slot variance,
// stored row-major with the first slot slowest.
template <class T>
class BasicTensor {
 public:
  BasicTensor() = default;
  BasicTensor(int dim, std::vector<Variance> variance, const T& fill)
      : dim_(dim), variance_(std::move(variance)) {
    if (dim < 1) throw ShapeError("tensor dimension must be positive");
    std::size_t n = 1;
    for (std::size_t s = 0; s < variance_.size(); ++s) n *= static_cast<std::size_t>(dim_);
    data_.assign(n, fill);
  }
  BasicTensor(int dim, std::vector<Variance> variance)
    requires std::is_arithmetic_v<T>
      : BasicTensor(dim, std::move(variance), T{}) {}

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(variance_.size()); }
  const std::vector<Variance>& variance() const { return variance_; }
  std::size_t size() const { return data_.size(); }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  std::size_t offset(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw ShapeError("index count does not match rank");
    std::size_t o = 0;
    for (int i : idx) {
      if (i < 0 || i >= dim_) throw ShapeError("tensor index out of range");
      o = o * dim_ + static_cast<std::size_t>(i);
    }
    return o;
  }
  T& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[offset(idx)]; }

  template <class... I>
  T& operator()(I... i) {
    const int idx[] = {static_cast<int>(i)...};
    return at(std::span<const int>(idx, sizeof...(I)));
  }
  template <class... I>
  const T& operator()(I... i) const {
    const int idx[] = {static_cast<int>(i)...};
    return at(std::span<const int>(idx, sizeof...(I)));
  }

 private:
  int dim_ = 0;
  std::vector<Variance> variance_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<double>;

inline std::vector<Variance> lower_slots(int rank) { return std::vector<Variance>(rank, Variance::lower); }

// Decodes a flat offset into a multi-index.
inline void unflatten(std::size_t off, int dim, std::span<int> idx) {
  for (int s = static_cast<int>(idx.size()) - 1; s >= 0; --s) {
    idx[s] = static_cast<int>(off % dim);
    off /= dim;
  }
}

template <class T>
void require_same_shape(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.dim() != b.dim() || a.variance() != b.variance()) throw ShapeError("tensor shape mismatch");
}

template <class T>
BasicTensor<T> operator+(BasicTensor<T> a, const BasicTensor<T>& b) {
  require_same_shape(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += b.data()[i];
  return a;
}

template <class T>
BasicTensor<T> operator-(BasicTensor<T> a, const BasicTensor<T>& b) {
  require_same_shape(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] -= b.data()[i];
  return a;
}

template <class T>
BasicTensor<T> operator*(double s, BasicTensor<T> a) {
  for (auto& v : a.data()) v *= s;
  return a;
}

template <class T>
BasicTensor<T> tensor_product(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.dim() != b.dim()) throw ShapeError("tensor product of different dimensions");
  std::vector<Variance> v(a.variance());
  v.insert(v.end(), b.variance().begin(), b.variance().end());
  BasicTensor<T> r(a.dim(), v, zero_like(a.data().front()));
  std::size_t k = 0;
  for (const auto& x : a.data()) {
    for (const auto& y : b.data()) r.data()[k++] = x * y;
  }
  return r;
}

// Trace over one upper and one lower slot.
template <class T>
BasicTensor<T> contract(const BasicTensor<T>& t, int s1, int s2) {
  if (s1 == s2 || s1 < 0 || s2 < 0 || s1 >= t.rank() || s2 >= t.rank()) {
    throw ShapeError("invalid contraction slots");
  }
  if (t.variance()[s1] == t.variance()[s2]) throw ShapeError("contraction needs one upper and one lower slot");
  const int n = t.dim();
  std::vector<Variance> v;
  for (int s = 0; s < t.rank(); ++s) {
    if (s != s1 && s != s2) v.push_back(t.variance()[s]);
  }
  const T zero = zero_like(t.data().front());
  BasicTensor<T> r(n, v, zero);
  std::vector<int> ridx(v.size()), full(t.rank());
  for (std::size_t o = 0; o < r.size(); ++o) {
    unflatten(o, n, ridx);
    for (int s = 0, k = 0; s < t.rank(); ++s) {
      if (s != s1 && s != s2) full[s] = ridx[k++];
    }
    T acc = zero;
    for (int i = 0; i < n; ++i) {
      full[s1] = i;
      full[s2] = i;
      acc += t.at(full);
    }
    r.data()[o] = acc;
  }
  return r;
}

// Contracts slot `slot` of t with the first index of the rank-2 tensor m,
// keeping the slot position: r_{..b..} = t_{..a..} m_{ab}.
template <class T, class M>
BasicTensor<T> apply_matrix(const BasicTensor<T>& t, int slot, const BasicTensor<M>& m, Variance result) {
  if (slot < 0 || slot >= t.rank()) throw ShapeError("slot out of range");
  if (m.rank() != 2 || m.dim() != t.dim()) throw ShapeError("expected a rank-2 tensor of matching dimension");
  const int n = t.dim();
  std::vector<Variance> v(t.variance());
  v[slot] = result;
  const T zero = zero_like(t.data().front());
  BasicTensor<T> r(n, v, zero);
  std::vector<int> idx(t.rank());
  for (std::size_t o = 0; o < r.size(); ++o) {
    unflatten(o, n, idx);
    const int b = idx[slot];
    T acc = zero;
    for (int a = 0; a < n; ++a) {
      idx[slot] = a;
      acc += t.at(idx) * m(a, b);
    }
    r.data()[o] = acc;
  }
  return r;
}

template <class T, class M>
BasicTensor<T> raise(const BasicTensor<T>& t, int slot, const BasicTensor<M>& g_inv) {
  if (t.variance().at(slot) != Variance::lower) throw ShapeError("raise needs a lower slot");
  return apply_matrix(t, slot, g_inv, Variance::upper);
}

template <class T, class M>
BasicTensor<T> lower(const BasicTensor<T>& t, int slot, const BasicTensor<M>& g) {
  if (t.variance().at(slot) != Variance::upper) throw ShapeError("lower needs an upper slot");
  return apply_matrix(t, slot, g, Variance::lower);
}

// r(i_0..i_k) = t(i_perm[0] .. ) i.e. slot s of r is slot perm[s] of t.
template <class T>
BasicTensor<T> permute(const BasicTensor<T>& t, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != t.rank()) throw ShapeError("permutation size mismatch");
  std::vector<Variance> v(t.rank());
  for (int s = 0; s < t.rank(); ++s) v[s] = t.variance()[perm[s]];
  BasicTensor<T> r(t.dim(), v, zero_like(t.data().front()));
  std::vector<int> ridx(t.rank()), tidx(t.rank());
  for (std::size_t o = 0; o < r.size(); ++o) {
    unflatten(o, t.dim(), ridx);
    for (int s = 0; s < t.rank(); ++s) tidx[perm[s]] = ridx[s];
    r.data()[o] = t.at(tidx);
  }
  return r;
}

template <class T>
double sup_norm(const BasicTensor<T>& t) {
  double m = 0.0;
  for (const auto& v : t.data()) m = std::max(m, std::abs(value_of(v)));
  return m;
}

Tensor values(const BasicTensor<Jet>& t);

// Metric at a point together with its inverse.
class MetricAtPoint {
 public:
  // Throws DomainError unless g is symmetric positive definite.
  explicit MetricAtPoint(Tensor g);
  static MetricAtPoint euclidean(int dim);

  int dim() const { return g_.dim(); }
  const Tensor& g() const { return g_; }
  const Tensor& g_inv() const { return g_inv_; }
  double inner(std::span<const double> u, std::span<const double> v) const;

 private:
  Tensor g_;
  Tensor g_inv_;
};

// Components in a frame: lower slots pair with frame vectors e_i = frame[i],
// upper slots with the dual covectors.
Tensor frame_components(const Tensor& t, std::span<const std::vector<double>> frame);

struct RiemannSymmetryDefects {
  double antisym_first;   // R_abcd + R_bacd
  double antisym_second;  // R_abcd + R_abdc
  double pair;            // R_abcd - R_cdab
  double bianchi;         // R_abcd + R_bcad + R_cabd
  double max() const { return std::max({antisym_first, antisym_second, pair, bianchi}); }
};
RiemannSymmetryDefects riemann_symmetry_defects(const Tensor& r);

// Solves a small dense system by Gauss-Jordan elimination with partial
// pivoting on the value parts; works for doubles and jets.
template <class T>
std::vector<T> invert_matrix(std::vector<T> a, int n) {
  std::vector<T> inv(a.size(), zero_like(a[0]));
  for (int i = 0; i < n; ++i) inv[i * n + i] += 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(value_of(a[r * n + c])) > std::abs(value_of(a[piv * n + c]))) piv = r;
    }
    if (value_of(a[piv * n + c]) == 0.0) throw DomainError("singular matrix");
    if (piv != c) {
      for (int k = 0; k < n; ++k) {
        std::swap(a[c * n + k], a[piv * n + k]);
        std::swap(inv[c * n + k], inv[piv * n + k]);
      }
    }
    const T p = 1.0 / a[c * n + c];
    for (int k = 0; k < n; ++k) {
      a[c * n + k] = a[c * n + k] * p;
      inv[c * n + k] = inv[c * n + k] * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const T f = a[r * n + c];
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

}  // namespace uc
