#include "uc/jet.hpp"

#include "uc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace uc {

namespace {

std::uint64_t encode(std::span<const int> e) {
  std::uint64_t key = 0;
  for (int v : e) key = key * 16 + static_cast<std::uint64_t>(v);
  return key;
}

void enumerate_degree(int nvars, int d, int var, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (var == nvars - 1) {
    cur[var] = d;
    out.push_back(cur);
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[var] = k;
    enumerate_degree(nvars, d - k, var + 1, cur, out);
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
  std::vector<std::vector<int>> monos;
  prefix_.assign(order + 1, 0);
  for (int d = 0; d <= order; ++d) {
    std::vector<int> cur(std::max(nvars, 1), 0);
    if (nvars == 0) {
      if (d == 0) monos.push_back({});
    } else {
      enumerate_degree(nvars, d, 0, cur, monos);
    }
    prefix_[d] = monos.size();
  }
  size_ = monos.size();
  std::unordered_map<std::uint64_t, std::size_t> index;
  exps_.resize(size_ * nvars_);
  degree_.resize(size_);
  fact_.resize(size_);
  parent_var_.assign(size_, -1);
  parent_.assign(size_, 0);
  for (std::size_t m = 0; m < size_; ++m) {
    int deg = 0;
    double f = 1.0;
    for (int v = 0; v < nvars_; ++v) {
      exps_[m * nvars_ + v] = static_cast<std::uint8_t>(monos[m][v]);
      deg += monos[m][v];
      f *= factorial(monos[m][v]);
    }
    degree_[m] = deg;
    fact_[m] = f;
    index[encode(monos[m])] = m;
  }
  for (std::size_t m = 0; m < size_; ++m) {
    if (degree_[m] == 0) continue;
    std::vector<int> e(monos[m]);
    for (int v = 0; v < nvars_; ++v) {
      if (e[v] > 0) {
        e[v] -= 1;
        parent_var_[m] = v;
        parent_[m] = index.at(encode(e));
        break;
      }
    }
  }
  std::vector<int> sum(nvars_);
  for (std::size_t a = 0; a < size_; ++a) {
    for (std::size_t b = 0; b < size_; ++b) {
      if (degree_[a] + degree_[b] > order_) continue;
      for (int v = 0; v < nvars_; ++v) sum[v] = monos[a][v] + monos[b][v];
      products_.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                           static_cast<std::uint16_t>(index.at(encode(sum)))});
    }
  }
  deriv_.resize(nvars_);
  for (int v = 0; v < nvars_; ++v) {
    for (std::size_t m = 0; m < size_; ++m) {
      if (monos[m][v] == 0) continue;
      std::vector<int> e(monos[m]);
      e[v] -= 1;
      deriv_[v].push_back({static_cast<std::uint16_t>(m),
                           static_cast<std::uint16_t>(index.at(encode(e))),
                           static_cast<double>(monos[m][v])});
    }
  }
}

const JetLayout& JetLayout::get(int nvars, int order) {
  if (nvars < 0 || nvars > kMaxVars || order < 0 || order > kMaxOrder) {
    throw ShapeError("jet layout out of range");
  }
  static std::mutex mu;
  static std::array<std::unique_ptr<JetLayout>, (kMaxVars + 1) * (kMaxOrder + 1)> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[nvars * (kMaxOrder + 1) + order];
  if (!slot) slot.reset(new JetLayout(nvars, order));
  return *slot;
}

long JetLayout::index_of(std::span<const int> exps) const {
  int deg = 0;
  for (int e : exps) deg += e;
  if (deg > order_) return -1;
  for (std::size_t m = prefix(deg > 0 ? deg - 1 : 0) * (deg > 0); m < prefix_[deg]; ++m) {
    bool same = true;
    for (int v = 0; v < nvars_ && same; ++v) same = exps_[m * nvars_ + v] == exps[v];
    if (same) return static_cast<long>(m);
  }
  return -1;
}

Jet::Jet(const JetLayout& layout, double value) : layout_(&layout), c_(layout.size(), 0.0) {
  c_[0] = value;
}

Jet Jet::variable(const JetLayout& layout, int var, double value) {
  Jet j(layout, value);
  if (layout.order() >= 1) j.c_[1 + var] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> alpha) const {
  long idx = layout_->index_of(alpha);
  if (idx < 0) throw ShapeError("partial derivative beyond jet order");
  return c_[idx] * layout_->factorial_weight(idx);
}

double Jet::partial(std::initializer_list<int> alpha) const {
  return partial(std::span<const int>(alpha.begin(), alpha.size()));
}

double Jet::d(int var) const { return c_[1 + var]; }

Jet Jet::truncated(int order) const {
  if (order >= layout_->order()) return *this;
  Jet r(JetLayout::get(layout_->nvars(), order));
  std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
  return r;
}

Jet Jet::rescaled(double s) const {
  Jet r(*this);
  double f = 1.0;
  for (int d = 1; d <= layout_->order(); ++d) {
    f *= s;
    for (std::size_t m = layout_->prefix(d - 1); m < layout_->prefix(d); ++m) r.c_[m] *= f;
  }
  return r;
}

Jet Jet::derivative(int var) const {
  if (layout_->order() == 0) throw ShapeError("derivative of an order-0 jet");
  Jet r(JetLayout::get(layout_->nvars(), layout_->order() - 1));
  for (const auto& t : layout_->derivative(var)) {
    if (t.dst < r.c_.size()) r.c_[t.dst] += t.factor * c_[t.src];
  }
  return r;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

const JetLayout* common(const Jet& a, const Jet& b) {
  if (a.nvars() != b.nvars()) throw ShapeError("jet variable count mismatch");
  return a.order() <= b.order() ? &a.layout() : &b.layout();
}

}  // namespace

Jet& Jet::operator+=(const Jet& o) {
  const JetLayout* l = common(*this, o);
  if (l != layout_) *this = truncated(l->order());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  const JetLayout* l = common(*this, o);
  if (l != layout_) *this = truncated(l->order());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet r(*this);
  for (double& v : r.c_) v = -v;
  return r;
}

void Jet::axpy(double s, const Jet& b) {
  const JetLayout* l = common(*this, b);
  if (l != layout_) *this = truncated(l->order());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * b.c_[i];
}

void Jet::add_product(const Jet& a, const Jet& b) {
  const JetLayout* l = common(a, b);
  if (l->order() < layout_->order()) *this = truncated(l->order());
  l = layout_;
  if (a.order() < l->order() || b.order() < l->order()) {
    *this += a * b;
    return;
  }
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  for (const auto& p : l->products()) c_[p.out] += pa[p.a] * pb[p.b];
}

Jet operator*(const Jet& a, const Jet& b) {
  const JetLayout* l = common(a, b);
  Jet r(*l);
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  double* pr = r.c_.data();
  for (const auto& p : l->products()) pr[p.out] += pa[p.a] * pb[p.b];
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator-(double s, const Jet& a) { return (-a) += s; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) { return a /= s; }
Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }

Jet compose_univariate(const Jet& a, std::span<const double> derivs) {
  const int order = a.order();
  if (static_cast<int>(derivs.size()) < order + 1) {
    throw ShapeError("not enough derivatives for jet composition");
  }
  Jet h(a);
  h[0] = 0.0;
  Jet res(a.layout(), derivs[order] / factorial(order));
  for (int k = order - 1; k >= 0; --k) {
    res = res * h;
    res[0] += derivs[k] / factorial(k);
  }
  return res;
}

namespace {

template <class F>
Jet apply(const Jet& a, F&& kth) {
  std::array<double, JetLayout::kMaxOrder + 1> d{};
  for (int k = 0; k <= a.order(); ++k) d[k] = kth(k);
  return compose_univariate(a, std::span<const double>(d.data(), a.order() + 1));
}

}  // namespace

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return apply(a, [&](int) { return e; });
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("log of a non-positive jet");
  return apply(a, [&](int k) {
    if (k == 0) return std::log(x);
    return ((k % 2) ? 1.0 : -1.0) * factorial(k - 1) / std::pow(x, k);
  });
}

Jet pow(const Jet& a, double p) {
  const double x = a.value();
  if (x <= 0.0 && p != std::floor(p)) throw DomainError("fractional power of a non-positive jet");
  return apply(a, [&](int k) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) c *= (p - i);
    return c == 0.0 ? 0.0 : c * std::pow(x, p - k);
  });
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw DomainError("sqrt of a non-positive jet");
  return pow(a, 0.5);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return apply(a, [&](int k) {
    switch (k % 4) {
      case 0: return s;
      case 1: return c;
      case 2: return -s;
      default: return -c;
    }
  });
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return apply(a, [&](int k) {
    switch (k % 4) {
      case 0: return c;
      case 1: return -s;
      case 2: return -c;
      default: return s;
    }
  });
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw DomainError("reciprocal of a zero jet");
  return apply(a, [&](int k) {
    return ((k % 2) ? -1.0 : 1.0) * factorial(k) / std::pow(x, k + 1);
  });
}

std::vector<Jet> compose(std::span<const Jet> polys, std::span<const Jet> z) {
  std::vector<Jet> out;
  if (polys.empty()) return out;
  if (z.empty()) throw ShapeError("compose with no arguments");
  const JetLayout& pl = polys[0].layout();
  if (pl.nvars() != static_cast<int>(z.size())) throw ShapeError("compose arity mismatch");
  const JetLayout& zl = z[0].layout();
  for (const Jet& zi : z) {
    if (&zi.layout() != &zl) throw ShapeError("compose arguments on different layouts");
  }
  const int top = std::min(pl.order(), zl.order());
  const std::size_t count = pl.prefix(top);
  std::vector<Jet> shifted(z.begin(), z.end());
  for (Jet& s : shifted) s[0] = 0.0;
  std::vector<Jet> mono;
  mono.reserve(count);
  mono.emplace_back(zl, 1.0);
  for (std::size_t m = 1; m < count; ++m) {
    mono.push_back(mono[pl.parent(m)] * shifted[pl.parent_var(m)]);
  }
  out.reserve(polys.size());
  for (const Jet& p : polys) {
    if (&p.layout() != &pl) throw ShapeError("compose polynomials on different layouts");
    Jet r(zl);
    for (std::size_t m = 0; m < count; ++m) {
      if (p[m] != 0.0) r.axpy(p[m], mono[m]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

Jet compose(const Jet& poly, std::span<const Jet> z) {
  return compose(std::span<const Jet>(&poly, 1), z).front();
}

std::vector<Jet> variables(std::span<const double> p, int order) {
  return variables(JetLayout::get(static_cast<int>(p.size()), order), p);
}

std::vector<Jet> variables(const JetLayout& layout, std::span<const double> p) {
  if (static_cast<int>(p.size()) > layout.nvars()) throw ShapeError("too many variables for layout");
  std::vector<Jet> v;
  v.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) v.push_back(Jet::variable(layout, static_cast<int>(i), p[i]));
  return v;
}

}  // namespace uc
