#pragma once

#include <boost/container/small_vector.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace uc {

// Monomial bookkeeping for truncated multivariate Taylor polynomials.
// Monomials are ordered by total degree first, so the layout of a lower
// order is a prefix of the layout of a higher one.
class JetLayout {
 public:
  struct Product {
    std::uint16_t a;
    std::uint16_t b;
    std::uint16_t out;
  };
  struct DerivTerm {
    std::uint16_t src;
    std::uint16_t dst;
    double factor;
  };

  static constexpr int kMaxVars = 8;
  static constexpr int kMaxOrder = 8;

  static const JetLayout& get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return size_; }
  int degree(std::size_t idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exps_.data() + idx * nvars_, static_cast<std::size_t>(nvars_)};
  }
  // Index of a monomial, or -1 if its degree exceeds the order.
  long index_of(std::span<const int> exps) const;
  // Number of monomials of degree <= d.
  std::size_t prefix(int d) const { return prefix_[d]; }
  // prod_i alpha_i! for the monomial at idx.
  double factorial_weight(std::size_t idx) const { return fact_[idx]; }

  const std::vector<Product>& products() const { return products_; }
  const std::vector<DerivTerm>& derivative(int var) const { return deriv_[var]; }
  // For degree >= 1: a variable dividing the monomial and the index of the quotient.
  int parent_var(std::size_t idx) const { return parent_var_[idx]; }
  std::size_t parent(std::size_t idx) const { return parent_[idx]; }

 private:
  JetLayout(int nvars, int order);
  int nvars_;
  int order_;
  std::size_t size_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> prefix_;
  std::vector<double> fact_;
  std::vector<Product> products_;
  std::vector<std::vector<DerivTerm>> deriv_;
  std::vector<int> parent_var_;
  std::vector<std::size_t> parent_;
};

// Truncated Taylor polynomial sum_alpha c_alpha h^alpha around a base point.
class Jet {
 public:
  using Storage = boost::container::small_vector<double, 35>;

  Jet() = default;
  explicit Jet(const JetLayout& layout, double value = 0.0);
  static Jet variable(const JetLayout& layout, int var, double value);

  const JetLayout& layout() const { return *layout_; }
  bool empty() const { return layout_ == nullptr; }
  int order() const { return layout_->order(); }
  int nvars() const { return layout_->nvars(); }
  std::size_t size() const { return c_.size(); }

  double value() const { return c_[0]; }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  std::span<const double> coefficients() const { return {c_.data(), c_.size()}; }

  // Coordinate partial derivative at the base point, d^|alpha| f / dx^alpha.
  double partial(std::span<const int> alpha) const;
  double partial(std::initializer_list<int> alpha) const;
  // First partial along one variable at the base point.
  double d(int var) const;

  Jet truncated(int order) const;
  // Multiplies degree-d coefficients by s^d, i.e. f(s h).
  Jet rescaled(double s) const;
  // Exact derivative; the result has order one less.
  Jet derivative(int var) const;
  double max_abs() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);
  Jet& operator/=(double s) { return *this *= (1.0 / s); }
  Jet operator-() const;

  // a += s * b, without temporaries.
  void axpy(double s, const Jet& b);
  // this += a * b (truncated product).
  void add_product(const Jet& a, const Jet& b);

 private:
  friend Jet operator*(const Jet&, const Jet&);
  const JetLayout* layout_ = nullptr;
  Storage c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);

// f(a) for scalar f given f^(k)(a0), k = 0..order.
Jet compose_univariate(const Jet& a, std::span<const double> derivs);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet reciprocal(const Jet& a);

// P(z) where P is a jet in z.size() variables and z are jets whose values
// are taken as offsets from P's base point (value parts are ignored).
Jet compose(const Jet& poly, std::span<const Jet> z);
// Same for a batch of polynomials sharing the same monomial powers.
std::vector<Jet> compose(std::span<const Jet> polys, std::span<const Jet> z);

// Independent variables x_i = p_i + h_i on a layout with p.size() vars.
std::vector<Jet> variables(std::span<const double> p, int order);
// Variables on a given layout (nvars may exceed p.size()).
std::vector<Jet> variables(const JetLayout& layout, std::span<const double> p);

}  // namespace uc
