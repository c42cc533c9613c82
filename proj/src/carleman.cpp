#include "uc/carleman.hpp"

#include "uc/parallel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace uc {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr int kOuterParts = 4;

template <int N>
std::vector<std::pair<double, double>> gauss_nodes() {
  using G = boost::math::quadrature::gauss<double, N>;
  std::vector<std::pair<double, double>> out;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      out.emplace_back(0.0, w[i]);
    } else {
      out.emplace_back(-a[i], w[i]);
      out.emplace_back(a[i], w[i]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Gauss-Legendre rule on [-1, 1].
const std::vector<std::pair<double, double>>& gauss_rule(int m) {
  static const std::map<int, std::vector<std::pair<double, double>>> rules = {
      {2, gauss_nodes<2>()},   {4, gauss_nodes<4>()},   {6, gauss_nodes<6>()},   {8, gauss_nodes<8>()},   {12, gauss_nodes<12>()}, {16, gauss_nodes<16>()},
      {20, gauss_nodes<20>()}, {24, gauss_nodes<24>()}, {32, gauss_nodes<32>()}, {40, gauss_nodes<40>()},
      {48, gauss_nodes<48>()}, {64, gauss_nodes<64>()}};
  auto it = rules.find(m);
  if (it == rules.end()) throw ConfigError(fmt::format("unsupported Gauss order {}", m));
  return it->second;
}

std::vector<std::pair<Point, double>> circle_rule(int m) {
  std::vector<std::pair<Point, double>> out;
  const int k = 2 * m;
  for (int i = 0; i < k; ++i) {
    const double t = 2.0 * kPi * (i + 0.5) / k;
    out.push_back({{std::cos(t), std::sin(t)}, 2.0 * kPi / k});
  }
  return out;
}

std::vector<std::pair<Point, double>> sphere2_rule(int m) {
  std::vector<std::pair<Point, double>> out;
  const auto& g = gauss_rule(m);
  const int k = 2 * m;
  for (const auto& [t, w] : g) {
    const double s = std::sqrt(1.0 - t * t);
    for (int i = 0; i < k; ++i) {
      const double a = 2.0 * kPi * (i + 0.5) / k;
      out.push_back({{s * std::cos(a), s * std::sin(a), t}, w * 2.0 * kPi / k});
    }
  }
  return out;
}

// S^3 as (t, sqrt(1 - t^2) w) with w on S^2; the measure is sqrt(1 - t^2) dt dw,
// integrated exactly in t by the Chebyshev rule of the second kind.
std::vector<std::pair<Point, double>> sphere3_rule(int m) {
  std::vector<std::pair<Point, double>> out;
  const auto s2 = sphere2_rule(m);
  for (int i = 1; i <= m; ++i) {
    const double th = kPi * i / (m + 1);
    const double t = std::cos(th), s = std::sin(th);
    const double w = kPi / (m + 1) * s * s;
    for (const auto& [p, ws] : s2) out.push_back({{t, s * p[0], s * p[1], s * p[2]}, w * ws});
  }
  return out;
}

std::vector<std::pair<Point, double>> sphere_mc_rule(int n, int count, std::uint64_t seed, double& error) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::pair<Point, double>> out;
  const double w = sphere_area(n) / count;
  for (int i = 0; i < count; ++i) {
    Point p(n);
    double s = 0.0;
    for (double& c : p) {
      c = g(rng);
      s += c * c;
    }
    s = std::sqrt(s);
    for (double& c : p) c /= s;
    out.push_back({std::move(p), w});
  }
  error = 1.0 / std::sqrt(static_cast<double>(count));
  return out;
}

Jet radius_jet(std::span<const Jet> x) {
  Jet s = x[0] * x[0];
  for (std::size_t a = 1; a < x.size(); ++a) s += x[a] * x[a];
  return sqrt(s);
}

double radius_value(std::span<const Jet> x) {
  double s = 0.0;
  for (const Jet& c : x) s += c.value() * c.value();
  return std::sqrt(s);
}

// log |r-hat^{-lambda} base^lambda r^e u|^s + log w per node, with the core flag.
template <class F>
void for_each_log_term(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                       const WeightedNormOptions& opt, F&& f) {
  if (values.size() != grid.size()) throw ShapeError("field does not match the grid");
  const double lb = opt.weight_base == 1.0 ? 0.0 : std::log(opt.weight_base);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = values[i];
    if (v == 0.0) continue;
    const double r = grid.r(i);
    double l = -lambda.value * std::log(hat_r(r, opt.delta)) + lambda.value * lb + std::log(std::abs(v));
    if (opt.extra_power != 0.0) l += opt.extra_power * std::log(r);
    f(i, opt.exponent * l + std::log(grid.weight(i)));
  }
}

struct LogSum {
  double total = -std::numeric_limits<double>::infinity();
  double core = -std::numeric_limits<double>::infinity();
};

LogSum log_sums(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                const WeightedNormOptions& opt) {
  // Two passes: find the maximum, then sum shifted exponentials.
  double mx = -std::numeric_limits<double>::infinity();
  for_each_log_term(values, grid, lambda, opt, [&](std::size_t, double l) { mx = std::max(mx, l); });
  LogSum s;
  if (mx == -std::numeric_limits<double>::infinity()) return s;
  double tot = 0.0, core = 0.0;
  const int cs = grid.has_core() ? grid.core_shell() : -1;
  for_each_log_term(values, grid, lambda, opt, [&](std::size_t i, double l) {
    const double e = std::exp(l - mx);
    tot += e;
    if (grid.shell(i) == cs) core += e;
  });
  s.total = mx + std::log(tot);
  if (core > 0.0) s.core = mx + std::log(core);
  return s;
}

}  // namespace

void CarlemanParams::validate() const {
  if (n < 3) throw ConfigError("the Carleman estimates need n >= 3");
  if (!(delta > 0.0 && delta < 2.0 / n)) throw ConfigError(fmt::format("delta = {} must lie in (0, 2/n)", delta));
  if (!(R > 0.0 && R < R0)) throw ConfigError(fmt::format("R = {} must lie in (0, R0 = {})", R, R0));
  if (!(R0 <= hat_r_monotone_limit(delta))) {
    throw ConfigError(fmt::format("R0 = {} exceeds the monotone range {} of r-hat", R0, hat_r_monotone_limit(delta)));
  }
}

double CarlemanParams::absorption_factor() const {
  const double rd = std::pow(R, delta);
  return rd / (1.0 - rd);
}

double hat_r(double r, double delta) {
  if (!(r >= 0.0) || r >= 1.0) throw DomainError(fmt::format("hat_r needs 0 <= r < 1, got {}", r));
  return r * (1.0 - std::pow(r, delta));
}

double hat_r_monotone_limit(double delta) { return std::pow(1.0 + delta, -1.0 / delta); }

bool lambda_admissible(double lambda, int n) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double shift = 0.5 * (n - 2);
  const double k0 = std::max(1.0, std::round(lambda - shift));
  for (double k = std::max(1.0, k0 - 1.0); k <= k0 + 1.0; k += 1.0) {
    if (std::abs(lambda - (k + shift)) < 0.5 - 1e-12) return false;
  }
  return true;
}

LebesgueExponents lebesgue_exponents(int n) {
  if (n < 3) throw DomainError("the exponents need n >= 3");
  return {2.0 * n / (n + 2.0), 2.0 * n / (n - 2.0)};
}

Bump::Bump(double inner) : inner_(inner) {
  if (!(inner >= 0.0 && inner < 1.0)) throw DomainError("bump plateau radius must lie in [0, 1)");
}

double Bump::profile(double rho) const {
  if (rho <= inner_) return 1.0;
  if (rho >= 1.0) return 0.0;
  const double t = (rho - inner_) / (1.0 - inner_);
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

Jet Bump::operator()(std::span<const Jet> x) const {
  const JetLayout& l = x[0].layout();
  const double rho = radius_value(x);
  if (rho <= inner_) return Jet(l, 1.0);
  if (rho >= 1.0) return Jet(l, 0.0);
  Jet t = (radius_jet(x) - inner_) / (1.0 - inner_);
  return exp(1.0 - reciprocal(1.0 - t * t));
}

Jet Bump::scaled(std::span<const Jet> x, double s) const {
  std::vector<Jet> y(x.begin(), x.end());
  for (Jet& c : y) c /= s;
  return (*this)(y);
}

Jet cutoff_chi(const Bump& phi, int k, std::span<const Jet> x) {
  if (k < 0) throw DomainError("cutoff index must be nonnegative");
  return 1.0 - phi.scaled(x, std::ldexp(1.0, -k));
}

double cutoff_chi(const Bump& phi, int k, std::span<const double> x) {
  if (k < 0) throw DomainError("cutoff index must be nonnegative");
  double s = 0.0;
  for (double c : x) s += c * c;
  return 1.0 - phi.profile(std::ldexp(std::sqrt(s), k));
}

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / boost::math::tgamma(0.5 * n); }

double ball_volume(int n, double R) { return sphere_area(n) * std::pow(R, n) / n; }

QuadratureGrid QuadratureGrid::ball(int n, double R, int levels, int radial_nodes, int sphere_order,
                                    std::uint64_t seed) {
  if (n < 2) throw DomainError("grid dimension must be >= 2");
  if (!(R > 0.0 && R < 1.0)) throw DomainError("ball radius must lie in (0, 1)");
  if (levels < 0) throw DomainError("negative level count");
  QuadratureGrid g;
  g.n_ = n;
  g.inner_ = 0.0;
  g.outer_ = R;
  g.levels_ = levels;
  g.radial_nodes_ = radial_nodes;
  g.sphere_order_ = sphere_order;
  g.seed_ = seed;
  g.has_core_ = true;
  g.build();
  return g;
}

QuadratureGrid QuadratureGrid::annulus(int n, double a, double b, int pieces, int radial_nodes, int sphere_order,
                                       std::uint64_t seed) {
  if (n < 2) throw DomainError("grid dimension must be >= 2");
  if (!(a > 0.0 && b > a && b < 1.0)) throw DomainError("annulus needs 0 < a < b < 1");
  if (pieces < 1) throw DomainError("annulus needs at least one piece");
  QuadratureGrid g;
  g.n_ = n;
  g.inner_ = a;
  g.outer_ = b;
  g.pieces_ = pieces;
  g.radial_nodes_ = radial_nodes;
  g.sphere_order_ = sphere_order;
  g.seed_ = seed;
  g.has_core_ = false;
  g.build();
  return g;
}

QuadratureGrid QuadratureGrid::refined() const {
  QuadratureGrid g(*this);
  g.radial_nodes_ = std::min(64, 2 * radial_nodes_);
  g.sphere_order_ = sphere_order_ == 0 ? 0 : std::min(64, 2 * sphere_order_);
  g.seed_ = seed_ + 1;
  g.build();
  return g;
}

void QuadratureGrid::build() {
  const auto& gl = gauss_rule(radial_nodes_);
  struct Interval {
    double a, b;
    int shell;
  };
  std::vector<Interval> intervals;  // outermost first
  if (has_core_) {
    // The outermost shell is split further: cutoffs supported in B_R are flat
    // to infinite order at R, which slows Gauss convergence there.
    double hi = outer_;
    for (int j = 0; j < levels_; ++j) {
      const int parts = j == 0 ? kOuterParts : 1;
      const double step = 0.5 * hi / parts;
      for (int q = parts - 1; q >= 0; --q) intervals.push_back({0.5 * hi + q * step, 0.5 * hi + (q + 1) * step, j});
      hi *= 0.5;
    }
    intervals.push_back({0.0, hi, levels_});
    shells_ = levels_ + 1;
  } else {
    const double step = (outer_ - inner_) / pieces_;
    for (int j = pieces_ - 1; j >= 0; --j) {
      intervals.push_back({inner_ + j * step, inner_ + (j + 1) * step, pieces_ - 1 - j});
    }
    shells_ = pieces_;
  }
  radial_.clear();
  radial_shell_.clear();
  for (const auto& iv : intervals) {
    const double half = 0.5 * (iv.b - iv.a), mid = 0.5 * (iv.a + iv.b);
    for (const auto& [t, w] : gl) {
      radial_.emplace_back(mid + half * t, half * w);
      radial_shell_.push_back(iv.shell);
    }
  }
  sphere_error_ = 0.0;
  if (sphere_order_ == 0) {
    Point e(n_, 0.0);
    e[0] = 1.0;
    sphere_ = {{e, sphere_area(n_)}};
  } else if (n_ == 2) {
    sphere_ = circle_rule(sphere_order_);
  } else if (n_ == 3) {
    sphere_ = sphere2_rule(sphere_order_);
  } else if (n_ == 4) {
    sphere_ = sphere3_rule(sphere_order_);
  } else {
    sphere_ = sphere_mc_rule(n_, 64 * sphere_order_ * sphere_order_, seed_, sphere_error_);
  }
  const std::size_t count = radial_.size() * sphere_.size();
  x_.assign(count * n_, 0.0);
  r_.resize(count);
  w_.resize(count);
  shell_.resize(count);
  std::size_t i = 0;
  for (std::size_t k = 0; k < radial_.size(); ++k) {
    const auto [r, wr] = radial_[k];
    const double vol = wr * std::pow(r, n_ - 1);
    for (const auto& [p, ws] : sphere_) {
      for (int a = 0; a < n_; ++a) x_[i * n_ + a] = r * p[a];
      r_[i] = r;
      w_[i] = vol * ws;
      shell_[i] = radial_shell_[k];
      ++i;
    }
  }
}

FieldSamples sample(const TestFunction& f, const QuadratureGrid& grid) {
  const int n = grid.dim();
  FieldSamples s;
  const std::size_t m = grid.size();
  s.u.resize(m);
  s.grad_norm.resize(m);
  s.radial.resize(m);
  s.y.resize(m);
  s.laplacian.resize(m);
  const DiffBackend exact = DiffBackend::analytic();
  for (std::size_t i = 0; i < m; ++i) {
    auto p = grid.point(i);
    const double r = grid.r(i);
    if (r >= f.support_radius || r <= f.inner_radius) {
      s.u[i] = s.grad_norm[i] = s.radial[i] = s.y[i] = s.laplacian[i] = 0.0;
      continue;
    }
    Jet j = taylor_expand(f.fn, p, 2, exact);
    s.u[i] = j.value();
    double g2 = 0.0, dr = 0.0, lap = 0.0;
    for (int a = 0; a < n; ++a) {
      const double d = j.d(a);
      g2 += d * d;
      dr += d * p[a] / r;
      int alpha[JetLayout::kMaxVars] = {};
      alpha[a] = 2;
      lap += j.partial(std::span<const int>(alpha, n));
    }
    s.grad_norm[i] = std::sqrt(g2);
    s.radial[i] = dr;
    s.y[i] = r * dr;
    s.laplacian[i] = lap;
  }
  return s;
}

double log_weighted_norm(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                         const WeightedNormOptions& opt) {
  LogSum s = log_sums(values, grid, lambda, opt);
  if (s.total == -std::numeric_limits<double>::infinity()) return s.total;
  const double share = std::exp(s.core - s.total);
  if (share > opt.core_fraction) {
    throw NumericalError(fmt::format("quadrature unresolved near origin: core shell carries {:.3g} of the norm "
                                     "at lambda = {}",
                                     share, lambda.value));
  }
  return s.total / opt.exponent;
}

double weighted_norm(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                     const WeightedNormOptions& opt) {
  const double l = log_weighted_norm(values, grid, lambda, opt);
  if (l > std::log(std::numeric_limits<double>::max())) throw NumericalError("weighted norm overflows a double");
  return std::exp(l);
}

double core_share(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                  const WeightedNormOptions& opt) {
  LogSum s = log_sums(values, grid, lambda, opt);
  if (s.total == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(s.core - s.total);
}

int levels_for(const TestFunction& f, const CarlemanParams& cp, CarlemanLambda lambda, double target,
               int min_levels, int max_levels, double exponent) {
  WeightedNormOptions opt;
  opt.delta = cp.delta;
  opt.exponent = exponent;
  for (int levels = min_levels; levels < max_levels; levels += 2) {
    QuadratureGrid g = QuadratureGrid::ball(cp.n, cp.R, levels, 16, f.radial ? 0 : 4);
    FieldSamples s = sample(f, g);
    if (core_share(s.u, g, lambda, opt) < target && core_share(s.y, g, lambda, opt) < target) return levels;
  }
  return max_levels;
}

Lemma2Report lemma2_verify(const TestFunction& u, std::span<const double> lambdas, const CarlemanParams& cp,
                           double declared_constant, int jobs) {
  cp.validate();
  if (u.support_radius > cp.R * (1.0 + 1e-12)) throw DomainError("test function is not supported in B_R");
  for (double l : lambdas) {
    if (!(l > cp.n)) throw DomainError(fmt::format("the weighted L2 estimate needs lambda > n, got {}", l));
  }
  Lemma2Report rep;
  rep.function = u.name;
  rep.rows.resize(lambdas.size());
  std::vector<int> levels(lambdas.size());
  parallel_for(lambdas.size(), jobs, [&](std::size_t i) { levels[i] = levels_for(u, cp, CarlemanLambda(lambdas[i])); });
  std::map<int, std::pair<QuadratureGrid, FieldSamples>> cache;
  for (int lv : levels) {
    if (cache.count(lv)) continue;
    QuadratureGrid g = QuadratureGrid::ball(cp.n, cp.R, lv, 16, u.radial ? 0 : 12);
    FieldSamples s = sample(u, g);
    cache.emplace(lv, std::make_pair(std::move(g), std::move(s)));
  }
  WeightedNormOptions opt;
  opt.delta = cp.delta;
  parallel_for(lambdas.size(), jobs, [&](std::size_t i) {
    const auto& [g, s] = cache.at(levels[i]);
    Lemma2Row& row = rep.rows[i];
    row.lambda = lambdas[i];
    row.levels = levels[i];
    row.lhs = weighted_norm(s.u, g, CarlemanLambda(row.lambda), opt);
    row.rhs = weighted_norm(s.y, g, CarlemanLambda(row.lambda), opt);
    row.vacuous = row.lhs == 0.0 && row.rhs == 0.0;
    row.ratio = row.vacuous ? 0.0 : row.lambda * row.lhs / row.rhs;
  });
  for (const auto& row : rep.rows) rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
  rep.measured_constant = 1.1 * rep.sup_ratio;
  rep.holds = rep.sup_ratio <= declared_constant;
  return rep;
}

ByPartsCheck lemma2_by_parts(const TestFunction& u, CarlemanLambda lambda, const CarlemanParams& cp, int levels) {
  const int n = cp.n;
  const double lam = lambda.value, d = cp.delta;
  if (!(2.0 * lam > n)) throw DomainError("integration by parts needs 2 lambda > n");
  QuadratureGrid g = QuadratureGrid::ball(n, cp.R, levels, 32, u.radial ? 0 : 16);
  FieldSamples s = sample(u, g);
  // Terms as (sign, log magnitude) so large weights do not overflow.
  std::vector<double> ld, lb1, lb2;
  std::vector<int> sb1;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (s.u[i] == 0.0) continue;
    const double r = g.r(i), rd = std::pow(r, d), lw = std::log(g.weight(i));
    const double lu = std::log(std::abs(s.u[i]));
    const double lhat = -2.0 * lam * std::log(hat_r(r, d));
    ld.push_back(lhat + 2.0 * lu + lw);
    if (s.radial[i] != 0.0) {
      // (1-r^d)^{-2 lambda} u d_r u r^{n - 2 lambda} = r-hat^{-2 lambda} u d_r u r^n, and w carries r^{n-1}.
      lb1.push_back(std::log(2.0 / (2.0 * lam - n)) + lhat + lu + std::log(std::abs(s.radial[i])) + std::log(r) + lw);
      sb1.push_back((s.u[i] * s.radial[i] > 0.0) ? 1 : -1);
    }
    lb2.push_back(std::log(2.0 * lam * d / (2.0 * lam - n)) + std::log(rd / (1.0 - rd)) + lhat + 2.0 * lu + lw);
  }
  ByPartsCheck out;
  if (ld.empty()) return out;
  const double mx = *std::max_element(ld.begin(), ld.end());
  double direct = 0.0, bp = 0.0;
  for (double l : ld) direct += std::exp(l - mx);
  for (std::size_t i = 0; i < lb1.size(); ++i) bp += sb1[i] * std::exp(lb1[i] - mx);
  for (double l : lb2) bp += std::exp(l - mx);
  out.relative_error = std::abs(direct - bp) / direct;
  // Report both in the same units as the norm squared when representable.
  out.direct = std::exp(std::min(mx, 700.0)) * direct;
  out.by_parts = std::exp(std::min(mx, 700.0)) * bp;
  return out;
}

SoggeReport sogge_probe(const TestFunction& u, std::span<const double> lambdas, const CarlemanParams& cp, int jobs) {
  cp.validate();
  if (u.support_radius > cp.R * (1.0 + 1e-12)) throw DomainError("test function is not supported in B_R");
  if (!(u.inner_radius > 0.0)) throw DomainError("the probe needs a function vanishing near the origin");
  const LebesgueExponents pq = lebesgue_exponents(cp.n);
  QuadratureGrid g = QuadratureGrid::annulus(cp.n, u.inner_radius, u.support_radius, 8, 16, u.radial ? 0 : 12);
  FieldSamples s = sample(u, g);
  SoggeReport rep;
  rep.function = u.name;
  rep.rows.resize(lambdas.size());
  parallel_for(lambdas.size(), jobs, [&](std::size_t i) {
    SoggeRow& row = rep.rows[i];
    row.lambda = lambdas[i];
    row.admissible = lambda_admissible(row.lambda, cp.n);
    if (!row.admissible) {
      row.skipped = fmt::format("lambda = {} is within 1/2 of the lattice k + {}", row.lambda, 0.5 * (cp.n - 2));
      return;
    }
    const CarlemanLambda lam(row.lambda);
    WeightedNormOptions oq;
    oq.delta = cp.delta;
    oq.exponent = pq.q;
    oq.core_fraction = 1.0;
    const double lu = log_weighted_norm(s.u, g, lam, oq);
    WeightedNormOptions og = oq;
    og.extra_power = -1.0 + 0.5 * cp.delta;
    const double lg = std::log(row.lambda) / cp.n + log_weighted_norm(s.grad_norm, g, lam, og);
    WeightedNormOptions op = oq;
    op.exponent = pq.p;
    const double lr = log_weighted_norm(s.laplacian, g, lam, op);
    row.u_term = std::exp(lu);
    row.grad_term = std::exp(lg);
    row.rhs = std::exp(lr);
    row.vacuous = std::isinf(lu) && std::isinf(lg) && std::isinf(lr);
    row.ratio = row.vacuous ? 0.0 : std::exp(lu - lr) + std::exp(lg - lr);
  });
  std::vector<double> ratios;
  for (const auto& row : rep.rows) {
    if (row.admissible && !row.vacuous) ratios.push_back(row.ratio);
  }
  if (!ratios.empty()) {
    const std::size_t q = std::max<std::size_t>(1, ratios.size() / 4);
    for (std::size_t i = 0; i < q; ++i) {
      rep.first_quartile_mean += ratios[i] / q;
      rep.last_quartile_mean += ratios[ratios.size() - 1 - i] / q;
    }
    rep.bounded = rep.last_quartile_mean <= 2.0 * rep.first_quartile_mean;
  } else {
    rep.bounded = true;
  }
  return rep;
}

HolderCheck holder_step_check(std::span<const double> values, const QuadratureGrid& grid) {
  if (!grid.has_core()) throw DomainError("the Hoelder step is stated on balls");
  const int n = grid.dim();
  const double R = grid.radius();
  const LebesgueExponents pq = lebesgue_exponents(n);
  WeightedNormOptions o;
  o.core_fraction = 1.0;
  HolderCheck h;
  o.exponent = pq.p;
  h.lp = weighted_norm(values, grid, CarlemanLambda(0.0), o);
  o.exponent = pq.q;
  h.lq = weighted_norm(values, grid, CarlemanLambda(0.0), o);
  o.exponent = 2.0;
  h.l2 = weighted_norm(values, grid, CarlemanLambda(0.0), o);
  const double vol = ball_volume(n, R);
  h.c = std::pow(vol, 2.0 / n) / (R * R);
  h.c_prime = std::pow(vol, (pq.q - 2.0) / (2.0 * pq.q)) / R;
  h.bound_p = h.c * R * R * h.lq;
  h.bound_2 = h.c_prime * R * h.lq;
  const double slack = 1.0 + 1e-10;
  h.holds = h.lp <= h.bound_p * slack && h.l2 <= h.bound_2 * slack;
  return h;
}

namespace {

Jet exp_decay(std::span<const Jet> x, int s) {
  const JetLayout& l = x[0].layout();
  if (radius_value(x) == 0.0) return Jet(l, 0.0);
  return exp(-pow(radius_jet(x), -static_cast<double>(s)));
}

}  // namespace

std::vector<TestFunction> infinite_order_corpus(int n, double support) {
  std::vector<TestFunction> out;
  const Bump phi(0.5);
  for (int s : {1, 2}) {
    for (int harmonic = 0; harmonic <= 2; ++harmonic) {
      TestFunction f;
      f.name = fmt::format("exp{}{}", s, harmonic == 0 ? "" : fmt::format("_y{}", harmonic));
      f.support_radius = support;
      f.radial = harmonic == 0;
      f.fn = [phi, s, harmonic, support](std::span<const Jet> x) {
        Jet v = exp_decay(x, s) * phi.scaled(x, support);
        if (harmonic == 1) return v * x[0] / support;
        if (harmonic == 2) return v * x[0] * x[1] / (support * support);
        return v;
      };
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<TestFunction> finite_order_corpus(int n, double support) {
  std::vector<TestFunction> out;
  const Bump phi(0.5);
  for (int m : {3, 5, 8}) {
    TestFunction f;
    f.name = fmt::format("r{}", m);
    f.support_radius = support;
    f.vanishing_order = m;
    f.radial = true;
    f.fn = [phi, m, support](std::span<const Jet> x) {
      Jet r2 = x[0] * x[0];
      for (std::size_t a = 1; a < x.size(); ++a) r2 += x[a] * x[a];
      // r^m with even m stays polynomial at the origin.
      Jet rm = (m % 2 == 0) ? pow(r2, 0.5 * m) : (radius_value(x) == 0.0 ? Jet(x[0].layout(), 0.0)
                                                                           : pow(r2, 0.5 * m));
      return rm * phi.scaled(x, support);
    };
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<TestFunction> origin_excluded_corpus(int n, double support) {
  std::vector<TestFunction> out;
  const double c = 0.5 * support, w = 0.25 * support;
  for (int harmonic : {0, 1}) {
    TestFunction f;
    f.name = harmonic == 0 ? "annulus" : "annulus_y1";
    f.support_radius = c + w;
    f.inner_radius = c - w;
    f.radial = harmonic == 0;
    f.fn = [c, w, harmonic](std::span<const Jet> x) {
      const JetLayout& l = x[0].layout();
      const double rho = radius_value(x);
      if (std::abs(rho - c) >= w) return Jet(l, 0.0);
      Jet r = radius_jet(x);
      Jet t = (r - c) / w;
      Jet v = exp(1.0 - reciprocal(1.0 - t * t));
      if (harmonic == 1) v = v * x[0] / r;
      return v;
    };
    out.push_back(std::move(f));
  }
  // chi_k excision of an infinite-order function.
  const Bump phi(0.5);
  const int k = 3;
  TestFunction f;
  f.name = "chi3_exp1";
  f.support_radius = support;
  f.inner_radius = 0.5 * std::ldexp(1.0, -k);
  f.radial = true;
  f.fn = [phi, k, support](std::span<const Jet> x) {
    return cutoff_chi(phi, k, x) * exp_decay(x, 1) * phi.scaled(x, support);
  };
  out.push_back(std::move(f));
  return out;
}

TestFunction zero_function(int n, double support) {
  TestFunction f;
  f.name = "zero";
  f.support_radius = support;
  f.radial = true;
  f.fn = [](std::span<const Jet> x) { return Jet(x[0].layout(), 0.0); };
  return f;
}

}  // namespace uc
