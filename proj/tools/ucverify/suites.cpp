#include "suites.hpp"

#include "uc/carleman.hpp"
#include "uc/curvature.hpp"
#include "uc/einstein.hpp"
#include "uc/error.hpp"
#include "uc/experiments.hpp"
#include "uc/frame.hpp"
#include "uc/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ucverify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs one block of checks; a numerical or domain failure becomes a failed
// check instead of aborting the suite.
template <class F>
void guarded(SuiteResult& r, const std::string& name, F&& f) {
  try {
    f();
  } catch (const uc::Error& e) {
    r.check(name, false, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what());
  }
}

std::vector<double> random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) {
    x = g(rng);
    s += x * x;
  }
  for (double& x : v) x /= std::sqrt(s);
  return v;
}

uc::Point random_point(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto v = random_direction(rng, n);
  const double rho = radius * std::pow(u(rng), 1.0 / n);
  for (double& x : v) x *= rho;
  return v;
}

uc::Point base_point(int n) {
  const double c[] = {0.2, -0.1, 0.15, 0.05, -0.08, 0.12};
  return uc::Point(c, c + n);
}

std::string preset_name(double k) {
  if (k == 0.0) return "flat";
  if (k == 1.0) return "sphere";
  if (k == -1.0) return "hyperbolic";
  return fmt::format("K{:g}", k);
}

const char* backend_name(const uc::DiffBackend& b) { return b.is_analytic() ? "analytic" : "finite_difference"; }

bool selected(const std::vector<std::string>& filter, const std::string& name) {
  return filter.empty() || std::find(filter.begin(), filter.end(), name) != filter.end();
}

}  // namespace

SuiteResult curvature_check(const RunConfig& c) {
  SuiteResult r;
  r.command = to_string(c.command);
  const auto& s = c.geometry;
  auto& table = r.table("residuals", {"metric", "n", "K", "backend", "points", "ricci_residual", "symmetry_defect"});

  std::vector<uc::DiffBackend> backends = {s.backend};
  if (s.backend.is_analytic() && s.compare_finite_difference) backends.push_back(uc::DiffBackend::finite_difference());

  for (int n : s.dims) {
    for (double k : s.curvatures) {
      for (const auto& b : backends) {
        const std::string name = fmt::format("{}_n{}_{}", preset_name(k), n, backend_name(b));
        guarded(r, name, [&] {
          uc::MetricField f = uc::MetricField::constant_curvature(n, k).with_backend(b);
          std::mt19937_64 rng(c.seed + 101 * n);
          double ric = 0.0, sym = 0.0;
          for (int t = 0; t < s.points; ++t) {
            uc::Point p = random_point(rng, n, s.point_radius);
            const uc::Tensor g = f.at(p).g();
            const uc::Tensor rc = uc::ricci(f, p);
            for (int a = 0; a < n; ++a)
              for (int bb = 0; bb < n; ++bb) ric = std::max(ric, std::abs(rc(a, bb) - (n - 1) * k * g(a, bb)));
            sym = std::max(sym, uc::riemann_symmetry_defects(uc::riemann(f, p)).max());
          }
          table.add({fmt::format("{}", preset_name(k)), long(n), k, backend_name(b), long(s.points), ric, sym});
          r.at_most("ricci_" + name, ric, b.is_analytic() ? tol::ricci_analytic : tol::ricci_finite_difference);
          r.at_most("symmetry_" + name, sym, tol::riemann_symmetry);
        });
      }
    }
    // Flat space: every residual vanishes identically.
    guarded(r, fmt::format("euclidean_n{}", n), [&] {
      uc::MetricField f = uc::MetricField::euclidean(n).with_backend(s.backend);
      std::mt19937_64 rng(c.seed + 7 * n);
      double worst = 0.0;
      for (int t = 0; t < std::min(s.points, 10); ++t) {
        uc::Point p = random_point(rng, n, s.point_radius);
        worst = std::max({worst, uc::sup_norm(uc::riemann(f, p)), uc::sup_norm(uc::christoffel(f, p))});
      }
      table.add({"euclidean", long(n), 0.0, backend_name(s.backend), long(std::min(s.points, 10)), worst, worst});
      r.at_most(fmt::format("euclidean_n{}_{}", n, backend_name(s.backend)), worst, 0.0);
    });
    // A metric without symmetries.
    guarded(r, fmt::format("symmetry_random_n{}", n), [&] {
      uc::MetricField f = uc::MetricField::random_perturbation(n, 0.1, c.seed + n).with_backend(s.backend);
      std::mt19937_64 rng(c.seed + 13 * n);
      double sym = 0.0;
      for (int t = 0; t < s.points; ++t) {
        uc::Point p = random_point(rng, n, 0.4);
        sym = std::max(sym, uc::riemann_symmetry_defects(uc::riemann(f, p)).max());
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      table.add({"random", long(n), nan, backend_name(s.backend), long(s.points), nan, sym});
      r.at_most(fmt::format("symmetry_random_n{}_{}", n, backend_name(s.backend)), sym, tol::riemann_symmetry);
    });
  }
  return r;
}

namespace {

uc::MetricField frame_preset(const std::string& name, int n, std::uint64_t seed) {
  if (name == "sphere") return uc::MetricField::constant_curvature(n, 1.0);
  if (name == "hyperbolic") return uc::MetricField::constant_curvature(n, -1.0);
  if (name == "random") return uc::MetricField::random_perturbation(n, 0.1, seed);
  return uc::MetricField::euclidean(n);
}

}  // namespace

SuiteResult frame_ode(const RunConfig& c) {
  SuiteResult r;
  r.command = to_string(c.command);
  const auto& s = c.frame;
  const int n = c.n;
  const auto& names = uc::FrameState::block_names();

  if (s.oracle) {
    std::vector<std::string> cols = {"preset", "ray", "radius"};
    for (const char* b : names) cols.push_back(b);
    cols.push_back("invariant_defect");
    auto& table = r.table("oracle", cols);
    for (std::size_t pi = 0; pi < s.presets.size(); ++pi) {
      const std::string& preset = s.presets[pi];
      guarded(r, "oracle_" + preset, [&] {
        uc::NormalChart chart(frame_preset(preset, n, c.seed), base_point(n));
        std::mt19937_64 rng(c.seed + 1000 * (pi + 1));
        std::vector<std::vector<double>> dirs;
        for (int t = 0; t < s.rays; ++t) dirs.push_back(random_direction(rng, n));
        struct RayResult {
          std::vector<std::array<double, uc::FrameState::kBlocks>> dev;
          std::vector<double> defect;
        };
        std::vector<RayResult> out(dirs.size());
        uc::parallel_for(dirs.size(), c.jobs, [&](std::size_t i) {
          auto samples = uc::integrate_frame(chart, dirs[i], s.radii);
          for (const auto& smp : samples) {
            auto o = uc::direct_frame_oracle(chart, dirs[i], smp.state.radius);
            out[i].dev.push_back(uc::block_deviation(smp.state, o.state));
            out[i].defect.push_back(smp.defects.max());
          }
        });
        std::array<double, uc::FrameState::kBlocks> worst{};
        double defect = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
          for (std::size_t j = 0; j < s.radii.size(); ++j) {
            std::vector<Cell> row = {preset, long(i), s.radii[j]};
            for (int b = 0; b < uc::FrameState::kBlocks; ++b) {
              worst[b] = std::max(worst[b], out[i].dev[j][b]);
              row.push_back(out[i].dev[j][b]);
            }
            defect = std::max(defect, out[i].defect[j]);
            row.push_back(out[i].defect[j]);
            table.add(std::move(row));
          }
        }
        for (int b = 0; b < uc::FrameState::kBlocks; ++b)
          r.at_most(fmt::format("oracle_{}_{}", preset, names[b]), worst[b], tol::frame_oracle);
        r.at_most("invariants_" + preset, defect, tol::frame_invariants);
      });
    }
    guarded(r, "flat_fixed_point", [&] {
      uc::NormalChart chart(uc::MetricField::euclidean(n), base_point(n));
      std::mt19937_64 rng(c.seed + 5);
      double worst = 0.0;
      for (int t = 0; t < 5; ++t) {
        auto samples = uc::integrate_frame(chart, random_direction(rng, n), s.radii);
        for (const auto& smp : samples) {
          auto d = uc::block_deviation(smp.state, uc::FrameState::flat(n));
          worst = std::max(worst, *std::max_element(d.begin(), d.end()));
        }
      }
      r.at_most("flat_fixed_point", worst, tol::flat_fixed_point);
    });
  }

  if (s.jacobi) {
    // Gamma_iY^j on the unit sphere in a frame whose first vector is the ray
    // direction: diag(1, r cot r, ..., r cot r).
    auto& table = r.table("jacobi", {"ray", "radius", "r_cot_r", "max_deviation"});
    guarded(r, "jacobi_sphere", [&] {
      uc::NormalChart chart(uc::MetricField::constant_curvature(n, 1.0), base_point(n));
      std::mt19937_64 rng(c.seed + 3);
      double worst = 0.0;
      for (int t = 0; t < s.jacobi_rays; ++t) {
        auto v = random_direction(rng, n);
        // rows of q: v first, then Gram-Schmidt on the coordinate basis
        std::vector<std::vector<double>> q = {v};
        for (int a = 0; a < n && static_cast<int>(q.size()) < n; ++a) {
          std::vector<double> w(n, 0.0);
          w[a] = 1.0;
          for (const auto& e : q) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) d += w[i] * e[i];
            for (int i = 0; i < n; ++i) w[i] -= d * e[i];
          }
          double norm = 0.0;
          for (double x : w) norm += x * x;
          if (norm < 1e-6) continue;
          for (double& x : w) x /= std::sqrt(norm);
          q.push_back(w);
        }
        auto samples = uc::integrate_frame(chart, v, s.jacobi_radii);
        for (const auto& smp : samples) {
          const double rad = smp.state.radius, cot = rad / std::tan(rad);
          double dev = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              double m = 0.0;
              for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m += q[a][i] * smp.state.gamma_y[i * n + j] * q[b][j];
              const double expect = a != b ? 0.0 : a == 0 ? 1.0 : cot;
              dev = std::max(dev, std::abs(m - expect));
            }
          worst = std::max(worst, dev);
          table.add({long(t), rad, cot, dev});
        }
      }
      r.at_most("jacobi_sphere", worst, tol::jacobi);
    });
  }
  return r;
}

SuiteResult system_residuals(const RunConfig& c) {
  SuiteResult r;
  r.command = to_string(c.command);
  const auto& s = c.system;
  auto& table = r.table("identities", {"preset", "n", "einstein", "scalar", "bianchi", "contracted_bianchi",
                                       "curvature_laplacian", "prolonged_1", "prolonged_2"});
  std::array<double, 7> worst{};
  const std::array<const char*, 7> ids = {"einstein", "scalar", "bianchi", "contracted_bianchi",
                                          "curvature_laplacian", "prolonged_1", "prolonged_2"};
  double cancellation = 0.0;
  for (int n : s.dims) {
    for (const auto& e : uc::exact_solution_presets(n)) {
      guarded(r, fmt::format("identities_{}_n{}", e.name, n), [&] {
        const auto& p = e.sample_point;
        std::array<double, 7> v = {
            uc::einstein_residual(e.metric, e.field, e.potential, e.lambda, p).norm,
            uc::scalar_residual(e.metric, e.field, e.potential, p).norm,
            uc::bianchi2_residual(e.metric, p).norm,
            uc::contracted_bianchi_residual(e.metric, e.field, e.potential, e.lambda, p).norm,
            uc::curvature_laplacian_residual(e.metric, e.field, e.potential, e.lambda, p).norm,
            uc::prolonged_scalar_residual_1(e.metric, e.field, e.potential, e.lambda, p).norm,
            uc::prolonged_scalar_residual_2(e.metric, e.field, e.potential, e.lambda, p).norm,
        };
        std::vector<Cell> row = {e.name, long(n)};
        for (int i = 0; i < 7; ++i) {
          worst[i] = std::max(worst[i], v[i]);
          row.push_back(v[i]);
        }
        table.add(std::move(row));
        if (e.name == "sphere_massive_field" || e.name == "hyperbolic_constant_field")
          cancellation = std::max(cancellation, v[4]);
      });
    }
  }
  for (int i = 0; i < 7; ++i) r.at_most(fmt::format("{}_residual", ids[i]), worst[i], tol::identity_residual);
  r.at_most("curvature_laplacian_cancellation", cancellation, tol::identity_residual);

  // Finite-difference backend: residual against step size.
  auto& conv = r.table("refinement", {"case", "h", "residual", "order"});
  auto refine = [&](const std::string& name, auto residual) {
    guarded(r, "refinement_" + name, [&] {
      std::vector<double> err;
      for (double h : s.refinement_steps) err.push_back(residual(h));
      double lo = kInf, hi = -kInf;
      for (std::size_t i = 0; i < err.size(); ++i) {
        double order = std::numeric_limits<double>::quiet_NaN();
        if (i > 0) {
          order = std::log(err[i - 1] / err[i]) / std::log(s.refinement_steps[i - 1] / s.refinement_steps[i]);
          lo = std::min(lo, order);
          hi = std::max(hi, order);
        }
        conv.add({name, s.refinement_steps[i], err[i], order});
      }
      r.check("refinement_order_min_" + name, lo >= tol::refinement_order_low, lo, tol::refinement_order_low);
      r.check("refinement_order_max_" + name, hi <= tol::refinement_order_high, hi, tol::refinement_order_high);
    });
  };
  const int n = c.n;
  std::vector<double> p(n);
  for (int a = 0; a < n; ++a) p[a] = 0.2 - 0.1 * a;
  refine("sphere", [&](double h) {
    auto f = uc::MetricField::constant_curvature(n, 1.0).with_backend(uc::DiffBackend::finite_difference(h, h));
    return uc::einstein_residual(f, uc::ScalarSolution::constant(0.0), uc::Potential::quadratic(1.0),
                                 uc::CosmologicalConstant(n - 1.0), p)
        .norm;
  });
  refine("manufactured", [&](double h) {
    auto exact = uc::MetricField::random_perturbation(n, 0.12, c.seed);
    uc::ScalarSolution phi{[n](std::span<const uc::Jet> x) { return uc::sin(0.7 * x[0] + 0.4 * x[n - 1]); },
                           uc::DiffBackend::analytic()};
    auto v = uc::Potential::quartic(0.9, 0.4);
    uc::CosmologicalConstant lambda(0.25);
    uc::Forcing forcing = uc::manufacture_forcing(exact, phi, v, lambda, p);
    uc::ResidualOptions opt{1e-6, &forcing};
    auto fd = exact.with_backend(uc::DiffBackend::finite_difference(h, h));
    return uc::einstein_residual(fd, phi, v, lambda, p, opt).norm;
  });
  return r;
}

SuiteResult carleman_verify(const RunConfig& c) {
  SuiteResult r;
  r.command = to_string(c.command);
  const auto& s = c.carleman;
  const auto& cp = s.params;

  if (s.lemma2) {
    auto& table = r.table("lemma2", {"function", "lambda", "lhs", "rhs", "ratio", "levels", "vacuous"});
    auto& ibp = r.table("lemma2_by_parts", {"function", "lambda", "direct", "by_parts", "relative_error"});
    std::vector<uc::TestFunction> corpus;
    for (auto& f : uc::infinite_order_corpus(cp.n, cp.R))
      if (selected(s.corpus, f.name)) corpus.push_back(f);
    r.check("lemma2_corpus_size", static_cast<int>(corpus.size()) >= tol::lemma2_min_corpus, double(corpus.size()),
            tol::lemma2_min_corpus, "lower bound");
    std::vector<double> per_lambda(s.lemma2_lambdas.size(), 0.0);
    double sup = 0.0, ibp_worst = 0.0;
    for (const auto& f : corpus) {
      guarded(r, "lemma2_" + f.name, [&] {
        auto rep = uc::lemma2_verify(f, s.lemma2_lambdas, cp, kInf, c.jobs);
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
          const auto& row = rep.rows[i];
          table.add({f.name, row.lambda, row.lhs, row.rhs, row.ratio, long(row.levels), long(row.vacuous)});
          if (!row.vacuous) per_lambda[i] = std::max(per_lambda[i], row.ratio);
        }
        sup = std::max(sup, rep.sup_ratio);
        if (f.radial) {
          for (double l : s.lemma2_lambdas) {
            const int levels = uc::levels_for(f, cp, uc::CarlemanLambda(l));
            auto b = uc::lemma2_by_parts(f, uc::CarlemanLambda(l), cp, levels);
            ibp.add({f.name, l, b.direct, b.by_parts, b.relative_error});
            ibp_worst = std::max(ibp_worst, b.relative_error);
          }
        }
      });
    }
    const double measured = 1.1 * sup;
    auto& constants = r.table("lemma2_constants", {"lambda", "sup_ratio"});
    for (std::size_t i = 0; i < per_lambda.size(); ++i) constants.add({s.lemma2_lambdas[i], per_lambda[i]});
    r.check("lemma2_single_constant", sup <= measured && std::isfinite(sup), sup, measured,
            "sup over corpus and lambda against C_meas = 1.1 sup");
    const auto [lo, hi] = std::minmax_element(per_lambda.begin(), per_lambda.end());
    const double spread = *lo > 0.0 ? *hi / *lo : kInf;
    r.at_most("lemma2_constant_stability", spread, tol::lemma2_stability);
    r.at_most("lemma2_by_parts", ibp_worst, tol::lemma2_by_parts);
  }

  if (s.probe) {
    auto& table = r.table("probe", {"function", "lambda", "admissible", "u_term", "grad_term", "rhs", "ratio"});
    for (auto& f : uc::origin_excluded_corpus(cp.n, cp.R)) {
      if (!selected(s.probe_corpus, f.name)) continue;
      guarded(r, "probe_" + f.name, [&] {
        auto rep = uc::sogge_probe(f, s.probe_lambdas, cp, c.jobs);
        for (const auto& row : rep.rows) {
          if (!row.admissible || !row.skipped.empty()) {
            r.log.push_back(fmt::format("probe {}: lambda {} skipped: {}", f.name, row.lambda,
                                        row.skipped.empty() ? "not admissible" : row.skipped));
            const double nan = std::numeric_limits<double>::quiet_NaN();
            table.add({f.name, row.lambda, 0L, nan, nan, nan, nan});
            continue;
          }
          table.add({f.name, row.lambda, 1L, row.u_term, row.grad_term, row.rhs, row.ratio});
        }
        const double growth =
            rep.first_quartile_mean > 0.0 ? rep.last_quartile_mean / rep.first_quartile_mean : kInf;
        r.at_most("probe_" + f.name, growth, tol::probe_growth);
      });
    }
  }
  return r;
}

namespace {

uc::ModelPair demo_pair(const std::string& name) {
  if (name == "zero") return uc::zero_pair();
  for (auto& p : uc::model_corpus())
    if (p.name == name) return p;
  throw uc::ConfigError("unknown model pair " + name);
}

}  // namespace

SuiteResult uc_demo(const RunConfig& c) {
  SuiteResult r;
  r.command = to_string(c.command);
  const auto& s = c.demo;
  const auto& cp = s.params;

  guarded(r, "contrast", [&] {
    std::vector<uc::TestFunction> corpus = uc::infinite_order_corpus(cp.n, cp.R);
    for (auto& f : uc::finite_order_corpus(cp.n, cp.R)) corpus.push_back(f);
    auto rep = uc::mechanism_contrast(corpus, s.lambdas, cp, c.jobs);
    auto& table = r.table("contrast", {"function", "order", "lambda", "bounded_quantity", "divergent"});
    auto& growth = r.table("contrast_growth", {"function", "order", "growth"});
    double infinite_worst = 0.0, r5 = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t f = 0; f < rep.names.size(); ++f) {
      const long order = rep.orders[f] ? long(*rep.orders[f]) : -1L;
      for (std::size_t i = 0; i < rep.lambdas.size(); ++i)
        table.add({rep.names[f], order, rep.lambdas[i], rep.values[f][i].value, long(rep.values[f][i].divergent)});
      growth.add({rep.names[f], order, rep.growth[f]});
      if (!rep.orders[f]) {
        const double g = rep.growth[f];
        infinite_worst = std::max(infinite_worst, g > 0.0 ? std::max(g, 1.0 / g) : kInf);
      } else if (rep.names[f] == "r5") {
        r5 = rep.growth[f];
      }
    }
    r.at_most("contrast_infinite_order_bounded", infinite_worst, tol::contrast_bounded);
    r.check("contrast_r5_growth", r5 >= tol::contrast_divergent, r5, tol::contrast_divergent, "lower bound");
    r.check("contrast_separated", rep.separated, rep.separated ? 1.0 : 0.0, 1.0);
  });

  const uc::ModelPair pair = demo_pair(s.pair);
  guarded(r, "decay", [&] {
    auto rep = uc::leibniz_decay(pair.u, uc::CarlemanLambda(s.decay_lambda), cp, s.decay_ks);
    auto& table = r.table("decay", {"k", "leibniz_term"});
    double worst = 0.0;
    for (std::size_t i = 0; i < rep.ks.size(); ++i) {
      table.add({long(rep.ks[i]), rep.values[i]});
      if (i > 0 && rep.values[i - 1] > 0.0) worst = std::max(worst, rep.values[i] / rep.values[i - 1]);
      if (i > 0 && rep.values[i - 1] == 0.0 && rep.values[i] > 0.0) worst = kInf;
    }
    r.check("decay_monotone", rep.monotone, worst, 1.0, "largest ratio of consecutive terms");
  });

  guarded(r, "chain", [&] {
    uc::ChainOptions opt;
    opt.k = s.k;
    opt.carleman_constant = s.carleman_constant;
    opt.jobs = c.jobs;
    auto rep = uc::chain_report(pair, s.chain_lambdas, cp, opt);
    auto& t = r.table("sweep", {"lambda",       "uk_q",         "uk_grad_q",     "lap_uk_p",      "lap_phi_u_out",
                                "leibniz_bound", "chi_u_q",      "chi_grad_q",    "chi_v_2",       "lambda_v_2",
                                "v_2",          "u_q",          "grad_q",        "y_phi_v_out",   "coef_r2",
                                "coef_r",       "coef_lambda",  "absorbed_r2",   "absorbed_r",    "absorbed_lambda",
                                "final_constant", "bounded_u"});
    for (const auto& w : rep.rows) {
      t.add({w.lambda, w.uk_q, w.uk_grad_q, w.lap_uk_p, w.lap_phi_u_out, w.leibniz_bound, w.chi_u_q, w.chi_grad_q,
             w.chi_v_2, w.lambda_v_2, w.v_2, w.u_q, w.grad_q, w.y_phi_v_out, w.coef_r2, w.coef_r, w.coef_lambda,
             long(w.absorbed_r2), long(w.absorbed_r), long(w.absorbed_lambda), w.final_constant, w.bounded_u});
    }
    r.check("chain_absorption_consistent", rep.absorption_consistent, rep.absorption_consistent ? 1.0 : 0.0, 1.0);
    r.log.push_back(fmt::format("chain {}: grid {}", rep.pair, rep.grid));
  });
  return r;
}

namespace {

std::vector<double> rotation(int n, double angle) {
  std::vector<double> q(n * n, 0.0);
  for (int i = 0; i < n; ++i) q[i * n + i] = 1.0;
  q[0] = std::cos(angle);
  q[1] = -std::sin(angle);
  q[n] = std::sin(angle);
  q[n + 1] = std::cos(angle);
  return q;
}

}  // namespace

SuiteResult diff_pipeline(const RunConfig& c) {
  SuiteResult r;
  r.command = to_string(c.command);
  const auto& s = c.diff;
  const int n = c.n;
  uc::DifferenceOptions opt;
  opt.radius = s.radius;
  opt.levels = s.levels;
  opt.radial_nodes = s.radial_nodes;
  opt.sphere_order = s.sphere_order;
  opt.jobs = c.jobs;

  std::vector<std::string> cols = {"configuration", "points", "max_du", "max_dv"};
  for (const char* b : {"riemann", "phi", "grad", "hess"}) cols.push_back(fmt::format("du_{}", b));
  for (const char* b : uc::FrameState::block_names()) cols.push_back(fmt::format("dv_{}", b));
  for (const char* x : {"vanishing_slope", "infinite_order", "first_disagreement_order", "hypothesis_holds",
                        "measured_constant_pde", "measured_constant_ode"})
    cols.push_back(x);
  auto& table = r.table("differences", cols);
  auto add_row = [&](const std::string& name, const uc::DifferenceReport& d) {
    std::vector<Cell> row = {name, long(d.points), d.max_du, d.max_dv};
    for (double x : d.max_du_block) row.push_back(x);
    for (double x : d.max_dv_block) row.push_back(x);
    row.push_back(d.order.slope);
    row.push_back(long(d.order.infinite));
    row.push_back(long(d.first_disagreement_order));
    row.push_back(long(d.hypothesis_holds));
    row.push_back(d.measured_constant_pde);
    row.push_back(d.measured_constant_ode);
    table.add(std::move(row));
  };

  const auto a = uc::sphere_solution(n, s.curvature, s.base);
  for (const auto& cfg : s.configurations) {
    guarded(r, "diff_" + cfg, [&] {
      if (cfg == "identical" || cfg == "rotated") {
        const auto b = cfg == "identical" ? a : uc::rotated(a, rotation(n, s.rotation_angle));
        auto d = uc::difference_pipeline(a, b, opt);
        add_row(cfg, d);
        r.at_most(cfg + "_du", d.max_du, tol::difference);
        r.at_most(cfg + "_dv", d.max_dv, tol::difference);
        return;
      }
      const double dk = s.perturbed_curvature - s.curvature;
      auto d = uc::difference_pipeline(a, uc::sphere_solution(n, s.perturbed_curvature, s.base), opt);
      add_row(cfg, d);
      r.check("perturbed_first_disagreement_order", d.first_disagreement_order == 0,
              double(d.first_disagreement_order), 0.0, "expected order 0");
      auto& rt = r.table("riemann_difference", {"i", "j", "k", "l", "measured", "expected"});
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              const double expect = dk * ((i == k) * (j == l) - (i == l) * (j == k));
              const double got = d.riemann_difference_at_base[((i * n + j) * n + k) * n + l];
              worst = std::max(worst, std::abs(got - expect));
              rt.add({long(i), long(j), long(k), long(l), got, expect});
            }
      r.at_most("perturbed_riemann_difference", worst, tol::riemann_difference);
    });
  }
  return r;
}

SuiteResult run_suite(const RunConfig& c) {
  switch (c.command) {
    case Command::curvature_check: return curvature_check(c);
    case Command::frame_ode: return frame_ode(c);
    case Command::system_residuals: return system_residuals(c);
    case Command::carleman_verify: return carleman_verify(c);
    case Command::uc_demo: return uc_demo(c);
    case Command::diff_pipeline: return diff_pipeline(c);
  }
  throw uc::ConfigError("unknown command");
}

}  // namespace ucverify
