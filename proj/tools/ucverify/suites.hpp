#pragma once

#include "config.hpp"
#include "report.hpp"

namespace ucverify {

// Acceptance tolerances.
namespace tol {
constexpr double ricci_analytic = 1e-9;
constexpr double ricci_finite_difference = 1e-6;
constexpr double riemann_symmetry = 1e-6;
constexpr double frame_oracle = 1e-5;
constexpr double frame_invariants = 1e-7;
constexpr double flat_fixed_point = 1e-12;
constexpr double jacobi = 1e-6;
constexpr double identity_residual = 1e-5;
constexpr double refinement_order_low = 1.8;
constexpr double refinement_order_high = 2.2;
constexpr double lemma2_by_parts = 1e-6;
constexpr int lemma2_min_corpus = 6;
constexpr double lemma2_stability = 1.2;  // max / min of the per-lambda constant
constexpr double probe_growth = 2.0;      // last / first quartile mean
constexpr double contrast_bounded = 2.0;
constexpr double contrast_divergent = 1e3;
constexpr double difference = 1e-6;
constexpr double riemann_difference = 1e-6;
}  // namespace tol

SuiteResult curvature_check(const RunConfig& c);
SuiteResult frame_ode(const RunConfig& c);
SuiteResult system_residuals(const RunConfig& c);
SuiteResult carleman_verify(const RunConfig& c);
SuiteResult uc_demo(const RunConfig& c);
SuiteResult diff_pipeline(const RunConfig& c);

SuiteResult run_suite(const RunConfig& c);

}  // namespace ucverify
