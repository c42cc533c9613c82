#pragma once

#include "uc/einstein.hpp"

#include <vector>

namespace uc::detail {

// Point values used by the field-equation right-hand sides, all with lower
// indices; g and gi are the metric and its inverse in the same basis.
struct Values {
  int n = 0;
  std::vector<double> g, gi;
  double phi = 0.0;
  std::vector<double> d1, d2, d3, d4;
  std::vector<double> R, dR, ddR, ric;
  // Forcing: S, nabla S, nabla nabla S, f, nabla f, nabla nabla f.
  std::vector<double> S, dS, ddS;
  double f0 = 0.0;
  std::vector<double> df, ddf;

  // Zero forcing of the right sizes.
  void clear_forcing();
};

// Ric_bc = g^ad R_abcd
std::vector<double> ricci_from(const Values& v);
// On-shell C_jkm = nabla^i R_jkim.
std::vector<double> divergence_on_shell(const Values& v, const Potential& pot);
// On-shell nabla_a C_jkm.
std::vector<double> divergence_gradient_on_shell(const Values& v, const Potential& pot);
// Lap R_jklm through commutators and the on-shell divergence (needs R, dR, d1..d3).
std::vector<double> curvature_laplacian_rhs(const Values& v, const Potential& pot);
// Lap nabla_j phi (needs ric, d1).
std::vector<double> prolonged_rhs_1(const Values& v, const Potential& pot);
// Lap nabla_k nabla_j phi (needs R, dR, ric, d1, d2).
std::vector<double> prolonged_rhs_2(const Values& v, const Potential& pot);

}  // namespace uc::detail
