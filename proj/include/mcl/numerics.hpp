#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mcl {

/// Pairwise (binary tree) summation. Error grows like log(n)*eps instead of
/// n*eps, which matters for the tight contraction slacks downstream.
double pairwise_sum(std::span<const double> v);

struct Quadrature {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre nodes/weights, any n >= 1 (Newton on P_n; deterministic).
const Quadrature& gauss_legendre(int n);

/// \int_a^b f dx with a single Gauss panel of n points.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

/// Bisection for a root of f on [lo, hi]; f(lo), f(hi) must bracket.
/// Runs a fixed iteration count so results do not depend on tolerances.
double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 60);

/// C-infinity bump: b(s) = exp(1 - 1/(1-s^2)) for |s|<1, else 0. b(0)=1.
double bump(double s);
double bump_deriv(double s);

/// Signed displacement x - x0 wrapped to (-L/2, L/2].
double periodic_delta(double x, double x0, double L);

/// Edit distance, used for nearest-name suggestions in config parsing.
int levenshtein(const std::string& a, const std::string& b);

}  // namespace mcl
