#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kmsync {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wraps an angle to (-pi, pi].
double wrap_angle(double x);

// Dense square matrix, row major. Small n only; no view machinery.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  static Matrix identity(int size);
};

double max_asymmetry(const Matrix& A);
double frobenius_norm(const Matrix& A);

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k is the eigenvector of values[k]
};

// Cyclic Jacobi rotations for a symmetric matrix. Converges when the
// off-diagonal Frobenius norm drops below rel_off_tol times the input norm.
// Throws std::invalid_argument for asymmetric input.
EigenSystem jacobi_eigensystem(const Matrix& A, double rel_off_tol = 1e-13,
                               int max_sweeps = 100);

// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign, followed by a
// few secant polish steps on the final bracket. Returns the root location.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol);

// Golden-section minimum of f on [lo, hi], refined to xtol.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol);

// Recursive adaptive Simpson with absolute tolerance. `knots` are split
// points inserted before refinement starts (branch boundaries, square-root
// singularities of the integrand derivative).
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol, const std::vector<double>& knots = {});

// One-sided (backward) finite-difference derivative of the given order at x,
// with two Richardson extrapolation levels on steps {h, h/2, h/4}.
double backward_derivative(const std::function<double(double)>& f, double x,
                           int order, double h);

// Runs body(i) for i in [0, count), split over worker_count() threads.
// Results must be written to disjoint slots; order of execution is unspecified
// but any slot-writing usage is deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Worker threads for sweeps; the KMSYNC_THREADS environment variable
// overrides the hardware default.
int worker_count();

// 15-significant-digit text form used by every table writer.
std::string format_g15(double v);

// Deterministic uniform(0,1) stream, identical across platforms.
class Rng01 {
 public:
  explicit Rng01(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}
  double next();
  double next_symmetric() { return 2.0 * next() - 1.0; }  // (-1, 1)

 private:
  std::uint64_t state_;
};

}  // namespace kmsync
