#include "kmsync/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace kmsync {

double wrap_angle(double x) {
  double y = std::remainder(x, kTwoPi);
  if (y <= -kPi) y += kTwoPi;
  return y;
}

Matrix Matrix::identity(int size) {
  Matrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = 1.0;
  return m;
}

double max_asymmetry(const Matrix& A) {
  double worst = 0.0;
  for (int i = 0; i < A.n; ++i)
    for (int j = i + 1; j < A.n; ++j)
      worst = std::max(worst, std::fabs(A(i, j) - A(j, i)));
  return worst;
}

double frobenius_norm(const Matrix& A) {
  double s = 0.0;
  for (double v : A.a) s += v * v;
  return std::sqrt(s);
}

EigenSystem jacobi_eigensystem(const Matrix& A, double rel_off_tol, int max_sweeps) {
  const int n = A.n;
  if (n <= 0) throw std::invalid_argument("jacobi_eigensystem: empty matrix");
  const double scale = std::max(1.0, frobenius_norm(A));
  if (max_asymmetry(A) > 1e-12 * scale)
    throw std::invalid_argument("jacobi_eigensystem: matrix is not symmetric");

  Matrix B = A;
  // symmetrize exactly so both triangles agree bit for bit
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double m = 0.5 * (B(i, j) + B(j, i));
      B(i, j) = B(j, i) = m;
    }
  Matrix V = Matrix::identity(n);
  const double norm = frobenius_norm(B);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) s += 2.0 * B(p, q) * B(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && norm > 0.0; ++sweep) {
    if (off_norm() <= rel_off_tol * norm) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = B(p, q);
        if (std::fabs(apq) < 1e-300) {
          B(p, q) = B(q, p) = 0.0;
          continue;
        }
        const double theta = (B(q, q) - B(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double h = t * apq;

        B(p, p) -= h;
        B(q, q) += h;
        B(p, q) = B(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double brp = B(r, p);
          const double brq = B(r, q);
          B(r, p) = B(p, r) = brp - s * (brq + tau * brp);
          B(r, q) = B(q, r) = brq + s * (brp - tau * brq);
        }
        for (int r = 0; r < n; ++r) {
          const double vrp = V(r, p);
          const double vrq = V(r, q);
          V(r, p) = vrp - s * (vrq + tau * vrp);
          V(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return B(i, i) < B(j, j); });

  EigenSystem out;
  out.values.resize(n);
  out.vectors = Matrix(n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = B(order[k], order[k]);
    for (int r = 0; r < n; ++r) out.vectors(r, k) = V(r, order[k]);
  }
  return out;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect_root: endpoints do not bracket a root");
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // hit representable limit
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  // one secant step inside the final bracket sharpens the function residual
  const double denom = fhi - flo;
  if (denom != 0.0) {
    const double x = lo - flo * (hi - lo) / denom;
    if (x > lo && x < hi) return x;
  }
  return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

namespace {

double simpson_panel(double fa, double fm, double fb, double h) {
  return (fa + 4.0 * fm + fb) * h / 6.0;
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b,
                       double fa, double fm, double fb, double whole, double tol,
                       int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_panel(fa, flm, fm, m - a);
  const double right = simpson_panel(fm, frm, fb, b - m);
  const double err = (left + right - whole) / 15.0;
  if (depth <= 0 || std::fabs(err) <= tol) return left + right + err;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol, const std::vector<double>& knots) {
  if (hi <= lo) return 0.0;
  std::vector<double> pts{lo, hi};
  for (double k : knots)
    if (k > lo && k < hi) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double total = 0.0;
  const double tol_per = abs_tol / static_cast<double>(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson_panel(fa, fm, fb, b - a);
    total += simpson_recurse(f, a, b, fa, fm, fb, whole, tol_per, 52);
  }
  return total;
}

double backward_derivative(const std::function<double(double)>& f, double x,
                           int order, double h) {
  if (order < 1 || order > 5)
    throw std::invalid_argument("backward_derivative: order must be in [1,5]");
  static const double binom[6][6] = {
      {1, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0},  {1, 2, 1, 0, 0, 0},
      {1, 3, 3, 1, 0, 0},  {1, 4, 6, 4, 1, 0},  {1, 5, 10, 10, 5, 1}};
  auto diff = [&](double step) {
    // backward difference: sum_k (-1)^k C(order,k) f(x - k step), error O(step)
    double s = 0.0;
    for (int k = 0; k <= order; ++k) {
      const double term = binom[order][k] * f(x - k * step);
      s += (k % 2 == 0) ? term : -term;
    }
    return s / std::pow(step, order);
  };
  const double d1 = diff(h);
  const double d2 = diff(0.5 * h);
  const double d3 = diff(0.25 * h);
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d3 - d2;
  return (4.0 * r2 - r1) / 3.0;
}

int worker_count() {
  if (const char* env = std::getenv("KMSYNC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const int workers = worker_count();
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t nthreads = std::min<std::size_t>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += nthreads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string format_g15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

double Rng01::next() {
  // splitmix64 step; top 53 bits give the mantissa
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace kmsync
