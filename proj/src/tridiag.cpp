#include "pqslab/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pqslab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxQlIterations = 60;

double sign_of(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// Implicit QL with Wilkinson shifts. d: diagonal, e: off-diagonal padded to
// length n (e[n-1] unused). When z is non-null the rotations are
// accumulated into it.
void implicit_ql(std::vector<double>& d, std::vector<double>& e, Eigen::MatrixXd* z) {
  const int n = static_cast<int>(d.size());
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxQlIterations) {
          throw std::runtime_error("tridiagonal QL failed to converge");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z != nullptr) {
            for (Eigen::Index k = 0; k < z->rows(); ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

std::vector<double> padded_off(const SymTridiagonal& t) {
  std::vector<double> e(t.size(), 0.0);
  std::copy(t.off.begin(), t.off.end(), e.begin());
  return e;
}

// Deterministic sign: the entry of largest magnitude is made positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v(idx) < 0.0) v = -v;
}

// Solve (T - shift) x = b in place with partial pivoting (LAPACK gtsv
// scheme). Exact zero pivots are replaced by `tiny`.
void shifted_solve(const SymTridiagonal& t, double shift, double tiny, Eigen::VectorXd& b) {
  const int n = static_cast<int>(t.size());
  if (n == 1) {
    double p = t.diag[0] - shift;
    if (std::fabs(p) < tiny) p = tiny;
    b(0) /= p;
    return;
  }
  std::vector<double> dl(t.off.begin(), t.off.end());
  std::vector<double> du(t.off.begin(), t.off.end());
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
  std::vector<double> du2(n, 0.0);

  for (int i = 0; i < n - 1; ++i) {
    if (std::fabs(d[i]) >= std::fabs(dl[i])) {
      if (std::fabs(d[i]) < tiny) d[i] = tiny;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b(i + 1) -= fact * b(i);
      du2[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i < n - 2) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du2[i];
      }
      du[i] = temp;
      const double tb = b(i);
      b(i) = b(i + 1);
      b(i + 1) = tb - fact * b(i + 1);
    }
  }
  if (std::fabs(d[n - 1]) < tiny) d[n - 1] = tiny;
  b(n - 1) /= d[n - 1];
  b(n - 2) = (b(n - 2) - du[n - 2] * b(n - 1)) / d[n - 2];
  for (int i = n - 3; i >= 0; --i) {
    b(i) = (b(i) - du[i] * b(i + 1) - du2[i] * b(i + 2)) / d[i];
  }
}

// Smallest eigenvalue with exactly `index` eigenvalues below it.
double bisect_eigenvalue(const SymTridiagonal& t, std::size_t index, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 2.0 * kEps * std::max(std::fabs(lo), std::fabs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double SymTridiagonal::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double row = std::fabs(diag[i]);
    if (i > 0) row += std::fabs(off[i - 1]);
    if (i < off.size()) row += std::fabs(off[i]);
    best = std::max(best, row);
  }
  return best;
}

std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t) {
  std::vector<double> d = t.diag;
  std::vector<double> e = padded_off(t);
  implicit_ql(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

SymEigensystem tridiagonal_eigensystem(const SymTridiagonal& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  std::vector<double> d = t.diag;
  std::vector<double> e = padded_off(t);
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
  implicit_ql(d, e, &z);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });

  SymEigensystem out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(order[j])];
    out.vectors.col(j) = z.col(order[j]);
    fix_sign(out.vectors.col(j));
  }
  return out;
}

std::size_t sturm_count(const SymTridiagonal& t, double x) {
  const std::size_t n = t.size();
  const double pivmin = std::max(std::numeric_limits<double>::min(), kEps * kEps * (1.0 + t.norm_inf()));
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (std::fabs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

LowestPairs tridiagonal_lowest(const SymTridiagonal& t, std::size_t k) {
  const std::size_t n = t.size();
  if (n == 0) return {};
  k = std::min(k, n);

  // Gershgorin interval.
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(t.off[i - 1]);
    if (i + 1 < n) r += std::fabs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double norm = std::max(t.norm_inf(), std::numeric_limits<double>::min());
  lo -= 2.0 * kEps * norm + 1e-300;
  hi += 2.0 * kEps * norm + 1e-300;

  LowestPairs out;
  for (std::size_t j = 0; j < k; ++j) {
    out.values.push_back(bisect_eigenvalue(t, j, lo, hi));
  }

  if (n == 1 || t.norm_inf() == 0.0) {
    // Diagonal and zero: the unit vectors are exact.
    for (std::size_t j = 0; j < k; ++j) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      v(static_cast<Eigen::Index>(j)) = 1.0;
      out.vectors.push_back(std::move(v));
    }
    return out;
  }

  const double tiny = kEps * norm;
  const double cluster_tol = 1e-3 * norm;
  for (std::size_t j = 0; j < k; ++j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    // Fixed pseudo-random start vector.
    std::uint64_t state = 0x9E3779B97F4A7C15ULL + j;
    for (std::size_t i = 0; i < n; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      v(static_cast<Eigen::Index>(i)) = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    v.normalize();
    for (int it = 0; it < 6; ++it) {
      shifted_solve(t, out.values[j], tiny, v);
      for (std::size_t p = 0; p < j; ++p) {
        if (std::fabs(out.values[p] - out.values[j]) < cluster_tol) {
          v -= out.vectors[p].dot(v) * out.vectors[p];
        }
      }
      const double nv = v.norm();
      if (!(nv > 0.0) || !std::isfinite(nv)) {
        throw std::runtime_error("inverse iteration breakdown");
      }
      v /= nv;
    }
    fix_sign(v);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

GaugedTridiagonal gauge_to_real(const HermTridiagonal& h) {
  GaugedTridiagonal g;
  const std::size_t n = h.size();
  g.real.diag = h.diag;
  g.real.off.resize(n > 0 ? n - 1 : 0);
  g.phase.assign(n, std::complex<double>(1.0, 0.0));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double mag = std::abs(h.off[k]);
    g.real.off[k] = mag;
    const std::complex<double> unit = mag > 0.0 ? h.off[k] / mag : std::complex<double>(1.0, 0.0);
    g.phase[k + 1] = g.phase[k] * unit;
  }
  return g;
}

HermEigensystem hermitian_eigensystem(const HermTridiagonal& h) {
  const GaugedTridiagonal g = gauge_to_real(h);
  SymEigensystem s = tridiagonal_eigensystem(g.real);
  HermEigensystem out;
  out.values = std::move(s.values);
  const auto n = static_cast<Eigen::Index>(h.size());
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.vectors.row(i) = g.phase[static_cast<std::size_t>(i)] * s.vectors.row(i).cast<std::complex<double>>();
  }
  return out;
}

HermLowest hermitian_lowest(const HermTridiagonal& h, std::size_t k) {
  const GaugedTridiagonal g = gauge_to_real(h);
  LowestPairs s = tridiagonal_lowest(g.real, k);
  HermLowest out;
  out.values = std::move(s.values);
  for (auto& v : s.vectors) {
    Eigen::VectorXcd c(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) c(i) = g.phase[static_cast<std::size_t>(i)] * v(i);
    out.vectors.push_back(std::move(c));
  }
  return out;
}

}  // namespace pqslab
