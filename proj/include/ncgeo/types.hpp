#ifndef NCGEO_TYPES_HPP
#define NCGEO_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncgeo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

constexpr Complex I{0.0, 1.0};

// Default tolerances. Operations take explicit overrides where it matters.
constexpr double tol_exact = 1e-12;      // algebraic identities, exact cancellation
constexpr double tol_algebraic = 1e-10;  // identity suites on random inputs
constexpr double tol_fd = 1e-8;          // finite-difference limited identities
constexpr double tol_rank = 1e-9;        // relative SVD threshold for rank/null space

constexpr std::uint64_t default_seed = 0xC0FFEE;

// Raised when a request exceeds the sizes this implementation materializes.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when glued per-chart data violates its gluing relation.
class gluing_error : public std::runtime_error {
 public:
  explicit gluing_error(const std::string& what) : std::runtime_error(what) {}
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }
inline Matrix antihermitian_part(const Matrix& m) { return 0.5 * (m - m.adjoint()); }

inline Matrix traceless_part(const Matrix& m) {
  const auto n = m.rows();
  return m - (m.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
}

inline bool is_hermitian(const Matrix& m, double tol = tol_exact) {
  return max_abs(m - m.adjoint()) <= tol;
}

inline bool is_antihermitian(const Matrix& m, double tol = tol_exact) {
  return max_abs(m + m.adjoint()) <= tol;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// Seeded random source for every randomized test and initializer in the
// library. All draws are deterministic given the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = default_seed) : engine_(seed) {}

  double real(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double gaussian(double sigma = 1.0) {
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }
  Complex complex_gaussian(double sigma = 1.0) {
    return {gaussian(sigma), gaussian(sigma)};
  }
  int integer(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols, double sigma = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_gaussian(sigma);
    return m;
  }
  Matrix hermitian(Eigen::Index n, double sigma = 1.0) {
    return hermitian_part(matrix(n, n, sigma));
  }
  Matrix antihermitian_traceless(Eigen::Index n, double sigma = 1.0) {
    return traceless_part(antihermitian_part(matrix(n, n, sigma)));
  }
  Matrix traceless(Eigen::Index n, double sigma = 1.0) {
    return traceless_part(matrix(n, n, sigma));
  }
  // Haar-ish special unitary from the QR of a complex Gaussian matrix.
  Matrix special_unitary(Eigen::Index n, double sigma = 1.0) {
    const Matrix g = matrix(n, n, sigma);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Complex det = q.determinant();
    q.col(0) /= det;  // push the phase into one column: det becomes 1
    return q;
  }
  Matrix invertible(Eigen::Index n, double sigma = 1.0) {
    for (;;) {
      Matrix m = matrix(n, n, sigma);
      if (std::abs(m.determinant()) > 1e-3) return m;
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Orthonormal basis of the null space of `m`, columns of the result.
// Threshold is relative to the largest singular value.
Matrix null_space(const Matrix& m, double rel_tol = tol_rank);

Eigen::Index numeric_rank(const Matrix& m, double rel_tol = tol_rank);

}  // namespace ncgeo

#endif
