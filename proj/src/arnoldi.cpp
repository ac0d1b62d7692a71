#include "subfp/arnoldi.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <random>

namespace subfp {

namespace {

using Complex = std::complex<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

struct RitzSet {
  std::vector<Complex> theta;
  std::vector<Eigen::VectorXcd> vectors;
  bool converged = false;
};

RitzSet arnoldi(const Eigen::SparseLU<SparseMatrix>& lu, int n, int m, int count, double tol) {
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Vector v0(n);
  for (int i = 0; i < n; ++i) v0[i] = u(rng);
  V.col(0) = v0 / v0.norm();

  int used = m;
  for (int j = 0; j < m; ++j) {
    Vector w = lu.solve(Vector(V.col(j)));
    if (lu.info() != Eigen::Success) throw ConvergenceError("arnoldi: solve failed");
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * c;
      H.col(j).head(j + 1) += c;
    }
    const double beta = w.norm();
    H(j + 1, j) = beta;
    if (beta < 1e-14 * H.col(j).head(j + 1).norm()) {
      used = j + 1;
      break;
    }
    V.col(j + 1) = w / beta;
  }

  const Eigen::MatrixXd Hm = H.topLeftCorner(used, used);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Hm);
  if (es.info() != Eigen::Success) throw ConvergenceError("arnoldi: Hessenberg eigensolver failed");
  const Eigen::VectorXcd theta = es.eigenvalues();
  const Eigen::MatrixXcd Y = es.eigenvectors();

  std::vector<int> order(used);
  for (int i = 0; i < used; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });

  RitzSet out;
  out.converged = true;
  const double h_next = used < m ? 0.0 : H(m, m - 1);
  const int take = std::min(count, used);
  for (int k = 0; k < take; ++k) {
    const int i = order[k];
    const Eigen::VectorXcd y = Y.col(i);
    const double res = std::abs(h_next * y[used - 1]) / std::max(1e-300, std::abs(theta[i]));
    if (res > tol) out.converged = false;
    out.theta.push_back(theta[i]);
    out.vectors.push_back(V.leftCols(used).cast<Complex>() * y);
  }
  if (take < count) out.converged = false;
  return out;
}

EigenPair refine(const ComplexSparse& A, Complex lambda, Eigen::VectorXcd x,
                 const ArnoldiOptions& opt) {
  const int n = static_cast<int>(A.rows());
  ComplexSparse I(n, n);
  I.setIdentity();
  auto residual = [&](const Eigen::VectorXcd& v, Complex l) {
    return (A * v - l * v).norm() / v.norm();
  };
  auto rayleigh = [&](const Eigen::VectorXcd& v) { return v.dot(A * v) / v.squaredNorm(); };

  x /= x.norm();
  lambda = rayleigh(x);
  double res = residual(x, lambda);
  if (res <= 0.1 * opt.refine_tol) return {lambda, x, res};

  const double nudge = 1e-9 * std::max(1.0, std::abs(lambda));
  Eigen::SparseLU<ComplexSparse> lu;
  lu.compute(A - (lambda + nudge) * I);
  if (lu.info() != Eigen::Success) {
    lu.compute(A - (lambda + 1e3 * nudge) * I);
    if (lu.info() != Eigen::Success) throw ConvergenceError("eigenpair refinement: factorization failed");
  }
  for (int it = 0; it < opt.refine_steps && res > 0.1 * opt.refine_tol; ++it) {
    Eigen::VectorXcd y = lu.solve(x);
    y /= y.norm();
    // fix the phase so successive iterates are comparable
    Eigen::Index imax;
    y.cwiseAbs().maxCoeff(&imax);
    y *= std::abs(y[imax]) / y[imax];
    x = y;
    lambda = rayleigh(x);
    res = residual(x, lambda);
  }
  return {lambda, x, res};
}

}  // namespace

std::vector<EigenPair> shift_invert_eigs(const SparseMatrix& A, int count,
                                         const ArnoldiOptions& opt) {
  const int n = static_cast<int>(A.rows());
  if (count < 1 || count > n) throw std::invalid_argument("shift_invert_eigs: bad count");
  SparseMatrix I(n, n);
  I.setIdentity();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(A - opt.shift * I);
  if (lu.info() != Eigen::Success) throw ConvergenceError("shift_invert_eigs: shifted matrix is singular");

  int m = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * count + 20, 40);
  RitzSet ritz;
  for (int attempt = 0;; ++attempt) {
    m = std::min(m, n);
    ritz = arnoldi(lu, n, m, count, opt.ritz_tol);
    if (ritz.converged || m == n || attempt >= opt.max_restarts) break;
    m *= 2;
  }

  const ComplexSparse Ac = A.cast<Complex>();
  std::vector<EigenPair> out;
  for (size_t k = 0; k < ritz.theta.size(); ++k) {
    const Complex lambda = opt.shift + 1.0 / ritz.theta[k];
    EigenPair p = refine(Ac, lambda, ritz.vectors[k], opt);
    if (p.residual > opt.refine_tol)
      throw ConvergenceError("shift_invert_eigs: eigenpair residual above tolerance");
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(),
            [](const EigenPair& a, const EigenPair& b) { return a.value.real() > b.value.real(); });
  return out;
}

}  // namespace subfp
