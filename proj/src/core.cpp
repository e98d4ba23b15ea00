#include "qmeter/core.hpp"

#include <cmath>

namespace qmeter {

namespace {
constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kEigFloor = -1e-10;
}  // namespace

PureState::PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 2) throw std::invalid_argument("PureState: dimension must be >= 2");
  const double n = amps_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("PureState: vector has no norm");
  amps_ /= n;
}

PureState PureState::from_reals(const std::vector<double>& amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return PureState(std::move(v));
}

std::vector<double> PureState::probabilities() const {
  std::vector<double> p(dim());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amps_(static_cast<Eigen::Index>(i)));
  return p;
}

Observable::Observable(std::vector<double> eigenvalues) : eigs_(std::move(eigenvalues)) {
  if (eigs_.size() < 2) throw std::invalid_argument("Observable: need at least two eigenvalues");
  for (std::size_t i = 0; i < eigs_.size(); ++i) {
    if (!std::isfinite(eigs_[i])) throw std::invalid_argument("Observable: non-finite eigenvalue");
    for (std::size_t j = i + 1; j < eigs_.size(); ++j)
      if (eigs_[i] == eigs_[j])
        throw std::invalid_argument("Observable: eigenvalues must be pairwise distinct");
  }
}

double Observable::min_eigenvalue() const {
  double m = eigs_[0];
  for (double e : eigs_) m = std::min(m, e);
  return m;
}

double Observable::max_eigenvalue() const {
  double m = eigs_[0];
  for (double e : eigs_) m = std::max(m, e);
  return m;
}

double Observable::spread(const std::vector<double>& weights) const {
  if (weights.size() != eigs_.size())
    throw std::invalid_argument("Observable::spread: weight/eigenvalue size mismatch");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < eigs_.size(); ++i) {
    m1 += weights[i] * eigs_[i];
    m2 += weights[i] * eigs_[i] * eigs_[i];
  }
  const double v = m2 - m1 * m1;
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw std::invalid_argument("HermitianOperator: matrix must be square");
  const double scale = std::max(1.0, m_.norm());
  if ((m_ - m_.adjoint()).norm() > kHermTol * scale)
    throw std::invalid_argument("HermitianOperator: matrix is not hermitian");
}

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2)
    throw std::invalid_argument("DensityMatrix: matrix must be square, dim >= 2");
  const double scale = std::max(1.0, m_.norm());
  if ((m_ - m_.adjoint()).norm() > kHermTol * scale)
    throw std::invalid_argument("DensityMatrix: matrix is not hermitian");
  if (std::abs(m_.trace().real() - 1.0) > kTraceTol || std::abs(m_.trace().imag()) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace must equal 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigFloor)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double expectation(const PureState& psi, const Observable& s) {
  if (psi.dim() != s.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i)
    acc += std::norm(psi.amplitude(i)) * s.eigenvalue(i);
  return acc;
}

double observable_variance(const PureState& psi, const Observable& s) {
  if (psi.dim() != s.dim()) throw std::invalid_argument("observable_variance: dimension mismatch");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double p = std::norm(psi.amplitude(i));
    m1 += p * s.eigenvalue(i);
    m2 += p * s.eigenvalue(i) * s.eigenvalue(i);
  }
  return m2 - m1 * m1;
}

double expectation(const PureState& psi, const HermitianOperator& h) {
  if (psi.dim() != h.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  return (psi.amplitudes().adjoint() * h.matrix() * psi.amplitudes())(0, 0).real();
}

double expectation(const DensityMatrix& rho, const HermitianOperator& h) {
  if (rho.dim() != h.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  return (rho.matrix() * h.matrix()).trace().real();
}

CMatrix matrix_exponential_evolve(const HermitianOperator& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw NumericalError("matrix_exponential_evolve: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  CVector phases(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    phases(i) = std::exp(cdouble(0.0, -lam(i) * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CVector evolve(const HermitianOperator& h, double t, const CVector& psi) {
  if (psi.size() != h.matrix().rows()) throw std::invalid_argument("evolve: dimension mismatch");
  return matrix_exponential_evolve(h, t) * psi;
}

CMatrix partial_trace(const CMatrix& joint, std::size_t da, std::size_t db, bool keep_first) {
  const auto n = static_cast<Eigen::Index>(da * db);
  if (joint.rows() != n || joint.cols() != n)
    throw std::invalid_argument("partial_trace: dimensions do not factor the matrix");
  if (keep_first) {
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(da));
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < da; ++j)
        for (std::size_t k = 0; k < db; ++k)
          out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
              joint(static_cast<Eigen::Index>(i * db + k), static_cast<Eigen::Index>(j * db + k));
    return out;
  }
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
  for (std::size_t i = 0; i < db; ++i)
    for (std::size_t j = 0; j < db; ++j)
      for (std::size_t k = 0; k < da; ++k)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            joint(static_cast<Eigen::Index>(k * db + i), static_cast<Eigen::Index>(k * db + j));
  return out;
}

}  // namespace qmeter
