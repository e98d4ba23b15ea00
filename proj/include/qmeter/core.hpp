#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qmeter {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Thrown when a computation (not a configuration) leaves the valid domain.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Normalized state vector on a finite-dimensional Hilbert space (dim >= 2).
class PureState {
 public:
  explicit PureState(CVector amplitudes);
  static PureState from_reals(const std::vector<double>& amps);

  const CVector& amplitudes() const { return amps_; }
  cdouble amplitude(std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  std::vector<double> probabilities() const;

 private:
  CVector amps_;
};

// Observable given by its spectrum in the reference (measurement) basis.
// Eigenvalues must be pairwise distinct so outcomes identify eigenstates.
class Observable {
 public:
  explicit Observable(std::vector<double> eigenvalues);

  const std::vector<double>& eigenvalues() const { return eigs_; }
  double eigenvalue(std::size_t i) const { return eigs_[i]; }
  std::size_t dim() const { return eigs_.size(); }
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  // Spread of eigenvalues under the given weights: sqrt(<S^2> - <S>^2).
  double spread(const std::vector<double>& weights) const;

 private:
  std::vector<double> eigs_;
};

// Hermitian matrix (validated to 1e-12 relative) for generators/observables
// that are not diagonal in the reference basis.
class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix m);
  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
};

// Density matrix with physicality validation (hermitian, unit trace,
// eigenvalues >= -1e-10).
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m);
  static DensityMatrix from_pure(const PureState& psi);

  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  cdouble entry(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double purity() const;

 private:
  CMatrix m_;
};

// <S> and Var(S) for a diagonal observable.
double expectation(const PureState& psi, const Observable& s);
double observable_variance(const PureState& psi, const Observable& s);

// <H> for a matrix observable.
double expectation(const PureState& psi, const HermitianOperator& h);
double expectation(const DensityMatrix& rho, const HermitianOperator& h);

// U = exp(-i H t) via self-adjoint eigendecomposition (hbar = 1).
CMatrix matrix_exponential_evolve(const HermitianOperator& h, double t);
CVector evolve(const HermitianOperator& h, double t, const CVector& psi);

// Trace out one factor of a bipartite operator on C^{da} (x) C^{db}.
// keep_first: returns the da x da reduction; otherwise the db x db one.
CMatrix partial_trace(const CMatrix& joint, std::size_t da, std::size_t db, bool keep_first);

}  // namespace qmeter
