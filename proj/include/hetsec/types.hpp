#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hetsec {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;     // column vector, e.g. a precoder
using CRow = Eigen::RowVectorXcd;  // row vector, e.g. a channel
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree with each other or with the network configuration.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A configuration violates one of its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The QoS targets cannot be met within the power budget.
class QosInfeasible : public Error {
 public:
  using Error::Error;
};

/// The conic backend broke down (or kept breaking down) on a well-formed problem.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A channel draw is rank deficient where full rank is required; callers resample.
class DegenerateChannel : public Error {
 public:
  using Error::Error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace hetsec
