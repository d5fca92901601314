#ifndef OPTPUMP_TYPES_HPP
#define OPTPUMP_TYPES_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace optpump {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Eigenvalues = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

}  // namespace optpump

#endif  // OPTPUMP_TYPES_HPP
