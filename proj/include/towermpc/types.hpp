#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace towermpc {

inline constexpr int kStates = 5;  // q1..q4, rotor speed
inline constexpr int kInputs = 2;  // wind speed, additional generator torque

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, kStates, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat5 = Eigen::Matrix<double, kStates, kStates>;
using Mat52 = Eigen::Matrix<double, kStates, kInputs>;
using RowVec5 = Eigen::Matrix<double, 1, kStates>;

// Parameter outside the physical domain of a model (negative mass, zero wind, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A linear system that has to be inverted is singular at the requested point.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operating point outside the band covered by a model or model grid.
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Malformed argument (empty set, mismatched lengths, bad configuration).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace towermpc
