#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace rank2 {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Error categories raised by the library. Every throw site uses one of these.
enum class Errc {
  InvalidArgument,
  InvalidModel,
  PFNotCritical,
  NonPositiveKernel,
  NotInteracting,
  NotBipartite,
  NotCriticalSBM,
  DegenerateDiagonal,
  OutOfDomain,
  HorizonMismatch,
  ZeroDiagonal,
  WrongRegime,
  AllZero,
  EmptySample,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// Small 2x2 helpers. Kept free functions so Mat2 stays an aggregate.
inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

inline Vec2 matvec(const Mat2& a, const Vec2& v) {
  return {a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]};
}

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {{{a[0][0] + b[0][0], a[0][1] + b[0][1]}, {a[1][0] + b[1][0], a[1][1] + b[1][1]}}};
}

inline Mat2 operator-(const Mat2& a, const Mat2& b) {
  return {{{a[0][0] - b[0][0], a[0][1] - b[0][1]}, {a[1][0] - b[1][0], a[1][1] - b[1][1]}}};
}

inline Mat2 scaled(const Mat2& a, double s) {
  return {{{a[0][0] * s, a[0][1] * s}, {a[1][0] * s, a[1][1] * s}}};
}

inline Mat2 diag(double a, double b) { return {{{a, 0.0}, {0.0, b}}}; }

inline double det(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline bool is_symmetric(const Mat2& a, double tol = 0.0) {
  return std::abs(a[0][1] - a[1][0]) <= tol * std::max(1.0, std::abs(a[0][1]));
}

inline double max_abs(const Mat2& a) {
  double m = 0.0;
  for (const auto& row : a)
    for (double x : row) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace rank2
