#pragma once

#include "confreg/linalg.hpp"

#include <string>
#include <variant>

namespace confreg {

struct NonNegative {
  Eigen::Index p = 0;
};

struct LinearInequality {
  Matrix A;
  Vector b;
};

// Entries of lo/up may be -inf/+inf.
struct Box {
  Vector lo;
  Vector up;
};

// {d : A d <= 0}. Zero rows means no constraint at all.
struct PolyhedralCone {
  Matrix A;
};

/// Explicit inequality form G x <= g, with infinite box sides dropped.
struct Inequalities {
  Matrix G;
  Vector g;
};

class ConstraintSet {
 public:
  using Variant = std::variant<NonNegative, LinearInequality, Box, PolyhedralCone>;

  ConstraintSet() : v_(PolyhedralCone{Matrix(0, 0)}) {}
  explicit ConstraintSet(Variant v);

  static ConstraintSet none(Eigen::Index p) { return ConstraintSet(PolyhedralCone{Matrix(0, p)}); }
  static ConstraintSet nonnegative(Eigen::Index p) { return ConstraintSet(NonNegative{p}); }

  const Variant& variant() const { return v_; }
  Eigen::Index dim() const;

  /// "nonnegative", "linear", "box", "cone" or "none".
  std::string kind() const;
  bool is_cone() const;
  bool is_unconstrained() const;

  Inequalities inequalities() const;
  /// Rows R of the recession cone {d : R d <= 0}.
  Matrix recession_rows() const;

  double violation(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-8) const;

  /// {z : z + x in X} as a linear inequality set.
  ConstraintSet shifted(const Vector& x) const;

 private:
  Variant v_;
};

}  // namespace confreg
