#pragma once

#include "confreg/linalg.hpp"

#include <cstddef>
#include <vector>

namespace confreg {

struct VertexEnumeration {
  /// Extreme points of {x in L^perp : G x <= g}, L = lineality space.
  std::vector<Vector> vertices;
  /// Orthonormal basis of the lineality space ker(G).
  Matrix lineality;
  std::size_t bases_tried = 0;
  bool budget_exceeded = false;
};

/// Lexicographic enumeration of row subsets of size dim(L^perp), keeping
/// the nonsingular, feasible ones. Stops after `budget` candidate bases.
VertexEnumeration enumerate_vertices(const Matrix& G, const Vector& g, std::size_t budget = 100000,
                                     double tol = 1e-9);

/// Rows of G that vanish on all of {x : E x = 0, G x <= 0}.
std::vector<Eigen::Index> implicit_equalities(const Matrix& E, const Matrix& G);

/// Dimension of the polyhedral cone {x : E x = 0, G x <= 0} after mapping
/// through K, i.e. dim K(cone).
std::size_t image_cone_dimension(const Matrix& K, const Matrix& E, const Matrix& G);

}  // namespace confreg
