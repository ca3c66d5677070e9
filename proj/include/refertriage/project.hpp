#pragma once

#include <array>
#include <string>
#include <vector>

#include "refertriage/matrix.hpp"

namespace refertriage {

struct Projection2D {
    Matrix coordinates;                                  // n x 2
    std::array<double, 2> explained_variance_fractions{}; // eigenvalue / trace
    std::string method_tag = "pca";
};

// Centers columns, eigen-decomposes the D x D covariance, projects onto the
// top-2 principal directions. Sign convention: each direction's
// largest-magnitude loading is positive.
Projection2D pca_project(const Matrix& X);
Projection2D pca_project_serial(const Matrix& X);

// Wraps externally computed 2-D coordinates (e.g. a UMAP layout) so they flow
// through the same reporting; explained fractions are not defined for these.
Projection2D external_projection(const Matrix& coordinates);

// CSV with header record_id,x,y,label,method.
void write_projection_csv(const std::string& path, const Projection2D& projection,
                          const std::vector<std::string>& record_ids,
                          const std::vector<int>& labels);

// Jacobi eigen-decomposition of a symmetric matrix; returns eigenvalues and
// matching eigenvectors sorted by descending eigenvalue.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors; // column i is the eigenvector for values[i]
};
EigenDecomposition symmetric_eigen(const Matrix& sym);

} // namespace refertriage
