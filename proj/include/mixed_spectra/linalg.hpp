// Small dense subspace utilities.
#pragma once

#include "types.hpp"

#include <Eigen/SVD>

#include <algorithm>

namespace mixed_spectra {

struct NullSpace {
    MatX basis;          // columns are orthonormal, dimension d x k
    VecX singular_values;
    int rank = 0;
};

/// Orthonormal basis of {v : A v = 0} for an r x d matrix A. Singular values
/// at or below rel_tol * sigma_max count as zero. An empty or all-zero A gives
/// the full space.
inline NullSpace null_space(const MatX& rows, int dim, double rel_tol) {
    NullSpace out;
    if (rows.rows() == 0 || rows.cwiseAbs().maxCoeff() == 0.0) {
        out.basis = MatX::Identity(dim, dim);
        out.singular_values = VecX::Zero(0);
        return out;
    }
    // Pad to at least d rows so the full V factor is always square.
    MatX a = MatX::Zero(std::max<Eigen::Index>(rows.rows(), dim), dim);
    a.topRows(rows.rows()) = rows;
    Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeFullV);
    const VecX& s = svd.singularValues();
    const double cutoff = rel_tol * s(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) ++rank;
    }
    out.rank = rank;
    out.singular_values = s;
    out.basis = svd.matrixV().rightCols(dim - rank);
    return out;
}

/// Planar vectors are stored as Vec3 with z = 0; this keeps the first d entries.
inline VecX truncate(const Vec3& v, int dim) { return v.head(dim); }

} // namespace mixed_spectra
