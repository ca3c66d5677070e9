#include "refertriage/project.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "refertriage/csv.hpp"
#include "refertriage/errors.hpp"

namespace refertriage {

EigenDecomposition symmetric_eigen(const Matrix& sym) {
    const size_t d = sym.rows();
    Matrix a = sym;
    Matrix v(d, d);
    for (size_t i = 0; i < d; ++i) v.at(i, i) = 1.0;

    // cyclic Jacobi sweeps until the off-diagonal mass is negligible
    const double scale = [&] {
        double s = 0.0;
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j) s += std::fabs(a.at(i, j));
        return s > 0.0 ? s : 1.0;
    }();

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p + 1 < d; ++p)
            for (size_t q = p + 1; q < d; ++q) off += std::fabs(a.at(p, q));
        if (off / scale < 1e-14) break;

        for (size_t p = 0; p + 1 < d; ++p) {
            for (size_t q = p + 1; q < d; ++q) {
                const double apq = a.at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (size_t k = 0; k < d; ++k) {
                    const double akp = a.at(k, p);
                    const double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (size_t k = 0; k < d; ++k) {
                    const double apk = a.at(p, k);
                    const double aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (size_t k = 0; k < d; ++k) {
                    const double vkp = v.at(k, p);
                    const double vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<size_t> order(d);
    for (size_t i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        if (a.at(x, x) != a.at(y, y)) return a.at(x, x) > a.at(y, y);
        return x < y;
    });

    EigenDecomposition out;
    out.values.resize(d);
    out.vectors = Matrix(d, d);
    for (size_t i = 0; i < d; ++i) {
        out.values[i] = a.at(order[i], order[i]);
        for (size_t k = 0; k < d; ++k) out.vectors.at(k, i) = v.at(k, order[i]);
    }
    return out;
}

namespace {

Matrix centered(const Matrix& X) {
    Matrix xc = X;
    const size_t n = X.rows();
    const size_t d = X.cols();
    for (size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (size_t i = 0; i < n; ++i) mean += X.at(i, j);
        mean /= static_cast<double>(n);
        for (size_t i = 0; i < n; ++i) xc.at(i, j) -= mean;
    }
    return xc;
}

// Covariance entries are independent; each (j, k) cell sums rows in index
// order, so the parallel and serial results are bit-identical.
Matrix covariance(const Matrix& xc, bool parallel) {
    const size_t n = xc.rows();
    const size_t d = xc.cols();
    Matrix cov(d, d);
    const double denom = static_cast<double>(n - 1);

    const int64_t dd = static_cast<int64_t>(d);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (int64_t j = 0; j < dd; ++j) {
        for (size_t k = static_cast<size_t>(j); k < d; ++k) {
            double sum = 0.0;
            for (size_t i = 0; i < n; ++i)
                sum += xc.at(i, static_cast<size_t>(j)) * xc.at(i, k);
            cov.at(static_cast<size_t>(j), k) = sum / denom;
            cov.at(k, static_cast<size_t>(j)) = sum / denom;
        }
    }
    return cov;
}

Projection2D pca_impl(const Matrix& X, bool parallel) {
    if (X.rows() < 3) throw InvalidArgument("pca_project: need at least 3 points");
    if (X.cols() < 2) throw InvalidArgument("pca_project: need at least 2 dimensions");

    const Matrix xc = centered(X);
    const Matrix cov = covariance(xc, parallel);
    double trace = 0.0;
    for (size_t j = 0; j < cov.rows(); ++j) trace += cov.at(j, j);

    EigenDecomposition eig = symmetric_eigen(cov);

    Projection2D proj;
    proj.method_tag = "pca";
    proj.coordinates = Matrix(X.rows(), 2);

    for (size_t c = 0; c < 2; ++c) {
        // flip so the largest-magnitude loading is positive
        size_t arg = 0;
        for (size_t k = 1; k < cov.rows(); ++k)
            if (std::fabs(eig.vectors.at(k, c)) > std::fabs(eig.vectors.at(arg, c))) arg = k;
        const double flip = eig.vectors.at(arg, c) < 0.0 ? -1.0 : 1.0;

        for (size_t i = 0; i < X.rows(); ++i) {
            double dot = 0.0;
            for (size_t k = 0; k < cov.rows(); ++k) dot += xc.at(i, k) * eig.vectors.at(k, c);
            proj.coordinates.at(i, c) = flip * dot;
        }
        proj.explained_variance_fractions[c] =
            trace > 0.0 ? std::clamp(eig.values[c] / trace, 0.0, 1.0) : 0.0;
    }
    return proj;
}

} // namespace

Projection2D pca_project(const Matrix& X) { return pca_impl(X, true); }

Projection2D pca_project_serial(const Matrix& X) { return pca_impl(X, false); }

Projection2D external_projection(const Matrix& coordinates) {
    if (coordinates.cols() != 2)
        throw InvalidArgument("external_projection: coordinates must be n x 2");
    Projection2D proj;
    proj.coordinates = coordinates;
    proj.method_tag = "external";
    proj.explained_variance_fractions = {0.0, 0.0};
    return proj;
}

void write_projection_csv(const std::string& path, const Projection2D& projection,
                          const std::vector<std::string>& record_ids,
                          const std::vector<int>& labels) {
    const size_t n = projection.coordinates.rows();
    if (record_ids.size() != n || labels.size() != n)
        throw InvalidArgument("write_projection_csv: ids/labels not aligned with coordinates");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "record_id,x,y,label,method\n";
    char buf[32];
    auto put = [&](double v) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, res.ptr - buf);
    };
    for (size_t i = 0; i < n; ++i) {
        out << csv_quote(record_ids[i]) << ',';
        put(projection.coordinates.at(i, 0));
        out << ',';
        put(projection.coordinates.at(i, 1));
        out << ',' << labels[i] << ',' << projection.method_tag << "\n";
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace refertriage
