#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stobb/common.hpp"

namespace stobb {

// Deterministic 2-D principal-component projection. Covariance of the
// standardized rows, cyclic Jacobi eigensolver, top-2 axes. Sign convention:
// the largest-magnitude component of each axis is positive. A zero-variance
// axis emits coordinate 0 so degenerate bases still project totally.
class PcaProjection {
  public:
    PcaProjection(const std::vector<Vector>& rows, const Vector& means, const Vector& stds) {
        if (rows.size() < 2) throw std::runtime_error("projection needs at least 2 observations");
        std::size_t d = rows[0].size();
        means_ = means;
        stds_ = stds;

        std::vector<Vector> z(rows.size(), Vector(d));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) z[i][j] = (rows[i][j] - means[j]) / stds[j];

        std::vector<double> cov(d * d, 0.0);
        for (const Vector& r : z)
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) cov[a * d + b] += r[a] * r[b];
        for (double& v : cov) v /= double(rows.size());

        std::vector<double> eig(d, 0.0);
        std::vector<double> vecs(d * d, 0.0);
        jacobi(cov, d, eig, vecs);

        // top-2 eigenvalues, ties broken by lower column index
        std::size_t i0 = 0, i1 = (d > 1) ? 1 : 0;
        for (std::size_t i = 0; i < d; ++i)
            if (eig[i] > eig[i0]) i0 = i;
        if (d > 1) {
            i1 = (i0 == 0) ? 1 : 0;
            for (std::size_t i = 0; i < d; ++i)
                if (i != i0 && eig[i] > eig[i1]) i1 = i;
        }
        axis_u_ = column(vecs, d, i0);
        axis_v_ = column(vecs, d, i1);
        var_u_ = eig[i0];
        var_v_ = (d > 1) ? eig[i1] : 0.0;
        fix_sign(axis_u_);
        fix_sign(axis_v_);
    }

    std::pair<double, double> project(const Vector& x) const {
        double u = 0, v = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            double zj = (x[j] - means_[j]) / stds_[j];
            u += axis_u_[j] * zj;
            v += axis_v_[j] * zj;
        }
        if (var_u_ <= kDegenerate) u = 0;
        if (var_v_ <= kDegenerate) v = 0;
        return {u, v};
    }

    const Vector& axis_u() const { return axis_u_; }
    const Vector& axis_v() const { return axis_v_; }
    double variance_u() const { return var_u_; }
    double variance_v() const { return var_v_; }

  private:
    static constexpr double kDegenerate = 1e-12;

    static void jacobi(std::vector<double> a, std::size_t n, std::vector<double>& eig,
                       std::vector<double>& vecs) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) vecs[i * n + j] = (i == j) ? 1.0 : 0.0;
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
            if (off < 1e-24) break;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) {
                    double apq = a[p * n + q];
                    if (std::abs(apq) < 1e-30) continue;
                    double app = a[p * n + p], aqq = a[q * n + q];
                    double theta = (aqq - app) / (2 * apq);
                    double t = (theta >= 0 ? 1.0 : -1.0) /
                               (std::abs(theta) + std::sqrt(theta * theta + 1));
                    double c = 1 / std::sqrt(t * t + 1), s = t * c;
                    for (std::size_t k = 0; k < n; ++k) {
                        double akp = a[k * n + p], akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        double apk = a[p * n + k], aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        double vkp = vecs[k * n + p], vkq = vecs[k * n + q];
                        vecs[k * n + p] = c * vkp - s * vkq;
                        vecs[k * n + q] = s * vkp + c * vkq;
                    }
                }
        }
        for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
    }

    static Vector column(const std::vector<double>& m, std::size_t n, std::size_t col) {
        Vector out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = m[i * n + col];
        return out;
    }

    static void fix_sign(Vector& axis) {
        std::size_t big = 0;
        for (std::size_t i = 1; i < axis.size(); ++i)
            if (std::abs(axis[i]) > std::abs(axis[big])) big = i;
        if (axis[big] < 0)
            for (double& v : axis) v = -v;
    }

    Vector means_, stds_, axis_u_, axis_v_;
    double var_u_ = 0, var_v_ = 0;
};

}  // namespace stobb
