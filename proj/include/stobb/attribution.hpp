#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "stobb/common.hpp"
#include "stobb/oracle.hpp"

namespace stobb {

// Parameters of the perturbation-based linear attributor. Serialized into the
// state file so third parties can replay a run exactly.
struct ExplainerConfig {
    std::size_t n_perturbations = 5000;
    double kernel_bandwidth = 0.0;  // 0 means "use 0.75 * sqrt(d)"
    double ridge_strength = 1e-3;
    std::uint64_t seed = 0;
    Vector feature_means;
    Vector feature_stds;  // strictly positive; constant features get 1

    double effective_bandwidth(std::size_t d) const {
        return kernel_bandwidth > 0 ? kernel_bandwidth : 0.75 * std::sqrt(double(d));
    }

    static void standardization_from(const std::vector<Vector>& rows, Vector& means,
                                     Vector& stds) {
        if (rows.empty()) return;
        std::size_t d = rows[0].size();
        means.assign(d, 0.0);
        stds.assign(d, 0.0);
        for (const Vector& r : rows)
            for (std::size_t j = 0; j < d; ++j) means[j] += r[j];
        for (double& m : means) m /= double(rows.size());
        for (const Vector& r : rows)
            for (std::size_t j = 0; j < d; ++j) {
                double dv = r[j] - means[j];
                stds[j] += dv * dv;
            }
        for (double& s : stds) {
            s = std::sqrt(s / double(rows.size()));
            if (s <= 0) s = 1.0;
        }
    }
};

// Local explainer abstraction; tests inject fixed attributions through it.
class Attributor {
  public:
    virtual ~Attributor() = default;
    virtual Vector attribute(const BlackBoxModel& model, const Vector& x, ClassId c) = 0;
};

namespace detail {

// Deterministic standard normal stream: mt19937_64 uniforms + Box-Muller.
// std::normal_distribution is implementation-defined, so it is avoided here.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    double uniform() { return double(rng_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Weighted ridge fit of y on [1, z] with unpenalized intercept. Returns the
// d non-intercept coefficients. Throws on a degenerate system.
inline Vector weighted_ridge(const std::vector<Vector>& z, const std::vector<double>& y,
                             const std::vector<double>& w, double lambda) {
    std::size_t n = z.size(), d = z[0].size(), m = d + 1;
    std::vector<double> A(m * m, 0.0), rhs(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        // row = (1, z_i)
        double wi = w[i];
        A[0] += wi;
        rhs[0] += wi * y[i];
        for (std::size_t a = 0; a < d; ++a) {
            A[(a + 1) * m] += wi * z[i][a];
            A[a + 1] += wi * z[i][a];
            rhs[a + 1] += wi * z[i][a] * y[i];
            for (std::size_t b = 0; b < d; ++b) A[(a + 1) * m + b + 1] += wi * z[i][a] * z[i][b];
        }
    }
    for (std::size_t a = 1; a < m; ++a) A[a * m + a] += lambda;

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r * m + col]) > std::abs(A[piv * m + col])) piv = r;
        if (std::abs(A[piv * m + col]) < 1e-12)
            throw std::runtime_error("degenerate design matrix in ridge fit");
        if (piv != col) {
            for (std::size_t cc = 0; cc < m; ++cc) std::swap(A[piv * m + cc], A[col * m + cc]);
            std::swap(rhs[piv], rhs[col]);
        }
        double p = A[col * m + col];
        for (std::size_t r = col + 1; r < m; ++r) {
            double f = A[r * m + col] / p;
            if (f == 0.0) continue;
            for (std::size_t cc = col; cc < m; ++cc) A[r * m + cc] -= f * A[col * m + cc];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> beta(m, 0.0);
    for (std::size_t r = m; r-- > 0;) {
        double acc = rhs[r];
        for (std::size_t cc = r + 1; cc < m; ++cc) acc -= A[r * m + cc] * beta[cc];
        beta[r] = acc / A[r * m + r];
    }
    return Vector(beta.begin() + 1, beta.end());
}

inline std::uint64_t point_seed(std::uint64_t base_seed, const Vector& x) {
    std::uint64_t h = base_seed ^ 0x9e3779b97f4a7c15ull;
    for (double v : x) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof bits);
        h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace detail

// LIME-style attribution: Gaussian perturbations around the standardized
// query point, exponential kernel weights, weighted ridge regression of the
// one-vs-rest indicator of the predicted class. Deterministic given
// (x, cfg.seed); the rng seed is derived from both, so the result does not
// depend on call order.
class LimeAttributor final : public Attributor {
  public:
    explicit LimeAttributor(ExplainerConfig cfg) : cfg_(std::move(cfg)) {}

    const ExplainerConfig& config() const { return cfg_; }

    Vector attribute(const BlackBoxModel& model, const Vector& x, ClassId c) override {
        std::size_t d = x.size();
        if (cfg_.feature_means.size() != d || cfg_.feature_stds.size() != d)
            throw ContractViolation("attribute: standardization statistics missing");
        double bw = cfg_.effective_bandwidth(d);
        detail::GaussianStream gauss(detail::point_seed(cfg_.seed, x));

        Vector x_std(d);
        for (std::size_t j = 0; j < d; ++j)
            x_std[j] = (x[j] - cfg_.feature_means[j]) / cfg_.feature_stds[j];

        std::size_t n = cfg_.n_perturbations;
        std::vector<Vector> z(n, Vector(d));
        std::vector<double> y(n), w(n);
        Vector probe(d);
        for (std::size_t i = 0; i < n; ++i) {
            double sq = 0;
            for (std::size_t j = 0; j < d; ++j) {
                double g = gauss.next();
                z[i][j] = x_std[j] + g;
                sq += g * g;
                probe[j] = z[i][j] * cfg_.feature_stds[j] + cfg_.feature_means[j];
            }
            w[i] = std::exp(-sq / (bw * bw));
            y[i] = model.predict(probe) == c ? 1.0 : 0.0;
        }

        try {
            return detail::weighted_ridge(z, y, w, cfg_.ridge_strength);
        } catch (const std::runtime_error&) {
            return detail::weighted_ridge(z, y, w, cfg_.ridge_strength * 10.0);
        }
    }

  private:
    ExplainerConfig cfg_;
};

// Returns pre-recorded attribution vectors keyed by input vector. Missing
// keys are an error, not a fallback.
class FixedAttributor final : public Attributor {
  public:
    FixedAttributor() = default;
    explicit FixedAttributor(std::map<Vector, Vector> table) : table_(std::move(table)) {}

    void insert(Vector x, Vector a) {
        auto it = table_.find(x);
        if (it != table_.end() && it->second != a)
            throw ContractViolation("fixed attributor: conflicting attribution for same input");
        table_.emplace(std::move(x), std::move(a));
    }

    Vector attribute(const BlackBoxModel&, const Vector& x, ClassId) override {
        auto it = table_.find(x);
        if (it == table_.end())
            throw std::runtime_error("fixed attributor: no attribution recorded for input");
        return it->second;
    }

  private:
    std::map<Vector, Vector> table_;
};

}  // namespace stobb
