#pragma once
#include <cmath>
#include <functional>
#include <vector>
#include <svreg/simgen.hpp>
#include <svreg/solver.hpp>

namespace testing {

using namespace svreg;

struct Instance
{
    Dataset raw;
    Dataset data;   // standardized
    GroupSpec groups;
};

// Random instance with contiguous predictor groups of size <= max_group,
// contiguous modifier groups, the last `dummies` Z columns 0/1.
inline Instance random_instance(Rng& rng, Index n, Index p, Index K, Index max_group = 2, Index dummies = 0,
                                double signal = 1.0)
{
    Instance inst;
    Dataset& d = inst.raw;
    d.X.resize(n, p);
    d.Z.resize(n, K);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) d.X(i, j) = rng.normal();
        for (Index k = 0; k < K; ++k) d.Z(i, k) = k >= K - dummies ? (rng.uniform() < 0.5 ? 1.0 : 0.0) : rng.normal();
    }
    for (Index k = K - dummies; k < K; ++k) {
        // keep dummies non-constant
        d.Z(0, k) = 0.0;
        d.Z(1, k) = 1.0;
    }
    d.y = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        double v = rng.normal();
        v += signal * d.X(i, 0);
        if (p > 1) v -= 0.5 * signal * d.X(i, 1);
        if (K > 0) v += signal * d.X(i, 0) * d.Z(i, 0);
        d.y(i) = v;
    }
    for (Index j = 0; j < p;) {
        const Index size = std::min<Index>(p - j, 1 + static_cast<Index>(rng.below(max_group)));
        std::vector<Index> g;
        for (Index t = 0; t < size; ++t) g.push_back(j + t);
        inst.groups.predictor_groups.push_back(g);
        j += size;
    }
    for (Index k = 0; k < K;) {
        const Index size = std::min<Index>(K - k, 1 + static_cast<Index>(rng.below(2)));
        std::vector<Index> g;
        for (Index t = 0; t < size; ++t) g.push_back(k + t);
        inst.groups.modifier_groups.push_back(g);
        k += size;
    }
    inst.data = standardize(d).data;
    return inst;
}

// Dense [1, Z, X, x_j z_k] design, interaction column index 1 + K + p + j*K + k.
inline Matrix full_interaction_design(const Dataset& d)
{
    const Index n = d.n(), p = d.p(), K = d.k();
    Matrix A(n, 1 + K + p + p * K);
    A.col(0).setOnes();
    A.middleCols(1, K) = d.Z;
    A.middleCols(1 + K, p) = d.X;
    for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < K; ++k) A.col(1 + K + p + j * K + k) = d.X.col(j).cwiseProduct(d.Z.col(k));
    }
    return A;
}

/**
 * Independent convex minimizer for the svReg objective with the intercepts
 * profiled out. Parameters u = (beta, vec(theta) row-major). Every penalty
 * term is c_i * ||u_{S_i}||, smoothed as c_i * sqrt(||u_S||^2 + eps^2) and
 * minimized by damped Newton while eps shrinks to 1e-12.
 */
struct ConvexOracle
{
    struct Term
    {
        std::vector<Index> idx;
        double weight;
    };

    Matrix design;   // projected [X, XZ] / sqrt(N)
    Vector target;   // projected y / sqrt(N)
    std::vector<Term> terms;
    Index p = 0, K = 0;

    // modifier weight per group and main multiplier per predictor group, from the formulas directly
    ConvexOracle(const Dataset& d, const GroupSpec& gs, const FitConfig& cfg)
        : p(d.p()), K(d.k())
    {
        const Index n = d.n();
        Matrix B(n, 1 + K);
        B.col(0).setOnes();
        B.rightCols(K) = d.Z;
        Matrix F(n, p + p * K);
        F.leftCols(p) = d.X;
        for (Index j = 0; j < p; ++j) {
            for (Index k = 0; k < K; ++k) F.col(p + j * K + k) = d.X.col(j).cwiseProduct(d.Z.col(k));
        }
        const Matrix Pb = B * B.completeOrthogonalDecomposition().pseudoInverse();
        const double s = 1.0 / std::sqrt(static_cast<double>(n));
        design = s * (F - Pb * F);
        target = s * (d.y - Pb * d.y);

        const double lam = cfg.lambda, a = cfg.alpha;
        for (const auto& g : gs.predictor_groups) {
            const double pl = static_cast<double>(g.size());
            const double m = cfg.weight_mode == WeightMode::unit ? 1.0 : std::sqrt(pl);
            Term joint{{}, (1 - a) * lam * m};
            for (Index j : g) joint.idx.push_back(j);
            for (Index j : g) {
                for (Index k = 0; k < K; ++k) joint.idx.push_back(p + j * K + k);
            }
            terms.push_back(joint);
            for (const auto& mg : gs.modifier_groups) {
                const double pg = static_cast<double>(mg.size());
                double w = 1.0;
                if (cfg.weight_mode == WeightMode::consistent) w = std::sqrt(pg) / std::sqrt(1.0 + static_cast<double>(K));
                if (cfg.weight_mode == WeightMode::paper_literal) w = std::sqrt(pg);
                Term t{{}, (1 - a) * lam * m * w};
                for (Index j : g) {
                    for (Index k : mg) t.idx.push_back(p + j * K + k);
                }
                terms.push_back(t);
            }
        }
        for (Index j = 0; j < p; ++j) {
            for (Index k = 0; k < K; ++k) terms.push_back({{p + j * K + k}, a * lam});
        }
    }

    double value(const Vector& u, double eps = 0.0) const
    {
        double f = 0.5 * (target - design * u).squaredNorm();
        for (const auto& t : terms) {
            double sq = 0.0;
            for (Index i : t.idx) sq += u(i) * u(i);
            f += t.weight * std::sqrt(sq + eps * eps);
        }
        return f;
    }

    Vector minimize() const
    {
        const Index dim = design.cols();
        Vector u = Vector::Zero(dim);
        const Matrix H0 = design.transpose() * design;
        for (double eps = 1e-1; eps >= 1e-12; eps *= 0.1) {
            for (int it = 0; it < 200; ++it) {
                Vector g = -design.transpose() * (target - design * u);
                Matrix H = H0;
                for (const auto& t : terms) {
                    if (t.weight == 0.0) continue;
                    double sq = eps * eps;
                    for (Index i : t.idx) sq += u(i) * u(i);
                    const double s = std::sqrt(sq);
                    for (Index i : t.idx) {
                        g(i) += t.weight * u(i) / s;
                        for (Index j : t.idx) {
                            H(i, j) += t.weight * ((i == j ? 1.0 / s : 0.0) - u(i) * u(j) / (s * s * s));
                        }
                    }
                }
                H.diagonal().array() += 1e-14;
                const Vector step = H.ldlt().solve(-g);
                const double f0 = value(u, eps);
                double t = 1.0;
                Vector next = u + step;
                while (value(next, eps) > f0 + 1e-4 * t * g.dot(step) && t > 1e-12) {
                    t *= 0.5;
                    next = u + t * step;
                }
                const double gain = f0 - value(next, eps);
                u = next;
                if (gain < 1e-18 && step.norm() * t < 1e-14) break;
            }
        }
        return u;
    }

    double minimum() const { return value(minimize()); }
};

// Maximum |a - b| over entries.
inline double max_abs_diff(const Matrix& a, const Matrix& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace testing
