#include <svreg/solver.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace svreg {
namespace {

bool is_zero(const Vector& v)
{
    return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0;
}

double block_penalty(
    const Vector& u, const std::vector<Index>& offsets, const std::vector<double>& weights, double joint, double l1
)
{
    if (u.size() == 0) return 0.0;
    double grp = 0.0;
    for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
        grp += weights[g] * u.segment(offsets[g], offsets[g + 1] - offsets[g]).norm();
    }
    const Index theta_begin = offsets.front();
    const double l1_part = u.tail(u.size() - theta_begin).cwiseAbs().sum();
    return joint * (u.norm() + grp) + l1 * l1_part;
}

// Quadratic model of one block: 1/2 v^T H v - b^T v + penalty(v).
struct Subproblem
{
    Matrix H;
    Vector b;
    std::vector<Index> offsets;
    std::vector<double> weights;
    double joint = 0.0;
    double l1 = 0.0;

    double penalty(const Vector& v) const { return block_penalty(v, offsets, weights, joint, l1); }
    double value(const Vector& v) const { return 0.5 * v.dot(H * v) - b.dot(v) + penalty(v); }
};

// Proximal gradient with backtracking (step halving from 1) on the
// sufficient-decrease condition of the smooth part.
void prox_gradient(const Subproblem& s, Vector& v, int max_iter, double tol)
{
    double step = 1.0;
    Vector Hv = s.H * v;
    double smooth = 0.5 * v.dot(Hv) - s.b.dot(v);
    double F = smooth + s.penalty(v);
    Vector grad, w, Hw, delta;
    for (int it = 0; it < max_iter; ++it) {
        grad = Hv - s.b;
        double smooth_w = 0.0;
        while (true) {
            w = v - step * grad;
            kernels::hierarchical_prox(w, s.offsets, s.weights, step * s.joint, step * s.l1);
            delta = w - v;
            Hw.noalias() = s.H * w;
            smooth_w = 0.5 * w.dot(Hw) - s.b.dot(w);
            const double bound = smooth + grad.dot(delta) + delta.squaredNorm() / (2.0 * step);
            if (smooth_w <= bound + 1e-15 * std::abs(smooth) || step < 1e-30) break;
            step *= 0.5;
        }
        const double F_new = smooth_w + s.penalty(w);
        v.swap(w);
        Hv.swap(Hw);
        smooth = smooth_w;
        const bool done = std::abs(F - F_new) < tol;
        F = F_new;
        if (done) break;
    }
}

// argmin_b 1/2 b^T H b - g^T b + c ||b||_2 by cyclic univariate search.
Vector solve_beta_only(const Matrix& H, const Vector& g, double c, const Vector& start, const FitConfig& cfg)
{
    const Index pl = g.size();
    if (g.norm() <= c) return Vector::Zero(pl);
    if (pl == 1) {
        if (!(H(0, 0) > 0.0)) return Vector::Zero(1);
        Vector out(1);
        out(0) = kernels::soft_threshold(g(0), c) / H(0, 0);
        return out;
    }

    auto value = [&](const Vector& b) { return 0.5 * b.dot(H * b) - g.dot(b) + c * b.norm(); };
    // A nonzero start keeps the iterates away from the kink at the origin,
    // where coordinatewise search would stall.
    Vector beta = kernels::group_soft_threshold(g, c) / H.diagonal().maxCoeff();
    if (!is_zero(start) && value(start) < value(beta)) beta = start;

    for (int sweep = 0; sweep < cfg.max_inner_iter; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < pl; ++j) {
            const double hjj = H(j, j);
            if (!(hjj > 0.0)) {
                beta(j) = 0.0;
                continue;
            }
            const double old = beta(j);
            const double others_sq = std::max(beta.squaredNorm() - old * old, 0.0);
            const double q = g(j) - (H.row(j).dot(beta) - hjj * old);
            double next;
            if (c == 0.0) {
                next = q / hjj;
            } else {
                auto slice = [&](double t) { return 0.5 * hjj * t * t - q * t + c * std::sqrt(t * t + others_sq); };
                next = kernels::coordinate_search(slice, old);
            }
            max_change = std::max(max_change, std::abs(next - old));
            beta(j) = next;
        }
        if (max_change < cfg.inner_tol) break;
    }
    return beta;
}

struct BlockOutcome
{
    bool screened = false;
};

/**
 * One visit of predictor group l: screening, beta-only update with the
 * modifier tests, then proximal refinement over the surviving modifier
 * groups. `r` is the full residual on entry and exit.
 */
BlockOutcome update_block(
    const Block& blk, Index l, const GroupWeights& w, const FitConfig& cfg, Vector& r, Vector& u
)
{
    BlockOutcome out;
    const Index pl = blk.p_l();
    const Index G = static_cast<Index>(blk.offsets.size()) - 1;
    const double inv_n = 1.0 / static_cast<double>(r.size());
    const double joint = (1.0 - cfg.alpha) * cfg.lambda * w.main[l];
    const double al = cfg.alpha * cfg.lambda;

    const bool had = !is_zero(u);
    if (had) r.noalias() += blk.phi * u;
    Vector b = blk.phi.transpose() * r;
    b *= inv_n;

    auto block_value = [&](const Vector& v) {
        if (is_zero(v)) return 0.0;
        return 0.5 * v.dot(blk.gram * v) - b.dot(v) + block_penalty(v, blk.offsets, w.modifier, joint, al);
    };
    const double F_old = block_value(u);

    auto segment_of = [&](const Vector& v, Index g) {
        return v.segment(blk.offsets[g], blk.offsets[g + 1] - blk.offsets[g]);
    };

    std::vector<Vector> mod_corr(G);
    for (Index g = 0; g < G; ++g) mod_corr[g] = segment_of(b, g);
    const auto rep = kernels::screen_correlations(l, b.head(pl), mod_corr, w.main[l], w, cfg);

    Vector cand = Vector::Zero(blk.dim());
    if (rep.decision == kernels::ScreenDecision::all_zero) {
        out.screened = true;
    } else {
        const Vector beta_hat = solve_beta_only(blk.gram.topLeftCorner(pl, pl), b.head(pl), joint, u.head(pl), cfg);

        std::vector<char> nz(G, 0);
        bool any_nz = false;
        for (Index g = 0; g < G; ++g) {
            const Index off = blk.offsets[g], len = blk.offsets[g + 1] - off;
            const Vector grad = b.segment(off, len) - blk.gram.block(off, 0, len, pl) * beta_hat;
            nz[g] = !kernels::modifier_group_is_zero(grad, al, joint * w.modifier_screen[g]);
            any_nz = any_nz || nz[g];
        }

        if (!any_nz) {
            cand.head(pl) = beta_hat;
        } else {
            if (had) {
                cand = u;
            } else {
                cand.head(pl) = beta_hat;
            }
            for (int rec = 0; rec <= 10; ++rec) {
                std::vector<Index> idx;
                Subproblem s;
                for (Index j = 0; j < pl; ++j) idx.push_back(j);
                for (Index g = 0; g < G; ++g) {
                    if (!nz[g]) {
                        cand.segment(blk.offsets[g], blk.offsets[g + 1] - blk.offsets[g]).setZero();
                        continue;
                    }
                    s.offsets.push_back(static_cast<Index>(idx.size()));
                    s.weights.push_back(w.modifier[g]);
                    for (Index i = blk.offsets[g]; i < blk.offsets[g + 1]; ++i) idx.push_back(i);
                }
                s.offsets.push_back(static_cast<Index>(idx.size()));
                s.H = blk.gram(idx, idx);
                s.b = b(idx);
                s.joint = joint;
                s.l1 = al;

                Vector v = cand(idx);
                prox_gradient(s, v, cfg.max_inner_iter, cfg.inner_tol);
                cand(idx) = v;

                // re-test every modifier group given the refined block
                const Vector grad_all = b - blk.gram * cand;
                std::vector<char> next(G, 0);
                for (Index g = 0; g < G; ++g) {
                    const Index off = blk.offsets[g], len = blk.offsets[g + 1] - off;
                    const Vector grad = grad_all.segment(off, len) + blk.gram.block(off, off, len, len) * cand.segment(off, len);
                    next[g] = !kernels::modifier_group_is_zero(grad, al, joint * w.modifier_screen[g]);
                }
                if (next == nz) break;
                nz = std::move(next);
            }
            for (Index g = 0; g < G; ++g) {
                if (!nz[g]) cand.segment(blk.offsets[g], blk.offsets[g + 1] - blk.offsets[g]).setZero();
            }
        }
    }

    // Accept the candidate unless it would raise the block objective; tiny
    // non-improvements keep the current values so converged fits are fixed
    // points.
    const double F_new = block_value(cand);
    const double slack = 1e-13 * std::max(1.0, std::abs(F_old));
    bool accept;
    if (is_zero(cand)) accept = F_new <= F_old + slack;
    else accept = F_new < F_old - slack;
    if (accept) {
        u = std::move(cand);
    } else {
        out.screened = false;
    }
    if (!is_zero(u)) r.noalias() -= blk.phi * u;
    return out;
}

} // namespace

const char* to_string(Method m)
{
    switch (m) {
        case Method::svreg: return "svreg";
        case Method::plasso: return "plasso";
        case Method::lasso: return "lasso";
    }
    return "?";
}

Method method_from_string(const std::string& s)
{
    if (s == "svreg") return Method::svreg;
    if (s == "plasso") return Method::plasso;
    if (s == "lasso") return Method::lasso;
    throw InvalidArgument("unknown method '" + s + "' (expected svreg, plasso or lasso)");
}

SvregProblem::SvregProblem(Dataset d, GroupSpec gs)
    : d_(std::move(d)), gs_(std::move(gs))
{
    d_.fill_metadata();
    design_ = omp::build_block_design(d_, gs_);
    const Index n = d_.n(), K = d_.k();
    intercept_basis_.resize(n, K + 1);
    intercept_basis_.col(0).setOnes();
    if (K > 0) intercept_basis_.rightCols(K) = d_.Z;
    intercept_pinv_ = intercept_basis_.completeOrthogonalDecomposition().pseudoInverse();
}

FitResult SvregProblem::fit(const FitConfig& cfg, const CoefficientSet* warm) const
{
    cfg.validate();
    if (cfg.require_standardized && !d_.standardized) {
        throw InvalidArgument("fit expects standardized data (standardize first or set require_standardized = false)");
    }
    const Index K = d_.k();
    const Index L = static_cast<Index>(design_.blocks.size());
    const double inv_n = 1.0 / static_cast<double>(d_.n());
    const auto w = GroupWeights::make(gs_, K, cfg.weight_mode);
    const double al = cfg.alpha * cfg.lambda;

    FitResult res;
    res.lambda = cfg.lambda;

    std::vector<Vector> u(L);
    if (warm) {
        check_dimensions(d_, *warm);
        for (Index l = 0; l < L; ++l) u[l] = pack_block(design_, l, *warm);
    } else {
        for (Index l = 0; l < L; ++l) u[l] = Vector::Zero(design_.blocks[l].dim());
    }
    std::vector<char> screened(L, 0);
    for (Index l = 0; l < L; ++l) {
        if (design_.blocks[l].degenerate) {
            u[l].setZero();
            screened[l] = 1;
            res.warnings.push_back("predictor group " + std::to_string(l + 1) + " has all-zero columns; screened permanently");
        }
    }

    Vector r = d_.y;
    for (Index l = 0; l < L; ++l) {
        if (!is_zero(u[l])) r.noalias() -= design_.blocks[l].phi * u[l];
    }
    Vector ic = intercept_pinv_ * r;
    r.noalias() -= intercept_basis_ * ic;

    auto objective = [&] {
        double J = 0.5 * inv_n * r.squaredNorm();
        for (Index l = 0; l < L; ++l) {
            const double joint = (1.0 - cfg.alpha) * cfg.lambda * w.main[l];
            J += block_penalty(u[l], design_.blocks[l].offsets, w.modifier, joint, al);
        }
        return J;
    };

    double J_old = objective();
    if (!std::isfinite(J_old)) throw NumericError("non-finite objective at initialization");
    res.objective_trace.push_back(J_old);

    for (int it = 1; it <= cfg.max_outer_iter; ++it) {
        for (Index l = 0; l < L; ++l) {
            if (design_.blocks[l].degenerate) continue;
            screened[l] = update_block(design_.blocks[l], l, w, cfg, r, u[l]).screened;
            const Vector delta = intercept_pinv_ * r;
            ic += delta;
            r.noalias() -= intercept_basis_ * delta;
        }
        const double J_new = objective();
        if (!std::isfinite(J_new)) {
            throw NumericError("non-finite objective at outer iteration " + std::to_string(it));
        }
        res.objective_trace.push_back(J_new);
        res.n_outer_iterations = it;
        if (std::abs(J_old - J_new) < cfg.tol) {
            res.converged = true;
            break;
        }
        J_old = J_new;
    }

    CoefficientSet c = CoefficientSet::zeros(d_.p(), K);
    c.beta0 = ic(0);
    if (K > 0) c.theta0 = ic.tail(K);
    for (Index l = 0; l < L; ++l) {
        unpack_block(design_, l, u[l], c);
        if (screened[l]) res.screened_groups.push_back(l);
        if (is_zero(u[l])) continue;
        res.active_groups.push_back(l);
        const auto& offs = design_.blocks[l].offsets;
        for (std::size_t g = 0; g + 1 < offs.size(); ++g) {
            if (!is_zero(u[l].segment(offs[g], offs[g + 1] - offs[g]))) {
                res.active_modifier_blocks.emplace_back(l, static_cast<Index>(g));
            }
        }
    }
    res.coefficients = std::move(c);
    return res;
}

double SvregProblem::lambda_max(const FitConfig& cfg) const
{
    const Vector r = d_.y - intercept_basis_ * (intercept_pinv_ * d_.y);
    std::vector<Vector> corr;
    omp::block_correlations(design_, r, corr);
    const auto w = GroupWeights::make(gs_, d_.k(), cfg.weight_mode);

    double lam_max = 0.0;
    FitConfig probe = cfg;
    for (Index l = 0; l < static_cast<Index>(design_.blocks.size()); ++l) {
        const Block& blk = design_.blocks[l];
        if (blk.degenerate) continue;
        const Index G = static_cast<Index>(blk.offsets.size()) - 1;
        const Vector main = corr[l].head(blk.p_l());
        std::vector<Vector> mods(G);
        for (Index g = 0; g < G; ++g) mods[g] = corr[l].segment(blk.offsets[g], blk.offsets[g + 1] - blk.offsets[g]);

        auto zero_at = [&](double lam) {
            probe.lambda = lam;
            return kernels::screen_correlations(l, main, mods, w.main[l], w, probe).decision ==
                kernels::ScreenDecision::all_zero;
        };
        if (zero_at(lam_max)) continue;
        if (cfg.alpha >= 1.0 && main.norm() > 0.0) return std::numeric_limits<double>::infinity();

        double lo = lam_max;
        double hi = std::max(2.0 * lam_max, 1.0);
        while (!zero_at(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) return std::numeric_limits<double>::infinity();
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (zero_at(mid)) hi = mid;
            else lo = mid;
        }
        lam_max = hi;
    }
    return lam_max;
}

LassoProblem::LassoProblem(Dataset d)
    : d_(std::move(d))
{
    d_.fill_metadata();
    d_.validate();
    const Index n = d_.n(), p = d_.p(), K = d_.k();
    features_.resize(n, K + p + p * K);
    if (K > 0) features_.leftCols(K) = d_.Z;
    features_.middleCols(K, p) = d_.X;
    for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < K; ++k) {
            features_.col(K + p + j * K + k) = d_.X.col(j).cwiseProduct(d_.Z.col(k));
        }
    }
    col_sq_ = features_.colwise().squaredNorm().transpose() / static_cast<double>(n);
}

double LassoProblem::lambda_max() const
{
    const Vector r = d_.y.array() - d_.y.mean();
    return (features_.transpose() * r).cwiseAbs().maxCoeff() / static_cast<double>(d_.n());
}

FitResult LassoProblem::fit(const FitConfig& cfg, const CoefficientSet* warm) const
{
    cfg.validate();
    if (cfg.require_standardized && !d_.standardized) {
        throw InvalidArgument("fit expects standardized data (standardize first or set require_standardized = false)");
    }
    const Index n = d_.n(), p = d_.p(), K = d_.k();
    const Index F = feature_count();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double lam = cfg.lambda;

    Vector coef = Vector::Zero(F);
    double beta0 = 0.0;
    if (warm) {
        check_dimensions(d_, *warm);
        if (K > 0) coef.head(K) = warm->theta0;
        coef.segment(K, p) = warm->beta;
        for (Index j = 0; j < p; ++j) {
            for (Index k = 0; k < K; ++k) coef(K + p + j * K + k) = warm->theta(j, k);
        }
        beta0 = warm->beta0;
    }
    Vector r = d_.y.array() - beta0;
    r.noalias() -= features_ * coef;

    auto center = [&] {
        const double m = r.mean();
        beta0 += m;
        r.array() -= m;
    };
    auto objective = [&] { return 0.5 * inv_n * r.squaredNorm() + lam * coef.cwiseAbs().sum(); };
    auto update = [&](Index j) {
        const double s = col_sq_(j);
        if (!(s > 0.0)) return 0.0;
        const double old = coef(j);
        const double g = features_.col(j).dot(r) * inv_n + s * old;
        const double next = kernels::soft_threshold(g, lam) / s;
        if (next != old) {
            r.noalias() -= (next - old) * features_.col(j);
            coef(j) = next;
        }
        return std::abs(next - old) * std::sqrt(s);
    };

    center();
    FitResult res;
    res.lambda = lam;
    double J_old = objective();
    res.objective_trace.push_back(J_old);

    std::vector<Index> active;
    for (int it = 1; it <= cfg.max_outer_iter; ++it) {
        for (Index j = 0; j < F; ++j) update(j);
        center();
        active.clear();
        for (Index j = 0; j < F; ++j) {
            if (coef(j) != 0.0) active.push_back(j);
        }
        for (int inner = 0; inner < cfg.max_inner_iter; ++inner) {
            double max_change = 0.0;
            for (Index j : active) max_change = std::max(max_change, update(j));
            center();
            if (max_change < cfg.inner_tol) break;
        }
        const double J_new = objective();
        if (!std::isfinite(J_new)) {
            throw NumericError("non-finite objective at outer iteration " + std::to_string(it));
        }
        res.objective_trace.push_back(J_new);
        res.n_outer_iterations = it;
        if (std::abs(J_old - J_new) < cfg.tol) {
            res.converged = true;
            break;
        }
        J_old = J_new;
    }

    CoefficientSet c = CoefficientSet::zeros(p, K);
    c.beta0 = beta0;
    if (K > 0) c.theta0 = coef.head(K);
    c.beta = coef.segment(K, p);
    for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < K; ++k) c.theta(j, k) = coef(K + p + j * K + k);
    }
    for (Index j = 0; j < p; ++j) {
        bool any = c.beta(j) != 0.0;
        for (Index k = 0; k < K; ++k) {
            if (c.theta(j, k) != 0.0) {
                any = true;
                res.active_modifier_blocks.emplace_back(j, k);
            }
        }
        if (any) res.active_groups.push_back(j);
    }
    res.coefficients = std::move(c);
    return res;
}

FitResult fit_svreg(const Dataset& d, const GroupSpec& gs, const FitConfig& cfg, const std::optional<CoefficientSet>& warm)
{
    SvregProblem prob(d, gs);
    return prob.fit(cfg, warm ? &*warm : nullptr);
}

FitConfig plasso_config(const FitConfig& cfg)
{
    FitConfig out = cfg;
    out.weight_mode = WeightMode::unit;
    return out;
}

FitResult fit_plasso(const Dataset& d, const FitConfig& cfg, const std::optional<CoefficientSet>& warm)
{
    SvregProblem prob(d, GroupSpec::pliable(d.p(), d.k()));
    return prob.fit(plasso_config(cfg), warm ? &*warm : nullptr);
}

FitResult fit_lasso_interactions(const Dataset& d, const FitConfig& cfg, const std::optional<CoefficientSet>& warm)
{
    LassoProblem prob(d);
    return prob.fit(cfg, warm ? &*warm : nullptr);
}

double lambda_max(const Dataset& d, const GroupSpec& gs, const FitConfig& cfg)
{
    return SvregProblem(d, gs).lambda_max(cfg);
}

} // namespace svreg
