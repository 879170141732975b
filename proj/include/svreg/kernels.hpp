#pragma once
#include <cmath>
#include <limits>
#include <vector>
#include <svreg/model.hpp>

namespace svreg::kernels {

/// sign(x) * max(|x| - t, 0). Throws InvalidArgument for t < 0.
double soft_threshold(double x, double t);
Vector soft_threshold(const Vector& x, double t);

/// v * max(1 - t / ||v||_2, 0); the zero vector maps to itself.
Vector group_soft_threshold(const Vector& v, double t);

enum class ScreenDecision
{
    all_zero,
    beta_only_candidate,
    active,
};

struct ModifierScreen
{
    Index group;
    double stat;
    double threshold;
};

/**
 * Screening statistics of one predictor group evaluated at the zero block.
 *
 * joint_stat / joint_threshold:  || X_[l]^T r / N ||  vs  m_l (1-a) lam
 * modifier_stats:                || S_{a lam}(W_[l][g]^T r / N) ||  vs  m_l (1 + w_g)(1-a) lam
 * kkt_stat / kkt_threshold:      the joint subgradient condition
 *      sqrt(||X^T r/N||^2 + sum_g (||S(.)|| - m_l w_g (1-a) lam)_+^2)  vs  m_l (1-a) lam
 *
 * Under ScreenRule::displayed the decision uses the first two families only; under
 * ScreenRule::exact all three must hold. The separate conditions are implied
 * by the joint one, so the exact rule only screens blocks whose zero value
 * is optimal.
 */
struct ScreenReport
{
    Index group_index = 0;
    double joint_stat = 0.0;
    double joint_threshold = 0.0;
    std::vector<ModifierScreen> modifier_stats;
    double kkt_stat = 0.0;
    double kkt_threshold = 0.0;
    ScreenDecision decision = ScreenDecision::active;
};

/**
 * Builds a ScreenReport from precomputed correlations.
 *
 * @param   main_corr       X_[l]^T r / N with the block zeroed.
 * @param   modifier_corr   one vector per modifier group, vec(x_[l]^T z_[g]) r / N.
 * @param   main_weight     m_l (sqrt(p_l), or 1 in unit mode).
 * @param   weights         modifier-group weights for the same mode.
 */
ScreenReport screen_correlations(
    Index group,
    const Vector& main_corr,
    const std::vector<Vector>& modifier_corr,
    double main_weight,
    const GroupWeights& weights,
    const FitConfig& cfg
);

/// Screens predictor group `group` at the current coefficients with the
/// block itself zeroed. Dense reference path; the solver uses
/// screen_correlations on cached Gram data.
ScreenReport screen_group(
    const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, Index group, const FitConfig& cfg
);

/// ||S_{alpha lambda}(grad)||_2 < threshold.
bool modifier_group_is_zero(const Vector& grad, double alpha_lambda, double threshold);

/**
 * True when theta_[l][g] = 0 is certified given beta_hat, i.e.
 * ||S_{a lam}(W^T (r^{(-l)(-g)} - X_[l] beta_hat) / N)|| < (1-a) lam m_l w'_g.
 */
bool screen_modifier_group(
    const Dataset& d,
    const CoefficientSet& c,
    const GroupSpec& gs,
    Index group,
    Index modifier_group,
    const Vector& beta_hat,
    const FitConfig& cfg
);

/// Group-Lasso solution for an orthonormal block: max(1 - lambda1 sqrt(p_l)/||R||, 0) R.
Vector orthonormal_group_beta(const Vector& R, double lambda1, Index p_l);

/// (N / sum x^2) S_{lambda1}(x^T r / N). Throws InvalidArgument for a zero column.
double single_predictor_beta(const Vector& x, const Vector& r, double lambda1);

/**
 * Minimizes a unimodal function on [lo, hi] by golden-section search with
 * successive parabolic interpolation (Brent). Returns the abscissa to within
 * an absolute tolerance of about `tol`.
 */
template <class F>
double univariate_beta_search(F&& f, double lo, double hi, double tol = 1e-8)
{
    if (!(lo < hi)) throw InvalidArgument("univariate search needs lo < hi");
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

    double a = lo, b = hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x);
    double fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int it = 0; it < 500; ++it) {
        const double xm = 0.5 * (a + b);
        const double tol1 = eps * std::abs(x) + tol / 3.0;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;

        bool golden_step = true;
        if (std::abs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p; else q = -q;
            const double e_prev = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = xm >= x ? tol1 : -tol1;
                golden_step = false;
            }
        }
        if (golden_step) {
            e = (x < xm) ? b - x : a - x;
            d = golden * e;
        }
        const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return x;
}

/**
 * Brent search around `current` on [b - 10(1+|b|), b + 10(1+|b|)], widening
 * the bracket tenfold while the minimizer lands on an endpoint.
 */
template <class F>
double coordinate_search(F&& f, double current, double tol = 1e-8)
{
    double half = 10.0 * (1.0 + std::abs(current));
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double lo = current - half, hi = current + half;
        const double x = univariate_beta_search(f, lo, hi, tol);
        // Brent keeps its iterate at least ~tol1 inside the bracket
        const double edge = 10.0 * (std::sqrt(std::numeric_limits<double>::epsilon()) * (std::abs(current) + half) + tol);
        if (x - lo > edge && hi - x > edge) return x;
        half *= 10.0;
    }
    throw NumericError("coordinate search failed to bracket a minimizer");
}

/**
 * Proximal map of t * [ c (||u|| + sum_g w_g ||u_g||) + a ||u_theta||_1 ]
 * for u = (beta block, theta groups) laid out as [beta | g_0 | g_1 | ...].
 *
 * The three norms are nested (coordinate within modifier group within the
 * whole block), so the prox is the composition from the innermost norm out:
 * elementwise soft-thresholding, modifier-group shrinkage, joint shrinkage.
 *
 * @param   offsets     start of each theta group in u; offsets.back() == u.size().
 */
void hierarchical_prox(
    Vector& u,
    const std::vector<Index>& offsets,
    const std::vector<double>& group_weights,
    double joint_shrink,
    double l1_shrink
);

} // namespace svreg::kernels
