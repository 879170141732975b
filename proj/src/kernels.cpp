#include <svreg/kernels.hpp>
#include <string>

namespace svreg::kernels {
namespace {

void check_group(const GroupSpec& gs, Index group)
{
    if (group < 0 || group >= gs.n_predictor_groups()) {
        throw InvalidArgument("predictor group index " + std::to_string(group + 1) + " out of range");
    }
}

// vec(x_[l]^T z_[g]) r / N, laid out with the predictor index fastest.
Vector interaction_corr(
    const Dataset& d, const std::vector<Index>& pred, const std::vector<Index>& mods, const Vector& r
)
{
    const double n = static_cast<double>(d.n());
    Vector out(static_cast<Index>(pred.size() * mods.size()));
    Index pos = 0;
    for (Index k : mods) {
        const Vector zr = d.Z.col(k).cwiseProduct(r);
        for (Index j : pred) out(pos++) = d.X.col(j).dot(zr) / n;
    }
    return out;
}

} // namespace

double soft_threshold(double x, double t)
{
    if (t < 0.0) throw InvalidArgument("soft-threshold level must be nonnegative");
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

Vector soft_threshold(const Vector& x, double t)
{
    if (t < 0.0) throw InvalidArgument("soft-threshold level must be nonnegative");
    return x.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); });
}

Vector group_soft_threshold(const Vector& v, double t)
{
    const double nrm = v.norm();
    if (nrm <= t || nrm == 0.0) return Vector::Zero(v.size());
    return v * (1.0 - t / nrm);
}

ScreenReport screen_correlations(
    Index group,
    const Vector& main_corr,
    const std::vector<Vector>& modifier_corr,
    double main_weight,
    const GroupWeights& weights,
    const FitConfig& cfg
)
{
    const double c = (1.0 - cfg.alpha) * cfg.lambda * main_weight;
    const double al = cfg.alpha * cfg.lambda;

    ScreenReport rep;
    rep.group_index = group;
    rep.joint_stat = main_corr.norm();
    rep.joint_threshold = c;
    rep.kkt_threshold = c;

    bool displayed_ok = rep.joint_stat <= rep.joint_threshold;
    bool theta_quiet = true;
    double kkt_sq = main_corr.squaredNorm();
    for (std::size_t g = 0; g < modifier_corr.size(); ++g) {
        const double stat = soft_threshold(modifier_corr[g], al).norm();
        const double thr = c * (1.0 + weights.modifier[g]);
        rep.modifier_stats.push_back({static_cast<Index>(g), stat, thr});
        displayed_ok = displayed_ok && stat <= thr;
        theta_quiet = theta_quiet && stat < c * weights.modifier_screen[g];
        const double excess = std::max(stat - c * weights.modifier[g], 0.0);
        kkt_sq += excess * excess;
    }
    rep.kkt_stat = std::sqrt(kkt_sq);
    const bool kkt_ok = rep.kkt_stat <= rep.kkt_threshold;

    if (displayed_ok && (cfg.screen_rule == ScreenRule::displayed || kkt_ok)) {
        rep.decision = ScreenDecision::all_zero;
    } else if (theta_quiet) {
        rep.decision = ScreenDecision::beta_only_candidate;
    } else {
        rep.decision = ScreenDecision::active;
    }
    return rep;
}

ScreenReport screen_group(
    const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, Index group, const FitConfig& cfg
)
{
    check_group(gs, group);
    // partial_residual_main already excludes the block, i.e. evaluates at the
    // zeroed block; with theta_[l]. = 0 every r^{(-l)(-g)} equals it.
    const Vector r = partial_residual_main(d, c, gs, group);
    const auto& pred = gs.predictor_groups[group];
    const double n = static_cast<double>(d.n());

    Vector main_corr(static_cast<Index>(pred.size()));
    for (std::size_t i = 0; i < pred.size(); ++i) main_corr(i) = d.X.col(pred[i]).dot(r) / n;

    std::vector<Vector> mod_corr;
    for (const auto& mods : gs.modifier_groups) mod_corr.push_back(interaction_corr(d, pred, mods, r));

    const auto w = GroupWeights::make(gs, d.k(), cfg.weight_mode);
    return screen_correlations(group, main_corr, mod_corr, w.main[group], w, cfg);
}

bool modifier_group_is_zero(const Vector& grad, double alpha_lambda, double threshold)
{
    return soft_threshold(grad, alpha_lambda).norm() < threshold;
}

bool screen_modifier_group(
    const Dataset& d,
    const CoefficientSet& c,
    const GroupSpec& gs,
    Index group,
    Index modifier_group,
    const Vector& beta_hat,
    const FitConfig& cfg
)
{
    check_group(gs, group);
    const auto& pred = gs.predictor_groups[group];
    if (beta_hat.size() != static_cast<Index>(pred.size())) throw InvalidArgument("beta_hat has the wrong length");
    Vector r = partial_residual_modifier(d, c, gs, group, modifier_group);
    for (std::size_t i = 0; i < pred.size(); ++i) r -= beta_hat(i) * d.X.col(pred[i]);
    const Vector grad = interaction_corr(d, pred, gs.modifier_groups[modifier_group], r);

    const auto w = GroupWeights::make(gs, d.k(), cfg.weight_mode);
    const double thr = (1.0 - cfg.alpha) * cfg.lambda * w.main[group] * w.modifier_screen[modifier_group];
    return modifier_group_is_zero(grad, cfg.alpha * cfg.lambda, thr);
}

Vector orthonormal_group_beta(const Vector& R, double lambda1, Index p_l)
{
    if (lambda1 < 0.0) throw InvalidArgument("lambda1 must be nonnegative");
    return group_soft_threshold(R, lambda1 * std::sqrt(static_cast<double>(p_l)));
}

double single_predictor_beta(const Vector& x, const Vector& r, double lambda1)
{
    const double ss = x.squaredNorm();
    if (!(ss > 0.0)) throw InvalidArgument("predictor column has zero norm");
    const double n = static_cast<double>(x.size());
    return (n / ss) * soft_threshold(x.dot(r) / n, lambda1);
}

void hierarchical_prox(
    Vector& u,
    const std::vector<Index>& offsets,
    const std::vector<double>& group_weights,
    double joint_shrink,
    double l1_shrink
)
{
    const Index theta_begin = offsets.empty() ? u.size() : offsets.front();
    for (Index i = theta_begin; i < u.size(); ++i) {
        const double v = u(i);
        u(i) = v > l1_shrink ? v - l1_shrink : (v < -l1_shrink ? v + l1_shrink : 0.0);
    }
    for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
        auto seg = u.segment(offsets[g], offsets[g + 1] - offsets[g]);
        const double nrm = seg.norm();
        const double t = joint_shrink * group_weights[g];
        if (nrm <= t) seg.setZero();
        else seg *= 1.0 - t / nrm;
    }
    const double nrm = u.norm();
    if (nrm <= joint_shrink) u.setZero();
    else u *= 1.0 - joint_shrink / nrm;
}

} // namespace svreg::kernels
