#include <svreg/model.hpp>
#include <cmath>
#include <string>

namespace svreg {
namespace {

std::string col_label(const std::vector<std::string>& names, Index j, const char* prefix)
{
    if (j < static_cast<Index>(names.size()) && !names[j].empty()) return names[j];
    return std::string(prefix) + std::to_string(j + 1);
}

void check_partition(const std::vector<std::vector<Index>>& groups, Index n, const char* what)
{
    std::vector<int> seen(n, 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) {
            throw DataError(std::string(what) + " group " + std::to_string(g + 1) + " is empty");
        }
        for (Index idx : groups[g]) {
            if (idx < 0 || idx >= n) {
                throw DataError(
                    std::string(what) + " index " + std::to_string(idx + 1) +
                    " out of range 1.." + std::to_string(n)
                );
            }
            if (seen[idx]++) {
                throw DataError(std::string(what) + " index " + std::to_string(idx + 1) + " appears in more than one group");
            }
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (!seen[i]) {
            throw DataError(std::string(what) + " index " + std::to_string(i + 1) + " is not assigned to any group");
        }
    }
}

// sum_{j in group} x_ij (beta_j + theta_j. z_i.) for every row i, restricted
// to the modifier columns in `mods` when given.
Vector group_contribution(const Dataset& d, const CoefficientSet& c, const std::vector<Index>& group)
{
    Vector out = Vector::Zero(d.n());
    for (Index j : group) {
        Vector coef = Vector::Constant(d.n(), c.beta(j));
        if (d.k() > 0) coef.noalias() += d.Z * c.theta.row(j).transpose();
        out.array() += coef.array() * d.X.col(j).array();
    }
    return out;
}

} // namespace

void Dataset::validate() const
{
    if (X.rows() != y.size() || (Z.cols() > 0 && Z.rows() != y.size()) || (Z.cols() == 0 && Z.rows() != 0 && Z.rows() != y.size())) {
        throw DataError("row counts of y, X and Z disagree");
    }
    if (n() < 2) throw DataError("need at least 2 observations");
    if (p() < 1) throw DataError("need at least 1 main predictor");
    if (!y.allFinite() || !X.allFinite() || !Z.allFinite()) throw DataError("data contain non-finite entries");
    if (!x_names.empty() && static_cast<Index>(x_names.size()) != p()) throw DataError("x_names size mismatch");
    if (!z_names.empty() && static_cast<Index>(z_names.size()) != k()) throw DataError("z_names size mismatch");
    if (!z_dummy.empty() && static_cast<Index>(z_dummy.size()) != k()) throw DataError("z_dummy size mismatch");
}

void Dataset::fill_metadata()
{
    if (Z.rows() != X.rows() && Z.cols() == 0) Z.resize(X.rows(), 0);
    if (x_names.empty()) {
        for (Index j = 0; j < p(); ++j) x_names.push_back("x" + std::to_string(j + 1));
    }
    if (z_names.empty()) {
        for (Index k = 0; k < this->k(); ++k) z_names.push_back("z" + std::to_string(k + 1));
    }
    if (z_dummy.empty()) {
        z_dummy.assign(k(), false);
        for (Index k : detect_dummy_columns(Z)) z_dummy[k] = true;
    }
}

Dataset Dataset::rows(const std::vector<Index>& idx) const
{
    Dataset out;
    const Index m = static_cast<Index>(idx.size());
    out.y.resize(m);
    out.X.resize(m, p());
    out.Z.resize(m, k());
    for (Index i = 0; i < m; ++i) {
        out.y(i) = y(idx[i]);
        out.X.row(i) = X.row(idx[i]);
        if (k() > 0) out.Z.row(i) = Z.row(idx[i]);
    }
    out.x_names = x_names;
    out.z_names = z_names;
    out.z_dummy = z_dummy;
    out.standardized = false;
    return out;
}

void GroupSpec::validate(Index p, Index K) const
{
    check_partition(predictor_groups, p, "predictor");
    check_partition(modifier_groups, K, "modifier");
}

GroupSpec GroupSpec::singletons(Index p, Index K)
{
    GroupSpec gs;
    for (Index j = 0; j < p; ++j) gs.predictor_groups.push_back({j});
    for (Index k = 0; k < K; ++k) gs.modifier_groups.push_back({k});
    return gs;
}

GroupSpec GroupSpec::pliable(Index p, Index K)
{
    GroupSpec gs;
    for (Index j = 0; j < p; ++j) gs.predictor_groups.push_back({j});
    if (K > 0) {
        std::vector<Index> all(K);
        for (Index k = 0; k < K; ++k) all[k] = k;
        gs.modifier_groups.push_back(std::move(all));
    }
    return gs;
}

CoefficientSet CoefficientSet::zeros(Index p, Index K)
{
    CoefficientSet c;
    c.theta0 = Vector::Zero(K);
    c.beta = Vector::Zero(p);
    c.theta = Matrix::Zero(p, K);
    return c;
}

bool CoefficientSet::all_finite() const
{
    return std::isfinite(beta0) && theta0.allFinite() && beta.allFinite() && theta.allFinite();
}

void FitConfig::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be a finite nonnegative number");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (!(inner_tol > 0.0)) throw InvalidArgument("inner_tol must be positive");
    if (max_outer_iter < 1 || max_inner_iter < 1) throw InvalidArgument("iteration caps must be positive");
}

GroupWeights GroupWeights::make(const GroupSpec& gs, Index K, WeightMode mode)
{
    GroupWeights w;
    const double root_k1 = std::sqrt(1.0 + static_cast<double>(K));
    for (const auto& g : gs.predictor_groups) {
        w.main.push_back(mode == WeightMode::unit ? 1.0 : std::sqrt(static_cast<double>(g.size())));
    }
    for (const auto& g : gs.modifier_groups) {
        const double root_pg = std::sqrt(static_cast<double>(g.size()));
        switch (mode) {
            case WeightMode::consistent:
                w.modifier.push_back(root_pg / root_k1);
                w.modifier_screen.push_back(root_pg / root_k1);
                break;
            case WeightMode::paper_literal:
                w.modifier.push_back(root_pg);
                w.modifier_screen.push_back(root_pg / root_k1);
                break;
            case WeightMode::unit:
                w.modifier.push_back(1.0);
                w.modifier_screen.push_back(1.0);
                break;
        }
    }
    return w;
}

std::vector<Index> detect_dummy_columns(const Matrix& Z)
{
    std::vector<Index> out;
    for (Index k = 0; k < Z.cols(); ++k) {
        bool dummy = true;
        for (Index i = 0; i < Z.rows() && dummy; ++i) {
            dummy = Z(i, k) == 0.0 || Z(i, k) == 1.0;
        }
        if (dummy) out.push_back(k);
    }
    return out;
}

StandardizedData standardize(const Dataset& d, const std::vector<Index>& dummy_columns)
{
    d.validate();
    if (d.standardized) throw InvalidArgument("dataset is already standardized");
    const Index n = d.n();
    std::vector<bool> dummy(d.k(), false);
    for (Index k : dummy_columns) {
        if (k < 0 || k >= d.k()) throw InvalidArgument("dummy column " + std::to_string(k + 1) + " out of range");
        dummy[k] = true;
    }

    auto moments = [n](const auto& col, double& mean, double& sd) {
        mean = col.mean();
        sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1));
    };

    StandardizedData out;
    auto& rec = out.record;
    rec.y_mean = d.y.mean();
    rec.x_mean.resize(d.p());
    rec.x_scale.resize(d.p());
    rec.z_mean = Vector::Zero(d.k());
    rec.z_scale = Vector::Ones(d.k());
    for (Index j = 0; j < d.p(); ++j) {
        double m, s;
        moments(d.X.col(j), m, s);
        if (!(s > 0.0)) throw DataError("constant predictor column '" + col_label(d.x_names, j, "x") + "'");
        rec.x_mean(j) = m;
        rec.x_scale(j) = s;
    }
    for (Index k = 0; k < d.k(); ++k) {
        if (dummy[k]) continue;
        double m, s;
        moments(d.Z.col(k), m, s);
        if (!(s > 0.0)) throw DataError("constant modifier column '" + col_label(d.z_names, k, "z") + "'");
        rec.z_mean(k) = m;
        rec.z_scale(k) = s;
    }

    out.data = rec.apply(d);
    out.data.z_dummy = dummy;
    return out;
}

StandardizedData standardize(const Dataset& d)
{
    std::vector<Index> dummies;
    if (static_cast<Index>(d.z_dummy.size()) == d.k()) {
        for (Index k = 0; k < d.k(); ++k) {
            if (d.z_dummy[k]) dummies.push_back(k);
        }
    } else {
        dummies = detect_dummy_columns(d.Z);
    }
    return standardize(d, dummies);
}

Dataset StandardizationRecord::apply(const Dataset& raw) const
{
    if (raw.p() != x_mean.size() || raw.k() != z_mean.size()) {
        throw DataError("standardization record does not match dataset dimensions");
    }
    Dataset out = raw;
    out.y.array() -= y_mean;
    for (Index j = 0; j < raw.p(); ++j) {
        out.X.col(j) = (raw.X.col(j).array() - x_mean(j)) / x_scale(j);
    }
    for (Index k = 0; k < raw.k(); ++k) {
        out.Z.col(k) = (raw.Z.col(k).array() - z_mean(k)) / z_scale(k);
    }
    out.standardized = true;
    return out;
}

CoefficientSet StandardizationRecord::to_original(const CoefficientSet& c) const
{
    const Index p = c.beta.size();
    const Index K = c.theta0.size();
    CoefficientSet o = CoefficientSet::zeros(p, K);
    // theta_jk x~_j z~_k = theta_jk (x_j - mx_j)(z_k - mz_k) / (sx_j sz_k)
    for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < K; ++k) {
            o.theta(j, k) = c.theta(j, k) / (x_scale(j) * z_scale(k));
        }
    }
    for (Index j = 0; j < p; ++j) {
        double b = c.beta(j) / x_scale(j);
        for (Index k = 0; k < K; ++k) b -= o.theta(j, k) * z_mean(k);
        o.beta(j) = b;
    }
    for (Index k = 0; k < K; ++k) {
        double t = c.theta0(k) / z_scale(k);
        for (Index j = 0; j < p; ++j) t -= o.theta(j, k) * x_mean(j);
        o.theta0(k) = t;
    }
    double b0 = y_mean + c.beta0;
    for (Index k = 0; k < K; ++k) b0 -= c.theta0(k) * z_mean(k) / z_scale(k);
    for (Index j = 0; j < p; ++j) b0 -= c.beta(j) * x_mean(j) / x_scale(j);
    for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < K; ++k) b0 += o.theta(j, k) * x_mean(j) * z_mean(k);
    }
    o.beta0 = b0;
    return o;
}

void check_dimensions(const Dataset& d, const CoefficientSet& c)
{
    if (c.beta.size() != d.p() || c.theta0.size() != d.k() || c.theta.rows() != d.p() || c.theta.cols() != d.k()) {
        throw DataError("coefficient dimensions do not match the dataset");
    }
}

Vector predict(const Dataset& d, const CoefficientSet& c)
{
    check_dimensions(d, c);
    Vector yhat = Vector::Constant(d.n(), c.beta0);
    if (d.k() > 0) {
        yhat.noalias() += d.Z * c.theta0;
        // (beta_j + theta_j. z_i.) for all i, j at once: N x p
        Matrix coef = d.Z * c.theta.transpose();
        coef.rowwise() += c.beta.transpose();
        yhat.array() += (coef.array() * d.X.array()).rowwise().sum();
    } else {
        yhat.noalias() += d.X * c.beta;
    }
    return yhat;
}

Vector residual(const Dataset& d, const CoefficientSet& c)
{
    return d.y - predict(d, c);
}

Vector partial_residual_main(const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, Index group)
{
    check_dimensions(d, c);
    if (group < 0 || group >= gs.n_predictor_groups()) {
        throw InvalidArgument("predictor group index " + std::to_string(group + 1) + " out of range");
    }
    Vector r = d.y.array() - c.beta0;
    if (d.k() > 0) r.noalias() -= d.Z * c.theta0;
    for (Index h = 0; h < gs.n_predictor_groups(); ++h) {
        if (h == group) continue;
        r -= group_contribution(d, c, gs.predictor_groups[h]);
    }
    return r;
}

Vector partial_residual_modifier(
    const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, Index group, Index modifier_group
)
{
    if (modifier_group < 0 || modifier_group >= gs.n_modifier_groups()) {
        throw InvalidArgument("modifier group index " + std::to_string(modifier_group + 1) + " out of range");
    }
    Vector r = partial_residual_main(d, c, gs, group);
    for (Index m = 0; m < gs.n_modifier_groups(); ++m) {
        if (m == modifier_group) continue;
        for (Index j : gs.predictor_groups[group]) {
            for (Index k : gs.modifier_groups[m]) {
                r.array() -= c.theta(j, k) * d.X.col(j).array() * d.Z.col(k).array();
            }
        }
    }
    return r;
}

double penalty_value(const CoefficientSet& c, const GroupSpec& gs, const FitConfig& cfg)
{
    const Index K = c.theta.cols();
    const auto w = GroupWeights::make(gs, K, cfg.weight_mode);
    double group_part = 0.0;
    for (Index l = 0; l < gs.n_predictor_groups(); ++l) {
        const auto& pred = gs.predictor_groups[l];
        double joint_sq = 0.0;
        for (Index j : pred) joint_sq += c.beta(j) * c.beta(j) + c.theta.row(j).squaredNorm();
        double mod_part = 0.0;
        for (Index g = 0; g < gs.n_modifier_groups(); ++g) {
            double sq = 0.0;
            for (Index j : pred) {
                for (Index k : gs.modifier_groups[g]) sq += c.theta(j, k) * c.theta(j, k);
            }
            mod_part += w.modifier[g] * std::sqrt(sq);
        }
        group_part += w.main[l] * (std::sqrt(joint_sq) + mod_part);
    }
    const double l1 = c.theta.cwiseAbs().sum();
    return (1.0 - cfg.alpha) * cfg.lambda * group_part + cfg.alpha * cfg.lambda * l1;
}

double objective_value(const Dataset& d, const CoefficientSet& c, const GroupSpec& gs, const FitConfig& cfg)
{
    const Vector r = residual(d, c);
    return r.squaredNorm() / (2.0 * static_cast<double>(d.n())) + penalty_value(c, gs, cfg);
}

double lasso_objective_value(const Dataset& d, const CoefficientSet& c, double lambda)
{
    const Vector r = residual(d, c);
    const double l1 = c.theta0.cwiseAbs().sum() + c.beta.cwiseAbs().sum() + c.theta.cwiseAbs().sum();
    return r.squaredNorm() / (2.0 * static_cast<double>(d.n())) + lambda * l1;
}

const char* to_string(WeightMode m)
{
    switch (m) {
        case WeightMode::consistent: return "consistent";
        case WeightMode::paper_literal: return "paper-literal";
        case WeightMode::unit: return "unit";
    }
    return "?";
}

WeightMode weight_mode_from_string(const std::string& s)
{
    if (s == "consistent") return WeightMode::consistent;
    if (s == "paper-literal") return WeightMode::paper_literal;
    if (s == "unit") return WeightMode::unit;
    throw InvalidArgument("unknown weight mode '" + s + "'");
}

const char* to_string(ScreenRule r)
{
    return r == ScreenRule::exact ? "exact" : "displayed";
}

ScreenRule screen_rule_from_string(const std::string& s)
{
    if (s == "exact") return ScreenRule::exact;
    if (s == "displayed") return ScreenRule::displayed;
    throw InvalidArgument("unknown screen rule '" + s + "'");
}

} // namespace svreg
