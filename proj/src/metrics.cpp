#include <svreg/metrics.hpp>
#include <cmath>
#include <limits>

namespace svreg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const SelectionMask& mask, const SelectionTruth& truth)
{
    const auto p = static_cast<Index>(mask.main_selected.size());
    if (static_cast<Index>(truth.main_relevant.size()) != p || mask.interaction_selected.rows() != p
        || truth.interaction_relevant.rows() != p
        || truth.interaction_relevant.cols() != mask.interaction_selected.cols()) {
        throw InvalidArgument("selection mask and truth have different dimensions");
    }
}

bool any_of_columns(const BoolMatrix& m, Index row, const std::vector<Index>& cols)
{
    for (Index c : cols) {
        if (m(row, c)) return true;
    }
    return false;
}

bool any_row_any_column(const BoolMatrix& m, const std::vector<Index>& cols)
{
    for (Index j = 0; j < m.rows(); ++j) {
        if (any_of_columns(m, j, cols)) return true;
    }
    return false;
}

void tally(ConfusionCounts& c, bool selected, bool relevant)
{
    if (selected && relevant) ++c.tp;
    else if (selected) ++c.fp;
    else if (relevant) ++c.fn;
    else ++c.tn;
}

double ratio(Index num, Index den)
{
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

} // namespace

SelectionMask selection_mask(const CoefficientSet& c, double tol)
{
    const Index p = c.beta.size(), K = c.theta.cols();
    SelectionMask m;
    m.main_selected.assign(p, false);
    m.interaction_selected = (c.theta.array().abs() > tol);
    for (Index j = 0; j < p; ++j) {
        m.main_selected[j] = std::abs(c.beta(j)) > tol || (K > 0 && m.interaction_selected.row(j).any());
    }
    return m;
}

ModifierLayout modifier_layout(const GroupSpec& gs, const std::vector<bool>& z_dummy, DummyMode mode)
{
    ModifierLayout out;
    for (const auto& g : gs.modifier_groups) {
        bool all_dummy = !g.empty();
        for (Index k : g) {
            if (k < 0 || k >= static_cast<Index>(z_dummy.size())) throw InvalidArgument("modifier group index out of range");
            all_dummy = all_dummy && z_dummy[k];
        }
        const auto kind = all_dummy ? ModifierKind::categorical : ModifierKind::continuous;
        if (mode == DummyMode::grouped) {
            out.push_back({g, kind});
        } else {
            for (Index k : g) out.push_back({{k}, kind});
        }
    }
    return out;
}

const char* to_string(Universe u)
{
    return u == Universe::variables ? "variables" : "coefficients";
}

Universe universe_from_string(const std::string& s)
{
    if (s == "variables") return Universe::variables;
    if (s == "coefficients") return Universe::coefficients;
    throw InvalidArgument("unknown selection universe '" + s + "' (expected variables or coefficients)");
}

const char* to_string(DummyMode m)
{
    return m == DummyMode::grouped ? "grouped" : "per-dummy";
}

DummyMode dummy_mode_from_string(const std::string& s)
{
    if (s == "grouped") return DummyMode::grouped;
    if (s == "per-dummy") return DummyMode::per_dummy;
    throw InvalidArgument("unknown dummy mode '" + s + "' (expected grouped or per-dummy)");
}

SelectionRates confusion_rates(
    const SelectionMask& mask, const SelectionTruth& truth, const ModifierLayout& layout, Universe universe
)
{
    check_shapes(mask, truth);
    const auto p = static_cast<Index>(mask.main_selected.size());
    SelectionRates r;
    auto& c = r.counts;
    for (Index j = 0; j < p; ++j) tally(c, mask.main_selected[j], truth.main_relevant[j]);
    for (const auto& v : layout) {
        if (universe == Universe::variables) {
            tally(c, any_row_any_column(mask.interaction_selected, v.columns),
                  any_row_any_column(truth.interaction_relevant, v.columns));
        } else {
            for (Index j = 0; j < p; ++j) {
                tally(c, any_of_columns(mask.interaction_selected, j, v.columns),
                      any_of_columns(truth.interaction_relevant, j, v.columns));
            }
        }
    }
    r.fdr = ratio(c.fp, c.tp + c.fp);
    r.sensitivity = ratio(c.tp, c.tp + c.fn);
    r.specificity = ratio(c.tn, c.tn + c.fp);
    r.geo_mean = std::sqrt(r.sensitivity * r.specificity);
    return r;
}

const char* to_string(PercentCategory c)
{
    switch (c) {
        case PercentCategory::main_relevant: return "main_relevant";
        case PercentCategory::continuous_relevant: return "modifier_relevant_continuous";
        case PercentCategory::categorical_relevant: return "modifier_relevant_categorical";
        case PercentCategory::main_irrelevant: return "main_irrelevant";
        case PercentCategory::continuous_irrelevant: return "modifier_irrelevant_continuous";
        case PercentCategory::categorical_irrelevant: return "modifier_irrelevant_categorical";
    }
    return "?";
}

bool PercentTable::has(PercentCategory c) const
{
    return !std::isnan(value[static_cast<int>(c)]);
}

PercentTable percent_selected(const SelectionMask& mask, const SelectionTruth& truth, const ModifierLayout& layout)
{
    check_shapes(mask, truth);
    Index hit[kPercentCategories] = {}, total[kPercentCategories] = {};
    auto add = [&](PercentCategory cat, bool selected) {
        ++total[static_cast<int>(cat)];
        if (selected) ++hit[static_cast<int>(cat)];
    };
    for (std::size_t j = 0; j < mask.main_selected.size(); ++j) {
        add(truth.main_relevant[j] ? PercentCategory::main_relevant : PercentCategory::main_irrelevant,
            mask.main_selected[j]);
    }
    for (const auto& v : layout) {
        const bool relevant = any_row_any_column(truth.interaction_relevant, v.columns);
        const bool cont = v.kind == ModifierKind::continuous;
        const auto cat = relevant ? (cont ? PercentCategory::continuous_relevant : PercentCategory::categorical_relevant)
                                  : (cont ? PercentCategory::continuous_irrelevant : PercentCategory::categorical_irrelevant);
        add(cat, any_row_any_column(mask.interaction_selected, v.columns));
    }
    PercentTable t;
    for (int i = 0; i < kPercentCategories; ++i) t.value[i] = total[i] > 0 ? ratio(hit[i], total[i]) : kNaN;
    return t;
}

PercentTable percent_selected(
    const std::vector<SelectionMask>& masks, const SelectionTruth& truth, const ModifierLayout& layout
)
{
    if (masks.empty()) throw InvalidArgument("percent_selected needs at least one replication");
    PercentTable mean;
    for (auto& v : mean.value) v = 0.0;
    for (const auto& m : masks) {
        const auto t = percent_selected(m, truth, layout);
        for (int i = 0; i < kPercentCategories; ++i) mean.value[i] += t.value[i];
    }
    bool any = false;
    for (auto& v : mean.value) {
        v /= static_cast<double>(masks.size());
        any = any || !std::isnan(v);
    }
    if (!any) throw InvalidArgument("percent_selected: every category is empty");
    return mean;
}

std::vector<std::pair<PercentCategory, double>> difference_curve(const PercentTable& table)
{
    std::vector<std::pair<PercentCategory, double>> out;
    for (int i = 0; i < kPercentCategories; ++i) {
        const auto cat = static_cast<PercentCategory>(i);
        if (!table.has(cat)) continue;
        const double pct = 100.0 * table.value[i];
        out.emplace_back(cat, i < 3 ? 100.0 - pct : pct);
    }
    return out;
}

std::vector<RocPoint> roc_points(
    const PathResult& path, const SelectionTruth& truth, const ModifierLayout& layout, Universe universe
)
{
    if (path.fits.empty()) throw InvalidArgument("roc_points needs a nonempty path");
    std::vector<RocPoint> out;
    out.reserve(path.fits.size());
    for (std::size_t i = 0; i < path.fits.size(); ++i) {
        const auto r = confusion_rates(selection_mask(path.fits[i].coefficients), truth, layout, universe);
        out.push_back({path.lambdas[i], 1.0 - r.specificity, r.sensitivity});
    }
    return out;
}

std::vector<RocPoint> average_roc(const std::vector<std::vector<RocPoint>>& curves)
{
    if (curves.empty()) throw InvalidArgument("average_roc needs at least one curve");
    std::vector<RocPoint> mean = curves.front();
    for (auto& pt : mean) pt.fpr = pt.tpr = 0.0;
    for (const auto& c : curves) {
        if (c.size() != mean.size()) throw InvalidArgument("ROC curves have different lengths");
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i].lambda != mean[i].lambda) throw InvalidArgument("ROC curves use different lambda grids");
            mean[i].fpr += c[i].fpr;
            mean[i].tpr += c[i].tpr;
        }
    }
    for (auto& pt : mean) {
        pt.fpr /= static_cast<double>(curves.size());
        pt.tpr /= static_cast<double>(curves.size());
    }
    return mean;
}

double fpr_at_tpr(const std::vector<RocPoint>& curve, double tpr)
{
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].tpr < tpr) continue;
        if (i == 0 || curve[i].tpr == curve[i - 1].tpr) return curve[i].fpr;
        const auto& a = curve[i - 1];
        const auto& b = curve[i];
        const double t = (tpr - a.tpr) / (b.tpr - a.tpr);
        return a.fpr + t * (b.fpr - a.fpr);
    }
    return kNaN;
}

} // namespace svreg
