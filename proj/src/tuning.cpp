#include <svreg/tuning.hpp>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <svreg/simgen.hpp>

namespace svreg {
namespace {

void check_grid(const std::vector<double>& grid)
{
    if (grid.empty()) throw InvalidArgument("lambda grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw InvalidArgument("lambda grid has a negative entry");
        if (i > 0 && !(grid[i] < grid[i - 1])) throw InvalidArgument("lambda grid must be strictly decreasing");
    }
}

std::string lambda_text(double lam)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", lam);
    return buf;
}

} // namespace

std::vector<double> lambda_grid(double from, double to, double step)
{
    if (!(from > to && to > 0.0 && step > 0.0)) {
        throw InvalidArgument("lambda grid needs from > to > 0 and step > 0");
    }
    const auto count = static_cast<long>(std::floor((from - to) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (long i = 0; i < count; ++i) {
        // snap to 12 significant digits so 10 - 999 * 0.01 prints as 0.01
        const double v = from - static_cast<double>(i) * step;
        const double scale = std::pow(10.0, 11 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
        out.push_back(std::round(v * scale) / scale);
    }
    return out;
}

std::vector<double> coarse_grid(double from, double to, int points)
{
    if (!(from > to && to > 0.0) || points < 2) throw InvalidArgument("coarse grid needs from > to > 0 and points >= 2");
    std::vector<double> out(points);
    const double a = std::log(from), b = std::log(to);
    for (int i = 0; i < points; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    out.front() = from;
    out.back() = to;
    return out;
}

PathResult fit_path(
    const Dataset& d, const GroupSpec& gs, Method method, const std::vector<double>& grid, const FitConfig& cfg
)
{
    check_grid(grid);
    PathResult path;
    path.method = method;
    path.alpha = cfg.alpha;
    path.lambdas = grid;
    path.fits.reserve(grid.size());

    auto run = [&](auto&& fit_one) {
        for (double lam : grid) {
            const CoefficientSet* warm = path.fits.empty() ? nullptr : &path.fits.back().coefficients;
            try {
                path.fits.push_back(fit_one(lam, warm));
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " (lambda = " + lambda_text(lam) + ")");
            }
        }
    };

    if (method == Method::lasso) {
        LassoProblem prob(d);
        run([&](double lam, const CoefficientSet* warm) {
            FitConfig c = cfg;
            c.lambda = lam;
            return prob.fit(c, warm);
        });
    } else {
        const bool pliable = method == Method::plasso;
        SvregProblem prob(d, pliable ? GroupSpec::pliable(d.p(), d.k()) : gs);
        const FitConfig base = pliable ? plasso_config(cfg) : cfg;
        run([&](double lam, const CoefficientSet* warm) {
            FitConfig c = base;
            c.lambda = lam;
            return prob.fit(c, warm);
        });
    }
    return path;
}

std::vector<int> assign_folds(Index n, int folds, std::uint64_t seed)
{
    if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
    if (folds > n) throw InvalidArgument("more folds than observations");
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index(0));
    Rng rng(seed);
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[i], perm[j]);
    }
    std::vector<int> fold(n);
    for (Index i = 0; i < n; ++i) fold[perm[i]] = static_cast<int>(i % folds);
    return fold;
}

CVResult cross_validate(
    const Dataset& raw,
    const GroupSpec& gs,
    Method method,
    const std::vector<double>& grid,
    int folds,
    const FitConfig& cfg,
    std::uint64_t seed
)
{
    check_grid(grid);
    Dataset full = raw;
    full.fill_metadata();
    full.validate();

    CVResult cv;
    cv.method = method;
    cv.folds = folds;
    cv.seed = seed;
    cv.lambdas = grid;
    cv.fold_of_row = assign_folds(full.n(), folds, seed);
    cv.fold_sizes.assign(folds, 0);
    for (int f : cv.fold_of_row) ++cv.fold_sizes[f];
    for (Index s : cv.fold_sizes) {
        if (s == 0) throw InvalidArgument("cross-validation produced an empty fold");
    }

    const Index L = static_cast<Index>(grid.size());
    cv.fold_mse.resize(folds, L);
    std::vector<std::exception_ptr> errors(folds);

#pragma omp parallel for schedule(dynamic)
    for (int v = 0; v < folds; ++v) {
        try {
            std::vector<Index> train, test;
            for (Index i = 0; i < full.n(); ++i) (cv.fold_of_row[i] == v ? test : train).push_back(i);
            const auto std_train = standardize(full.rows(train));
            const Dataset held_out = std_train.record.apply(full.rows(test));
            const auto path = fit_path(std_train.data, gs, method, grid, cfg);
            for (Index i = 0; i < L; ++i) {
                const Vector r = held_out.y - predict(held_out, path.fits[i].coefficients);
                cv.fold_mse(v, i) = r.squaredNorm() / static_cast<double>(r.size());
            }
        } catch (...) {
            errors[v] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    cv.mean_mse.assign(L, 0.0);
    for (Index i = 0; i < L; ++i) {
        double total = 0.0;
        for (int v = 0; v < folds; ++v) total += cv.fold_mse(v, i) * static_cast<double>(cv.fold_sizes[v]);
        cv.mean_mse[i] = total / static_cast<double>(full.n());
    }
    // ties go to the smaller lambda, i.e. the later grid entry
    cv.best_index = 0;
    for (Index i = 1; i < L; ++i) {
        if (cv.mean_mse[i] <= cv.mean_mse[cv.best_index]) cv.best_index = i;
    }
    cv.best_lambda = grid[cv.best_index];
    return cv;
}

} // namespace svreg
