#include <svreg/simgen.hpp>
#include <cmath>

namespace svreg {
namespace {

constexpr Index kPredictors = 50;
constexpr Index kContinuous = 10;
constexpr Index kCategorical = 10;

void name_columns(Dataset& d)
{
    d.x_names.clear();
    d.z_names.clear();
    for (Index j = 0; j < d.p(); ++j) d.x_names.push_back("x" + std::to_string(j + 1));
    for (Index k = 0; k < d.k(); ++k) d.z_names.push_back("z" + std::to_string(k + 1));
}

Matrix normal_matrix(Rng& rng, Index n, Index cols)
{
    Matrix m(n, cols);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

Vector normal_vector(Rng& rng, Index n)
{
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

// Settings 1 and 2 share modifiers, response and truth; only X differs.
SimulatedDataset structured(Setting setting, Index n, std::uint64_t seed)
{
    if (n < 2) throw InvalidArgument("simulation needs n >= 2");
    Rng rng(seed);
    SimulatedDataset sim;
    sim.seed = seed;
    sim.setting = setting;

    Dataset& d = sim.data;
    d.X = normal_matrix(rng, n, kPredictors);
    if (setting == Setting::s2) {
        const Vector gamma = normal_vector(rng, n);
        const Vector delta = normal_vector(rng, n);
        d.X.col(2) = (2.0 / 3.0) * d.X.col(0) + (2.0 / 3.0) * d.X.col(1) + (1.0 / 3.0) * gamma;
        d.X.col(5) = (2.0 / 3.0) * d.X.col(3) + (2.0 / 3.0) * d.X.col(4) + (1.0 / 3.0) * delta;
    }

    const Index K = kContinuous + 2 * kCategorical;
    d.Z = Matrix::Zero(n, K);
    d.Z.leftCols(kContinuous) = normal_matrix(rng, n, kContinuous);
    for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < kCategorical; ++c) {
            // category 0 is the baseline; 1 and 2 switch on one dummy each
            const auto cat = rng.below(3);
            if (cat == 1) d.Z(i, kContinuous + 2 * c) = 1.0;
            if (cat == 2) d.Z(i, kContinuous + 2 * c + 1) = 1.0;
        }
    }
    sim.noise = normal_vector(rng, n);

    const auto x = [&](Index j) { return d.X.col(j - 1).array(); };
    const auto z = [&](Index k) { return d.Z.col(k - 1).array(); };
    d.y = (x(1) + x(2) + (1.0 + z(1)) * x(4) + (1.0 - z(2) + z(11) - z(12)) * x(5)).matrix() + sim.noise;

    d.z_dummy.assign(K, false);
    for (Index k = kContinuous; k < K; ++k) d.z_dummy[k] = true;
    name_columns(d);

    auto& t = sim.truth;
    t.main_relevant.assign(kPredictors, false);
    for (Index j : {1, 2, 4, 5}) t.main_relevant[j - 1] = true;
    t.interaction_relevant = BoolMatrix::Constant(kPredictors, K, false);
    t.interaction_relevant(3, 0) = true;
    t.interaction_relevant(4, 1) = true;
    t.interaction_relevant(4, 10) = true;
    t.interaction_relevant(4, 11) = true;

    auto& gs = sim.groups;
    if (setting == Setting::s2) {
        gs.predictor_groups.push_back({0, 1, 2});
        gs.predictor_groups.push_back({3, 4, 5});
        for (Index j = 6; j < kPredictors; ++j) gs.predictor_groups.push_back({j});
    } else {
        for (Index j = 0; j < kPredictors; ++j) gs.predictor_groups.push_back({j});
    }
    for (Index k = 0; k < kContinuous; ++k) gs.modifier_groups.push_back({k});
    for (Index c = 0; c < kCategorical; ++c) {
        gs.modifier_groups.push_back({kContinuous + 2 * c, kContinuous + 2 * c + 1});
    }
    return sim;
}

} // namespace

double Rng::uniform()
{
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0) throw InvalidArgument("Rng::below needs n > 0");
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n);
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

void SelectionTruth::validate() const
{
    const Index p = static_cast<Index>(main_relevant.size());
    if (interaction_relevant.rows() != p) throw DataError("truth masks have inconsistent dimensions");
    for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < interaction_relevant.cols(); ++k) {
            if (interaction_relevant(j, k) && !main_relevant[j]) {
                throw DataError("truth mask violates hierarchy at predictor " + std::to_string(j + 1));
            }
        }
    }
}

const char* to_string(Setting s)
{
    switch (s) {
        case Setting::s1: return "s1";
        case Setting::s2: return "s2";
        case Setting::s3: return "s3";
    }
    return "?";
}

Setting setting_from_string(const std::string& s)
{
    if (s == "s1") return Setting::s1;
    if (s == "s2") return Setting::s2;
    if (s == "s3") return Setting::s3;
    throw InvalidArgument("unknown setting '" + s + "' (expected s1, s2 or s3)");
}

SimulatedDataset gen_setting1(Index n, std::uint64_t seed)
{
    return structured(Setting::s1, n, seed);
}

SimulatedDataset gen_setting2(Index n, std::uint64_t seed)
{
    return structured(Setting::s2, n, seed);
}

SimulatedDataset gen_setting3(Index n, std::uint64_t seed)
{
    if (n < 2) throw InvalidArgument("simulation needs n >= 2");
    constexpr Index K = 20;
    Rng rng(seed);
    SimulatedDataset sim;
    sim.seed = seed;
    sim.setting = Setting::s3;

    Dataset& d = sim.data;
    d.X = normal_matrix(rng, n, kPredictors);
    d.Z.resize(n, K);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < K; ++k) d.Z(i, k) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    }
    sim.noise = normal_vector(rng, n);

    const auto x = [&](Index j) { return d.X.col(j - 1).array(); };
    const auto z = [&](Index k) { return d.Z.col(k - 1).array(); };
    d.y = (x(1) + x(2) + (1.0 + z(1)) * x(3) + (1.0 - z(2)) * x(4)).matrix() + sim.noise;

    d.z_dummy.assign(K, true);
    name_columns(d);

    auto& t = sim.truth;
    t.main_relevant.assign(kPredictors, false);
    for (Index j : {1, 2, 3, 4}) t.main_relevant[j - 1] = true;
    t.interaction_relevant = BoolMatrix::Constant(kPredictors, K, false);
    t.interaction_relevant(2, 0) = true;
    t.interaction_relevant(3, 1) = true;

    sim.groups = GroupSpec::singletons(kPredictors, K);
    return sim;
}

SimulatedDataset generate(Setting s, Index n, std::uint64_t seed)
{
    switch (s) {
        case Setting::s1: return gen_setting1(n, seed);
        case Setting::s2: return gen_setting2(n, seed);
        case Setting::s3: return gen_setting3(n, seed);
    }
    throw InvalidArgument("unknown setting");
}

} // namespace svreg
