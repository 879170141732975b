#include <doctest.h>
#include "helpers.hpp"

using namespace svreg;

namespace {

double corr(const Vector& a, const Vector& b)
{
    const Vector ca = a.array() - a.mean(), cb = b.array() - b.mean();
    return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

Index count(const BoolMatrix& m)
{
    return m.count();
}

Index count(const std::vector<bool>& v)
{
    return std::count(v.begin(), v.end(), true);
}

} // namespace

TEST_CASE("Rng is deterministic and its normals look standard")
{
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    Rng r(6);
    const int n = 200000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal();
        s += v;
        ss += v * v;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(ss / n - 1.0) < 0.02);
    for (int i = 0; i < 1000; ++i) CHECK(r.below(3) < 3);
}

TEST_CASE("setting 1 shapes, dummies and truth")
{
    const auto s = gen_setting1(100, 7);
    CHECK(s.data.X.rows() == 100);
    CHECK(s.data.X.cols() == 50);
    CHECK(s.data.Z.cols() == 30);
    CHECK(count(s.data.z_dummy) == 20);
    for (Index k = 10; k < 30; ++k) {
        CHECK(s.data.z_dummy[k]);
        CHECK((s.data.Z.col(k).array() * (1 - s.data.Z.col(k).array()) == 0).all());
    }
    for (Index c = 10; c < 30; c += 2) {
        CHECK(((s.data.Z.col(c).array() + s.data.Z.col(c + 1).array()) <= 1).all());
    }
    for (Index k = 0; k < 10; ++k) CHECK(std::abs(s.data.Z.col(k).mean()) < 4.0 / std::sqrt(100.0));
    for (Index j = 0; j < 50; ++j) CHECK(std::abs(s.data.X.col(j).mean()) < 4.0 / std::sqrt(100.0));
    CHECK(count(s.truth.main_relevant) == 4);
    CHECK(count(s.truth.interaction_relevant) == 4);
    CHECK(s.truth.main_relevant[0]);
    CHECK(s.truth.main_relevant[1]);
    CHECK(s.truth.main_relevant[3]);
    CHECK(s.truth.main_relevant[4]);
    CHECK(s.truth.interaction_relevant(3, 0));
    CHECK(s.truth.interaction_relevant(4, 1));
    CHECK(s.truth.interaction_relevant(4, 10));
    CHECK(s.truth.interaction_relevant(4, 11));
    CHECK(s.groups.n_predictor_groups() == 50);
    CHECK(s.groups.n_modifier_groups() == 20);
    CHECK_NOTHROW(s.groups.validate(50, 30));
    CHECK_NOTHROW(s.truth.validate());
}

TEST_CASE("setting 1 response reconstructs the generating equation")
{
    const auto s = gen_setting1(100, 8);
    const auto& X = s.data.X;
    const auto& Z = s.data.Z;
    for (Index i = 0; i < 100; ++i) {
        const double mean = X(i, 0) + X(i, 1) + (1 + Z(i, 0)) * X(i, 3) + (1 - Z(i, 1) + Z(i, 10) - Z(i, 11)) * X(i, 4);
        CHECK(std::abs(s.data.y(i) - s.noise(i) - mean) < 1e-12);
    }
}

TEST_CASE("setting 2 builds correlated members and grouped structure")
{
    const auto s = gen_setting2(2000, 9);
    const auto& X = s.data.X;
    CHECK(std::abs(corr(X.col(0), X.col(2)) - 2.0 / 3.0) < 4.0 / std::sqrt(2000.0));
    CHECK(std::abs(corr(X.col(3), X.col(5)) - 2.0 / 3.0) < 4.0 / std::sqrt(2000.0));
    const Vector c3 = X.col(2).array() - X.col(2).mean();
    CHECK(std::abs(c3.squaredNorm() / 1999.0 - 1.0) < 0.1);
    CHECK(s.groups.n_predictor_groups() == 46);
    CHECK(s.groups.predictor_groups[0] == std::vector<Index>{0, 1, 2});
    CHECK(s.groups.predictor_groups[1] == std::vector<Index>{3, 4, 5});
    const auto s1 = gen_setting1(2000, 9);
    CHECK(s.truth.main_relevant == s1.truth.main_relevant);
    CHECK((s.truth.interaction_relevant == s1.truth.interaction_relevant).all());
    const auto& Z = s.data.Z;
    for (Index i = 0; i < 2000; ++i) {
        const double mean = X(i, 0) + X(i, 1) + (1 + Z(i, 0)) * X(i, 3) + (1 - Z(i, 1) + Z(i, 10) - Z(i, 11)) * X(i, 4);
        CHECK(std::abs(s.data.y(i) - s.noise(i) - mean) < 1e-12);
    }
}

TEST_CASE("setting 3 binary modifiers and truth")
{
    const auto s = gen_setting3(100, 10);
    CHECK(s.data.Z.cols() == 20);
    CHECK((s.data.Z.array() * (1 - s.data.Z.array()) == 0).all());
    for (Index k = 0; k < 20; ++k) CHECK(std::abs(s.data.Z.col(k).mean() - 0.5) < 4.0 / std::sqrt(400.0));
    CHECK(count(s.truth.main_relevant) == 4);
    CHECK(count(s.truth.interaction_relevant) == 2);
    CHECK(s.truth.interaction_relevant(2, 0));
    CHECK(s.truth.interaction_relevant(3, 1));
    CHECK(s.groups.n_predictor_groups() == 50);
    CHECK(s.groups.n_modifier_groups() == 20);
    const auto& X = s.data.X;
    const auto& Z = s.data.Z;
    for (Index i = 0; i < 100; ++i) {
        const double mean = X(i, 0) + X(i, 1) + (1 + Z(i, 0)) * X(i, 2) + (1 - Z(i, 1)) * X(i, 3);
        CHECK(std::abs(s.data.y(i) - s.noise(i) - mean) < 1e-12);
    }
}

TEST_CASE("generators are deterministic per seed")
{
    for (auto setting : {Setting::s1, Setting::s2, Setting::s3}) {
        const auto a = generate(setting, 50, 123);
        const auto b = generate(setting, 50, 123);
        const auto c = generate(setting, 50, 124);
        CHECK(a.data.X == b.data.X);
        CHECK(a.data.Z == b.data.Z);
        CHECK(a.data.y == b.data.y);
        CHECK(a.data.y != c.data.y);
        CHECK(setting_from_string(to_string(setting)) == setting);
    }
    CHECK_THROWS_AS(setting_from_string("s9"), InvalidArgument);
}
