#pragma once
#include <cstdint>
#include <random>
#include <string>
#include <svreg/model.hpp>

namespace svreg {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * Seeded source with platform-independent output: mt19937_64 words,
 * 53-bit uniforms, Marsaglia polar normals and rejection-sampled bounded
 * integers. Standard-library distributions are avoided because their
 * algorithms are implementation-defined.
 */
class Rng
{
public:
    static constexpr const char* algorithm = "mt19937_64+polar";

    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform();                       // [0, 1)
    double normal();                        // N(0, 1)
    std::uint64_t below(std::uint64_t n);   // uniform on {0, ..., n-1}

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SelectionTruth
{
    std::vector<bool> main_relevant;   // p
    BoolMatrix interaction_relevant;   // p x K

    void validate() const;             // interaction => main
};

enum class Setting
{
    s1,  // independent predictors, continuous + categorical modifiers
    s2,  // s1 with x3, x6 built from {x1, x2} and {x4, x5}
    s3,  // independent predictors, binary modifiers, no structure
};

const char* to_string(Setting s);
Setting setting_from_string(const std::string& s);

struct SimulatedDataset
{
    Dataset data;
    GroupSpec groups;
    SelectionTruth truth;
    Vector noise;
    std::uint64_t seed = 0;
    Setting setting = Setting::s1;
    std::string rng_algorithm = Rng::algorithm;
};

SimulatedDataset gen_setting1(Index n = 100, std::uint64_t seed = 1);
SimulatedDataset gen_setting2(Index n = 100, std::uint64_t seed = 1);
SimulatedDataset gen_setting3(Index n = 100, std::uint64_t seed = 1);
SimulatedDataset generate(Setting s, Index n, std::uint64_t seed);

} // namespace svreg
