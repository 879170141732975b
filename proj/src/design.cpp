#include <svreg/design.hpp>

namespace svreg {
namespace {

BlockDesign skeleton(const Dataset& d, const GroupSpec& gs)
{
    d.validate();
    gs.validate(d.p(), d.k());
    BlockDesign design;
    design.n = d.n();
    design.p = d.p();
    design.k = d.k();
    design.modifier_groups = gs.modifier_groups;
    design.blocks.resize(gs.predictor_groups.size());
    return design;
}

void fill_block(const Dataset& d, const GroupSpec& gs, Index l, Block& b)
{
    const auto& pred = gs.predictor_groups[l];
    const Index pl = static_cast<Index>(pred.size());
    b.predictors = pred;
    b.offsets.clear();
    Index dim = pl;
    for (const auto& mods : gs.modifier_groups) {
        b.offsets.push_back(dim);
        dim += pl * static_cast<Index>(mods.size());
    }
    b.offsets.push_back(dim);

    b.phi.resize(d.n(), dim);
    Index col = 0;
    for (Index j : pred) b.phi.col(col++) = d.X.col(j);
    for (const auto& mods : gs.modifier_groups) {
        for (Index k : mods) {
            for (Index j : pred) b.phi.col(col++) = d.X.col(j).cwiseProduct(d.Z.col(k));
        }
    }
    b.gram.setZero(dim, dim);
    b.gram.selfadjointView<Eigen::Lower>().rankUpdate(b.phi.transpose(), 1.0 / static_cast<double>(d.n()));
    b.gram.triangularView<Eigen::StrictlyUpper>() = b.gram.transpose();

    b.degenerate = b.phi.leftCols(pl).cwiseAbs().maxCoeff() == 0.0;
}

} // namespace

Vector pack_block(const BlockDesign& design, Index group, const CoefficientSet& c)
{
    const Block& b = design.blocks[group];
    Vector u(b.dim());
    Index pos = 0;
    for (Index j : b.predictors) u(pos++) = c.beta(j);
    for (const auto& mods : design.modifier_groups) {
        for (Index k : mods) {
            for (Index j : b.predictors) u(pos++) = c.theta(j, k);
        }
    }
    return u;
}

void unpack_block(const BlockDesign& design, Index group, const Vector& u, CoefficientSet& c)
{
    const Block& b = design.blocks[group];
    Index pos = 0;
    for (Index j : b.predictors) c.beta(j) = u(pos++);
    for (const auto& mods : design.modifier_groups) {
        for (Index k : mods) {
            for (Index j : b.predictors) c.theta(j, k) = u(pos++);
        }
    }
}

namespace serial {

BlockDesign build_block_design(const Dataset& d, const GroupSpec& gs)
{
    BlockDesign design = skeleton(d, gs);
    for (Index l = 0; l < static_cast<Index>(design.blocks.size()); ++l) fill_block(d, gs, l, design.blocks[l]);
    return design;
}

void block_correlations(const BlockDesign& design, const Vector& r, std::vector<Vector>& out)
{
    out.resize(design.blocks.size());
    const double inv_n = 1.0 / static_cast<double>(design.n);
    for (std::size_t l = 0; l < design.blocks.size(); ++l) {
        out[l].noalias() = design.blocks[l].phi.transpose() * r;
        out[l] *= inv_n;
    }
}

} // namespace serial

namespace omp {

BlockDesign build_block_design(const Dataset& d, const GroupSpec& gs)
{
    BlockDesign design = skeleton(d, gs);
    const long L = static_cast<long>(design.blocks.size());
#pragma omp parallel for schedule(dynamic)
    for (long l = 0; l < L; ++l) fill_block(d, gs, l, design.blocks[l]);
    return design;
}

void block_correlations(const BlockDesign& design, const Vector& r, std::vector<Vector>& out)
{
    out.resize(design.blocks.size());
    const double inv_n = 1.0 / static_cast<double>(design.n);
    const long L = static_cast<long>(design.blocks.size());
#pragma omp parallel for schedule(static)
    for (long l = 0; l < L; ++l) {
        out[l].noalias() = design.blocks[l].phi.transpose() * r;
        out[l] *= inv_n;
    }
}

} // namespace omp

} // namespace svreg
