#pragma once
#include <vector>
#include <svreg/model.hpp>

namespace svreg {

/**
 * Columns of one predictor group: the main effects x_j (j in the group)
 * followed by one segment per modifier group holding x_j * z_k for k in the
 * modifier group, predictor index fastest.
 *
 * Block parameter vectors use the same layout: u = [beta_[l] | theta_[l][0] | ...].
 */
struct Block
{
    std::vector<Index> predictors;
    std::vector<Index> offsets;  // G+1 entries; offsets[0] == p_l, offsets[G] == dim
    Matrix phi;                  // N x dim
    Matrix gram;                 // phi^T phi / N
    bool degenerate = false;     // every predictor column is identically zero

    Index p_l() const { return static_cast<Index>(predictors.size()); }
    Index dim() const { return phi.cols(); }
};

struct BlockDesign
{
    Index n = 0;
    Index p = 0;
    Index k = 0;
    std::vector<std::vector<Index>> modifier_groups;
    std::vector<Block> blocks;
};

Vector pack_block(const BlockDesign& design, Index group, const CoefficientSet& c);
void unpack_block(const BlockDesign& design, Index group, const Vector& u, CoefficientSet& c);

// Data-parallel kernels. The serial versions are the reference; the omp
// versions split the work over predictor groups and must agree exactly.
namespace serial {
BlockDesign build_block_design(const Dataset& d, const GroupSpec& gs);
// out[l] = phi_l^T r / N for every block.
void block_correlations(const BlockDesign& design, const Vector& r, std::vector<Vector>& out);
} // namespace serial

namespace omp {
BlockDesign build_block_design(const Dataset& d, const GroupSpec& gs);
void block_correlations(const BlockDesign& design, const Vector& r, std::vector<Vector>& out);
} // namespace omp

} // namespace svreg
