#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace mblotto {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kMaxSites = 16;

// Half-filling sector of an L-site chain. Site j maps to bit j-1, a set bit is spin up.
struct SectorBasis {
    int sites = 0;
    std::vector<std::uint32_t> states;  // ascending
    std::size_t dim = 0;

    // Position of a pattern in `states`, or -1 if it is not in the sector.
    std::int64_t index_of(std::uint32_t pattern) const;

    std::vector<std::int32_t> lookup;  // size 2^L
};

struct DisorderRealization {
    std::vector<double> fields;  // h_j in [-1, 1]
    double h_eth = 2.0;
    double h_mbl = 20.0;
    std::uint64_t seed_tag = 0;
};

struct HamiltonianParams {
    double energy_unit = 1.0;
    double alpha = 0.0;
    bool rescale = true;
};

SectorBasis enumerate_basis(int sites);

std::uint64_t binomial(int n, int k);

// Disorder-averaged normalization Q(h) of the chain.
double rescale_factor(double h, int sites);

// h(alpha) = (1 - alpha) h_eth + alpha h_mbl
double disorder_strength(const DisorderRealization& dr, double alpha);

Matrix build_hamiltonian(const SectorBasis& basis, const DisorderRealization& dr,
                         const HamiltonianParams& p);

// Interaction and field parts separately: H = scale * (bonds + h(alpha) * field).
struct HamiltonianParts {
    Matrix bonds;
    Vector field;  // diagonal
};
HamiltonianParts hamiltonian_parts(const SectorBasis& basis, const DisorderRealization& dr);
Matrix assemble(const HamiltonianParts& parts, double h, int sites, const HamiltonianParams& p);

struct SectorTraces {
    std::int64_t zz = 0;    // Tr(sz_j sz_{j+1})
    std::int64_t flip = 0;  // Tr((s+_j s-_j)(s-_{j+1} s+_{j+1}))
    std::optional<std::int64_t> four_point;  // Tr(sz sz sz sz) on four distinct sites, L >= 4
};

SectorTraces sector_traces(int sites);

} // namespace mblotto
