#include "mblotto/sector_basis.hpp"

#include "mblotto/errors.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace mblotto {

std::int64_t SectorBasis::index_of(std::uint32_t pattern) const {
    if (pattern >= lookup.size()) return -1;
    return lookup[pattern];
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

SectorBasis enumerate_basis(int sites) {
    if (sites < 2 || sites > kMaxSites || sites % 2 != 0)
        throw ParameterError("sites must be even and in [2, " + std::to_string(kMaxSites) +
                             "], got " + std::to_string(sites));
    SectorBasis b;
    b.sites = sites;
    const std::uint32_t full = 1u << sites;
    b.lookup.assign(full, -1);
    b.states.reserve(binomial(sites, sites / 2));
    for (std::uint32_t s = 0; s < full; ++s) {
        if (std::popcount(s) == sites / 2) {
            b.lookup[s] = static_cast<std::int32_t>(b.states.size());
            b.states.push_back(s);
        }
    }
    b.dim = b.states.size();
    return b;
}

double rescale_factor(double h, int sites) {
    if (sites < 2) throw ParameterError("rescale_factor needs at least 2 sites");
    if (h < 0) throw ParameterError("disorder strength must be nonnegative");
    const double L = sites;
    return std::sqrt(3.0 * L - 2.0 + (L - 2.0) / (L - 1.0) + L * h * h / 3.0);
}

double disorder_strength(const DisorderRealization& dr, double alpha) {
    return (1.0 - alpha) * dr.h_eth + alpha * dr.h_mbl;
}

HamiltonianParts hamiltonian_parts(const SectorBasis& basis, const DisorderRealization& dr) {
    const int L = basis.sites;
    if (static_cast<int>(dr.fields.size()) != L)
        throw ParameterError("realization has " + std::to_string(dr.fields.size()) +
                             " fields but basis has " + std::to_string(L) + " sites");
    const auto n = static_cast<Eigen::Index>(basis.dim);
    HamiltonianParts parts{Matrix::Zero(n, n), Vector::Zero(n)};

    for (Eigen::Index a = 0; a < n; ++a) {
        const std::uint32_t s = basis.states[a];
        double zz = 0.0;
        double hz = 0.0;
        for (int j = 0; j < L; ++j) {
            const double sj = ((s >> j) & 1u) ? 1.0 : -1.0;
            hz += dr.fields[j] * sj;
            if (j + 1 < L) {
                const double sk = ((s >> (j + 1)) & 1u) ? 1.0 : -1.0;
                zz += sj * sk;
                if (sj != sk) {
                    // 2 (s+ s- + h.c.) exchanges the antiparallel pair
                    const std::uint32_t t = s ^ (3u << j);
                    const auto b = basis.lookup[t];
                    parts.bonds(a, b) = 2.0;
                }
            }
        }
        parts.bonds(a, a) = zz;
        parts.field(a) = hz;
    }
    return parts;
}

Matrix assemble(const HamiltonianParts& parts, double h, int sites, const HamiltonianParams& p) {
    if (p.alpha < 0.0 || p.alpha > 1.0) throw ParameterError("alpha must lie in [0, 1]");
    if (!(p.energy_unit > 0.0)) throw ParameterError("energy unit must be positive");
    const double scale = p.rescale ? p.energy_unit / rescale_factor(h, sites) : p.energy_unit;
    Matrix H = scale * parts.bonds;
    H.diagonal().noalias() += (scale * h) * parts.field;
    return H;
}

Matrix build_hamiltonian(const SectorBasis& basis, const DisorderRealization& dr,
                         const HamiltonianParams& p) {
    const auto parts = hamiltonian_parts(basis, dr);
    return assemble(parts, disorder_strength(dr, p.alpha), basis.sites, p);
}

SectorTraces sector_traces(int sites) {
    if (sites < 2 || sites % 2 != 0 || sites > 32)
        throw ParameterError("sector traces need an even site count in [2, 32]");
    const auto L = static_cast<std::int64_t>(sites);
    const auto N = static_cast<std::int64_t>(binomial(sites, sites / 2));
    SectorTraces t;
    t.zz = -N / (L - 1);
    t.flip = N * L / (4 * (L - 1));
    if (sites >= 4) t.four_point = 3 * N / ((L - 1) * (L - 3));
    return t;
}

} // namespace mblotto
