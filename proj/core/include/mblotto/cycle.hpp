#pragma once

#include "mblotto/rng.hpp"
#include "mblotto/sector_basis.hpp"
#include "mblotto/spectra.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace mblotto {

using CMatrix = Eigen::MatrixXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class TuningMode { adiabatic, diabatic };
enum class Direction { forward, reverse };

struct CycleParams {
    double wb = 0.0;               // absolute cold-bath bandwidth
    double beta_c = kInf;
    double beta_h = 0.0;
    double speed = 0.0;            // 0 means adiabatic
    double dt_factor = 0.405;      // time step is dt_factor / mean gap
    TuningMode mode = TuningMode::adiabatic;
    double energy_unit = 1.0;
    bool rescale = true;

    void validate() const;
};

struct CycleRecord {
    std::array<double, 5> boundary_energies{};
    double w1 = 0.0;
    double q2 = 0.0;
    double w3 = 0.0;
    double q4 = 0.0;
    double w_tot = 0.0;
    std::uint64_t realization_id = 0;
};

// Hamiltonians at the two endpoints. The standard engine uses one realization for
// both; H(alpha) then interpolates the disorder strength of `eth`.
struct EndpointPair {
    DisorderRealization eth;
    DisorderRealization mbl;
    bool shared = true;

    static EndpointPair standard(const DisorderRealization& dr) { return {dr, dr, true}; }
};

// --- population-level building blocks (states diagonal in an eigenbasis)

// Gibbs weights; beta = 0 gives exactly uniform weights.
Vector gibbs_populations(const Vector& energies, double beta);

// Maximal runs [first, last] of levels whose consecutive gaps are all below wb.
std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_ranges(const Vector& energies, double wb);

Vector cold_populations(const Vector& p, const Vector& energies, double wb, double beta_c);

// |<E_j(to)|U|E_m(from)>|^2
Matrix transition_matrix(const Spectrum& from, const Spectrum& to, const CMatrix& U);

// --- density-matrix operations in the site basis

CMatrix adiabatic_map(const CMatrix& rho, const Spectrum& from, const Spectrum& to);

// Diagonal of rho in the spectrum's eigenbasis.
Vector populations(const CMatrix& rho, const Spectrum& s);

CMatrix from_populations(const Vector& p, const Spectrum& s);

CMatrix dephase(const CMatrix& rho, const Spectrum& s);

CMatrix cold_thermalize(const CMatrix& rho_diag, const Spectrum& s, double wb, double beta_c);

CMatrix hot_thermalize(const Spectrum& s_alpha0, double beta_h);

Matrix partial_swap(double p, const Vector& gibbs);

// --- tuning

inline constexpr std::uint64_t kMaxDiabaticSteps = 1'000'000;

double ramp_duration(const DisorderRealization& dr, double speed, double eps);
std::uint64_t diabatic_steps(const DisorderRealization& dr, double speed, double dt, double eps);

CMatrix diabatic_unitary(const SectorBasis& basis, const DisorderRealization& dr,
                         const HamiltonianParams& hp, Direction direction, double speed, double dt);

struct StrokeUnitaries {
    CMatrix forward;
    CMatrix reverse;
};

// Forward and reverse unitaries for several speeds. Step Hamiltonians whose alpha
// values agree within 1e-12 share one eigendecomposition.
std::vector<StrokeUnitaries> diabatic_unitaries(const SectorBasis& basis, const DisorderRealization& dr,
                                                const HamiltonianParams& hp,
                                                const std::vector<double>& speeds, double dt);

// --- cycles

// Adiabatic cycle from endpoint energies only.
CycleRecord run_cycle_adiabatic(const Vector& e0, const Vector& e1, const CycleParams& params,
                                std::uint64_t realization_id = 0);

// Cycle with explicit stroke transition matrices (see transition_matrix).
CycleRecord run_cycle_transitions(const Vector& e0, const Vector& e1, const Matrix& forward,
                                  const Matrix& reverse, const CycleParams& params,
                                  std::uint64_t realization_id = 0);

CycleRecord run_cycle(const SectorBasis& basis, const EndpointPair& pair, const CycleParams& params,
                      double mean_gap, std::uint64_t realization_id = 0);

std::vector<double> sample_trials(const Vector& e0, const Vector& e1, const CycleParams& params,
                                  std::size_t n_trials, RngCursor& rng);

std::vector<double> sample_trials(const SectorBasis& basis, const EndpointPair& pair,
                                  const CycleParams& params, std::size_t n_trials, RngCursor& rng);

Spectrum endpoint_spectrum(const SectorBasis& basis, const EndpointPair& pair, int endpoint,
                           const CycleParams& params, bool vectors);

} // namespace mblotto
