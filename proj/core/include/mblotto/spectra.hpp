#pragma once

#include "mblotto/sector_basis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mblotto {

struct Spectrum {
    Vector energies;       // ascending
    Matrix eigenvectors;   // column j pairs with energies(j); empty when values only
    double alpha = 0.0;

    std::size_t dim() const { return static_cast<std::size_t>(energies.size()); }
    bool has_vectors() const { return eigenvectors.size() > 0; }
};

struct DiagonalizeOptions {
    bool vectors = true;
    std::uint64_t seed_tag = 0;
    double alpha = 0.0;
};

Spectrum diagonalize(const Matrix& H, const DiagonalizeOptions& opt = {});

// Population variance of one spectrum.
double spectral_variance(const Vector& energies);

// 2 sqrt(pi) sigma / N with sigma^2 the disorder-averaged spectral variance.
double mean_gap(const std::vector<Spectrum>& spectra);
double mean_gap(const std::vector<Vector>& energies);

// 2 sqrt(pi N) eps / dimension for a Gaussian density of states of variance N eps^2.
double analytic_mean_gap(int sites, double eps);

// Consecutive gaps inside the central `window` fraction of an ascending spectrum.
std::vector<double> central_spacings(const Vector& energies, double window);

// Central-window spacings of every spectrum divided by their ensemble mean.
std::vector<double> unfolded_spacings(const std::vector<Vector>& energies, double window);

struct SpacingDistances {
    double ks_poisson = 0.0;
    double ks_wigner = 0.0;
};

SpacingDistances spacing_distances(std::vector<double> unfolded);

double poisson_cdf(double s);
double wigner_cdf(double s);

struct GapStatistics {
    std::vector<double> spacings;
    double mean_gap = 0.0;
    double delta_minus = 0.0;
    double window = 0.5;
};

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::uint64_t count = 0;
    double density = 0.0;  // count / (total * width)
};

// Logarithmic bins over [lo, hi]; density is normalized by the full sample count.
std::vector<HistogramBin> log_histogram(const std::vector<double>& samples, double lo, double hi,
                                        int bins);

std::vector<HistogramBin> linear_histogram(const std::vector<double>& samples, double lo, double hi,
                                           int bins);

inline constexpr std::size_t kDeltaMinusMinSamples = 1000;

// Turnover of the spacing density on log bins spanning [1e-4, 1] * mean_gap.
double estimate_delta_minus(const std::vector<double>& spacings, double mean_gap, int bins = 40);

} // namespace mblotto
