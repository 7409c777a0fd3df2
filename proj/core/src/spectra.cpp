#include "mblotto/spectra.hpp"

#include "mblotto/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mblotto {

Spectrum diagonalize(const Matrix& H, const DiagonalizeOptions& opt) {
    if (H.rows() != H.cols()) throw ParameterError("diagonalize needs a square matrix");
    if (H.rows() == 0) throw ParameterError("diagonalize needs a nonempty matrix");
    const double scale = std::max(H.cwiseAbs().maxCoeff(), 1.0);
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ParameterError("diagonalize needs a symmetric matrix");

    Eigen::SelfAdjointEigenSolver<Matrix> es(
        H, opt.vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("eigensolver did not converge", opt.seed_tag);

    Spectrum s;
    s.alpha = opt.alpha;
    s.energies = es.eigenvalues();
    if (opt.vectors) s.eigenvectors = es.eigenvectors();

    // Eigen already returns ascending values; keep a stable order guarantee anyway.
    const auto n = s.energies.size();
    bool sorted = true;
    for (Eigen::Index i = 1; i < n; ++i) sorted = sorted && s.energies(i - 1) <= s.energies(i);
    if (!sorted) {
        std::vector<Eigen::Index> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](auto a, auto b) { return s.energies(a) < s.energies(b); });
        Vector e(n);
        Matrix v(opt.vectors ? n : 0, opt.vectors ? n : 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            e(i) = s.energies(idx[i]);
            if (opt.vectors) v.col(i) = s.eigenvectors.col(idx[i]);
        }
        s.energies = std::move(e);
        if (opt.vectors) s.eigenvectors = std::move(v);
    }
    if (!s.energies.allFinite()) throw NumericError("eigensolver returned non-finite values", opt.seed_tag);
    return s;
}

double spectral_variance(const Vector& e) {
    const double mean = e.mean();
    return (e.array() - mean).square().mean();
}

double mean_gap(const std::vector<Vector>& energies) {
    if (energies.empty()) throw ParameterError("mean_gap needs at least one spectrum");
    const auto dim = energies.front().size();
    double var = 0.0;
    for (const auto& e : energies) {
        if (e.size() != dim) throw ParameterError("mean_gap needs spectra of equal dimension");
        var += spectral_variance(e);
    }
    var /= static_cast<double>(energies.size());
    return 2.0 * std::sqrt(std::numbers::pi) * std::sqrt(var) / static_cast<double>(dim);
}

double mean_gap(const std::vector<Spectrum>& spectra) {
    std::vector<Vector> e;
    e.reserve(spectra.size());
    for (const auto& s : spectra) e.push_back(s.energies);
    return mean_gap(e);
}

double analytic_mean_gap(int sites, double eps) {
    const double dim = static_cast<double>(binomial(sites, sites / 2));
    return 2.0 * std::sqrt(std::numbers::pi * sites) * eps / dim;
}

std::vector<double> central_spacings(const Vector& e, double window) {
    if (!(window > 0.0 && window <= 1.0)) throw ParameterError("window must lie in (0, 1]");
    const auto n = static_cast<std::size_t>(e.size());
    const auto keep = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(window * n)));
    const std::size_t lo = (n - std::min(keep, n)) / 2;
    const std::size_t hi = std::min(n, lo + keep);
    std::vector<double> out;
    for (std::size_t i = lo + 1; i < hi; ++i) out.push_back(e(i) - e(i - 1));
    return out;
}

std::vector<double> unfolded_spacings(const std::vector<Vector>& energies, double window) {
    std::vector<double> all;
    for (const auto& e : energies) {
        auto s = central_spacings(e, window);
        all.insert(all.end(), s.begin(), s.end());
    }
    if (all.empty()) throw StatisticsError("no spacings inside the window");
    const double mean = std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
    if (!(mean > 0.0)) throw StatisticsError("mean spacing is not positive");
    for (auto& s : all) s /= mean;
    return all;
}

double poisson_cdf(double s) { return s <= 0.0 ? 0.0 : -std::expm1(-s); }

double wigner_cdf(double s) {
    return s <= 0.0 ? 0.0 : -std::expm1(-std::numbers::pi * s * s / 4.0);
}

SpacingDistances spacing_distances(std::vector<double> s) {
    if (s.size() < 100) throw StatisticsError("need at least 100 spacings for a KS distance");
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    SpacingDistances d;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        const double fp = poisson_cdf(s[i]);
        const double fw = wigner_cdf(s[i]);
        d.ks_poisson = std::max({d.ks_poisson, std::abs(hi - fp), std::abs(fp - lo)});
        d.ks_wigner = std::max({d.ks_wigner, std::abs(hi - fw), std::abs(fw - lo)});
    }
    return d;
}

std::vector<HistogramBin> log_histogram(const std::vector<double>& samples, double lo, double hi,
                                        int bins) {
    if (!(lo > 0.0 && hi > lo) || bins < 1) throw ParameterError("invalid histogram range");
    std::vector<HistogramBin> h(static_cast<std::size_t>(bins));
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / bins;
    for (int b = 0; b < bins; ++b) {
        h[b].left = std::exp(llo + step * b);
        h[b].right = b + 1 == bins ? hi : std::exp(llo + step * (b + 1));
    }
    h[0].left = lo;
    for (double x : samples) {
        if (!(x >= lo && x < hi)) continue;
        auto b = static_cast<int>((std::log(x) - llo) / step);
        b = std::clamp(b, 0, bins - 1);
        // guard the edges against rounding in the log
        while (b > 0 && x < h[b].left) --b;
        while (b + 1 < bins && x >= h[b + 1].left) ++b;
        ++h[b].count;
    }
    const double total = static_cast<double>(samples.size());
    for (auto& bin : h) bin.density = total > 0 ? bin.count / (total * (bin.right - bin.left)) : 0.0;
    return h;
}

std::vector<HistogramBin> linear_histogram(const std::vector<double>& samples, double lo, double hi,
                                           int bins) {
    if (!(hi > lo) || bins < 1) throw ParameterError("invalid histogram range");
    std::vector<HistogramBin> h(static_cast<std::size_t>(bins));
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        h[b].left = lo + width * b;
        h[b].right = b + 1 == bins ? hi : lo + width * (b + 1);
    }
    for (double x : samples) {
        if (!(x >= lo && x < hi)) continue;
        const auto b = std::clamp(static_cast<int>((x - lo) / width), 0, bins - 1);
        ++h[b].count;
    }
    const double total = static_cast<double>(samples.size());
    for (auto& bin : h) bin.density = total > 0 ? bin.count / (total * (bin.right - bin.left)) : 0.0;
    return h;
}

double estimate_delta_minus(const std::vector<double>& spacings, double mean_gap, int bins) {
    if (!(mean_gap > 0.0)) throw ParameterError("mean gap must be positive");
    if (bins < 4) throw ParameterError("need at least 4 bins");
    if (spacings.size() < kDeltaMinusMinSamples)
        throw StatisticsError("too few spacings to locate the turnover");

    const auto h = log_histogram(spacings, 1e-4 * mean_gap, mean_gap, bins);
    const double total = static_cast<double>(spacings.size());
    std::vector<double> err(h.size());
    for (std::size_t b = 0; b < h.size(); ++b)
        err[b] = std::sqrt(std::max<double>(h[b].count, 1.0)) / (total * (h[b].right - h[b].left));

    auto rises = [&](std::size_t a, std::size_t b, double k) {
        return h[b].density - h[a].density > k * std::hypot(err[a], err[b]);
    };

    constexpr int run = 3;
    for (std::size_t b = 0; b + run < h.size(); ++b) {
        bool flat_or_falling = true;
        for (std::size_t k = b; k < b + run; ++k) flat_or_falling = flat_or_falling && !rises(k, k + 1, 2.0);
        if (!flat_or_falling) continue;
        bool later_peak = false;
        for (std::size_t k = b + 1; k < h.size() && !later_peak; ++k) later_peak = rises(b, k, 3.0);
        if (!later_peak) return h[b].left;
    }
    std::size_t best = 0;
    for (std::size_t b = 1; b < h.size(); ++b)
        if (h[b].density > h[best].density) best = b;
    return h[best].left;
}

} // namespace mblotto
