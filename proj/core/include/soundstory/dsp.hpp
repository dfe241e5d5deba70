#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace soundstory::dsp {

using MatF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VecF = Eigen::VectorXf;

// Log-spaced band edges, B bands between f_lo and f_hi.
inline std::vector<double> log_band_edges(int bands, double f_lo, double f_hi) {
    std::vector<double> edges(bands + 1);
    const double r = std::log(f_hi / f_lo);
    for (int b = 0; b <= bands; ++b) edges[b] = f_lo * std::exp(r * double(b) / bands);
    return edges;
}

// Short-time band-energy analysis: Hann-windowed DFT at the bins covering
// [f_lo, f_hi], pooled into log-spaced bands. Frames advance by hop_s; the
// window may extend past the signal end (zero padded).
class BandAnalyzer {
public:
    BandAnalyzer(int sample_rate_hz, int bands, double f_lo, double f_hi,
                 double win_s = 0.5, double hop_s = 0.1)
        : sample_rate_(sample_rate_hz),
          bands_(bands),
          win_(int(std::lround(win_s * sample_rate_hz))),
          hop_(int(std::lround(hop_s * sample_rate_hz))) {
        const auto edges = log_band_edges(bands, f_lo, f_hi);
        const double df = double(sample_rate_) / win_;
        const int k_lo = std::max(1, int(std::ceil(f_lo / df)));
        const int k_hi = std::min(win_ / 2, int(std::floor(f_hi / df)));
        const int n_bins = std::max(0, k_hi - k_lo + 1);
        bin_band_.resize(n_bins);
        basis_.resize(2 * n_bins, win_);
        for (int i = 0; i < n_bins; ++i) {
            const int k = k_lo + i;
            const double f = k * df;
            int band = bands_ - 1;
            for (int b = 0; b < bands_; ++b)
                if (f >= edges[b] && f < edges[b + 1]) { band = b; break; }
            bin_band_[i] = band;
            for (int n = 0; n < win_; ++n) {
                const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * (n + 0.5) / win_);
                const double ph = 2.0 * M_PI * f * (n + 0.5) / sample_rate_;
                basis_(2 * i, n) = float(w * std::cos(ph));
                basis_(2 * i + 1, n) = float(w * std::sin(ph));
            }
        }
    }

    int num_frames(long num_samples) const {
        if (num_samples <= 0) return 0;
        return int((num_samples - 1) / hop_) + 1;
    }
    int bands() const { return bands_; }
    double frame_rate_hz() const { return double(sample_rate_) / hop_; }
    int hop_samples() const { return hop_; }
    int window_samples() const { return win_; }

    // mono signal -> (frames x bands) linear band energies
    MatF analyze(const VecF& mono) const {
        const int frames = num_frames(mono.size());
        MatF framed = MatF::Zero(frames, win_);
        for (int f = 0; f < frames; ++f) {
            const long start = long(f) * hop_;
            const long n = std::min<long>(win_, mono.size() - start);
            framed.row(f).head(n) = mono.segment(start, n).transpose();
        }
        MatF proj(frames, basis_.rows());
        proj.noalias() = framed * basis_.transpose();
        MatF energies = MatF::Zero(frames, bands_);
        for (int i = 0; i < int(bin_band_.size()); ++i) {
            energies.col(bin_band_[i]) += proj.col(2 * i).array().square().matrix() +
                                          proj.col(2 * i + 1).array().square().matrix();
        }
        return energies;
    }

private:
    int sample_rate_;
    int bands_;
    int win_;
    int hop_;
    std::vector<int> bin_band_;
    MatF basis_;  // interleaved cos/sin rows per selected bin
};

// Mean-centered dB profile of one band-energy row. Silent frames (all bands
// at the floor) come out as the zero vector.
inline VecF centered_db_profile(const VecF& energies, float floor_db = -100.0f) {
    VecF db(energies.size());
    for (int b = 0; b < energies.size(); ++b) {
        const float e = std::max(energies[b], 0.0f);
        db[b] = std::max(10.0f * std::log10(e + 1e-12f), floor_db);
    }
    const float mean = db.mean();
    for (int b = 0; b < db.size(); ++b) db[b] -= mean;
    return db;
}

inline float cosine_similarity(const VecF& a, const VecF& b) {
    const float na = a.norm(), nb = b.norm();
    if (na < 1e-12f || nb < 1e-12f) return 0.0f;
    return a.dot(b) / (na * nb);
}

}  // namespace soundstory::dsp
