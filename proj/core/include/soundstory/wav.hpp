#pragma once

#include <Eigen/Dense>
#include <string>

namespace soundstory {

// Stereo audio, channels x samples, float in [-1, 1].
struct AudioBuffer {
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> samples;
    int sample_rate_hz = 0;

    long num_samples() const { return samples.cols(); }
    int num_channels() const { return int(samples.rows()); }
    double duration_s() const {
        return sample_rate_hz > 0 ? double(num_samples()) / sample_rate_hz : 0.0;
    }
    static AudioBuffer silence(int sample_rate_hz, long num_samples) {
        AudioBuffer b;
        b.sample_rate_hz = sample_rate_hz;
        b.samples.setZero(2, num_samples);
        return b;
    }
    Eigen::VectorXf mono() const {
        return (samples.row(0) + samples.row(1)).transpose() * 0.5f;
    }
};

// RIFF/WAVE, IEEE float 32-bit little-endian.
void write_wav(const std::string& path, const AudioBuffer& buffer);
AudioBuffer read_wav(const std::string& path);

}  // namespace soundstory
