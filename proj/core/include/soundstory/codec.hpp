#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "soundstory/wav.hpp"

namespace soundstory::codec {

using MatF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CodecConfig {
    int sample_rate_hz = 8000;
    double latent_rate_hz = 40.0;
    int channel_dim = 16;  // kept DCT coefficients per audio channel

    int hop() const;                                   // samples per latent frame
    int latent_dim() const { return 2 * channel_dim; }  // stereo stacked
};

// Continuous latent frames; D = 2 * channel_dim (stereo channels stacked
// along the feature axis).
struct LatentSpan {
    MatF frames;  // F x D
    double latent_rate_hz = 0.0;
    int channel_dim = 0;

    int num_frames() const { return int(frames.rows()); }
    int dim() const { return int(frames.cols()); }
};

struct LatentStats {
    Eigen::VectorXf mean;
    Eigen::VectorXf std;  // floored at 1e-6
};

// Fixed orthonormal analysis: per channel, non-overlapping hop-sized frames
// projected onto the first channel_dim DCT-II basis vectors.
class Codec {
public:
    explicit Codec(const CodecConfig& config);

    const CodecConfig& config() const { return config_; }

    LatentSpan encode(const AudioBuffer& buffer) const;
    AudioBuffer decode(const LatentSpan& span) const;

private:
    CodecConfig config_;
    MatF basis_;  // channel_dim x hop
};

LatentStats fit_stats(const std::vector<LatentSpan>& corpus);
LatentSpan standardize(const LatentSpan& span, const LatentStats& stats);
LatentSpan destandardize(const LatentSpan& span, const LatentStats& stats);

// Latent cache file: magic "ACLT", u32 version=1, u32 F, u32 D, then F*D
// float32 little-endian row-major.
void save_latents(const std::string& path, const LatentSpan& span);
LatentSpan load_latents(const std::string& path, const CodecConfig& config);

std::string stats_to_json(const LatentStats& stats);
LatentStats stats_from_json(const std::string& raw);

}  // namespace soundstory::codec
