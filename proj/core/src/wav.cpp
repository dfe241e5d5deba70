#include "soundstory/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "soundstory/errors.hpp"

namespace soundstory {

namespace {

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
    v.push_back((x >> 16) & 0xff);
    v.push_back((x >> 24) & 0xff);
}
void put_u16(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
}
void put_tag(std::vector<uint8_t>& v, const char* tag) {
    v.insert(v.end(), tag, tag + 4);
}

uint32_t get_u32(const uint8_t* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
uint16_t get_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }

}  // namespace

void write_wav(const std::string& path, const AudioBuffer& buffer) {
    const int channels = buffer.num_channels();
    const long frames = buffer.num_samples();
    const uint32_t data_bytes = uint32_t(frames * channels * 4);

    std::vector<uint8_t> out;
    out.reserve(data_bytes + 58);
    put_tag(out, "RIFF");
    put_u32(out, 4 + 26 + 12 + 8 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 18);
    put_u16(out, 3);  // IEEE float
    put_u16(out, uint16_t(channels));
    put_u32(out, uint32_t(buffer.sample_rate_hz));
    put_u32(out, uint32_t(buffer.sample_rate_hz) * channels * 4);
    put_u16(out, uint16_t(channels * 4));
    put_u16(out, 32);
    put_u16(out, 0);  // cbSize
    put_tag(out, "fact");
    put_u32(out, 4);
    put_u32(out, uint32_t(frames));
    put_tag(out, "data");
    put_u32(out, data_bytes);

    for (long i = 0; i < frames; ++i) {
        for (int c = 0; c < channels; ++c) {
            float s = buffer.samples(c, i);
            uint32_t bits;
            std::memcpy(&bits, &s, 4);
            put_u32(out, bits);
        }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
    if (!f) throw IoError("short write: " + path);
}

AudioBuffer read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw IoError("not a RIFF/WAVE file: " + path);

    int channels = 0, sample_rate = 0, format = 0, bits = 0;
    size_t data_off = 0, data_len = 0;
    size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const char* tag = reinterpret_cast<const char*>(raw.data() + pos);
        const uint32_t len = get_u32(raw.data() + pos + 4);
        const size_t body = pos + 8;
        if (std::memcmp(tag, "fmt ", 4) == 0 && body + 16 <= raw.size()) {
            format = get_u16(raw.data() + body);
            channels = get_u16(raw.data() + body + 2);
            sample_rate = int(get_u32(raw.data() + body + 4));
            bits = get_u16(raw.data() + body + 14);
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data_off = body;
            data_len = std::min<size_t>(len, raw.size() - body);
        }
        pos = body + len + (len & 1);
    }
    if (format != 3 || bits != 32)
        throw IoError("unsupported WAV encoding (need 32-bit float): " + path);
    if (channels < 1 || channels > 2 || data_off == 0)
        throw IoError("unsupported channel layout: " + path);

    const long frames = long(data_len / (size_t(channels) * 4));
    AudioBuffer buf;
    buf.sample_rate_hz = sample_rate;
    buf.samples.setZero(2, frames);
    for (long i = 0; i < frames; ++i) {
        for (int c = 0; c < channels; ++c) {
            float s;
            std::memcpy(&s, raw.data() + data_off + (i * channels + c) * 4, 4);
            buf.samples(c, i) = s;
        }
        if (channels == 1) buf.samples(1, i) = buf.samples(0, i);
    }
    return buf;
}

}  // namespace soundstory
