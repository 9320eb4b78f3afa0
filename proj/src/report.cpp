#include "gasketlab/report.hpp"

#include <cstdio>
#include <cstring>
#include <mutex>

namespace gasketlab {

namespace {
std::mutex g_mutex;
std::map<std::string, long long> g_coverage;
}  // namespace

void mark_op(const std::string& name) {
    std::lock_guard<std::mutex> lock(g_mutex);
    ++g_coverage[name];
}

std::map<std::string, long long> op_coverage() {
    std::lock_guard<std::mutex> lock(g_mutex);
    return g_coverage;
}

void reset_op_coverage() {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_coverage.clear();
}

namespace {

struct Sha1 {
    uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};

    static uint32_t rol(uint32_t x, int s) { return (x << s) | (x >> (32 - s)); }

    void block(const unsigned char* p) {
        uint32_t w[80];
        for (int i = 0; i < 16; ++i) {
            w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
                   (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
        }
        for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < 80; ++i) {
            uint32_t f, k;
            if (i < 20) {
                f = (b & c) | ((~b) & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            uint32_t t = rol(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = t;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
    }
};

}  // namespace

std::string sha1_hex(const std::string& data) {
    Sha1 s;
    uint64_t ml = data.size() * 8ull;
    std::string padded = data;
    padded.push_back(static_cast<char>(0x80));
    while (padded.size() % 64 != 56) padded.push_back('\0');
    for (int i = 7; i >= 0; --i) padded.push_back(static_cast<char>((ml >> (8 * i)) & 0xFF));
    for (std::size_t off = 0; off < padded.size(); off += 64) {
        s.block(reinterpret_cast<const unsigned char*>(padded.data() + off));
    }
    char out[41];
    std::snprintf(out, sizeof(out), "%08x%08x%08x%08x%08x", s.h[0], s.h[1], s.h[2], s.h[3],
                  s.h[4]);
    return out;
}

std::string format_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

}  // namespace gasketlab
