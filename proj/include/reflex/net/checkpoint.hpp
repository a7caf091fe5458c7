#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/net/weights.hpp"

namespace reflex::net {

// Binary checkpoint:
//
//   "RFLX"  u32 version  u32 init_law
//   u32 j_max  u32 decoder_layers  u32 p  u32 c  u32 k_act  u32 emotion_count  u32 n_cells
//   u32 hidden[j_max]
//   u32 unit_count, then per unit every weight block in WeightStore order
//   u32 extra_count, then extra blocks (decision head etc.)
//
// A block is u32 rows, u32 cols, rows*cols IEEE-754 binary64 in row-major
// order. Every integer and double is little-endian.
struct Checkpoint {
    static constexpr char kMagic[4] = {'R', 'F', 'L', 'X'};
    static constexpr std::uint32_t kVersion = 1;

    NetworkTopology topology;
    std::uint32_t init_law = 0;
    std::vector<WeightStore> units;
    std::vector<Matrix> extra;
};

namespace detail {

class ByteWriter {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void f64(double d) {
        const auto bits = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
    void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
    template <typename M>
    void block(const M& m) {
        u32(static_cast<std::uint32_t>(m.rows()));
        u32(static_cast<std::uint32_t>(m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(const std::string& s) : s_(s) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }
    std::string raw(std::size_t n) {
        need(n);
        auto out = s_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    Matrix block() {
        const auto rows = u32();
        const auto cols = u32();
        const std::uint64_t count = std::uint64_t{rows} * cols;
        if (count * 8 > s_.size() - pos_) throw BadCheckpoint("block larger than remaining file");
        Matrix m(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = f64();
        return m;
    }
    bool done() const { return pos_ == s_.size(); }

private:
    void need(std::size_t n) const {
        if (s_.size() - pos_ < n) throw BadCheckpoint("truncated checkpoint");
    }
    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize(const Checkpoint& ck) {
    detail::ByteWriter w;
    w.raw(Checkpoint::kMagic, 4);
    w.u32(Checkpoint::kVersion);
    w.u32(ck.init_law);
    const auto& t = ck.topology;
    for (int v : {t.j_max, t.decoder_layers, t.p, t.c, t.k_act, t.emotion_count, t.n_cells})
        w.u32(static_cast<std::uint32_t>(v));
    for (int h : t.hidden) w.u32(static_cast<std::uint32_t>(h));
    w.u32(static_cast<std::uint32_t>(ck.units.size()));
    for (const auto& u : ck.units) u.for_each_block([&](const auto& m) { w.block(m); });
    w.u32(static_cast<std::uint32_t>(ck.extra.size()));
    for (const auto& m : ck.extra) w.block(m);
    return w.take();
}

inline Checkpoint deserialize(const std::string& bytes) {
    detail::ByteReader r(bytes);
    if (r.raw(4) != std::string(Checkpoint::kMagic, 4)) throw BadCheckpoint("bad magic (expected RFLX)");
    const auto version = r.u32();
    if (version != Checkpoint::kVersion)
        throw BadCheckpoint("unsupported checkpoint version " + std::to_string(version));
    Checkpoint ck;
    ck.init_law = r.u32();
    auto& t = ck.topology;
    t.j_max = static_cast<int>(r.u32());
    t.decoder_layers = static_cast<int>(r.u32());
    t.p = static_cast<int>(r.u32());
    t.c = static_cast<int>(r.u32());
    t.k_act = static_cast<int>(r.u32());
    t.emotion_count = static_cast<int>(r.u32());
    t.n_cells = static_cast<int>(r.u32());
    if (t.j_max < 1 || t.j_max > 4096) throw BadCheckpoint("implausible j_max");
    t.hidden.clear();
    for (int j = 0; j < t.j_max; ++j) t.hidden.push_back(static_cast<int>(r.u32()));
    try {
        t.validate();
    } catch (const ConfigError& e) {
        throw BadCheckpoint(std::string("invalid topology: ") + e.what());
    }
    const auto units = r.u32();
    if (units > 16) throw BadCheckpoint("implausible unit count");
    for (std::uint32_t u = 0; u < units; ++u) {
        auto ws = WeightStore::zeros(t);
        ws.for_each_block([&](auto& m) {
            Matrix b = r.block();
            if (b.rows() != m.rows() || b.cols() != m.cols()) throw BadCheckpoint("block shape disagrees with topology");
            m = b;
        });
        ck.units.push_back(std::move(ws));
    }
    const auto extra = r.u32();
    for (std::uint32_t i = 0; i < extra; ++i) ck.extra.push_back(r.block());
    if (!r.done()) throw BadCheckpoint("trailing bytes after checkpoint");
    return ck;
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UnreadablePath("cannot write checkpoint " + path);
    const auto bytes = serialize(ck);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw UnreadablePath("short write to " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw BadCheckpoint("cannot open checkpoint " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace reflex::net
