#pragma once

#include <cstdint>
#include <deque>
#include <string>

#include "reflex/common.hpp"

namespace reflex::deliberation {

// n-cell shift register: bytes enter at the tail, the head drops out when full.
class SystolicBuffer {
public:
    explicit SystolicBuffer(std::size_t cells) : cells_(cells) {
        if (cells == 0) throw ConfigError("systolic buffer needs at least one cell");
    }

    void shift_in(std::uint8_t byte) {
        if (data_.size() == cells_) data_.pop_front();
        data_.push_back(byte);
    }

    std::size_t cells() const { return cells_; }
    std::size_t fill() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    std::uint8_t head() const { return data_.front(); }
    std::uint8_t tail() const { return data_.back(); }
    std::string contents() const { return std::string(data_.begin(), data_.end()); }
    std::uint64_t digest() const { return fnv1a(contents()); }

private:
    std::size_t cells_;
    std::deque<std::uint8_t> data_;
};

inline SystolicBuffer shift_in(SystolicBuffer buf, std::uint8_t byte) {
    buf.shift_in(byte);
    return buf;
}

}  // namespace reflex::deliberation
