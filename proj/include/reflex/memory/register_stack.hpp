#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reflex/common.hpp"

namespace reflex::memory {

// N registers of exactly n bytes each, right-padded with 0x00.
class RegisterStack {
public:
    RegisterStack(std::size_t capacity, std::size_t width) : capacity_(capacity), width_(width) {
        if (capacity == 0 || width == 0) throw ConfigError("register stack needs capacity and width >= 1");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return regs_.size(); }
    bool empty() const { return regs_.empty(); }
    bool full() const { return regs_.size() == capacity_; }
    const std::vector<std::string>& registers() const { return regs_; }

    void push(const std::string& payload) {
        if (payload.size() > width_)
            throw PayloadTooWide("payload of " + std::to_string(payload.size()) + " bytes exceeds register width " +
                                 std::to_string(width_));
        if (full()) throw Overflow("register stack full (" + std::to_string(capacity_) + ")");
        std::string reg = payload;
        reg.resize(width_, '\0');
        regs_.push_back(std::move(reg));
    }

    std::string pop() {
        auto top = peek();
        regs_.pop_back();
        return top;
    }

    std::string peek() const {
        if (regs_.empty()) throw Underflow("register stack empty");
        return regs_.back();
    }

    bool operator==(const RegisterStack&) const = default;

private:
    std::size_t capacity_;
    std::size_t width_;
    std::vector<std::string> regs_;
};

struct Push {
    std::string payload;
};
struct Pop {};
struct Peek {};
struct Noop {};
using StackOp = std::variant<Push, Pop, Peek, Noop>;

// Applies one action to the stack; Pop/Peek return the register contents.
// Errors leave the stack unchanged.
inline std::optional<std::string> stack_exec(RegisterStack& stack, const StackOp& op) {
    struct Visitor {
        RegisterStack& s;
        std::optional<std::string> operator()(const Push& p) const {
            s.push(p.payload);
            return std::nullopt;
        }
        std::optional<std::string> operator()(const Pop&) const { return s.pop(); }
        std::optional<std::string> operator()(const Peek&) const { return s.peek(); }
        std::optional<std::string> operator()(const Noop&) const { return std::nullopt; }
    };
    return std::visit(Visitor{stack}, op);
}

}  // namespace reflex::memory
