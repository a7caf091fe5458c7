#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "reflex/memory/corpus_cursor.hpp"
#include "reflex/memory/register_stack.hpp"

namespace reflex::harness {

// Fixed action wiring: 0..3 stack ops, 4..10 cursor moves.
inline constexpr int kStackActions = 4;
inline constexpr int kCursorActions = 7;
inline constexpr int kActionCount = kStackActions + kCursorActions;

struct ActionOutcome {
    int index = 0;
    std::optional<std::string> register_out;  // Pop / Peek result
    std::optional<std::uint8_t> byte;          // Read result
    bool blocked = false;                      // clipped move or stack error
};

// Executes the network's chosen action against its memory and corpus view.
// Push stores the most recent `width` perceived bytes. Stack errors are not
// fatal here: they come back as a blocked outcome the agent can perceive.
class ActionDispatcher {
public:
    ActionDispatcher(memory::RegisterStack stack, std::optional<memory::CorpusCursor> cursor)
        : stack_(std::move(stack)), cursor_(std::move(cursor)) {}

    void perceive(std::uint8_t b) {
        recent_ += static_cast<char>(b);
        if (recent_.size() > stack_.width()) recent_.erase(0, recent_.size() - stack_.width());
    }

    ActionOutcome dispatch(int index) {
        if (index < 0 || index >= kActionCount) throw IndexError("action index " + std::to_string(index) + " out of range");
        ActionOutcome out;
        out.index = index;
        if (index < kStackActions) {
            static const memory::StackOp ops[] = {memory::Push{}, memory::Pop{}, memory::Peek{}, memory::Noop{}};
            memory::StackOp op = ops[index];
            if (auto* p = std::get_if<memory::Push>(&op)) p->payload = recent_;
            try {
                out.register_out = memory::stack_exec(stack_, op);
            } catch (const Overflow&) {
                out.blocked = true;
            } catch (const Underflow&) {
                out.blocked = true;
            }
            return out;
        }
        if (!cursor_) {
            out.blocked = true;
            return out;
        }
        const auto a = static_cast<memory::CursorAction>(index - kStackActions);
        out.byte = cursor_->exec(a);
        out.blocked = a != memory::CursorAction::Read && cursor_->boundary_flag();
        return out;
    }

    const memory::RegisterStack& stack() const { return stack_; }
    const std::optional<memory::CorpusCursor>& cursor() const { return cursor_; }

private:
    memory::RegisterStack stack_;
    std::optional<memory::CorpusCursor> cursor_;
    std::string recent_;
};

}  // namespace reflex::harness
