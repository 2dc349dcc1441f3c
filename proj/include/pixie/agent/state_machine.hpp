// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pixie::agent {

enum class State { Suspend, Waiting, PlayerListening, Thinking, Playback, PerformingAction };

std::string_view to_string(State s) noexcept;
std::optional<State> state_from_string(std::string_view name) noexcept;
inline constexpr State kAllStates[] = {State::Suspend, State::Waiting, State::PlayerListening, State::Thinking,
    State::Playback, State::PerformingAction};

namespace action {
struct None {
    bool operator==(const None&) const = default;
};
struct Navigate {
    std::string nav_point_id;
    bool operator==(const Navigate&) const = default;
};
struct Emote {
    std::string name;
    bool operator==(const Emote&) const = default;
};
} // namespace action

using AgentAction = std::variant<action::None, action::Navigate, action::Emote>;

namespace input {
struct UserEntered {
    std::string user_id;
};
struct UserExited {
    std::string user_id;
};
struct UserMessageStart {
    std::string from;
};
struct UserMessageComplete {
    std::string from;
    std::string text;
};
// Turn-scoped inputs carry the exchange they belong to; a mismatch marks
// them stale.
struct DecisionReady {
    std::uint64_t turn = 0;
    std::string reply;
    AgentAction action;
};
struct PlaybackFinished {
    std::uint64_t turn = 0;
};
struct ActionFinished {
    std::uint64_t turn = 0;
    bool reached = true;
};
struct ThinkTimeout {
    std::uint64_t turn = 0;
};
} // namespace input

using AgentInput = std::variant<input::UserEntered, input::UserExited, input::UserMessageStart,
    input::UserMessageComplete, input::DecisionReady, input::PlaybackFinished, input::ActionFinished,
    input::ThinkTimeout>;

std::string_view input_name(const AgentInput& in) noexcept;

namespace effect {
struct SetStatusText {
    std::optional<std::string> text;
    bool operator==(const SetStatusText&) const = default;
};
struct SendChat {
    std::string text;
    bool operator==(const SendChat&) const = default;
};
struct InvokeBackend {
    std::uint64_t turn = 0;
    std::string from;
    std::string text;
    bool operator==(const InvokeBackend&) const = default;
};
struct SetDestination {
    std::string nav_point_id;
    bool operator==(const SetDestination&) const = default;
};
struct PlayEmote {
    std::string name;
    bool operator==(const PlayEmote&) const = default;
};
} // namespace effect

using Effect = std::variant<effect::SetStatusText, effect::SendChat, effect::InvokeBackend, effect::SetDestination,
    effect::PlayEmote>;

std::string_view effect_name(const Effect& e) noexcept;

struct TimingConfig {
    double chars_per_s = 15.0;
    double min_playback_s = 1.0;
    std::string please_speak = "(Please speak)";
    std::string thinking = "(Thinking)";
    std::string timeout_reply = "Sorry, I could not come up with an answer. Could you say that again?";
};

/// Seconds a reply occupies the Playback state.
double playback_duration(std::string_view text, const TimingConfig& cfg = {});

struct AgentState {
    State state = State::Suspend;
    double entered_s = 0.0;
    /// Exchange counter; bumped on every entry into Thinking.
    std::uint64_t turn = 0;
    int users_present = 0;
    std::string speaker;
    // Playback
    std::string reply;
    double playback_finish_s = 0.0;
    // Playback: action to perform afterwards. PerformingAction: its target.
    AgentAction pending_action;
    /// Complete user turns that arrived while the agent was busy.
    std::deque<input::UserMessageComplete> queued;
};

struct Transition {
    AgentState next;
    std::vector<Effect> effects;
};

/// Pure and total transition function.
Transition step(const AgentState& state, const AgentInput& in, double now_s, const TimingConfig& cfg = {});

} // namespace pixie::agent
