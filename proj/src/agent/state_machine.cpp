// SPDX-License-Identifier: Apache-2.0
#include <pixie/agent/state_machine.hpp>

#include <algorithm>

namespace pixie::agent {

std::string_view to_string(State s) noexcept
{
    switch (s) {
    case State::Suspend: return "Suspend";
    case State::Waiting: return "Waiting";
    case State::PlayerListening: return "PlayerListening";
    case State::Thinking: return "Thinking";
    case State::Playback: return "Playback";
    case State::PerformingAction: return "PerformingAction";
    }
    return "?";
}

std::optional<State> state_from_string(std::string_view name) noexcept
{
    for (State s : kAllStates)
        if (to_string(s) == name)
            return s;
    return std::nullopt;
}

std::string_view input_name(const AgentInput& in) noexcept
{
    static constexpr std::string_view names[] = {"UserEntered", "UserExited", "UserMessageStart",
        "UserMessageComplete", "DecisionReady", "PlaybackFinished", "ActionFinished", "ThinkTimeout"};
    return names[in.index()];
}

std::string_view effect_name(const Effect& e) noexcept
{
    static constexpr std::string_view names[] = {"SetStatusText", "SendChat", "InvokeBackend", "SetDestination",
        "PlayEmote"};
    return names[e.index()];
}

double playback_duration(std::string_view text, const TimingConfig& cfg)
{
    return std::max(cfg.min_playback_s, static_cast<double>(text.size()) / cfg.chars_per_s);
}

namespace {

struct Stepper {
    AgentState s;
    std::vector<Effect> fx;
    double now;
    const TimingConfig& cfg;

    void enter(State next)
    {
        s.state = next;
        s.entered_s = now;
    }

    void begin_thinking(const input::UserMessageComplete& msg)
    {
        ++s.turn;
        s.speaker = msg.from;
        enter(State::Thinking);
        fx.push_back(effect::SetStatusText{cfg.thinking});
        fx.push_back(effect::InvokeBackend{s.turn, msg.from, msg.text});
    }

    // Waiting is only observable when nothing is queued.
    void enter_waiting()
    {
        s.reply.clear();
        s.pending_action = action::None{};
        if (!s.queued.empty()) {
            auto msg = std::move(s.queued.front());
            s.queued.pop_front();
            begin_thinking(msg);
            return;
        }
        s.speaker.clear();
        enter(State::Waiting);
        fx.push_back(effect::SetStatusText{cfg.please_speak});
    }

    void begin_playback(std::string reply, AgentAction act)
    {
        enter(State::Playback);
        s.playback_finish_s = now + playback_duration(reply, cfg);
        s.pending_action = std::move(act);
        fx.push_back(effect::SetStatusText{std::nullopt});
        fx.push_back(effect::SendChat{reply});
        s.reply = std::move(reply);
    }

    void operator()(const input::UserEntered&)
    {
        ++s.users_present;
        if (s.state == State::Suspend)
            enter_waiting();
    }

    void operator()(const input::UserExited&)
    {
        s.users_present = std::max(0, s.users_present - 1);
        if (s.users_present == 0 && s.state != State::Suspend) {
            s.queued.clear();
            s.reply.clear();
            s.speaker.clear();
            s.pending_action = action::None{};
            enter(State::Suspend);
        }
    }

    void operator()(const input::UserMessageStart& in)
    {
        if (s.state == State::Waiting) {
            s.speaker = in.from;
            enter(State::PlayerListening);
        }
    }

    void operator()(const input::UserMessageComplete& in)
    {
        switch (s.state) {
        case State::Suspend:
            break;
        case State::Waiting:
        case State::PlayerListening:
            begin_thinking(in);
            break;
        case State::Thinking:
        case State::Playback:
        case State::PerformingAction:
            s.queued.push_back(in);
            break;
        }
    }

    void operator()(const input::DecisionReady& in)
    {
        if (s.state == State::Thinking && in.turn == s.turn)
            begin_playback(in.reply, in.action);
    }

    void operator()(const input::ThinkTimeout& in)
    {
        if (s.state == State::Thinking && in.turn == s.turn)
            begin_playback(cfg.timeout_reply, action::None{});
    }

    void operator()(const input::PlaybackFinished& in)
    {
        if (s.state != State::Playback || in.turn != s.turn)
            return;
        if (const auto* nav = std::get_if<action::Navigate>(&s.pending_action)) {
            const std::string target = nav->nav_point_id;
            s.reply.clear();
            enter(State::PerformingAction);
            fx.push_back(effect::SetDestination{target});
            return;
        }
        if (const auto* emote = std::get_if<action::Emote>(&s.pending_action))
            fx.push_back(effect::PlayEmote{emote->name});
        enter_waiting();
    }

    void operator()(const input::ActionFinished& in)
    {
        if (s.state == State::PerformingAction && in.turn == s.turn)
            enter_waiting();
    }
};

} // namespace

Transition step(const AgentState& state, const AgentInput& in, double now_s, const TimingConfig& cfg)
{
    Stepper st{state, {}, now_s, cfg};
    std::visit(st, in);
    return Transition{std::move(st.s), std::move(st.fx)};
}

} // namespace pixie::agent
