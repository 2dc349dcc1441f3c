// SPDX-License-Identifier: Apache-2.0
// Hand-written expected outcome for every (state, input) pair of the agent
// dialog machine, plus a canonical state to apply each input to.
#pragma once

#include <pixie/agent/state_machine.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pixie::testing {

/// A representative state: one user present, turn 3, and whatever the
/// state needs to be meaningful (speaker, reply, a pending navigation).
inline agent::AgentState canonical(agent::State s)
{
    using agent::State;
    agent::AgentState a;
    a.state = s;
    if (s == State::Suspend)
        return a;
    a.users_present = 1;
    a.turn = 3;
    if (s == State::PlayerListening || s == State::Thinking)
        a.speaker = "u1";
    if (s == State::Playback) {
        a.reply = "hi";
        a.playback_finish_s = 5.0;
        a.pending_action = agent::action::Navigate{"p2"};
    }
    if (s == State::PerformingAction)
        a.pending_action = agent::action::Navigate{"p2"};
    return a;
}

/// One input of each kind, with turn ids matching canonical().
inline std::vector<std::pair<std::string, agent::AgentInput>> table_inputs()
{
    namespace in = agent::input;
    return {
        {"UserEntered", in::UserEntered{"u2"}},
        {"UserExited", in::UserExited{"u1"}},
        {"UserMessageStart", in::UserMessageStart{"u1"}},
        {"UserMessageComplete", in::UserMessageComplete{"u1", "hello"}},
        {"DecisionReady", in::DecisionReady{3, "a reply", agent::action::Navigate{"p2"}}},
        {"PlaybackFinished", in::PlaybackFinished{3}},
        {"ActionFinished", in::ActionFinished{3, true}},
        {"ThinkTimeout", in::ThinkTimeout{3}},
    };
}

struct TableRow {
    agent::State next;
    std::vector<std::string> effects;
};

inline std::map<agent::State, std::map<std::string, TableRow>> transition_table()
{
    using S = agent::State;
    const std::vector<std::string> none;
    const std::vector<std::string> status = {"SetStatusText"};
    const std::vector<std::string> think = {"SetStatusText", "InvokeBackend"};
    const std::vector<std::string> speak = {"SetStatusText", "SendChat"};
    return {
        {S::Suspend,
            {{"UserEntered", {S::Waiting, status}}, {"UserExited", {S::Suspend, none}},
                {"UserMessageStart", {S::Suspend, none}}, {"UserMessageComplete", {S::Suspend, none}},
                {"DecisionReady", {S::Suspend, none}}, {"PlaybackFinished", {S::Suspend, none}},
                {"ActionFinished", {S::Suspend, none}}, {"ThinkTimeout", {S::Suspend, none}}}},
        {S::Waiting,
            {{"UserEntered", {S::Waiting, none}}, {"UserExited", {S::Suspend, none}},
                {"UserMessageStart", {S::PlayerListening, none}}, {"UserMessageComplete", {S::Thinking, think}},
                {"DecisionReady", {S::Waiting, none}}, {"PlaybackFinished", {S::Waiting, none}},
                {"ActionFinished", {S::Waiting, none}}, {"ThinkTimeout", {S::Waiting, none}}}},
        {S::PlayerListening,
            {{"UserEntered", {S::PlayerListening, none}}, {"UserExited", {S::Suspend, none}},
                {"UserMessageStart", {S::PlayerListening, none}},
                {"UserMessageComplete", {S::Thinking, think}}, {"DecisionReady", {S::PlayerListening, none}},
                {"PlaybackFinished", {S::PlayerListening, none}}, {"ActionFinished", {S::PlayerListening, none}},
                {"ThinkTimeout", {S::PlayerListening, none}}}},
        {S::Thinking,
            {{"UserEntered", {S::Thinking, none}}, {"UserExited", {S::Suspend, none}},
                {"UserMessageStart", {S::Thinking, none}}, {"UserMessageComplete", {S::Thinking, none}},
                {"DecisionReady", {S::Playback, speak}}, {"PlaybackFinished", {S::Thinking, none}},
                {"ActionFinished", {S::Thinking, none}}, {"ThinkTimeout", {S::Playback, speak}}}},
        {S::Playback,
            {{"UserEntered", {S::Playback, none}}, {"UserExited", {S::Suspend, none}},
                {"UserMessageStart", {S::Playback, none}}, {"UserMessageComplete", {S::Playback, none}},
                {"DecisionReady", {S::Playback, none}},
                {"PlaybackFinished", {S::PerformingAction, {"SetDestination"}}},
                {"ActionFinished", {S::Playback, none}}, {"ThinkTimeout", {S::Playback, none}}}},
        {S::PerformingAction,
            {{"UserEntered", {S::PerformingAction, none}}, {"UserExited", {S::Suspend, none}},
                {"UserMessageStart", {S::PerformingAction, none}},
                {"UserMessageComplete", {S::PerformingAction, none}},
                {"DecisionReady", {S::PerformingAction, none}}, {"PlaybackFinished", {S::PerformingAction, none}},
                {"ActionFinished", {S::Waiting, status}}, {"ThinkTimeout", {S::PerformingAction, none}}}},
    };
}

} // namespace pixie::testing
