// SPDX-License-Identifier: Apache-2.0
#include <pixie/protocol/room_host.hpp>

#include <vector>

namespace pixie::protocol {

RoomHost::RoomHost(world::RoomInstance room, HostOptions options)
    : room_(std::move(room)), options_(options)
{
    if (options_.max_commands_per_tick == 0)
        options_.max_commands_per_tick = 1;
}

RoomHost::SubscriberId RoomHost::add_subscriber(Sink sink, std::set<std::string> topics)
{
    const SubscriberId id = next_subscriber_++;
    subscribers_.emplace(id, Subscriber{std::move(sink), std::move(topics)});
    return id;
}

void RoomHost::set_topics(SubscriberId id, std::set<std::string> topics)
{
    if (auto it = subscribers_.find(id); it != subscribers_.end())
        it->second.topics = std::move(topics);
}

void RoomHost::remove_subscriber(SubscriberId id)
{
    subscribers_.erase(id);
}

void RoomHost::enqueue(std::string request_id, Command command, Sink reply)
{
    queue_.push_back(Pending{std::move(request_id), std::move(command), std::move(reply)});
}

void RoomHost::tick()
{
    std::vector<Pending> batch;
    while (!queue_.empty() && batch.size() < options_.max_commands_per_tick) {
        batch.push_back(std::move(queue_.front()));
        queue_.pop_front();
    }
    for (auto& p : batch) {
        Envelope reply;
        try {
            reply = make_response(p.id, room_.clock_s(), apply_command(room_, p.command));
        } catch (const ProtocolError& e) {
            reply = make_error(p.id, room_.clock_s(), e.code(), e.what());
        }
        if (p.reply)
            p.reply(reply);
    }

    const auto events = room_.advance_tick();
    for (const auto& event : events) {
        const Envelope frame = event_envelope(event, ++seq_);
        // Sinks may subscribe or unsubscribe re-entrantly; iterate a snapshot.
        std::vector<Sink> targets;
        for (const auto& [id, sub] : subscribers_)
            if (sub.topics.count(frame.type))
                targets.push_back(sub.sink);
        for (const auto& sink : targets)
            sink(frame);
    }
}

} // namespace pixie::protocol
