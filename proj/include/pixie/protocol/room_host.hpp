// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/protocol/commands.hpp>
#include <pixie/protocol/envelope.hpp>
#include <pixie/world/room.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>

namespace pixie::protocol {

struct HostOptions {
    /// Commands applied per tick boundary; the rest wait for later ticks.
    std::size_t max_commands_per_tick = 64;
};

/// Owns a room and serializes every mutation through a FIFO command queue
/// drained at tick boundaries. Single-threaded: the caller provides locking
/// when several threads feed it. Callbacks run inside tick() and may enqueue
/// further commands; those are applied on a later tick.
class RoomHost {
public:
    using Sink = std::function<void(const Envelope&)>;
    using SubscriberId = std::uint64_t;

    explicit RoomHost(world::RoomInstance room, HostOptions options = {});

    SubscriberId add_subscriber(Sink sink, std::set<std::string> topics = default_topics());
    void set_topics(SubscriberId id, std::set<std::string> topics);
    void remove_subscriber(SubscriberId id);

    /// Queues a parsed command; `reply` receives the Response or Error frame
    /// with `request_id` echoed.
    void enqueue(std::string request_id, Command command, Sink reply);
    std::size_t queued() const noexcept { return queue_.size(); }

    /// Applies queued commands, advances the room one tick, then publishes
    /// the tick's events to subscribers in emission order.
    void tick();

    world::RoomInstance& room() noexcept { return room_; }
    const world::RoomInstance& room() const noexcept { return room_; }
    std::uint64_t last_seq() const noexcept { return seq_; }

private:
    struct Pending {
        std::string id;
        Command command;
        Sink reply;
    };
    struct Subscriber {
        Sink sink;
        std::set<std::string> topics;
    };

    world::RoomInstance room_;
    HostOptions options_;
    std::deque<Pending> queue_;
    std::map<SubscriberId, Subscriber> subscribers_;
    SubscriberId next_subscriber_ = 1;
    std::uint64_t seq_ = 0;
};

} // namespace pixie::protocol
