// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/protocol/envelope.hpp>
#include <pixie/protocol/room_host.hpp>

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace pixie::protocol {

struct DriverResponse {
    bool ok = false;
    Json payload = Json::object();
    std::string error_code;
    std::string error_message;
    double t_s = 0.0;
};

using ResponseHandler = std::function<void(const DriverResponse&)>;
using EventHandler = std::function<void(const Envelope&)>;

/// What an agent (or scripted user) needs from the world: asynchronous
/// commands answered at tick boundaries, plus an ordered event stream.
/// Implementations exist for an in-process RoomHost and for a remote
/// DriverClient, so the agent never sees which platform it runs on.
class DriverPort {
public:
    virtual ~DriverPort() = default;

    virtual void send(std::string type, Json payload, ResponseHandler on_done) = 0;
    virtual void subscribe(std::vector<std::string> topics) = 0;
    virtual void set_event_handler(EventHandler handler) = 0;
};

/// Lock-step port onto a RoomHost living in the same thread. Responses and
/// events are delivered from inside RoomHost::tick().
class LocalDriverPort final : public DriverPort {
public:
    explicit LocalDriverPort(RoomHost& host, std::set<std::string> topics = default_topics());
    ~LocalDriverPort() override;

    LocalDriverPort(const LocalDriverPort&) = delete;
    LocalDriverPort& operator=(const LocalDriverPort&) = delete;

    void send(std::string type, Json payload, ResponseHandler on_done) override;
    void subscribe(std::vector<std::string> topics) override;
    void set_event_handler(EventHandler handler) override;

private:
    RoomHost& host_;
    RoomHost::SubscriberId subscriber_;
    EventHandler handler_;
    std::uint64_t next_id_ = 1;
};

DriverResponse to_driver_response(const Envelope& reply);

} // namespace pixie::protocol
