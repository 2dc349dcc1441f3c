// SPDX-License-Identifier: Apache-2.0
#include <pixie/protocol/driver_port.hpp>

namespace pixie::protocol {

DriverResponse to_driver_response(const Envelope& reply)
{
    DriverResponse r;
    r.t_s = reply.t_s;
    if (reply.type == kError) {
        r.ok = false;
        r.error_code = reply.payload.value("code", std::string("error"));
        r.error_message = reply.payload.value("message", std::string());
    } else {
        r.ok = true;
        r.payload = reply.payload;
    }
    return r;
}

LocalDriverPort::LocalDriverPort(RoomHost& host, std::set<std::string> topics)
    : host_(host)
{
    subscriber_ = host_.add_subscriber(
        [this](const Envelope& e) {
            if (handler_)
                handler_(e);
        },
        std::move(topics));
}

LocalDriverPort::~LocalDriverPort()
{
    host_.remove_subscriber(subscriber_);
}

void LocalDriverPort::send(std::string type, Json payload, ResponseHandler on_done)
{
    const std::string id = "local-" + std::to_string(next_id_++);
    if (type == "Subscribe") {
        DriverResponse r;
        try {
            const auto c = std::get<cmd::Subscribe>(parse_command(type, payload));
            host_.set_topics(subscriber_, topic_set(c.topics));
            r.ok = true;
            r.payload = Json{{"topics", c.topics}};
        } catch (const ProtocolError& e) {
            r.error_code = e.code();
            r.error_message = e.what();
        }
        r.t_s = host_.room().clock_s();
        if (on_done)
            on_done(r);
        return;
    }
    try {
        host_.enqueue(id, parse_command(type, payload), [on_done = std::move(on_done)](const Envelope& reply) {
            if (on_done)
                on_done(to_driver_response(reply));
        });
    } catch (const ProtocolError& e) {
        if (on_done)
            on_done(DriverResponse{false, Json::object(), e.code(), e.what(), host_.room().clock_s()});
    }
}

void LocalDriverPort::subscribe(std::vector<std::string> topics)
{
    host_.set_topics(subscriber_, topic_set(topics));
}

void LocalDriverPort::set_event_handler(EventHandler handler)
{
    handler_ = std::move(handler);
}

} // namespace pixie::protocol
