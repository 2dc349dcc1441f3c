// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/protocol/driver_port.hpp>
#include <pixie/protocol/envelope.hpp>

#include <chrono>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pixie::protocol {

class ConnectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VersionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The connection dropped and the single reconnect attempt failed.
class DriverLost : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RemoteError : public std::runtime_error {
public:
    RemoteError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code))
    {
    }

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct ClientOptions {
    int protocol_version = kProtocolVersion;
    std::chrono::milliseconds timeout{5000};
    bool reconnect = true;
    std::string client_name = "pixie-client";
};

/// WebSocket driver client. Network I/O runs on an internal thread; handlers
/// registered here are invoked from that thread.
class DriverClient {
public:
    /// Connects and performs the Hello/Welcome handshake.
    /// Throws ConnectError or VersionError.
    static std::unique_ptr<DriverClient> connect(std::string_view address, ClientOptions options = {});

    ~DriverClient();
    DriverClient(const DriverClient&) = delete;
    DriverClient& operator=(const DriverClient&) = delete;

    /// Blocking request. Returns the response payload.
    /// Throws RemoteError, TimeoutError or DriverLost.
    Json request(std::string type, Json payload = Json::object());

    /// Non-blocking request; `on_done` sees a failed response with code
    /// "timeout" or "disconnected" when no answer arrives.
    void request_async(std::string type, Json payload, ResponseHandler on_done);
    std::future<DriverResponse> request_future(std::string type, Json payload = Json::object());

    /// Replaces the topic filter; remembered for resubscription.
    void subscribe(std::vector<std::string> topics);

    /// Events go to the handler when one is set, otherwise to a queue read
    /// by next_event().
    void set_event_handler(EventHandler handler);
    std::optional<Envelope> next_event(std::chrono::milliseconds wait);

    /// Sends bytes verbatim. Replies that match no pending request are
    /// readable through next_unmatched().
    void send_raw(std::string frame);
    std::optional<Envelope> next_unmatched(std::chrono::milliseconds wait);

    void set_disconnect_handler(std::function<void()> handler);
    bool connected() const;
    const Json& welcome() const;
    void close();

private:
    struct Impl;
    explicit DriverClient(std::shared_ptr<Impl> impl);
    std::shared_ptr<Impl> impl_;
};

/// DriverPort over a remote connection.
class ClientDriverPort final : public DriverPort {
public:
    explicit ClientDriverPort(DriverClient& client) : client_(client) {}

    void send(std::string type, Json payload, ResponseHandler on_done) override;
    void subscribe(std::vector<std::string> topics) override;
    void set_event_handler(EventHandler handler) override;

private:
    DriverClient& client_;
};

} // namespace pixie::protocol
