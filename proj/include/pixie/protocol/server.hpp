// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/protocol/room_host.hpp>
#include <pixie/world/room.hpp>

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pixie::protocol {

class BindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ServerOptions {
    std::string bind_host = "127.0.0.1";
    unsigned short port = 7411; // 0 picks an ephemeral port
    /// Simulated seconds per wall second; <= 0 ticks as fast as possible.
    double time_scale = 1.0;
    /// When set, no tick thread runs and the owner calls step().
    bool manual_tick = false;
    int io_threads = 2;
    /// Static files served for GET requests other than /env.
    std::optional<std::filesystem::path> ui_dir;
    HostOptions host;
};

/// "host:port" split. Throws std::invalid_argument.
std::pair<std::string, unsigned short> parse_address(std::string_view address);

/// $PIXIE_ADDR, or 127.0.0.1:7411.
std::string default_address();

/// Driver server: one port carrying the WebSocket driver channel plus a
/// plain HTTP shim (GET /env, POST /chat). Every room mutation goes through
/// the RoomHost queue and lands on a tick boundary.
class DriverServer {
public:
    /// Binds and starts serving. Throws BindError.
    DriverServer(world::RoomInstance room, ServerOptions options = {});
    ~DriverServer();

    DriverServer(const DriverServer&) = delete;
    DriverServer& operator=(const DriverServer&) = delete;

    unsigned short port() const noexcept;
    std::string address() const;

    /// Manual-tick mode: apply `ticks` ticks synchronously.
    void step(int ticks = 1);

    void stop();

    /// Runs `fn(RoomHost&)` under the room lock.
    template <typename F>
    decltype(auto) with_host(F&& fn)
    {
        std::lock_guard lock(mutex());
        return std::forward<F>(fn)(host());
    }

    struct Impl;

private:
    std::mutex& mutex();
    RoomHost& host();

    std::unique_ptr<Impl> impl_;
};

} // namespace pixie::protocol
