// SPDX-License-Identifier: Apache-2.0
#include <pixie/protocol/server.hpp>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

namespace pixie::protocol {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

std::pair<std::string, unsigned short> parse_address(std::string_view address)
{
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == address.size())
        throw std::invalid_argument("address must look like host:port, got '" + std::string(address) + "'");
    const std::string port_str(address.substr(colon + 1));
    char* end = nullptr;
    const long port = std::strtol(port_str.c_str(), &end, 10);
    if (*end != '\0' || port < 0 || port > 65535)
        throw std::invalid_argument("bad port in address '" + std::string(address) + "'");
    return {std::string(address.substr(0, colon)), static_cast<unsigned short>(port)};
}

std::string default_address()
{
    if (const char* env = std::getenv("PIXIE_ADDR"); env && *env)
        return env;
    return "127.0.0.1:7411";
}

namespace detail {
struct Closable {
    virtual ~Closable() = default;
    virtual void shutdown() = 0;
};
} // namespace detail
using detail::Closable;

struct DriverServer::Impl {
    Impl(world::RoomInstance room, ServerOptions opts)
        : options(std::move(opts)), acceptor(ioc), host(std::move(room), options.host)
    {
    }

    ServerOptions options;
    net::io_context ioc;
    tcp::acceptor acceptor;
    std::mutex mu;
    RoomHost host;
    std::vector<std::thread> io_threads;
    std::thread tick_thread;
    std::atomic<bool> stopping{false};
    std::mutex stop_mu;
    std::condition_variable stop_cv;
    std::mutex sessions_mu;
    std::vector<std::weak_ptr<Closable>> sessions;

    void track(std::weak_ptr<Closable> session)
    {
        std::lock_guard lock(sessions_mu);
        std::erase_if(sessions, [](const auto& w) { return w.expired(); });
        sessions.push_back(std::move(session));
    }

    void do_accept();
    void tick_loop();
};

namespace {

std::string_view mime_type(const std::filesystem::path& p)
{
    const auto ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

class WsSession : public Closable, public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, DriverServer::Impl* server)
        : ws_(std::move(socket)), server_(server)
    {
    }

    void shutdown() override
    {
        net::post(ws_.get_executor(), [self = shared_from_this()] {
            beast::error_code ignored;
            beast::get_lowest_layer(self->ws_).socket().close(ignored);
        });
    }

    void run(http::request<http::string_body> req)
    {
        server_->track(weak_from_this());
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
    }

    void send(std::string frame)
    {
        net::post(ws_.get_executor(), [self = shared_from_this(), frame = std::move(frame)]() mutable {
            self->outbox_.push_back(std::move(frame));
            if (self->outbox_.size() == 1)
                self->do_write();
        });
    }

private:
    void on_accept(beast::error_code ec)
    {
        if (ec)
            return;
        std::weak_ptr<WsSession> weak = shared_from_this();
        {
            std::lock_guard lock(server_->mu);
            subscriber_ = server_->host.add_subscriber([weak](const Envelope& e) {
                if (auto self = weak.lock())
                    self->send(encode(e));
            });
        }
        do_read();
    }

    void do_read()
    {
        ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec) {
            std::lock_guard lock(server_->mu);
            server_->host.remove_subscriber(subscriber_);
            return;
        }
        std::string frame = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        handle_frame(frame);
        do_read();
    }

    double clock()
    {
        std::lock_guard lock(server_->mu);
        return server_->host.room().clock_s();
    }

    void handle_frame(const std::string& frame)
    {
        Envelope req;
        try {
            req = decode(frame);
        } catch (const DecodeError& e) {
            auto err = make_error("", clock(), "bad_frame", e.what());
            err.payload["offset"] = e.offset();
            send(encode(err));
            return;
        }
        if (req.v != kProtocolVersion) {
            send(encode(make_error(req.id, clock(), "version",
                "protocol version " + std::to_string(req.v) + " not supported; server speaks " +
                    std::to_string(kProtocolVersion))));
            return;
        }
        if (req.type == kHello) {
            const int wanted = req.payload.value("version", kProtocolVersion);
            if (wanted != kProtocolVersion) {
                send(encode(make_error(req.id, clock(), "version",
                    "protocol version " + std::to_string(wanted) + " not supported")));
                return;
            }
            std::lock_guard lock(server_->mu);
            Json welcome{{"version", kProtocolVersion}, {"room", server_->host.room().world().name},
                {"topics", default_topics()}};
            send(encode(Envelope{kProtocolVersion, req.id, server_->host.room().clock_s(), std::string(kWelcome),
                std::move(welcome), std::nullopt}));
            return;
        }
        Command command;
        try {
            command = parse_command(req.type, req.payload);
        } catch (const ProtocolError& e) {
            send(encode(make_error(req.id, clock(), e.code(), e.what())));
            return;
        }
        if (auto* sub = std::get_if<cmd::Subscribe>(&command)) {
            std::lock_guard lock(server_->mu);
            server_->host.set_topics(subscriber_, topic_set(sub->topics));
            send(encode(make_response(req.id, server_->host.room().clock_s(), Json{{"topics", sub->topics}})));
            return;
        }
        std::weak_ptr<WsSession> weak = shared_from_this();
        std::lock_guard lock(server_->mu);
        server_->host.enqueue(req.id, std::move(command), [weak](const Envelope& reply) {
            if (auto self = weak.lock())
                self->send(encode(reply));
        });
    }

    void do_write()
    {
        ws_.text(true);
        ws_.async_write(net::buffer(outbox_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t)
    {
        if (ec)
            return;
        outbox_.pop_front();
        if (!outbox_.empty())
            do_write();
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    DriverServer::Impl* server_;
    RoomHost::SubscriberId subscriber_ = 0;
};

class HttpSession : public Closable, public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, DriverServer::Impl* server)
        : stream_(std::move(socket)), server_(server)
    {
    }

    void run()
    {
        server_->track(weak_from_this());
        do_read();
    }

    void shutdown() override
    {
        net::post(stream_.get_executor(), [self = shared_from_this()] {
            beast::error_code ignored;
            self->stream_.socket().close(ignored);
        });
    }

private:
    using Response = http::response<http::string_body>;

    void do_read()
    {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec)
            return;
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), server_)->run(std::move(req_));
            return;
        }
        handle_request();
    }

    Response make(http::status status, std::string body, std::string_view content_type = "application/json")
    {
        Response res{status, req_.version()};
        res.set(http::field::server, "pixie-driver");
        res.set(http::field::content_type, std::string(content_type));
        res.set(http::field::access_control_allow_origin, "*");
        res.keep_alive(req_.keep_alive());
        res.body() = std::move(body);
        res.prepare_payload();
        return res;
    }

    static Json error_body(std::string_view code, std::string_view message)
    {
        return Json{{"code", std::string(code)}, {"message", std::string(message)}};
    }

    void handle_request()
    {
        const std::string target(req_.target());
        const auto qpos = target.find('?');
        const std::string path = target.substr(0, qpos);
        const std::string query = qpos == std::string::npos ? "" : target.substr(qpos + 1);

        if (req_.method() == http::verb::get && path == "/env") {
            const bool navmesh = query.find("navmesh=1") != std::string::npos;
            std::string body;
            {
                std::lock_guard lock(server_->mu);
                body = environment_snapshot(server_->host.room(), navmesh).dump();
            }
            return write(make(http::status::ok, std::move(body)));
        }
        if (req_.method() == http::verb::post && path == "/chat") {
            Command command;
            try {
                const Json body = Json::parse(req_.body());
                command = parse_command("SendChat", body);
            } catch (const Json::exception& e) {
                return write(make(http::status::bad_request, error_body("bad_frame", e.what()).dump()));
            } catch (const ProtocolError& e) {
                return write(make(http::status::bad_request, error_body(e.code(), e.what()).dump()));
            }
            auto self = shared_from_this();
            std::lock_guard lock(server_->mu);
            server_->host.enqueue("http", std::move(command), [self](const Envelope& reply) {
                net::post(self->stream_.get_executor(), [self, reply] {
                    if (reply.type == kError)
                        self->write(self->make(http::status::bad_request, reply.payload.dump()));
                    else
                        self->write(self->make(http::status::ok, Json{{"ok", true}, {"t_s", reply.t_s}}.dump()));
                });
            });
            return;
        }
        if (req_.method() == http::verb::get && server_->options.ui_dir) {
            std::string rel = path == "/" ? "index.html" : path.substr(1);
            if (rel.find("..") == std::string::npos) {
                const auto file = *server_->options.ui_dir / rel;
                std::ifstream in(file, std::ios::binary);
                if (in) {
                    std::ostringstream ss;
                    ss << in.rdbuf();
                    return write(make(http::status::ok, ss.str(), mime_type(file)));
                }
            }
        }
        write(make(http::status::not_found, error_body("not_found", path).dump()));
    }

    void write(Response res)
    {
        auto owned = std::make_shared<Response>(std::move(res));
        http::async_write(stream_, *owned, [self = shared_from_this(), owned](beast::error_code ec, std::size_t) {
            if (ec)
                return;
            if (owned->need_eof()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->do_read();
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    DriverServer::Impl* server_;
};

} // namespace

void DriverServer::Impl::do_accept()
{
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
        if (stopping)
            return;
        if (!ec)
            std::make_shared<HttpSession>(std::move(socket), this)->run();
        do_accept();
    });
}

void DriverServer::Impl::tick_loop()
{
    using clock = std::chrono::steady_clock;
    const double dt = host.room().tick_dt_s();
    const bool fast = options.time_scale <= 0;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(fast ? 0.0 : dt / options.time_scale));
    auto next = clock::now();
    while (!stopping) {
        {
            std::lock_guard lock(mu);
            host.tick();
        }
        if (fast) {
            std::this_thread::yield();
            continue;
        }
        next += period;
        std::unique_lock lock(stop_mu);
        stop_cv.wait_until(lock, next, [&] { return stopping.load(); });
    }
}

DriverServer::DriverServer(world::RoomInstance room, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(room), std::move(options)))
{
    beast::error_code ec;
    const auto address = net::ip::make_address(impl_->options.bind_host, ec);
    if (ec)
        throw BindError("bad bind address '" + impl_->options.bind_host + "': " + ec.message());
    const tcp::endpoint endpoint{address, impl_->options.port};
    impl_->acceptor.open(endpoint.protocol(), ec);
    if (!ec)
        impl_->acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec)
        impl_->acceptor.bind(endpoint, ec);
    if (!ec)
        impl_->acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec)
        throw BindError("cannot bind " + impl_->options.bind_host + ":" + std::to_string(impl_->options.port) + ": " +
            ec.message());

    impl_->do_accept();
    const int threads = std::max(1, impl_->options.io_threads);
    for (int i = 0; i < threads; ++i)
        impl_->io_threads.emplace_back([impl = impl_.get()] { impl->ioc.run(); });
    if (!impl_->options.manual_tick)
        impl_->tick_thread = std::thread([impl = impl_.get()] { impl->tick_loop(); });
}

DriverServer::~DriverServer()
{
    stop();
}

unsigned short DriverServer::port() const noexcept
{
    beast::error_code ec;
    const auto ep = impl_->acceptor.local_endpoint(ec);
    return ec ? impl_->options.port : ep.port();
}

std::string DriverServer::address() const
{
    return impl_->options.bind_host + ":" + std::to_string(port());
}

void DriverServer::step(int ticks)
{
    for (int i = 0; i < ticks; ++i) {
        std::lock_guard lock(impl_->mu);
        impl_->host.tick();
    }
}

void DriverServer::stop()
{
    if (impl_->stopping.exchange(true))
        return;
    {
        std::lock_guard lock(impl_->stop_mu);
    }
    impl_->stop_cv.notify_all();
    if (impl_->tick_thread.joinable())
        impl_->tick_thread.join();
    net::post(impl_->ioc, [impl = impl_.get()] {
        beast::error_code ignored;
        impl->acceptor.close(ignored);
    });
    {
        std::lock_guard lock(impl_->sessions_mu);
        for (auto& weak : impl_->sessions)
            if (auto session = weak.lock())
                session->shutdown();
    }
    // io threads return once every session has unwound.
    for (auto& t : impl_->io_threads)
        if (t.joinable())
            t.join();
}

std::mutex& DriverServer::mutex()
{
    return impl_->mu;
}

RoomHost& DriverServer::host()
{
    return impl_->host;
}

} // namespace pixie::protocol
