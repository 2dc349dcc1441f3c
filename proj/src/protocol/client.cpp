// SPDX-License-Identifier: Apache-2.0
#include <pixie/protocol/client.hpp>
#include <pixie/protocol/server.hpp>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

namespace pixie::protocol {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

bool is_reply_type(const std::string& type)
{
    return type == kResponse || type == kError || type == kWelcome;
}

DriverResponse failure(std::string code, std::string message)
{
    DriverResponse r;
    r.error_code = std::move(code);
    r.error_message = std::move(message);
    return r;
}

} // namespace

struct DriverClient::Impl : std::enable_shared_from_this<DriverClient::Impl> {
    using Stream = websocket::stream<beast::tcp_stream>;

    struct Pending {
        ResponseHandler on_done;
        std::shared_ptr<net::steady_timer> timer;
    };

    std::string host;
    unsigned short port = 0;
    ClientOptions options;

    net::io_context ioc;
    std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
    std::thread io_thread;

    // io-thread state
    std::shared_ptr<Stream> ws;
    std::uint64_t generation = 0;
    beast::flat_buffer buffer;
    std::deque<std::string> outbox;

    mutable std::mutex mu;
    std::condition_variable cv;
    std::map<std::string, Pending> pending;
    std::uint64_t next_id = 1;
    EventHandler on_event;
    std::deque<Envelope> events;
    std::deque<Envelope> unmatched;
    std::optional<std::vector<std::string>> topics;
    std::function<void()> on_disconnect;
    Json welcome = Json::object();

    std::atomic<bool> closing{false};
    std::atomic<bool> lost{false};
    std::atomic<bool> is_connected{false};

    std::string fresh_id()
    {
        std::lock_guard lock(mu);
        return "c" + std::to_string(next_id++);
    }

    /// Blocking connect plus handshake; frames arriving before the Welcome
    /// are dispatched normally.
    void open()
    {
        auto stream = std::make_shared<Stream>(ioc);
        beast::error_code ec;
        tcp::resolver resolver(ioc);
        const auto results = resolver.resolve(host, std::to_string(port), ec);
        if (ec)
            throw ConnectError("cannot resolve " + host + ": " + ec.message());
        beast::get_lowest_layer(*stream).connect(results, ec);
        if (ec)
            throw ConnectError("cannot connect to " + host + ":" + std::to_string(port) + ": " + ec.message());
        stream->handshake(host + ":" + std::to_string(port), "/", ec);
        if (ec)
            throw ConnectError("websocket handshake failed: " + ec.message());

        const std::string hello_id = fresh_id();
        Envelope hello{options.protocol_version, hello_id, 0.0, std::string(kHello),
            Json{{"version", options.protocol_version}, {"client", options.client_name}}, std::nullopt};
        stream->text(true);
        stream->write(net::buffer(encode(hello)), ec);
        if (ec)
            throw ConnectError("hello failed: " + ec.message());

        for (;;) {
            beast::flat_buffer buf;
            stream->read(buf, ec);
            if (ec)
                throw ConnectError("connection closed during handshake: " + ec.message());
            Envelope frame;
            try {
                frame = decode(beast::buffers_to_string(buf.data()));
            } catch (const DecodeError&) {
                continue;
            }
            if (frame.id == hello_id) {
                if (frame.type == kWelcome) {
                    std::lock_guard lock(mu);
                    welcome = frame.payload;
                    break;
                }
                const auto code = frame.payload.value("code", std::string());
                const auto message = frame.payload.value("message", std::string());
                if (code == "version")
                    throw VersionError(message);
                throw ConnectError("handshake rejected: " + code + ": " + message);
            }
            dispatch(std::move(frame));
        }
        ws = std::move(stream);
        ++generation;
        outbox.clear();
        buffer.clear();
        is_connected = true;
    }

    void start()
    {
        work.emplace(net::make_work_guard(ioc));
        io_thread = std::thread([self = shared_from_this()] { self->ioc.run(); });
        net::post(ioc, [self = shared_from_this()] { self->do_read(); });
    }

    void do_read()
    {
        const auto gen = generation;
        ws->async_read(buffer, [self = shared_from_this(), gen, stream = ws](beast::error_code ec, std::size_t) {
            if (gen != self->generation)
                return;
            if (ec) {
                self->on_dropped();
                return;
            }
            std::string text = beast::buffers_to_string(self->buffer.data());
            self->buffer.consume(self->buffer.size());
            try {
                self->dispatch(decode(text));
            } catch (const DecodeError&) {
            }
            self->do_read();
        });
    }

    void write(std::string frame)
    {
        net::post(ioc, [self = shared_from_this(), frame = std::move(frame)]() mutable {
            if (!self->ws || !self->is_connected)
                return;
            self->outbox.push_back(std::move(frame));
            if (self->outbox.size() == 1)
                self->do_write();
        });
    }

    void do_write()
    {
        const auto gen = generation;
        ws->text(true);
        ws->async_write(net::buffer(outbox.front()),
            [self = shared_from_this(), gen, stream = ws](beast::error_code ec, std::size_t) {
                if (gen != self->generation || ec)
                    return;
                self->outbox.pop_front();
                if (!self->outbox.empty())
                    self->do_write();
            });
    }

    void dispatch(Envelope frame)
    {
        if (is_reply_type(frame.type)) {
            ResponseHandler handler;
            {
                std::lock_guard lock(mu);
                auto it = pending.find(frame.id);
                if (it == pending.end()) {
                    unmatched.push_back(std::move(frame));
                    cv.notify_all();
                    return;
                }
                handler = std::move(it->second.on_done);
                if (it->second.timer)
                    it->second.timer->cancel();
                pending.erase(it);
            }
            if (handler)
                handler(to_driver_response(frame));
            return;
        }
        EventHandler handler;
        {
            std::lock_guard lock(mu);
            if (!on_event) {
                events.push_back(std::move(frame));
                cv.notify_all();
                return;
            }
            handler = on_event;
        }
        handler(frame);
    }

    void fail_pending(const std::string& code, const std::string& message)
    {
        std::map<std::string, Pending> drained;
        {
            std::lock_guard lock(mu);
            drained.swap(pending);
        }
        for (auto& [id, p] : drained) {
            if (p.timer)
                p.timer->cancel();
            if (p.on_done)
                p.on_done(failure(code, message));
        }
    }

    void on_dropped()
    {
        is_connected = false;
        ++generation;
        outbox.clear();
        fail_pending("disconnected", "connection to driver dropped");
        if (closing)
            return;
        if (options.reconnect) {
            try {
                open();
                std::optional<std::vector<std::string>> resub;
                {
                    std::lock_guard lock(mu);
                    resub = topics;
                }
                if (resub)
                    write(encode(Envelope{kProtocolVersion, fresh_id(), 0.0, "Subscribe", Json{{"topics", *resub}},
                        std::nullopt}));
                do_read();
                return;
            } catch (const std::exception&) {
            }
        }
        lost = true;
        std::function<void()> handler;
        {
            std::lock_guard lock(mu);
            handler = on_disconnect;
        }
        if (handler)
            handler();
    }

    void request_async(std::string type, Json payload, ResponseHandler on_done)
    {
        if (lost || closing) {
            if (on_done)
                on_done(failure("disconnected", "driver connection lost"));
            return;
        }
        const std::string id = fresh_id();
        net::post(ioc, [self = shared_from_this(), id, type = std::move(type), payload = std::move(payload),
                           on_done = std::move(on_done)]() mutable {
            if (!self->is_connected) {
                if (on_done)
                    on_done(failure("disconnected", "driver connection lost"));
                return;
            }
            auto timer = std::make_shared<net::steady_timer>(self->ioc, self->options.timeout);
            {
                std::lock_guard lock(self->mu);
                self->pending.emplace(id, Pending{std::move(on_done), timer});
            }
            timer->async_wait([weak = std::weak_ptr<Impl>(self), id](beast::error_code ec) {
                auto self = weak.lock();
                if (ec || !self)
                    return;
                ResponseHandler handler;
                {
                    std::lock_guard lock(self->mu);
                    auto it = self->pending.find(id);
                    if (it == self->pending.end())
                        return;
                    handler = std::move(it->second.on_done);
                    self->pending.erase(it);
                }
                if (handler)
                    handler(failure("timeout", "no response within timeout"));
            });
            self->write(encode(Envelope{kProtocolVersion, id, 0.0, std::move(type), std::move(payload), std::nullopt}));
        });
    }

    void shutdown()
    {
        if (closing.exchange(true))
            return;
        net::post(ioc, [self = shared_from_this()] {
            ++self->generation;
            if (self->ws) {
                beast::error_code ignored;
                beast::get_lowest_layer(*self->ws).socket().shutdown(tcp::socket::shutdown_both, ignored);
                beast::get_lowest_layer(*self->ws).socket().close(ignored);
            }
            self->is_connected = false;
            self->fail_pending("disconnected", "client closed");
            self->work.reset();
            self->ioc.stop();
        });
        if (io_thread.joinable()) {
            if (io_thread.get_id() == std::this_thread::get_id())
                io_thread.detach();
            else
                io_thread.join();
        }
    }
};

std::unique_ptr<DriverClient> DriverClient::connect(std::string_view address, ClientOptions options)
{
    auto impl = std::make_shared<Impl>();
    try {
        std::tie(impl->host, impl->port) = parse_address(address);
    } catch (const std::invalid_argument& e) {
        throw ConnectError(e.what());
    }
    impl->options = std::move(options);
    impl->open();
    impl->start();
    return std::unique_ptr<DriverClient>(new DriverClient(std::move(impl)));
}

DriverClient::DriverClient(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

DriverClient::~DriverClient()
{
    close();
}

void DriverClient::close()
{
    impl_->shutdown();
}

Json DriverClient::request(std::string type, Json payload)
{
    auto fut = request_future(std::move(type), std::move(payload));
    if (fut.wait_for(impl_->options.timeout + std::chrono::seconds(1)) != std::future_status::ready)
        throw TimeoutError("no response within timeout");
    const DriverResponse r = fut.get();
    if (r.ok)
        return r.payload;
    if (r.error_code == "timeout")
        throw TimeoutError(r.error_message);
    if (r.error_code == "disconnected")
        throw DriverLost(r.error_message);
    throw RemoteError(r.error_code, r.error_message);
}

void DriverClient::request_async(std::string type, Json payload, ResponseHandler on_done)
{
    impl_->request_async(std::move(type), std::move(payload), std::move(on_done));
}

std::future<DriverResponse> DriverClient::request_future(std::string type, Json payload)
{
    auto promise = std::make_shared<std::promise<DriverResponse>>();
    auto fut = promise->get_future();
    impl_->request_async(std::move(type), std::move(payload),
        [promise](const DriverResponse& r) { promise->set_value(r); });
    return fut;
}

void DriverClient::subscribe(std::vector<std::string> topics)
{
    {
        std::lock_guard lock(impl_->mu);
        impl_->topics = topics;
    }
    request("Subscribe", Json{{"topics", std::move(topics)}});
}

void DriverClient::set_event_handler(EventHandler handler)
{
    std::lock_guard lock(impl_->mu);
    impl_->on_event = std::move(handler);
}

namespace {

std::optional<Envelope> pop_wait(std::mutex& mu, std::condition_variable& cv, std::deque<Envelope>& q,
    std::chrono::milliseconds wait)
{
    std::unique_lock lock(mu);
    if (!cv.wait_for(lock, wait, [&] { return !q.empty(); }))
        return std::nullopt;
    Envelope e = std::move(q.front());
    q.pop_front();
    return e;
}

} // namespace

std::optional<Envelope> DriverClient::next_event(std::chrono::milliseconds wait)
{
    return pop_wait(impl_->mu, impl_->cv, impl_->events, wait);
}

std::optional<Envelope> DriverClient::next_unmatched(std::chrono::milliseconds wait)
{
    return pop_wait(impl_->mu, impl_->cv, impl_->unmatched, wait);
}

void DriverClient::send_raw(std::string frame)
{
    impl_->write(std::move(frame));
}

void DriverClient::set_disconnect_handler(std::function<void()> handler)
{
    std::lock_guard lock(impl_->mu);
    impl_->on_disconnect = std::move(handler);
}

bool DriverClient::connected() const
{
    return impl_->is_connected && !impl_->lost;
}

const Json& DriverClient::welcome() const
{
    return impl_->welcome;
}

void ClientDriverPort::send(std::string type, Json payload, ResponseHandler on_done)
{
    client_.request_async(std::move(type), std::move(payload), std::move(on_done));
}

void ClientDriverPort::subscribe(std::vector<std::string> topics)
{
    client_.subscribe(std::move(topics));
}

void ClientDriverPort::set_event_handler(EventHandler handler)
{
    client_.set_event_handler(std::move(handler));
}

} // namespace pixie::protocol
