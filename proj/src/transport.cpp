#include "sightwarp/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <map>
#include <mutex>

#include "httplib.h"

#include "sightwarp/error.hpp"
#include "sightwarp/session.hpp"

namespace sightwarp {

namespace {

constexpr int kPollSliceMs = 50;

sockaddr_in make_addr(const std::string &host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw Error(ErrorCode::Config, "listen address '" + host + "' is not an IPv4 address");
    }
    return addr;
}

bool send_all(int fd, const std::string &data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        off += static_cast<std::size_t>(n);
    }
    return true;
}

// Moves complete lines out of the buffer.
std::vector<std::string> take_lines(std::string &buffer) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
        lines.emplace_back(buffer, start, nl - start);
    }
    buffer.erase(0, start);
    return lines;
}

const std::string &heartbeat_line() {
    static const std::string line = encode(OutboundMessage{HeartbeatMsg{}}).dump() + "\n";
    return line;
}

} // namespace

LineServer::LineServer(std::string host, std::uint16_t port, std::chrono::milliseconds heartbeat)
    : host_(std::move(host)), port_(port), heartbeat_(heartbeat) {}

LineServer::~LineServer() { stop(); }

void LineServer::start() {
    if (running_) return;
    const sockaddr_in addr = make_addr(host_, port_);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(ErrorCode::Config, std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr *>(&addr), sizeof addr) != 0 ||
        ::listen(listen_fd_, 16) != 0) {
        const std::string why = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw Error(ErrorCode::Config, "cannot listen on " + host_ + ":" + std::to_string(port_) + ": " + why);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr *>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void LineServer::stop() {
    if (!running_.exchange(false)) return;
    if (acceptor_.joinable()) acceptor_.join();
    for (auto &w : workers_) {
        if (w.joinable()) w.join();
    }
    workers_.clear();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
}

void LineServer::accept_loop() {
    while (running_) {
        pollfd p{listen_fd_, POLLIN, 0};
        if (::poll(&p, 1, kPollSliceMs) <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        workers_.emplace_back([this, fd] { serve(fd); });
    }
}

void LineServer::serve(int fd) {
    Session session;
    std::string buffer;
    auto last_activity = std::chrono::steady_clock::now();
    char chunk[65536];
    while (running_) {
        pollfd p{fd, POLLIN, 0};
        const int ready = ::poll(&p, 1, kPollSliceMs);
        const auto now = std::chrono::steady_clock::now();
        if (ready <= 0) {
            if (now - last_activity >= heartbeat_) {
                if (!send_all(fd, heartbeat_line())) break;
                last_activity = now;
            }
            continue;
        }
        // Drain everything already queued so the session sees it as one batch.
        bool closed = false;
        do {
            const ssize_t n = ::recv(fd, chunk, sizeof chunk, MSG_DONTWAIT);
            if (n == 0) {
                closed = true;
                break;
            }
            if (n < 0) {
                if (errno == EINTR) continue;
                if (errno != EAGAIN && errno != EWOULDBLOCK) closed = true;
                break;
            }
            buffer.append(chunk, static_cast<std::size_t>(n));
        } while (true);
        const auto lines = take_lines(buffer);
        if (!lines.empty()) {
            std::string reply;
            for (const auto &line : session.handle_lines(lines)) reply += line + "\n";
            if (!send_all(fd, reply)) break;
            last_activity = now;
        }
        if (closed) break;
    }
    ::close(fd);
}

struct HttpBridge::Impl {
    struct Entry {
        std::mutex mutex;
        Session session;
    };

    httplib::Server server;
    std::thread thread;
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<Entry>> sessions;
    std::uint64_t next_id{1};

    std::shared_ptr<Entry> find(const std::string &id) {
        std::lock_guard lock(mutex);
        const auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }
};

HttpBridge::HttpBridge(std::string host, std::uint16_t port)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)), port_(port) {}

HttpBridge::~HttpBridge() { stop(); }

void HttpBridge::start() {
    if (impl_->thread.joinable()) return;
    auto &srv = impl_->server;
    Impl *impl = impl_.get();

    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    srv.Options(R"(.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });
    srv.Get("/health", [](const httplib::Request &, httplib::Response &res) {
        res.set_content(R"({"ok":true,"protocol":1})", "application/json");
    });
    srv.Post("/sessions", [impl](const httplib::Request &, httplib::Response &res) {
        std::string id;
        {
            std::lock_guard lock(impl->mutex);
            id = std::to_string(impl->next_id++);
            impl->sessions.emplace(id, std::make_shared<Impl::Entry>());
        }
        res.status = 201;
        res.set_content(Json{{"session", id}}.dump(), "application/json");
    });
    srv.Post(R"(/sessions/([0-9]+))", [impl](const httplib::Request &req, httplib::Response &res) {
        const auto entry = impl->find(req.matches[1]);
        if (!entry) {
            res.status = 404;
            res.set_content(encode(OutboundMessage{ErrorMsg{"no-session", "unknown session"}}).dump() + "\n",
                            "application/x-ndjson");
            return;
        }
        std::string body = req.body;
        if (!body.empty() && body.back() != '\n') body += '\n';
        const auto lines = take_lines(body);
        std::string reply;
        {
            std::lock_guard lock(entry->mutex);
            for (const auto &line : entry->session.handle_lines(lines)) reply += line + "\n";
        }
        res.set_content(reply, "application/x-ndjson");
    });
    srv.Delete(R"(/sessions/([0-9]+))", [impl](const httplib::Request &req, httplib::Response &res) {
        std::lock_guard lock(impl->mutex);
        res.status = impl->sessions.erase(req.matches[1]) ? 204 : 404;
    });

    if (port_ == 0) {
        const int p = srv.bind_to_any_port(host_);
        if (p <= 0) throw Error(ErrorCode::Config, "cannot bind HTTP bridge on " + host_);
        port_ = static_cast<std::uint16_t>(p);
    } else if (!srv.bind_to_port(host_, port_)) {
        throw Error(ErrorCode::Config, "cannot bind HTTP bridge on " + host_ + ":" + std::to_string(port_));
    }
    impl_->thread = std::thread([impl] { impl->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpBridge::stop() {
    if (!impl_ || !impl_->thread.joinable()) return;
    impl_->server.stop();
    impl_->thread.join();
}

LineClient::LineClient(const std::string &host, std::uint16_t port) {
    const sockaddr_in addr = make_addr(host, port);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0 || ::connect(fd_, reinterpret_cast<const sockaddr *>(&addr), sizeof addr) != 0) {
        const std::string why = std::strerror(errno);
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
        throw Error(ErrorCode::Config, "cannot connect to " + host + ":" + std::to_string(port) + ": " + why);
    }
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

LineClient::~LineClient() {
    if (fd_ >= 0) ::close(fd_);
}

void LineClient::send(const std::string &line) {
    if (!send_all(fd_, line + "\n")) throw Error(ErrorCode::Config, "connection closed while sending");
}

std::string LineClient::receive(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    char chunk[65536];
    while (true) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return {};
        pollfd p{fd_, POLLIN, 0};
        if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) return {};
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n <= 0) return {};
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

} // namespace sightwarp
