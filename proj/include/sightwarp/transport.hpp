#pragma once

// Network endpoints for Session. Both speak the same newline-delimited JSON
// messages; see docs/protocol.md.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace sightwarp {

/// TCP server, one Session per connection. Lines that arrive in one read are
/// handled as a batch. An idle connection gets a heartbeat every interval.
class LineServer {
public:
    explicit LineServer(std::string host = "127.0.0.1", std::uint16_t port = 0,
                        std::chrono::milliseconds heartbeat = std::chrono::milliseconds(1000));
    ~LineServer();
    LineServer(const LineServer &) = delete;
    LineServer &operator=(const LineServer &) = delete;

    /// Binds and starts accepting in a background thread. Throws Config if the
    /// address cannot be bound.
    void start();
    void stop();
    /// Bound port; meaningful after start().
    std::uint16_t port() const noexcept { return port_; }

private:
    void accept_loop();
    void serve(int fd);

    std::string host_;
    std::uint16_t port_;
    std::chrono::milliseconds heartbeat_;
    int listen_fd_{-1};
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::vector<std::thread> workers_;
};

/// HTTP bridge for browser clients:
///   POST   /sessions        -> {"session": "<id>"}
///   POST   /sessions/<id>   body: NDJSON inbound lines, reply: NDJSON outbound lines
///   DELETE /sessions/<id>
///   GET    /health
/// All responses allow cross-origin requests.
class HttpBridge {
public:
    explicit HttpBridge(std::string host = "127.0.0.1", std::uint16_t port = 0);
    ~HttpBridge();
    HttpBridge(const HttpBridge &) = delete;
    HttpBridge &operator=(const HttpBridge &) = delete;

    void start();
    void stop();
    std::uint16_t port() const noexcept { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string host_;
    std::uint16_t port_;
};

/// Blocking client used by tests and the CLI: sends lines over one TCP
/// connection and reads replies.
class LineClient {
public:
    LineClient(const std::string &host, std::uint16_t port);
    ~LineClient();
    LineClient(const LineClient &) = delete;
    LineClient &operator=(const LineClient &) = delete;

    void send(const std::string &line);
    /// Next line, or empty if nothing arrives within the timeout.
    std::string receive(std::chrono::milliseconds timeout);

private:
    int fd_{-1};
    std::string buffer_;
};

} // namespace sightwarp
