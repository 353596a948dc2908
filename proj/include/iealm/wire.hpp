#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iealm/errors.hpp"

// Minimal TCP plumbing for the oracle protocol: RAII sockets with
// line-oriented I/O, plus base64 for the binary payloads.

namespace iealm {

std::string base64_encode(const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> base64_decode(const std::string& text);

class TcpStream {
public:
    explicit TcpStream(int fd) : fd_(fd) {}
    TcpStream(TcpStream&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    TcpStream& operator=(TcpStream&&) = delete;
    TcpStream(const TcpStream&) = delete;
    ~TcpStream();

    // Reads up to and including '\n'; returns false on orderly EOF.
    bool read_line(std::string& line);
    void write_all(const std::string& data);

    std::uint64_t bytes_sent() const { return bytes_sent_; }
    std::uint64_t bytes_received() const { return bytes_received_; }
    int native() const { return fd_; }

private:
    int fd_;
    std::string buffer_;
    std::uint64_t bytes_sent_ = 0;
    std::uint64_t bytes_received_ = 0;
};

class TcpListener {
public:
    // host may be empty for INADDR_ANY; port 0 picks an ephemeral port.
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    TcpStream accept();  // throws IoError when the listener is closed
    void close();        // unblocks a pending accept

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

TcpStream tcp_connect(const std::string& host, std::uint16_t port);

// "host:port" -> pair
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace iealm
