#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include "iealm/cipher.hpp"
#include "iealm/image.hpp"
#include "iealm/wire.hpp"

// The chosen-plaintext encryption oracle the attack queries, in-process and
// over a newline-delimited JSON TCP protocol:
//   {"op":"HELLO"}                              -> {"M":..,"N":..,"mode":..}
//   {"op":"ENCRYPT","stage":..,"data":b64(rgb)} -> {"data":b64} | {"error":..}
//   {"op":"STATS"}                              -> query log as JSON
// Payloads are raw interleaved RGB row-major bytes.

namespace iealm {

enum class OracleMode { Frozen, Faithful };

struct OracleConfig {
    OracleMode mode = OracleMode::Frozen;
    KeyMaterial key;
    int height = 0, width = 0;  // M, N
};

struct QueryLog {
    std::uint64_t total_queries = 0;
    std::map<std::string, std::uint64_t> per_stage;
    std::uint64_t bytes_sent = 0, bytes_received = 0;

    std::string to_json() const;
    static QueryLog from_json(const std::string& text);
};

class Oracle {
public:
    virtual ~Oracle() = default;
    virtual Image query(const Image& img, const std::string& stage) = 0;
    virtual int height() const = 0;
    virtual int width() const = 0;
    virtual QueryLog stats() = 0;
};

// Frozen mode derives the keystream once at construction; faithful mode
// rederives it from the queried image's channel sums on every call.
class LocalOracle : public Oracle {
public:
    explicit LocalOracle(const OracleConfig& cfg);

    Image query(const Image& img, const std::string& stage) override;
    int height() const override { return cfg_.height; }
    int width() const override { return cfg_.width; }
    QueryLog stats() override { return log_; }
    OracleMode mode() const { return cfg_.mode; }

    // ground truth, for tests only
    const Keystream& frozen_keystream() const;

private:
    OracleConfig cfg_;
    Keystream frozen_;
    QueryLog log_;
};

// Blocking server loop; returns when the listener is closed.
void serve(TcpListener& listener, LocalOracle& oracle);

// serve() on a background thread, for tests and embedding.
class OracleServer {
public:
    OracleServer(const std::string& host, std::uint16_t port, const OracleConfig& cfg);
    ~OracleServer();

    std::uint16_t port() const { return listener_.port(); }
    void stop();

private:
    void loop();

    LocalOracle oracle_;
    TcpListener listener_;
    std::thread thread_;
    std::atomic<bool> stopped_{false};
    std::atomic<int> client_fd_{-1};
};

// Client side; query() is byte-identical to the served LocalOracle.
class RemoteOracle : public Oracle {
public:
    RemoteOracle(const std::string& host, std::uint16_t port);

    Image query(const Image& img, const std::string& stage) override;
    int height() const override { return height_; }
    int width() const override { return width_; }
    QueryLog stats() override;  // server-side log via STATS
    const std::string& mode_name() const { return mode_; }

private:
    TcpStream stream_;
    int height_ = 0, width_ = 0;
    std::string mode_;
};

std::unique_ptr<Oracle> connect_oracle(const std::string& endpoint);

}  // namespace iealm
