#include "iealm/oracle.hpp"

#include <sys/socket.h>

#include "json.hpp"

namespace iealm {

std::string QueryLog::to_json() const {
    nlohmann::json j;
    j["total_queries"] = total_queries;
    j["per_stage"] = per_stage;
    j["bytes_sent"] = bytes_sent;
    j["bytes_received"] = bytes_received;
    return j.dump();
}

QueryLog QueryLog::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    QueryLog log;
    log.total_queries = j.at("total_queries").get<std::uint64_t>();
    if (j.contains("per_stage"))
        log.per_stage = j.at("per_stage").get<std::map<std::string, std::uint64_t>>();
    log.bytes_sent = j.value("bytes_sent", 0ULL);
    log.bytes_received = j.value("bytes_received", 0ULL);
    return log;
}

LocalOracle::LocalOracle(const OracleConfig& cfg) : cfg_(cfg) {
    if (cfg_.height < 1 || cfg_.width < 1 ||
        static_cast<std::size_t>(cfg_.height) * cfg_.width < 2)
        throw ContractViolation("oracle: image dimensions too small");
    if (cfg_.mode == OracleMode::Frozen) {
        frozen_ = generate_keystream(cfg_.key,
                                     static_cast<std::size_t>(cfg_.height) * cfg_.width);
    }
}

const Keystream& LocalOracle::frozen_keystream() const {
    if (cfg_.mode != OracleMode::Frozen)
        throw ContractViolation("frozen_keystream: oracle is faithful");
    return frozen_;
}

Image LocalOracle::query(const Image& img, const std::string& stage) {
    if (img.height != cfg_.height || img.width != cfg_.width || img.channels != 3)
        throw DimensionMismatch("oracle query: image does not match configured dims");
    ++log_.total_queries;
    ++log_.per_stage[stage.empty() ? "unlabeled" : stage];
    if (cfg_.mode == OracleMode::Frozen) return encrypt_rgb(img, frozen_);
    return encrypt_rgb(img, cfg_.key.b, channel_sums(img));
}

// ---- wire protocol ----------------------------------------------------------

namespace {

std::string handle_request(const std::string& line, LocalOracle& oracle,
                           const QueryLog& closed_wire_log, const TcpStream& client) {
    nlohmann::json reply;
    try {
        const nlohmann::json req = nlohmann::json::parse(line);
        const std::string op = req.at("op").get<std::string>();
        if (op == "HELLO") {
            reply["M"] = oracle.height();
            reply["N"] = oracle.width();
            reply["mode"] = oracle.mode() == OracleMode::Frozen ? "frozen" : "faithful";
        } else if (op == "ENCRYPT") {
            const std::vector<Byte> raw = base64_decode(req.at("data").get<std::string>());
            const std::size_t need =
                3 * static_cast<std::size_t>(oracle.height()) * oracle.width();
            if (raw.size() != need)
                throw DimensionMismatch("ENCRYPT: expected " + std::to_string(need) +
                                        " bytes, got " + std::to_string(raw.size()));
            Image img;
            img.height = oracle.height();
            img.width = oracle.width();
            img.channels = 3;
            img.pixels = raw;
            const Image enc = oracle.query(img, req.value("stage", std::string{}));
            reply["data"] = base64_encode(enc.pixels);
        } else if (op == "STATS") {
            QueryLog log = oracle.stats();
            log.bytes_sent = closed_wire_log.bytes_sent + client.bytes_sent();
            log.bytes_received = closed_wire_log.bytes_received + client.bytes_received();
            return log.to_json() + "\n";
        } else {
            throw ProtocolError("unknown op: " + op);
        }
    } catch (const std::exception& e) {
        reply = nlohmann::json{{"error", e.what()}};
    }
    return reply.dump() + "\n";
}

}  // namespace

namespace {

void serve_connection(TcpStream& client, LocalOracle& oracle, QueryLog& wire_log) {
    std::string line;
    try {
        while (client.read_line(line))
            client.write_all(handle_request(line, oracle, wire_log, client));
    } catch (const ProtocolError&) {
        // drop the connection, keep serving
    } catch (const IoError&) {
    }
    wire_log.bytes_sent += client.bytes_sent();
    wire_log.bytes_received += client.bytes_received();
}

}  // namespace

void serve(TcpListener& listener, LocalOracle& oracle) {
    QueryLog wire_log;  // byte totals of connections that have closed
    for (;;) {
        TcpStream client = listener.accept();
        serve_connection(client, oracle, wire_log);
    }
}

OracleServer::OracleServer(const std::string& host, std::uint16_t port,
                           const OracleConfig& cfg)
    : oracle_(cfg), listener_(host, port) {
    thread_ = std::thread([this] { loop(); });
}

void OracleServer::loop() {
    QueryLog wire_log;
    while (!stopped_) {
        try {
            TcpStream client = listener_.accept();
            client_fd_ = client.native();
            serve_connection(client, oracle_, wire_log);
            client_fd_ = -1;
        } catch (const IoError&) {
            return;  // listener closed by stop()
        }
    }
}

OracleServer::~OracleServer() { stop(); }

void OracleServer::stop() {
    if (stopped_.exchange(true)) return;
    listener_.close();
    const int fd = client_fd_.exchange(-1);
    if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    if (thread_.joinable()) thread_.join();
}

// ---- client ------------------------------------------------------------------

RemoteOracle::RemoteOracle(const std::string& host, std::uint16_t port)
    : stream_(tcp_connect(host, port)) {
    stream_.write_all(nlohmann::json{{"op", "HELLO"}}.dump() + "\n");
    std::string line;
    if (!stream_.read_line(line)) throw ProtocolError("HELLO: server closed connection");
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j.contains("error")) throw ProtocolError("HELLO: " + j["error"].get<std::string>());
    height_ = j.at("M").get<int>();
    width_ = j.at("N").get<int>();
    mode_ = j.at("mode").get<std::string>();
}

Image RemoteOracle::query(const Image& img, const std::string& stage) {
    if (img.height != height_ || img.width != width_ || img.channels != 3)
        throw DimensionMismatch("remote query: image does not match oracle dims");
    nlohmann::json req{{"op", "ENCRYPT"}, {"data", base64_encode(img.pixels)}};
    if (!stage.empty()) req["stage"] = stage;
    stream_.write_all(req.dump() + "\n");
    std::string line;
    if (!stream_.read_line(line)) throw ProtocolError("ENCRYPT: server closed connection");
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j.contains("error"))
        throw ProtocolError("oracle error: " + j["error"].get<std::string>());
    Image out = img;
    out.pixels = base64_decode(j.at("data").get<std::string>());
    if (out.pixels.size() != img.pixels.size())
        throw ProtocolError("ENCRYPT: reply size mismatch");
    return out;
}

QueryLog RemoteOracle::stats() {
    stream_.write_all(nlohmann::json{{"op", "STATS"}}.dump() + "\n");
    std::string line;
    if (!stream_.read_line(line)) throw ProtocolError("STATS: server closed connection");
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j.contains("error"))
        throw ProtocolError("oracle error: " + j["error"].get<std::string>());
    return QueryLog::from_json(line);
}

std::unique_ptr<Oracle> connect_oracle(const std::string& endpoint) {
    const auto [host, port] = parse_endpoint(endpoint);
    return std::make_unique<RemoteOracle>(host, port);
}

}  // namespace iealm
