#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "iealm/oracle.hpp"
#include "json.hpp"

using namespace iealm;

namespace {

Image random_image(int h, int w, std::mt19937_64& rng) {
    Image img = Image::zeros(h, w, 3);
    for (auto& b : img.pixels) b = static_cast<Byte>(rng() & 255);
    return img;
}

OracleConfig frozen_config(int h = 4, int w = 4) {
    OracleConfig cfg;
    cfg.mode = OracleMode::Frozen;
    cfg.key = {1.99, {29676, 9202, 62299}};
    cfg.height = h;
    cfg.width = w;
    return cfg;
}

}  // namespace

TEST_CASE("base64 round-trips binary data") {
    std::mt19937_64 rng(5);
    for (std::size_t len : {0u, 1u, 2u, 3u, 4u, 77u, 300u}) {
        std::vector<std::uint8_t> data(len);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng() & 255);
        CHECK(base64_decode(base64_encode(data)) == data);
    }
    CHECK(base64_encode({'f', 'o', 'o'}) == "Zm9v");
    CHECK_THROWS_AS(base64_decode("a#b"), ProtocolError);
}

TEST_CASE("frozen oracle reuses one keystream across queries") {
    LocalOracle oracle(frozen_config());
    std::mt19937_64 rng(1);
    const Image a = random_image(4, 4, rng);
    const Image b = random_image(4, 4, rng);  // different sums
    const Image ea1 = oracle.query(a, "s");
    const Image eb = oracle.query(b, "s");
    const Image ea2 = oracle.query(a, "s");
    CHECK(ea1.pixels == ea2.pixels);  // deterministic
    // same keystream for both images: decrypting b's cipher with the frozen
    // keystream returns b
    CHECK(decrypt_rgb(eb, oracle.frozen_keystream()).pixels == b.pixels);
}

TEST_CASE("faithful oracle rederives the keystream per query") {
    OracleConfig cfg = frozen_config();
    cfg.mode = OracleMode::Faithful;
    LocalOracle oracle(cfg);
    const Image zeros = Image::zeros(4, 4, 3);
    Image ones = Image::zeros(4, 4, 3);
    for (auto& b : ones.pixels) b = 1;
    const Image ez = oracle.query(zeros, "s");
    const Image eo = oracle.query(ones, "s");
    CHECK(ez.pixels == encrypt_rgb(zeros, cfg.key.b, channel_sums(zeros)).pixels);
    CHECK(eo.pixels == encrypt_rgb(ones, cfg.key.b, channel_sums(ones)).pixels);
}

TEST_CASE("query log counts per stage") {
    LocalOracle oracle(frozen_config());
    std::mt19937_64 rng(2);
    oracle.query(random_image(4, 4, rng), "stage_T2");
    oracle.query(random_image(4, 4, rng), "stage_T2");
    oracle.query(random_image(4, 4, rng), "stage_V");
    const QueryLog log = oracle.stats();
    CHECK(log.total_queries == 3);
    CHECK(log.per_stage.at("stage_T2") == 2);
    CHECK(log.per_stage.at("stage_V") == 1);
}

TEST_CASE("dimension mismatch is rejected") {
    LocalOracle oracle(frozen_config());
    std::mt19937_64 rng(3);
    CHECK_THROWS_AS(oracle.query(random_image(4, 5, rng), "s"), DimensionMismatch);
}

TEST_CASE("wire protocol: HELLO, transparency, STATS, errors") {
    OracleServer server("127.0.0.1", 0, frozen_config(4, 6));
    LocalOracle local(frozen_config(4, 6));
    RemoteOracle remote("127.0.0.1", server.port());

    CHECK(remote.height() == 4);
    CHECK(remote.width() == 6);
    CHECK(remote.mode_name() == "frozen");

    std::mt19937_64 rng(9);
    for (int i = 0; i < 10; ++i) {
        const Image img = random_image(4, 6, rng);
        CHECK(remote.query(img, "stage_T2").pixels == local.query(img, "stage_T2").pixels);
    }
    const QueryLog stats = remote.stats();
    CHECK(stats.total_queries == 10);
    CHECK(stats.per_stage.at("stage_T2") == 10);
    CHECK(stats.bytes_received > 0);
    CHECK(stats.bytes_sent > 0);

    // wrong payload size -> error reply, connection stays usable
    CHECK_THROWS_AS(remote.query(random_image(6, 4, rng), "s"), DimensionMismatch);
    const Image img = random_image(4, 6, rng);
    CHECK(remote.query(img, "s").pixels == local.query(img, "s").pixels);

    server.stop();
}

TEST_CASE("raw protocol: HELLO shape and server-side error replies") {
    OracleServer server("127.0.0.1", 0, frozen_config(4, 4));
    TcpStream conn = tcp_connect("127.0.0.1", server.port());
    std::string line;

    conn.write_all("{\"op\":\"HELLO\"}\n");
    REQUIRE(conn.read_line(line));
    auto hello = nlohmann::json::parse(line);
    CHECK(hello["M"] == 4);
    CHECK(hello["N"] == 4);
    CHECK(hello["mode"] == "frozen");

    // short payload -> error reply, connection survives
    conn.write_all("{\"op\":\"ENCRYPT\",\"data\":\"AAAA\"}\n");
    REQUIRE(conn.read_line(line));
    CHECK(nlohmann::json::parse(line).contains("error"));

    conn.write_all("{\"op\":\"NOPE\"}\n");
    REQUIRE(conn.read_line(line));
    CHECK(nlohmann::json::parse(line).contains("error"));

    conn.write_all("{\"op\":\"STATS\"}\n");
    REQUIRE(conn.read_line(line));
    CHECK(nlohmann::json::parse(line)["total_queries"] == 0);

    server.stop();
}

TEST_CASE("connect_oracle parses endpoints") {
    OracleServer server("127.0.0.1", 0, frozen_config());
    auto oracle = connect_oracle("127.0.0.1:" + std::to_string(server.port()));
    CHECK(oracle->height() == 4);
    CHECK_THROWS_AS(connect_oracle("no-port"), ContractViolation);
    server.stop();
}
